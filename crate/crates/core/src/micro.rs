//! Orientation fields on closed 1-manifolds, transversality, half-open lens
//! arcs, epsilon-factors, characteristic cycles and the microlocal index.

use std::collections::{BTreeMap, BTreeSet};

use crate::cellsp::{build_complex, CellComplex, CellSet};
use crate::error::{Error, Result};
use crate::exactlin::{cohomology, torsion, BoundedComplex, CohomologyData, GradedSuperLine, Scalar};
use crate::morse::{morse_filtration, PLFunction};
use crate::sheaf::{sections::regrouping_sign_for, sections_complex, CellularSheaf, ChainMap};

/// Marked vertices `Y`.
pub type MarkedVertexSet = BTreeSet<usize>;

/// Every vertex has exactly two incident edges and there are no higher cells.
pub fn check_one_manifold(x: &CellComplex) -> Result<()> {
    if x.dimension() != Some(1) {
        return Err(Error::NotOneManifold(format!("dimension {:?}", x.dimension())));
    }
    for v in 0..x.vertex_count() {
        let k = x.cofaces(v).len();
        if k != 2 {
            return Err(Error::NotOneManifold(format!("vertex {v} has {k} incident edges")));
        }
    }
    Ok(())
}

/// Terminal vertex of every edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrientationField {
    terminal: BTreeMap<usize, usize>,
}

impl OrientationField {
    /// `pairs` are `(edge cell index, terminal vertex)`; every edge must appear once.
    pub fn new(x: &CellComplex, pairs: &[(usize, usize)]) -> Result<Self> {
        check_one_manifold(x)?;
        let mut terminal = BTreeMap::new();
        for &(e, v) in pairs {
            if e >= x.len() || x.dim(e) != 1 {
                return Err(Error::InvalidOrientation(format!("cell {e} is not an edge")));
            }
            if !x.cell(e).contains(&v) {
                return Err(Error::InvalidOrientation(format!("vertex {v} is not an end of edge {:?}", x.cell(e))));
            }
            if terminal.insert(e, v).is_some() {
                return Err(Error::InvalidOrientation(format!("edge {:?} oriented twice", x.cell(e))));
            }
        }
        if let Some(e) = x.cells_of_dim(1).find(|e| !terminal.contains_key(e)) {
            return Err(Error::InvalidOrientation(format!("edge {:?} has no orientation", x.cell(e))));
        }
        Ok(OrientationField { terminal })
    }

    /// Orientation given by `(edge vertices, terminal)` pairs.
    pub fn from_tuples(x: &CellComplex, pairs: &[(Vec<usize>, usize)]) -> Result<Self> {
        let idx = pairs
            .iter()
            .map(|(c, v)| x.index_of(c).map(|e| (e, *v)).ok_or_else(|| Error::InvalidOrientation(format!("{c:?} is not a cell"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(x, &idx)
    }

    /// Each component oriented as a cycle, leaving its lowest vertex toward
    /// that vertex's lower-index neighbor.
    pub fn consistent(x: &CellComplex) -> Result<Self> {
        check_one_manifold(x)?;
        let mut terminal = BTreeMap::new();
        let mut seen = vec![false; x.vertex_count()];
        for start in 0..x.vertex_count() {
            if seen[start] {
                continue;
            }
            let mut prev = usize::MAX;
            let mut v = start;
            loop {
                seen[v] = true;
                let next = x
                    .cofaces(v)
                    .iter()
                    .map(|&(e, _)| (e, other_end(x, e, v)))
                    .filter(|&(_, w)| w != prev || prev == usize::MAX)
                    .min_by_key(|&(_, w)| w)
                    .expect("two incident edges");
                let (e, w) = next;
                if terminal.contains_key(&e) {
                    break;
                }
                terminal.insert(e, w);
                prev = v;
                v = w;
            }
        }
        Ok(OrientationField { terminal })
    }

    pub fn terminal(&self, e: usize) -> usize {
        self.terminal[&e]
    }

    pub fn initial(&self, x: &CellComplex, e: usize) -> usize {
        other_end(x, e, self.terminal[&e])
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.terminal.iter().map(|(&e, &v)| (e, v))
    }

    /// `-ν`.
    pub fn reversed(&self, x: &CellComplex) -> Self {
        OrientationField { terminal: self.terminal.keys().map(|&e| (e, self.initial(x, e))).collect() }
    }

    /// Edges whose terminal vertex is `v`.
    pub fn incoming(&self, x: &CellComplex, v: usize) -> Vec<usize> {
        x.cofaces(v).iter().map(|&(e, _)| e).filter(|&e| self.terminal[&e] == v).collect()
    }

    /// The unique incoming edge at `v`, when there is exactly one.
    pub fn e_in(&self, x: &CellComplex, v: usize) -> Option<usize> {
        match self.incoming(x, v).as_slice() {
            [e] => Some(*e),
            _ => None,
        }
    }

    /// Every vertex outside `y` is terminal for exactly one incident edge.
    pub fn check_valid_off(&self, x: &CellComplex, y: &MarkedVertexSet) -> Result<()> {
        for v in 0..x.vertex_count() {
            if !y.contains(&v) && self.e_in(x, v).is_none() {
                return Err(Error::InvalidOrientation(format!("vanishes at unmarked vertex {v}")));
            }
        }
        Ok(())
    }
}

fn other_end(x: &CellComplex, e: usize, v: usize) -> usize {
    let c = x.cell(e);
    if c[0] == v {
        c[1]
    } else {
        c[0]
    }
}

fn check_marked(x: &CellComplex, y: &MarkedVertexSet) -> Result<()> {
    match y.iter().find(|&&v| v >= x.vertex_count()) {
        Some(v) => Err(Error::InvalidOrientation(format!("marked vertex {v} out of range"))),
        None => Ok(()),
    }
}

/// `RΓ_c` of the half-open lens `{v, e_in(v)}`.
pub fn lens_complex(x: &CellComplex, f: &CellularSheaf, nu: &OrientationField, v: usize) -> Result<BoundedComplex> {
    let e = nu.e_in(x, v).ok_or_else(|| Error::InvalidOrientation(format!("no unique incoming edge at {v}")))?;
    sections_complex(x, f, &CellSet::from_iter([v, e]))
}

/// Unmarked vertices whose lens complex is not acyclic; empty means transversal.
pub fn check_transversal(x: &CellComplex, f: &CellularSheaf, nu: &OrientationField, y: &MarkedVertexSet) -> Result<Vec<usize>> {
    check_one_manifold(x)?;
    check_marked(x, y)?;
    nu.check_valid_off(x, y)?;
    let mut bad = Vec::new();
    for v in (0..x.vertex_count()).filter(|v| !y.contains(v)) {
        if !cohomology(&lens_complex(x, f, nu, v)?).is_acyclic() {
            bad.push(v);
        }
    }
    Ok(bad)
}

/// One half-open arc per marked vertex `y`, in increasing order of `y`: `y`
/// together with every open segment of `X \ Y` flowing into `y`. With
/// `reverse` the arcs are those of `-ν`.
pub fn lens_arcs(x: &CellComplex, nu: &OrientationField, y: &MarkedVertexSet, reverse: bool) -> Result<Vec<(usize, CellSet)>> {
    check_one_manifold(x)?;
    if y.is_empty() {
        return Err(Error::EmptyMarkedSet);
    }
    check_marked(x, y)?;
    nu.check_valid_off(x, y)?;
    let flipped;
    let nu = if reverse {
        flipped = nu.reversed(x);
        &flipped
    } else {
        nu
    };
    let mut arcs = Vec::with_capacity(y.len());
    let mut covered = 0;
    for &m in y {
        let mut arc = CellSet::from_iter([m]);
        for e in nu.incoming(x, m) {
            let mut e = e;
            loop {
                arc.insert(e);
                let w = nu.initial(x, e);
                if y.contains(&w) {
                    break;
                }
                arc.insert(w);
                e = nu.e_in(x, w).expect("valid off Y");
            }
        }
        covered += arc.len();
        arcs.push((m, arc));
    }
    if covered != x.len() {
        return Err(Error::InvalidOrientation("a component carries no marked vertex".into()));
    }
    Ok(arcs)
}

/// The local factor at a marked vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpsilonFactor {
    pub vertex: usize,
    pub arc: CellSet,
    pub complex: BoundedComplex,
    pub cohomology: CohomologyData,
    /// Degree `χ(arc)`; unit the torsion against the recorded cohomology bases.
    pub line: GradedSuperLine,
}

impl EpsilonFactor {
    pub fn torsion(&self) -> &Scalar {
        self.line.unit()
    }

    pub fn euler(&self) -> i64 {
        self.line.degree()
    }
}

fn factor_on(x: &CellComplex, f: &CellularSheaf, vertex: usize, arc: CellSet) -> Result<EpsilonFactor> {
    let complex = sections_complex(x, f, &arc)?;
    let h = cohomology(&complex);
    let line = GradedSuperLine::new(complex.euler_characteristic(), torsion(&complex, &h)?)?;
    Ok(EpsilonFactor { vertex, arc, complex, cohomology: h, line })
}

fn require_transversal(x: &CellComplex, f: &CellularSheaf, nu: &OrientationField, y: &MarkedVertexSet) -> Result<()> {
    let bad = check_transversal(x, f, nu, y)?;
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::NotTransversal(bad))
    }
}

/// Factor at `y ∈ Y`; refuses when `F` is not transversal off `Y`.
pub fn epsilon_factor(x: &CellComplex, f: &CellularSheaf, nu: &OrientationField, y: &MarkedVertexSet, vertex: usize, reverse: bool) -> Result<EpsilonFactor> {
    if !y.contains(&vertex) {
        return Err(Error::InvalidOrientation(format!("vertex {vertex} is not marked")));
    }
    require_transversal(x, f, nu, y)?;
    let (_, arc) = lens_arcs(x, nu, y, reverse)?.into_iter().find(|(m, _)| *m == vertex).expect("one arc per marked vertex");
    factor_on(x, f, vertex, arc)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpsilonFactorization {
    pub factors: Vec<EpsilonFactor>,
    pub global: BoundedComplex,
    pub global_cohomology: CohomologyData,
    pub global_torsion: Scalar,
    /// Chain-level sign identifying `det C(X)` with `⊗_α det C(arc_α)`.
    pub regrouping_sign: Scalar,
    /// `regrouping_sign · Π τ(factor) / τ(X)`.
    pub scalar: Scalar,
    /// `RΓ(X, F)` and every factor are acyclic, so `scalar` is basis-free.
    pub acyclic: bool,
}

pub fn epsilon_factorization(x: &CellComplex, f: &CellularSheaf, nu: &OrientationField, y: &MarkedVertexSet, reverse: bool) -> Result<EpsilonFactorization> {
    require_transversal(x, f, nu, y)?;
    let arcs = lens_arcs(x, nu, y, reverse)?;
    let factors = arcs.into_iter().map(|(v, arc)| factor_on(x, f, v, arc)).collect::<Result<Vec<_>>>()?;
    let all = CellSet::all(x);
    let global = sections_complex(x, f, &all)?;
    let global_cohomology = cohomology(&global);
    let global_torsion = torsion(&global, &global_cohomology)?;
    let parts: Vec<CellSet> = factors.iter().map(|e| e.arc.clone()).collect();
    let regrouping_sign = regrouping_sign_for(x, f, &all, &parts)?;
    let mut scalar = &regrouping_sign * &global_torsion.inv()?;
    for e in &factors {
        scalar = &scalar * e.torsion();
    }
    let acyclic = global_cohomology.is_acyclic() && factors.iter().all(|e| e.cohomology.is_acyclic());
    Ok(EpsilonFactorization { factors, global, global_cohomology, global_torsion, regrouping_sign, scalar, acyclic })
}

/// Multiplicities at a vertex: rays toward the higher- and lower-index
/// neighbor, and the zero section.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VertexMultiplicity {
    pub vertex: usize,
    pub plus: i64,
    pub minus: i64,
    pub zero: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LagrangianCycle1D {
    /// `(edge, χ(F_e))`.
    pub edges: Vec<(usize, i64)>,
    pub vertices: Vec<VertexMultiplicity>,
}

/// `m_v^± = χ(RΓ_c({v, e±}))` where `e+` joins `v` to its higher-index
/// neighbor and `e-` to its lower-index one.
pub fn characteristic_cycle(x: &CellComplex, f: &CellularSheaf) -> Result<LagrangianCycle1D> {
    check_one_manifold(x)?;
    let chi = |c: usize| f.stalk(c).euler_characteristic();
    let edges = x.cells_of_dim(1).map(|e| (e, chi(e))).collect();
    let vertices = (0..x.vertex_count())
        .map(|v| {
            let mut inc: Vec<(usize, usize)> = x.cofaces(v).iter().map(|&(e, _)| (other_end(x, e, v), e)).collect();
            inc.sort_unstable();
            let lens = |e: usize| chi(v) - chi(e);
            VertexMultiplicity { vertex: v, plus: lens(inc[1].1), minus: lens(inc[0].1), zero: chi(v) }
        })
        .collect();
    Ok(LagrangianCycle1D { edges, vertices })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MicrolocalIndex {
    pub total: i64,
    /// `(vertex, χ(M_v))` in increasing order of `f`.
    pub per_vertex: Vec<(usize, i64)>,
}

/// `Σ_v χ(M_v(F, f))` on a complex of dimension at most 2.
pub fn microlocal_index(x: &CellComplex, f: &CellularSheaf, func: &PLFunction) -> Result<MicrolocalIndex> {
    if x.dimension().is_some_and(|d| d > 2) {
        return Err(Error::InvalidParameters("microlocal index needs a complex of dimension at most 2".into()));
    }
    let m = morse_filtration(x, f, func)?;
    let per_vertex: Vec<(usize, i64)> = m.data.iter().map(|d| (d.vertex, d.euler)).collect();
    Ok(MicrolocalIndex { total: per_vertex.iter().map(|p| p.1).sum(), per_vertex })
}

/// Subdivides `edge = (a, b)` at a new vertex `w` (index = old vertex count).
/// The new cells carry the edge stalk with identity maps from `w`; `ν`
/// orients both halves like the old edge.
pub fn subdivide_edge(
    x: &CellComplex,
    f: &CellularSheaf,
    nu: &OrientationField,
    edge: usize,
) -> Result<(CellComplex, CellularSheaf, OrientationField)> {
    check_one_manifold(x)?;
    if edge >= x.len() || x.dim(edge) != 1 {
        return Err(Error::InvalidParameters(format!("cell {edge} is not an edge")));
    }
    let (a, b) = (x.cell(edge)[0], x.cell(edge)[1]);
    let w = x.vertex_count();
    let mut cells: Vec<Vec<usize>> = x.cells().iter().filter(|c| c.as_slice() != [a, b]).cloned().collect();
    cells.extend([vec![w], vec![a, w], vec![b, w]]);
    let y = build_complex(w + 1, &cells)?;
    let old = |c: &[usize]| -> usize {
        if c.contains(&w) {
            edge
        } else {
            x.index_of(c).expect("old cell")
        }
    };
    let stalks: Vec<BoundedComplex> = y.cells().iter().map(|c| f.stalk(old(c)).clone()).collect();
    let ident = |c: usize| -> ChainMap {
        let s = f.stalk(c);
        s.degrees().filter(|&n| s.rank(n) > 0).map(|n| (n, crate::exactlin::Matrix::identity(f.field(), s.rank(n)))).collect()
    };
    let mut maps = BTreeMap::new();
    for t in 0..y.len() {
        for &(s, _) in y.faces(t) {
            let (cs, ct) = (y.cell(s), y.cell(t));
            let m = if cs == [w] {
                ident(edge)
            } else {
                let key = (old(cs), old(ct));
                f.maps().get(&key).cloned().unwrap_or_default()
            };
            maps.insert((s, t), m);
        }
    }
    let g = CellularSheaf::from_parts(&y, f.field(), stalks, maps)?;
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for (e, t) in nu.pairs() {
        if e != edge {
            pairs.push((y.index_of(x.cell(e)).expect("old edge"), t));
        }
    }
    let toward_b = nu.terminal(edge) == b;
    let (aw, bw) = (y.index_of(&[a, w]).expect("new"), y.index_of(&[b, w]).expect("new"));
    if toward_b {
        pairs.extend([(aw, w), (bw, b)]);
    } else {
        pairs.extend([(bw, w), (aw, a)]);
    }
    Ok((y.clone(), g, OrientationField::new(&y, &pairs)?))
}
