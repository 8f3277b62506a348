//! Cellular sheaves with complex-valued stalks, their compactly supported
//! section complexes over locally closed cell sets, and Euler functions.

pub(crate) mod sections;

pub use sections::{euler_function, filtration_gr, global_euler, sections_complex, sections_layout, EulerFunction, FiltrationGr, SectionsLayout};

use std::collections::BTreeMap;
use std::fmt;

use crate::cellsp::{is_locally_closed, CellComplex, CellSet};
use crate::error::{Error, Result};
use crate::exactlin::{BoundedComplex, Field, Matrix};

/// Degreewise generization map `stalk(σ) → stalk(τ)`; missing degrees are zero.
pub type ChainMap = BTreeMap<i64, Matrix>;

/// A stalk complex on every cell and a chain map for every codimension-1 face
/// relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellularSheaf {
    field: Field,
    stalks: Vec<BoundedComplex>,
    maps: BTreeMap<(usize, usize), ChainMap>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// `ρ_{στ}` fails to commute with the stalk differentials in `degree`.
    NotChainMap { face: usize, coface: usize, degree: i64 },
    /// The two paths `σ → τ₁ → υ` and `σ → τ₂ → υ` disagree in `degree`.
    NonCommutingSquare { face: usize, coface: usize, via: (usize, usize), degree: i64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotChainMap { face, coface, degree } => {
                write!(f, "map {face} -> {coface} is not a chain map in degree {degree}")
            }
            Violation::NonCommutingSquare { face, coface, via, degree } => {
                write!(f, "square {face} -> {{{}, {}}} -> {coface} does not commute in degree {degree}", via.0, via.1)
            }
        }
    }
}

impl CellularSheaf {
    /// Checks shapes only; see [`validate_sheaf`] for the sheaf conditions.
    pub fn from_parts(
        x: &CellComplex,
        field: Field,
        stalks: Vec<BoundedComplex>,
        maps: BTreeMap<(usize, usize), ChainMap>,
    ) -> Result<Self> {
        if stalks.len() != x.len() {
            return Err(Error::DimensionMismatch(format!("{} stalks for {} cells", stalks.len(), x.len())));
        }
        if let Some(k) = stalks.iter().position(|s| s.field() != field && !s.is_zero()) {
            return Err(Error::DimensionMismatch(format!("stalk on cell {k} is over {}", stalks[k].field())));
        }
        for (&(s, t), m) in &maps {
            if t >= x.len() || x.incidence(s, t).is_none() {
                return Err(Error::InvalidSheaf(format!("no face relation {s} -> {t}")));
            }
            for (&n, mat) in m {
                let (r, c) = (stalks[t].rank(n), stalks[s].rank(n));
                if mat.rows() != r || mat.cols() != c || mat.field() != field {
                    return Err(Error::DimensionMismatch(format!(
                        "map {s} -> {t} in degree {n} is {}x{}, expected {r}x{c}",
                        mat.rows(),
                        mat.cols()
                    )));
                }
            }
        }
        let stalks = stalks.into_iter().map(|s| if s.is_zero() { BoundedComplex::zero(field) } else { s }).collect();
        Ok(CellularSheaf { field, stalks, maps })
    }

    /// Shapes and sheaf conditions.
    pub fn new(x: &CellComplex, field: Field, stalks: Vec<BoundedComplex>, maps: BTreeMap<(usize, usize), ChainMap>) -> Result<Self> {
        let f = Self::from_parts(x, field, stalks, maps)?;
        let v = validate_sheaf(x, &f);
        match v.first() {
            None => Ok(f),
            Some(e) => Err(Error::InvalidSheaf(e.to_string())),
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn stalk(&self, cell: usize) -> &BoundedComplex {
        &self.stalks[cell]
    }

    pub fn stalks(&self) -> &[BoundedComplex] {
        &self.stalks
    }

    pub fn maps(&self) -> &BTreeMap<(usize, usize), ChainMap> {
        &self.maps
    }

    /// `ρ_{στ}` in degree `n`.
    pub fn rho(&self, s: usize, t: usize, n: i64) -> Matrix {
        self.maps
            .get(&(s, t))
            .and_then(|m| m.get(&n))
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(self.field, self.stalks[t].rank(n), self.stalks[s].rank(n)))
    }

    /// Union of the degree ranges of all stalks, if any stalk is nonzero.
    pub fn degree_range(&self) -> Option<(i64, i64)> {
        self.stalks.iter().filter(|s| !s.is_zero()).fold(None, |acc, s| match acc {
            None => Some((s.lo(), s.hi())),
            Some((a, b)) => Some((a.min(s.lo()), b.max(s.hi()))),
        })
    }

    /// Constant sheaf `k` in degree 0.
    pub fn constant(x: &CellComplex, field: Field) -> Self {
        Self::constant_on(x, field, &CellSet::all(x), 1, 0).expect("the whole complex is locally closed")
    }

    /// `k^rank` in `degree` on the cells of a locally closed `z`, identity maps
    /// inside `z`, zero elsewhere.
    pub fn constant_on(x: &CellComplex, field: Field, z: &CellSet, rank: usize, degree: i64) -> Result<Self> {
        if !is_locally_closed(x, z) {
            return Err(Error::NotLocallyClosed);
        }
        let stalks = (0..x.len())
            .map(|c| if z.contains(c) && rank > 0 { BoundedComplex::concentrated(field, degree, rank) } else { BoundedComplex::zero(field) })
            .collect();
        let mut maps = BTreeMap::new();
        for t in z.iter() {
            for &(s, _) in x.faces(t) {
                if z.contains(s) && rank > 0 {
                    maps.insert((s, t), BTreeMap::from([(degree, Matrix::identity(field, rank))]));
                }
            }
        }
        Ok(CellularSheaf { field, stalks, maps })
    }

    /// `k^rank` in degree 0 on a single cell.
    pub fn skyscraper(x: &CellComplex, field: Field, cell: usize, rank: usize) -> Result<Self> {
        if cell >= x.len() {
            return Err(Error::InvalidCell(vec![cell], "no such cell index".into()));
        }
        Self::constant_on(x, field, &CellSet::from_iter([cell]), rank, 0)
    }

    /// Stalkwise direct sum.
    pub fn direct_sum(&self, other: &CellularSheaf) -> CellularSheaf {
        let stalks: Vec<BoundedComplex> = self.stalks.iter().zip(&other.stalks).map(|(a, b)| a.direct_sum(b)).collect();
        let mut maps = BTreeMap::new();
        let keys: std::collections::BTreeSet<(usize, usize)> = self.maps.keys().chain(other.maps.keys()).copied().collect();
        for (s, t) in keys {
            let mut m = ChainMap::new();
            let lo = stalks[s].lo().min(stalks[t].lo());
            let hi = stalks[s].hi().max(stalks[t].hi());
            for n in lo..=hi {
                let d = self.rho(s, t, n).direct_sum(&other.rho(s, t, n));
                if d.rows() > 0 && d.cols() > 0 {
                    m.insert(n, d);
                }
            }
            maps.insert((s, t), m);
        }
        CellularSheaf { field: self.field, stalks, maps }
    }

    /// Shifted sheaf `F[k]`: stalks shifted, maps reindexed.
    pub fn shift(&self, k: i64) -> CellularSheaf {
        let stalks = self.stalks.iter().map(|s| s.shift(k)).collect();
        let maps = self.maps.iter().map(|(&e, m)| (e, m.iter().map(|(&n, a)| (n - k, a.clone())).collect())).collect();
        CellularSheaf { field: self.field, stalks, maps }
    }

    /// Same sheaf with every map replaced by `g_τ ρ_{στ} g_σ^{-1}`, where
    /// `gauge(cell)` gives degreewise invertible matrices commuting with the
    /// stalk differential. Stalk differentials are conjugated accordingly.
    pub fn gauge(&self, x: &CellComplex, gauge: &dyn Fn(usize, i64) -> Matrix) -> Result<CellularSheaf> {
        let field = self.field;
        let mut stalks = Vec::with_capacity(self.stalks.len());
        let mut inverses: Vec<BTreeMap<i64, Matrix>> = Vec::with_capacity(self.stalks.len());
        for (c, s) in self.stalks.iter().enumerate() {
            let mut inv = BTreeMap::new();
            if s.is_zero() {
                stalks.push(s.clone());
                inverses.push(inv);
                continue;
            }
            for n in s.degrees() {
                let g = gauge(c, n);
                let gi = g.solve(&Matrix::identity(field, g.rows()))?;
                inv.insert(n, gi);
            }
            let diffs = (s.lo()..s.hi())
                .map(|n| gauge(c, n + 1).mul(&s.differential(n))?.mul(&inv[&n]))
                .collect::<Result<Vec<_>>>()?;
            let labels = s.degrees().map(|n| s.labels(n).to_vec()).collect();
            stalks.push(BoundedComplex::with_labels(field, s.lo(), labels, diffs)?);
            inverses.push(inv);
        }
        let mut maps = BTreeMap::new();
        for (&(s, t), m) in &self.maps {
            let mut out = ChainMap::new();
            for (&n, a) in m {
                if a.rows() == 0 || a.cols() == 0 {
                    continue;
                }
                out.insert(n, gauge(t, n).mul(a)?.mul(&inverses[s][&n])?);
            }
            maps.insert((s, t), out);
        }
        CellularSheaf::from_parts(x, field, stalks, maps)
    }
}

/// Lists every chain-map and commuting-square violation; empty means valid.
pub fn validate_sheaf(x: &CellComplex, f: &CellularSheaf) -> Vec<Violation> {
    let mut out = Vec::new();
    let range = match f.degree_range() {
        Some(r) => r,
        None => return out,
    };
    for t in 0..x.len() {
        for &(s, _) in x.faces(t) {
            for n in range.0..=range.1 {
                let lhs = f.stalk(t).differential(n).mul(&f.rho(s, t, n)).expect("shapes checked");
                let rhs = f.rho(s, t, n + 1).mul(&f.stalk(s).differential(n)).expect("shapes checked");
                if lhs != rhs {
                    out.push(Violation::NotChainMap { face: s, coface: t, degree: n });
                }
            }
        }
    }
    for u in 0..x.len() {
        if x.dim(u) < 2 {
            continue;
        }
        let mut via: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &(t, _) in x.faces(u) {
            for &(s, _) in x.faces(t) {
                via.entry(s).or_default().push(t);
            }
        }
        for (s, ts) in via {
            let (t1, t2) = (ts[0], ts[1]);
            for n in range.0..=range.1 {
                let p1 = f.rho(t1, u, n).mul(&f.rho(s, t1, n)).expect("shapes checked");
                let p2 = f.rho(t2, u, n).mul(&f.rho(s, t2, n)).expect("shapes checked");
                if p1 != p2 {
                    out.push(Violation::NonCommutingSquare { face: s, coface: u, via: (t1, t2), degree: n });
                }
            }
        }
    }
    out
}
