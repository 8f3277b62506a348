//! Seeded random generators for complexes, sheaves, functions, orientation
//! fields and marked sets. Sheaves are valid by construction.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cellsp::{build_complex, closure, star, CellComplex, CellSet};
use crate::error::{Error, Result};
use crate::exactlin::{BoundedComplex, Field, Matrix};
use crate::micro::{check_one_manifold, MarkedVertexSet, OrientationField};
use crate::morse::PLFunction;
use crate::sheaf::{CellularSheaf, ChainMap};

/// Independent deterministic stream for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Matrix with entries drawn from `-3..=3`.
pub fn random_matrix<R: Rng>(rng: &mut R, field: Field, rows: usize, cols: usize) -> Matrix {
    let mut m = Matrix::zeros(field, rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m.set(i, j, field.from_i64(rng.gen_range(-3..=3)));
        }
    }
    m
}

/// Invertible matrix, by rejection.
pub fn random_invertible<R: Rng>(rng: &mut R, field: Field, n: usize) -> Matrix {
    loop {
        let m = random_matrix(rng, field, n, n);
        if !m.determinant().expect("square").is_zero() {
            return m;
        }
    }
}

/// Matrix of the given rank: a product of random `rows x rank` and `rank x cols` factors.
pub fn random_matrix_of_rank<R: Rng>(rng: &mut R, field: Field, rows: usize, cols: usize, rank: usize) -> Matrix {
    let rank = rank.min(rows).min(cols);
    loop {
        let a = random_matrix(rng, field, rows, rank);
        let b = random_matrix(rng, field, rank, cols);
        let m = a.mul(&b).expect("shapes agree");
        if m.rank() == rank {
            return m;
        }
    }
}

fn stalk(field: Field, rank: usize) -> BoundedComplex {
    if rank == 0 {
        BoundedComplex::zero(field)
    } else {
        BoundedComplex::concentrated(field, 0, rank)
    }
}

fn map_in_degree_0(m: Matrix) -> ChainMap {
    if m.rows() == 0 || m.cols() == 0 {
        ChainMap::new()
    } else {
        BTreeMap::from([(0, m)])
    }
}

/// Arbitrary stalk ranks in `0..=max_rank` and arbitrary maps on a 1-complex
/// (no squares to complete). Stalks sit in degree 0, then the whole sheaf is
/// shifted by a random amount in `-1..=1`.
pub fn random_circle_sheaf<R: Rng>(rng: &mut R, x: &CellComplex, field: Field, max_rank: usize) -> Result<CellularSheaf> {
    one_dimensional(x)?;
    let ranks: Vec<usize> = (0..x.len()).map(|_| rng.gen_range(0..=max_rank)).collect();
    let mut maps = BTreeMap::new();
    for e in x.cells_of_dim(1) {
        for &(v, _) in x.faces(e) {
            maps.insert((v, e), map_in_degree_0(random_matrix(rng, field, ranks[e], ranks[v])));
        }
    }
    let f = CellularSheaf::new(x, field, ranks.iter().map(|&r| stalk(field, r)).collect(), maps)?;
    Ok(f.shift(rng.gen_range(-1..=1)))
}

/// Like [`random_circle_sheaf`], but transversal to `ν` off `y`: at every
/// unmarked `v` the map into `e_in(v)` is invertible.
pub fn random_transversal_circle_sheaf<R: Rng>(
    rng: &mut R,
    x: &CellComplex,
    field: Field,
    max_rank: usize,
    nu: &OrientationField,
    y: &MarkedVertexSet,
) -> Result<CellularSheaf> {
    check_one_manifold(x)?;
    nu.check_valid_off(x, y)?;
    let mut ranks: Vec<usize> = (0..x.len()).map(|_| rng.gen_range(0..=max_rank)).collect();
    for v in 0..x.vertex_count() {
        if !y.contains(&v) {
            let e = nu.e_in(x, v).expect("valid off Y");
            ranks[e] = ranks[v];
        }
    }
    let mut maps = BTreeMap::new();
    for e in x.cells_of_dim(1) {
        for &(v, _) in x.faces(e) {
            let m = if !y.contains(&v) && nu.e_in(x, v) == Some(e) {
                random_invertible(rng, field, ranks[v])
            } else {
                random_matrix(rng, field, ranks[e], ranks[v])
            };
            maps.insert((v, e), map_in_degree_0(m));
        }
    }
    let f = CellularSheaf::new(x, field, ranks.iter().map(|&r| stalk(field, r)).collect(), maps)?;
    Ok(f.shift(rng.gen_range(-1..=1)))
}

/// Rank-`rank` local system: every map invertible.
pub fn random_local_system<R: Rng>(rng: &mut R, x: &CellComplex, field: Field, rank: usize) -> Result<CellularSheaf> {
    one_dimensional(x)?;
    let mut maps = BTreeMap::new();
    for e in x.cells_of_dim(1) {
        for &(v, _) in x.faces(e) {
            maps.insert((v, e), map_in_degree_0(random_invertible(rng, field, rank)));
        }
    }
    let f = CellularSheaf::new(x, field, (0..x.len()).map(|_| stalk(field, rank)).collect(), maps)?;
    Ok(f.shift(rng.gen_range(-1..=1)))
}

fn one_dimensional(x: &CellComplex) -> Result<()> {
    if x.dimension().is_some_and(|d| d > 1) {
        return Err(Error::InvalidParameters("expected a complex of dimension at most 1".into()));
    }
    Ok(())
}

/// Nonempty locally closed set: closure of random cells intersected with the
/// star of random cells.
pub fn random_locally_closed<R: Rng>(rng: &mut R, x: &CellComplex) -> CellSet {
    loop {
        let a: CellSet = (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(0..x.len())).collect();
        let b: CellSet = (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(0..x.len())).collect();
        let z = closure(x, &a).intersection(&star(x, &b));
        if !z.is_empty() {
            return z;
        }
    }
}

/// Direct sum of `terms` sheaves `k_Z[s]` (each occasionally replaced by the
/// acyclic stalk `[k → k]` on `Z`), followed by a random gauge change on every
/// stalk. Works on any complex.
pub fn random_surface_sheaf<R: Rng>(rng: &mut R, x: &CellComplex, field: Field, terms: usize) -> Result<CellularSheaf> {
    let mut f = CellularSheaf::from_parts(x, field, vec![BoundedComplex::zero(field); x.len()], BTreeMap::new())?;
    for _ in 0..terms {
        let z = random_locally_closed(rng, x);
        let shift = rng.gen_range(-1..=1);
        let term = if rng.gen_bool(0.2) {
            acyclic_on(x, field, &z)?
        } else {
            CellularSheaf::constant_on(x, field, &z, 1, 0)?
        };
        f = f.direct_sum(&term.shift(shift));
    }
    let gauges: Vec<BTreeMap<i64, Matrix>> = f
        .stalks()
        .iter()
        .map(|s| s.degrees().map(|n| (n, random_invertible(rng, field, s.rank(n)))).collect())
        .collect();
    f.gauge(x, &|c, n| gauges[c].get(&n).cloned().unwrap_or_else(|| Matrix::identity(field, 0)))
}

fn acyclic_on(x: &CellComplex, field: Field, z: &CellSet) -> Result<CellularSheaf> {
    let pair = BoundedComplex::two_term(0, Matrix::identity(field, 1))?;
    let stalks = (0..x.len()).map(|c| if z.contains(c) { pair.clone() } else { BoundedComplex::zero(field) }).collect();
    let mut maps = BTreeMap::new();
    for t in z.iter() {
        for &(s, _) in x.faces(t) {
            if z.contains(s) {
                maps.insert((s, t), BTreeMap::from([(0, Matrix::identity(field, 1)), (1, Matrix::identity(field, 1))]));
            }
        }
    }
    CellularSheaf::new(x, field, stalks, maps)
}

/// Distinct rationals `π(v) + a/b` with `π` a random permutation and `0 <= a < b`.
pub fn random_pl_function<R: Rng>(rng: &mut R, x: &CellComplex) -> Result<PLFunction> {
    let mut perm: Vec<i64> = (0..x.vertex_count() as i64).collect();
    perm.shuffle(rng);
    let values = perm
        .into_iter()
        .map(|k| {
            let b: i64 = rng.gen_range(1..=9);
            let a: i64 = rng.gen_range(0..b);
            BigRational::new(BigInt::from(k * b + a), BigInt::from(b))
        })
        .collect();
    PLFunction::new(x, values)
}

/// A generic function with the same up/down pattern as `f` at `v`: `f` is
/// replaced by fresh values keeping every neighbor of `v` on its side.
pub fn random_function_like<R: Rng>(rng: &mut R, x: &CellComplex, f: &PLFunction, v: usize) -> Result<PLFunction> {
    let mut neighbors = vec![false; x.vertex_count()];
    for c in 0..x.len() {
        if x.cell(c).contains(&v) {
            for &w in x.cell(c) {
                neighbors[w] = true;
            }
        }
    }
    let big = BigRational::from_integer(BigInt::from(10 * x.vertex_count() as i64 + 10));
    let fv = f.value(v).clone();
    loop {
        let g = random_pl_function(rng, x)?;
        let shift = BigRational::new(BigInt::from(rng.gen_range(-30..30)), BigInt::from(7));
        let values = (0..x.vertex_count())
            .map(|w| {
                if w == v {
                    fv.clone()
                } else if neighbors[w] {
                    // squeeze into the side of v that w occupies
                    let offset = (g.value(w).clone() + BigRational::from_integer(1.into())) / &big;
                    if f.value(w) > &fv {
                        &fv + offset
                    } else {
                        &fv - offset
                    }
                } else {
                    g.value(w).clone() + &shift
                }
            })
            .collect();
        match PLFunction::new(x, values) {
            Err(Error::NonGeneric(..)) => continue,
            other => return other,
        }
    }
}

/// Marked set meeting every component of a 1-manifold, each vertex kept with
/// probability `density`.
pub fn random_marked_set<R: Rng>(rng: &mut R, x: &CellComplex, density: f64) -> Result<MarkedVertexSet> {
    let comps = components(x);
    let mut y = MarkedVertexSet::new();
    for comp in comps {
        let mut any = false;
        for &v in &comp {
            if rng.gen_bool(density.clamp(0.0, 1.0)) {
                y.insert(v);
                any = true;
            }
        }
        if !any {
            y.insert(*comp.choose(rng).expect("components are nonempty"));
        }
    }
    Ok(y)
}

/// Orientation valid off `y`: each open segment between consecutive marked
/// vertices (or each unmarked component) gets a random direction.
pub fn random_orientation<R: Rng>(rng: &mut R, x: &CellComplex, y: &MarkedVertexSet) -> Result<OrientationField> {
    let base = OrientationField::consistent(x)?;
    let mut pairs = Vec::new();
    for comp in components(x) {
        // walk the component along the consistent orientation
        let start = comp.iter().copied().find(|v| y.contains(v)).unwrap_or(comp[0]);
        let mut walk = Vec::new();
        let mut v = start;
        loop {
            let e = x.cofaces(v).iter().map(|&(e, _)| e).find(|&e| base.initial(x, e) == v).expect("one outgoing edge");
            let w = base.terminal(e);
            walk.push((e, v, w));
            v = w;
            if v == start {
                break;
            }
        }
        let mut flip = rng.gen_bool(0.5);
        for (i, &(e, a, b)) in walk.iter().enumerate() {
            if i > 0 && y.contains(&a) {
                flip = rng.gen_bool(0.5);
            }
            pairs.push((e, if flip { a } else { b }));
        }
    }
    OrientationField::new(x, &pairs)
}

/// Connected components of a complex, as sorted vertex lists.
pub fn components(x: &CellComplex) -> Vec<Vec<usize>> {
    let mut comp = vec![usize::MAX; x.vertex_count()];
    let mut out = Vec::new();
    for s in 0..x.vertex_count() {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut stack = vec![s];
        comp[s] = id;
        let mut verts = Vec::new();
        while let Some(v) = stack.pop() {
            verts.push(v);
            for &(e, _) in x.cofaces(v) {
                for &w in x.cell(e) {
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        stack.push(w);
                    }
                }
            }
        }
        verts.sort_unstable();
        out.push(verts);
    }
    out
}

/// Random triangulated closed surface with at most `max_cells` cells: the
/// tetrahedron boundary or the 7-vertex torus, refined by random stellar
/// subdivisions of triangles.
pub fn random_surface<R: Rng>(rng: &mut R, max_cells: usize) -> Result<CellComplex> {
    let torus = max_cells >= 42 && rng.gen_bool(0.3);
    let mut tris: Vec<[usize; 3]> = if torus {
        // 7-vertex torus: triangles {i, i+1, i+3} and {i, i+2, i+3} mod 7
        (0..7).flat_map(|i| [[i, (i + 1) % 7, (i + 3) % 7], [i, (i + 2) % 7, (i + 3) % 7]]).collect()
    } else {
        vec![[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]
    };
    let mut verts = if torus { 7 } else { 4 };
    if max_cells < 14 {
        return Err(Error::InvalidParameters(format!("a closed surface needs at least 14 cells, got {max_cells}")));
    }
    let base = if torus { 42 } else { 14 };
    let max_subdivisions = (max_cells - base) / 6;
    for _ in 0..rng.gen_range(0..=max_subdivisions) {
        let k = rng.gen_range(0..tris.len());
        let [a, b, c] = tris.swap_remove(k);
        let w = verts;
        verts += 1;
        tris.extend([[a, b, w], [a, c, w], [b, c, w]]);
    }
    surface_from_triangles(verts, &tris)
}

/// Complex generated by triangles (all faces added).
pub fn surface_from_triangles(vertices: usize, tris: &[[usize; 3]]) -> Result<CellComplex> {
    let mut cells = std::collections::BTreeSet::new();
    for t in tris {
        let mut t = t.to_vec();
        t.sort_unstable();
        cells.insert(t.clone());
        for i in 0..3 {
            let mut e = t.clone();
            e.remove(i);
            cells.insert(e);
        }
    }
    for v in 0..vertices {
        cells.insert(vec![v]);
    }
    build_complex(vertices, &cells.into_iter().collect::<Vec<_>>())
}
