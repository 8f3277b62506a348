//! Independent oracles shared by the integration tests. Nothing here calls the
//! library's cochain assembly, torsion, sign or witness routines; only matrix
//! primitives (rank, determinant, products) and data accessors.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use epsilon_cells::exactlin::{BoundedComplex, CohomologyData, Field, Matrix, Scalar};
use epsilon_cells::generate::random_invertible;
use epsilon_cells::{CellComplex, CellSet, CellularSheaf, OrientationField};
use rand::Rng;

/// Letters of one total degree.
pub type Graded<T> = (i64, Vec<T>);

/// A sections basis vector: total degree, cell, index in the stalk.
pub type Letter = (i64, usize, usize);

pub fn choose2(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Cohomology representatives per degree of `c`, as `r_n x h_n` matrices.
pub fn reps(c: &BoundedComplex, h: &CohomologyData) -> Vec<Matrix> {
    c.degrees()
        .map(|n| {
            h.degrees()
                .iter()
                .find(|d| d.degree == n)
                .map(|d| d.representatives.clone())
                .unwrap_or_else(|| Matrix::zeros(c.field(), c.rank(n), 0))
        })
        .collect()
}

/// Torsion from scratch: lifts `s_n` are standard basis vectors picked greedily
/// from the right (unlike the library's leftmost pivots), boundaries are
/// `b_{n+1} = d s_n`, and `τ = Π det[b h s]^{(-1)^{n+1}} · (-1)^N` with
/// `N = Σ C(β_n, 2) + Σ_{n odd} (C(r_n, 2) + C(h_n, 2))`.
pub fn oracle_torsion(c: &BoundedComplex, reps: &[Matrix]) -> Scalar {
    let field = c.field();
    if c.is_zero() {
        return field.one();
    }
    let mut tau = field.one();
    let mut parity = 0;
    let mut b = Matrix::zeros(field, c.rank(c.lo()), 0);
    for (k, n) in c.degrees().enumerate() {
        let d = c.differential(n);
        let target = d.rank();
        let mut chosen: Vec<usize> = Vec::new();
        for j in (0..c.rank(n)).rev() {
            if chosen.len() == target {
                break;
            }
            let mut trial = chosen.clone();
            trial.push(j);
            if d.select_columns(&trial).rank() == trial.len() {
                chosen = trial;
            }
        }
        let s = Matrix::identity(field, c.rank(n)).select_columns(&chosen);
        let m = b.hstack(&reps[k]).hstack(&s);
        assert_eq!(m.cols(), c.rank(n), "bases do not fill degree {n}");
        let det = m.determinant().unwrap();
        assert!(!det.is_zero(), "adapted basis is singular in degree {n}");
        tau = if n.rem_euclid(2) == 1 { &tau * &det } else { &tau * &det.inv().unwrap() };
        parity += choose2(b.cols());
        if n.rem_euclid(2) == 1 {
            parity += choose2(c.rank(n)) + choose2(reps[k].cols());
        }
        b = d.mul(&s).unwrap();
    }
    if parity % 2 == 1 {
        -tau
    } else {
        tau
    }
}

/// Parity of the permutation carrying the word `from` onto `to`.
pub fn word_parity<T: Ord + Clone + std::fmt::Debug>(from: &[T], to: &[T]) -> bool {
    assert_eq!(from.len(), to.len());
    let pos: BTreeMap<&T, usize> = from.iter().enumerate().map(|(i, t)| (t, i)).collect();
    assert_eq!(pos.len(), from.len(), "letters must be distinct");
    let p: Vec<usize> = to.iter().map(|t| *pos.get(t).unwrap_or_else(|| panic!("{t:?} missing"))).collect();
    let mut odd = false;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            odd ^= p[i] > p[j];
        }
    }
    odd
}

/// Letters of a determinant word: degree-major, each odd degree written in
/// reverse (the dual of a wedge).
pub fn det_word<T: Clone>(chunks: &[Graded<T>]) -> Vec<T> {
    let mut word = Vec::new();
    for (n, letters) in chunks {
        if n.rem_euclid(2) == 1 {
            word.extend(letters.iter().rev().cloned());
        } else {
            word.extend(letters.iter().cloned());
        }
    }
    word
}

/// `Σ_m (-1)^m rank`.
pub fn stalk_euler(c: &BoundedComplex) -> i64 {
    if c.is_zero() {
        return 0;
    }
    c.degrees().map(|n| if n.rem_euclid(2) == 0 { c.rank(n) as i64 } else { -(c.rank(n) as i64) }).sum()
}

/// `Σ_{σ ∈ S} (-1)^{dim σ} χ(stalk σ)`.
pub fn oracle_euler(x: &CellComplex, f: &CellularSheaf, s: &CellSet) -> i64 {
    s.iter().map(|c| if x.dim(c).is_multiple_of(2) { stalk_euler(f.stalk(c)) } else { -stalk_euler(f.stalk(c)) }).sum()
}

/// `[σ:τ] = (-1)^i` when `σ` is `τ` without its `i`-th vertex.
pub fn incidence(sigma: &[usize], tau: &[usize]) -> Option<i64> {
    if tau.len() != sigma.len() + 1 {
        return None;
    }
    (0..tau.len()).find(|&i| tau.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, &v)| v).eq(sigma.iter().copied())).map(|i| if i % 2 == 0 { 1 } else { -1 })
}

/// Basis letters of the sections complex on `s`: `(total degree, cell, k)`,
/// cells in index order.
pub fn sections_letters(x: &CellComplex, f: &CellularSheaf, s: &CellSet) -> Vec<Graded<Letter>> {
    let mut by_degree: BTreeMap<i64, Vec<Letter>> = BTreeMap::new();
    for c in s.iter() {
        let st = f.stalk(c);
        if st.is_zero() {
            continue;
        }
        for m in st.degrees() {
            let n = m + x.dim(c) as i64;
            for k in 0..st.rank(m) {
                by_degree.entry(n).or_default().push((n, c, k));
            }
        }
    }
    for v in by_degree.values_mut() {
        v.sort();
    }
    by_degree.into_iter().collect()
}

/// The sections complex assembled entry by entry: `(lo, ranks, d_n)`.
pub fn oracle_sections(x: &CellComplex, f: &CellularSheaf, s: &CellSet) -> (i64, Vec<usize>, Vec<Matrix>) {
    let field = f.field();
    let letters = sections_letters(x, f, s);
    if letters.is_empty() {
        return (0, Vec::new(), Vec::new());
    }
    let lo = letters[0].0;
    let hi = letters.last().unwrap().0;
    let basis: Vec<Vec<Letter>> = (lo..=hi).map(|n| letters.iter().find(|l| l.0 == n).map(|l| l.1.clone()).unwrap_or_default()).collect();
    let ranks: Vec<usize> = basis.iter().map(Vec::len).collect();
    let mut diffs = Vec::new();
    for k in 0..basis.len().saturating_sub(1) {
        let mut d = Matrix::zeros(field, ranks[k + 1], ranks[k]);
        for (j, &(n, c, kk)) in basis[k].iter().enumerate() {
            let m = n - x.dim(c) as i64;
            for (i, &(_, t, ll)) in basis[k + 1].iter().enumerate() {
                let mut entry = field.zero();
                if t == c {
                    let sign = field.sign(x.dim(c) as i64);
                    entry = &entry + &(&sign * f.stalk(c).differential(m).get(ll, kk));
                } else if let Some(inc) = incidence(x.cell(c), x.cell(t)) {
                    let rho = f.rho(c, t, m);
                    entry = &entry + &(&field.from_i64(inc) * rho.get(ll, kk));
                }
                if !entry.is_zero() {
                    d.set(i, j, entry);
                }
            }
        }
        diffs.push(d);
    }
    (lo, ranks, diffs)
}

pub fn same_complex(c: &BoundedComplex, oracle: &(i64, Vec<usize>, Vec<Matrix>)) -> bool {
    let (lo, ranks, diffs) = oracle;
    if ranks.iter().all(|&r| r == 0) {
        return c.total_rank() == 0;
    }
    c.lo() == *lo && c.ranks() == *ranks && diffs.iter().enumerate().all(|(k, d)| c.differential(lo + k as i64) == *d)
}

/// Acyclicity from ranks alone: `Σ_n (r_n - rk d_n - rk d_{n-1}) = 0`.
pub fn oracle_acyclic(ranks: &[usize], diffs: &[Matrix]) -> bool {
    let rk: Vec<usize> = diffs.iter().map(Matrix::rank).collect();
    (0..ranks.len()).all(|k| {
        let out = rk.get(k).copied().unwrap_or(0);
        let inc = if k > 0 { rk.get(k - 1).copied().unwrap_or(0) } else { 0 };
        ranks[k] == out + inc
    })
}

/// Closure inside the whole complex, by faces of vertex tuples.
pub fn oracle_closure(x: &CellComplex, s: &BTreeSet<usize>) -> BTreeSet<usize> {
    (0..x.len()).filter(|&c| s.iter().any(|&t| is_subface(x.cell(c), x.cell(t)))).collect()
}

pub fn is_subface(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|v| b.contains(v))
}

/// Locally closed iff convex in the face order: `σ ≤ τ ≤ ρ` with `σ, ρ ∈ S` forces `τ ∈ S`.
pub fn oracle_locally_closed(x: &CellComplex, s: &BTreeSet<usize>) -> bool {
    for &a in s {
        for &b in s {
            if a != b && is_subface(x.cell(a), x.cell(b)) {
                for t in 0..x.len() {
                    if is_subface(x.cell(a), x.cell(t)) && is_subface(x.cell(t), x.cell(b)) && !s.contains(&t) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Whether the relation `B → A` iff `B` meets `cl(A) \ A` is acyclic, by
/// repeated removal of parts with no remaining predecessors.
pub fn oracle_has_witness(x: &CellComplex, parts: &[BTreeSet<usize>]) -> bool {
    let frontier: Vec<BTreeSet<usize>> = parts.iter().map(|a| oracle_closure(x, a).difference(a).copied().collect()).collect();
    let mut alive: Vec<bool> = vec![true; parts.len()];
    loop {
        let ready = (0..parts.len()).find(|&a| alive[a] && (0..parts.len()).all(|b| !alive[b] || b == a || parts[b].is_disjoint(&frontier[a])));
        match ready {
            Some(a) => alive[a] = false,
            None => return alive.iter().all(|&l| !l),
        }
    }
}

/// Every prefix union of the ordered parts is closed in their union.
pub fn oracle_prefixes_closed(x: &CellComplex, ordered: &[BTreeSet<usize>]) -> bool {
    let ambient: BTreeSet<usize> = ordered.iter().flatten().copied().collect();
    let mut prefix = BTreeSet::new();
    for p in ordered {
        prefix.extend(p.iter().copied());
        let cl: BTreeSet<usize> = oracle_closure(x, &prefix).intersection(&ambient).copied().collect();
        if cl != prefix {
            return false;
        }
    }
    true
}

pub fn to_sets(parts: &[CellSet]) -> Vec<BTreeSet<usize>> {
    parts.iter().map(|p| p.iter().collect()).collect()
}

/// Arcs by walking `ν` backwards from each marked vertex.
pub fn oracle_arcs(x: &CellComplex, nu: &OrientationField, y: &BTreeSet<usize>) -> Vec<(usize, BTreeSet<usize>)> {
    let edges: Vec<usize> = x.cells_of_dim(1).collect();
    let incoming = |v: usize| -> Vec<usize> { edges.iter().copied().filter(|&e| nu.terminal(e) == v).collect() };
    let other = |e: usize, v: usize| -> usize { *x.cell(e).iter().find(|&&w| w != v).unwrap() };
    y.iter()
        .map(|&m| {
            let mut arc = BTreeSet::from([m]);
            for e0 in incoming(m) {
                let mut e = e0;
                loop {
                    arc.insert(e);
                    let w = other(e, nu.terminal(e));
                    if y.contains(&w) {
                        break;
                    }
                    arc.insert(w);
                    e = incoming(w)[0];
                }
            }
            (m, arc)
        })
        .collect()
}

/// A random bounded complex: split pairs and cohomology classes in a window of
/// degrees, conjugated by random invertible matrices in every degree.
pub fn random_complex<R: Rng>(rng: &mut R, field: Field) -> BoundedComplex {
    let lo: i64 = rng.gen_range(-2..=1);
    let len = rng.gen_range(1..=4usize);
    let h: Vec<usize> = (0..len).map(|_| rng.gen_range(0..=2)).collect();
    let e: Vec<usize> = (0..len).map(|k| if k + 1 < len { rng.gen_range(0..=2) } else { 0 }).collect();
    let ranks: Vec<usize> = (0..len).map(|k| h[k] + e[k] + if k > 0 { e[k - 1] } else { 0 }).collect();
    if ranks.iter().all(|&r| r == 0) {
        return BoundedComplex::concentrated(field, lo, 1);
    }
    let gauge: Vec<Matrix> = ranks.iter().map(|&r| random_invertible(rng, field, r)).collect();
    let mut diffs = Vec::new();
    for k in 0..len - 1 {
        // basis of degree k: [incoming pairs | classes | outgoing pairs]
        let mut d = Matrix::zeros(field, ranks[k + 1], ranks[k]);
        let out0 = ranks[k] - e[k];
        for i in 0..e[k] {
            let a = loop {
                let a = rng.gen_range(-4..=4);
                if a != 0 && !field.from_i64(a).is_zero() {
                    break a;
                }
            };
            d.set(i, out0 + i, field.from_i64(a));
        }
        let inv = gauge[k].solve(&Matrix::identity(field, ranks[k])).unwrap();
        diffs.push(gauge[k + 1].mul(&d).unwrap().mul(&inv).unwrap());
    }
    BoundedComplex::new(field, lo, &ranks, diffs).unwrap()
}
