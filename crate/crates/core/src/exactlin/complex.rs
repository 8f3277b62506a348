//! Based bounded cochain complexes, adapted cohomology bases and torsion.

use crate::error::{Error, Result};
use crate::exactlin::line::{regrouping_parity, Block, GradedSuperLine};
use crate::exactlin::matrix::Matrix;
use crate::exactlin::scalar::{Field, Scalar};

/// A bounded cochain complex of based free modules.
///
/// Degree `lo + i` carries `labels[i].len()` basis vectors; `diffs[i]` maps
/// degree `lo + i` to `lo + i + 1` and has shape `r_{i+1} x r_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundedComplex {
    field: Field,
    lo: i64,
    labels: Vec<Vec<String>>,
    diffs: Vec<Matrix>,
}

impl BoundedComplex {
    pub fn zero(field: Field) -> Self {
        BoundedComplex { field, lo: 0, labels: Vec::new(), diffs: Vec::new() }
    }

    /// Complex with default basis labels `e<degree>.<index>`.
    pub fn new(field: Field, lo: i64, ranks: &[usize], diffs: Vec<Matrix>) -> Result<Self> {
        let labels = ranks
            .iter()
            .enumerate()
            .map(|(i, &r)| (0..r).map(|k| format!("e{}.{k}", lo + i as i64)).collect())
            .collect();
        Self::with_labels(field, lo, labels, diffs)
    }

    pub fn with_labels(field: Field, lo: i64, labels: Vec<Vec<String>>, diffs: Vec<Matrix>) -> Result<Self> {
        let expected = labels.len().saturating_sub(1);
        if diffs.len() != expected {
            return Err(Error::DimensionMismatch(format!("{} differentials for {} degrees", diffs.len(), labels.len())));
        }
        for (i, d) in diffs.iter().enumerate() {
            if d.field() != field {
                return Err(Error::DimensionMismatch(format!("differential over {} in a {field} complex", d.field())));
            }
            if d.rows() != labels[i + 1].len() || d.cols() != labels[i].len() {
                return Err(Error::DimensionMismatch(format!(
                    "d at degree {} is {}x{}, expected {}x{}",
                    lo + i as i64,
                    d.rows(),
                    d.cols(),
                    labels[i + 1].len(),
                    labels[i].len()
                )));
            }
        }
        for i in 1..diffs.len() {
            if !diffs[i].mul(&diffs[i - 1])?.is_zero() {
                return Err(Error::NotAComplex { degree: lo + i as i64 - 1 });
            }
        }
        Ok(BoundedComplex { field, lo, labels, diffs })
    }

    /// A single based module of the given rank placed in `degree`.
    pub fn concentrated(field: Field, degree: i64, rank: usize) -> Self {
        Self::new(field, degree, &[rank], Vec::new()).expect("one-term complex is valid")
    }

    /// `[k^n --d--> k^m]` placed in degrees `degree, degree + 1`.
    pub fn two_term(degree: i64, d: Matrix) -> Result<Self> {
        let field = d.field();
        Self::new(field, degree, &[d.cols(), d.rows()], vec![d])
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// Highest stored degree; `lo - 1` for the empty complex.
    pub fn hi(&self) -> i64 {
        self.lo + self.labels.len() as i64 - 1
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i64> {
        self.lo..=self.hi()
    }

    fn index(&self, n: i64) -> Option<usize> {
        let i = n - self.lo;
        (i >= 0 && (i as usize) < self.labels.len()).then_some(i as usize)
    }

    pub fn rank(&self, n: i64) -> usize {
        self.index(n).map_or(0, |i| self.labels[i].len())
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.labels.iter().map(Vec::len).collect()
    }

    pub fn labels(&self, n: i64) -> &[String] {
        self.index(n).map_or(&[], |i| &self.labels[i])
    }

    /// `d^n : C^n -> C^{n+1}`, zero outside the stored range.
    pub fn differential(&self, n: i64) -> Matrix {
        match self.index(n) {
            Some(i) if i < self.diffs.len() => self.diffs[i].clone(),
            _ => Matrix::zeros(self.field, self.rank(n + 1), self.rank(n)),
        }
    }

    pub fn total_rank(&self) -> usize {
        self.labels.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.total_rank() == 0
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.degrees().map(|n| sign_i64(n) * self.rank(n) as i64).sum()
    }

    /// Determinant line with its canonical generator, `deg = chi`.
    pub fn det_line(&self) -> GradedSuperLine {
        GradedSuperLine::new(self.euler_characteristic(), self.field.one()).expect("1 is a unit")
    }

    /// `C[k]`: degree `n` of the result is degree `n + k` of `self`, with
    /// differential `(-1)^k d`.
    pub fn shift(&self, k: i64) -> BoundedComplex {
        let s = self.field.sign(k);
        BoundedComplex {
            field: self.field,
            lo: self.lo - k,
            labels: self.labels.clone(),
            diffs: self.diffs.iter().map(|d| d.scale(&s)).collect(),
        }
    }

    /// Degreewise direct sum; in each degree the basis of `self` comes first.
    pub fn direct_sum(&self, other: &BoundedComplex) -> BoundedComplex {
        assert_eq!(self.field, other.field, "direct sum across fields");
        if self.labels.is_empty() {
            return other.clone();
        }
        if other.labels.is_empty() {
            return self.clone();
        }
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        let labels = (lo..=hi)
            .map(|n| self.labels(n).iter().chain(other.labels(n)).cloned().collect())
            .collect();
        let diffs = (lo..hi).map(|n| self.differential(n).direct_sum(&other.differential(n))).collect();
        BoundedComplex { field: self.field, lo, labels, diffs }
    }

    /// Adds a split acyclic pair `[k --1--> k]` in degrees `j, j + 1`. For even
    /// `j` both new vectors are appended; for odd `j` both are prepended. Either
    /// way the pair sits adjacent in the determinant word, so torsion is unchanged.
    pub fn elementary_expansion(&self, j: i64) -> BoundedComplex {
        let lo = if self.labels.is_empty() { j } else { self.lo.min(j) };
        let hi = if self.labels.is_empty() { j + 1 } else { self.hi().max(j + 1) };
        let field = self.field;
        let extra = |n: i64| usize::from(n == j || n == j + 1);
        let front = j.rem_euclid(2) == 1;
        let offset = |n: i64| usize::from(front && (n == j || n == j + 1));
        let labels = (lo..=hi)
            .map(|n| {
                let mut l: Vec<String> = self.labels(n).to_vec();
                if n == j || n == j + 1 {
                    let x = format!("x{n}");
                    if front {
                        l.insert(0, x);
                    } else {
                        l.push(x);
                    }
                }
                l
            })
            .collect();
        let diffs = (lo..hi)
            .map(|n| {
                let old = self.differential(n);
                let rows = self.rank(n + 1) + extra(n + 1);
                let cols = self.rank(n) + extra(n);
                let mut d = Matrix::zeros(field, rows, cols);
                let (ro, co) = (offset(n + 1), offset(n));
                for r in 0..old.rows() {
                    for c in 0..old.cols() {
                        d.set(r + ro, c + co, old.get(r, c).clone());
                    }
                }
                if n == j {
                    if front {
                        d.set(0, 0, field.one());
                    } else {
                        d.set(rows - 1, cols - 1, field.one());
                    }
                }
                d
            })
            .collect();
        BoundedComplex { field, lo, labels, diffs }
    }

    /// Same complex with degree `n` basis permuted: new position `i` holds old
    /// vector `perms[n][i]`.
    pub fn permute_basis(&self, perm: impl Fn(i64) -> Vec<usize>) -> BoundedComplex {
        let perms: Vec<Vec<usize>> = self.degrees().map(&perm).collect();
        let labels = self
            .labels
            .iter()
            .zip(&perms)
            .map(|(l, p)| p.iter().map(|&k| l[k].clone()).collect())
            .collect();
        let diffs = self
            .diffs
            .iter()
            .enumerate()
            .map(|(i, d)| d.select_rows(&perms[i + 1]).select_columns(&perms[i]))
            .collect();
        BoundedComplex { field: self.field, lo: self.lo, labels, diffs }
    }
}

pub(crate) fn sign_i64(n: i64) -> i64 {
    if n.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Adapted bases for one degree: boundaries ⊂ cocycles ⊂ cochains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeCohomology {
    pub degree: i64,
    /// `d` applied to the previous degree's lifts; columns span `B^n`.
    pub boundaries: Matrix,
    /// Cocycle representatives of a basis of `H^n`.
    pub representatives: Matrix,
    /// Cochains whose images form the chosen basis of `B^{n+1}`.
    pub lifts: Matrix,
}

/// Cohomology of a [`BoundedComplex`] with adapted bases in every degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyData {
    field: Field,
    degrees: Vec<DegreeCohomology>,
}

impl CohomologyData {
    pub fn field(&self) -> Field {
        self.field
    }

    pub fn degrees(&self) -> &[DegreeCohomology] {
        &self.degrees
    }

    fn at(&self, n: i64) -> Option<&DegreeCohomology> {
        self.degrees.iter().find(|d| d.degree == n)
    }

    pub fn dimension(&self, n: i64) -> usize {
        self.at(n).map_or(0, |d| d.representatives.cols())
    }

    pub fn boundary_rank(&self, n: i64) -> usize {
        self.at(n).map_or(0, |d| d.boundaries.cols())
    }

    /// `(degree, h_n)` for every stored degree.
    pub fn dimensions(&self) -> Vec<(i64, usize)> {
        self.degrees.iter().map(|d| (d.degree, d.representatives.cols())).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.degrees.iter().map(|d| sign_i64(d.degree) * d.representatives.cols() as i64).sum()
    }

    pub fn is_acyclic(&self) -> bool {
        self.degrees.iter().all(|d| d.representatives.cols() == 0)
    }

    /// Adapted data of `C ⊕ C'`, each block embedded with `self` first.
    pub fn direct_sum(&self, other: &CohomologyData) -> CohomologyData {
        assert_eq!(self.field, other.field);
        let lo = self.degrees.iter().chain(&other.degrees).map(|d| d.degree).min();
        let hi = self.degrees.iter().chain(&other.degrees).map(|d| d.degree).max();
        let (Some(lo), Some(hi)) = (lo, hi) else { return self.clone() };
        let field = self.field;
        let empty = |n: i64, r: usize| DegreeCohomology {
            degree: n,
            boundaries: Matrix::zeros(field, r, 0),
            representatives: Matrix::zeros(field, r, 0),
            lifts: Matrix::zeros(field, r, 0),
        };
        let rank_of = |h: &CohomologyData, n: i64| h.at(n).map_or(0, |d| d.boundaries.rows());
        let degrees = (lo..=hi)
            .map(|n| {
                let a = self.at(n).cloned().unwrap_or_else(|| empty(n, rank_of(self, n)));
                let b = other.at(n).cloned().unwrap_or_else(|| empty(n, rank_of(other, n)));
                DegreeCohomology {
                    degree: n,
                    boundaries: a.boundaries.direct_sum(&b.boundaries),
                    representatives: a.representatives.direct_sum(&b.representatives),
                    lifts: a.lifts.direct_sum(&b.lifts),
                }
            })
            .collect();
        CohomologyData { field, degrees }
    }
}

/// Cohomology with deterministic adapted bases.
///
/// Lifts are the standard basis vectors at the pivot columns of `d^n`;
/// boundaries are their images; representatives are the kernel basis vectors
/// of `d^n` that extend the boundaries, picked greedily left to right.
pub fn cohomology(c: &BoundedComplex) -> CohomologyData {
    let field = c.field();
    let mut degrees = Vec::new();
    let mut prev_lifts: Option<Matrix> = None;
    for n in c.degrees() {
        let r = c.rank(n);
        let d = c.differential(n);
        let pivots = d.echelon().pivots;
        let lifts = Matrix::identity(field, r).select_columns(&pivots);
        let boundaries = match &prev_lifts {
            Some(l) => c.differential(n - 1).mul(l).expect("shapes agree"),
            None => Matrix::zeros(field, r, 0),
        };
        let kernel = Matrix::from_columns(field, r, &d.kernel_basis());
        let joint = boundaries.hstack(&kernel);
        let b = boundaries.cols();
        let picked: Vec<usize> = joint.echelon().pivots.into_iter().filter(|&p| p >= b).collect();
        let representatives = joint.select_columns(&picked);
        degrees.push(DegreeCohomology { degree: n, boundaries, representatives, lifts: lifts.clone() });
        prev_lifts = Some(lifts);
    }
    CohomologyData { field, degrees }
}

pub fn euler_characteristic(c: &BoundedComplex) -> i64 {
    c.euler_characteristic()
}

pub fn det_line(c: &BoundedComplex) -> GradedSuperLine {
    c.det_line()
}

/// Torsion of `c` relative to the adapted bases in `h`.
///
/// In degree `n` the basis `[d(lifts_{n-1}) | representatives | lifts_n]` is
/// compared with the recorded basis; the torsion is
/// `prod_n det_n^{(-1)^{n+1}}` up to sign. The sign comes from reading the
/// determinant lines as graded super lines, with the dual of a wedge taken in
/// reversed order in odd degrees (for chains and for cohomology alike). Then
/// `[k^r --D--> k^r]` in degrees 0, 1 has torsion `det D`, and the torsion of a
/// direct sum differs from the product only by [`direct_sum_sign`].
pub fn torsion(c: &BoundedComplex, h: &CohomologyData) -> Result<Scalar> {
    let field = c.field();
    if h.field() != field {
        return Err(Error::InconsistentCohomology("field mismatch".into()));
    }
    let bad = |msg: String| Error::InconsistentCohomology(msg);
    let mut tau = field.one();
    let mut parity = 0usize;
    let mut prev_lifts = Matrix::zeros(field, c.rank(c.lo() - 1), 0);
    for n in c.degrees() {
        let r = c.rank(n);
        let data = h.at(n).ok_or_else(|| bad(format!("no data for degree {n}")))?;
        if data.boundaries.rows() != r || data.representatives.rows() != r || data.lifts.rows() != r {
            return Err(bad(format!("bases in degree {n} do not live in a rank-{r} module")));
        }
        let boundaries = c.differential(n - 1).mul(&prev_lifts)?;
        if boundaries != data.boundaries {
            return Err(bad(format!("boundaries in degree {n} are not the images of the previous lifts")));
        }
        if !c.differential(n).mul(&data.representatives)?.is_zero() {
            return Err(bad(format!("representative in degree {n} is not a cocycle")));
        }
        let basis = boundaries.hstack(&data.representatives).hstack(&data.lifts);
        if basis.cols() != r {
            return Err(bad(format!("degree {n}: {} adapted vectors for rank {r}", basis.cols())));
        }
        let det = basis.determinant()?;
        if det.is_zero() {
            return Err(bad(format!("adapted vectors in degree {n} are dependent")));
        }
        tau = if n.rem_euclid(2) == 1 { &tau * &det } else { &tau * &det.inv()? };
        let beta = boundaries.cols();
        parity += choose2(beta);
        if n.rem_euclid(2) == 1 {
            parity += choose2(r) + choose2(data.representatives.cols());
        }
        prev_lifts = data.lifts.clone();
    }
    if h.degrees().iter().any(|d| !c.degrees().contains(&d.degree) && d.boundaries.rows() > 0) {
        return Err(bad("cohomology data outside the complex's degree range".into()));
    }
    Ok(&tau * &field.sign(parity as i64))
}

fn choose2(k: usize) -> usize {
    k * k.saturating_sub(1) / 2
}

/// Koszul sign by which `torsion(C ⊕ C')` differs from the product of the
/// torsions, given the direct-sum adapted data: the regrouping sign of the
/// chain modules times that of the cohomology modules.
pub fn direct_sum_sign(a: &BoundedComplex, ha: &CohomologyData, b: &BoundedComplex, hb: &CohomologyData) -> Scalar {
    let field = a.field();
    let lo = a.lo().min(b.lo()).min(ha_lo(ha)).min(ha_lo(hb));
    let hi = a.hi().max(b.hi());
    let chain: Vec<(usize, usize)> = (lo..=hi).map(|n| (a.rank(n), b.rank(n))).collect();
    let coh: Vec<(usize, usize)> = (lo..=hi).map(|n| (ha.dimension(n), hb.dimension(n))).collect();
    let odd = interleave_parity(lo, &chain) ^ interleave_parity(lo, &coh);
    field.sign(odd as i64)
}

fn ha_lo(h: &CohomologyData) -> i64 {
    h.degrees().first().map_or(i64::MAX, |d| d.degree)
}

/// Parity of regrouping `⊗_n det(A_n ⊕ B_n)` into `(⊗_n A_n) ⊗ (⊗_n B_n)`.
fn interleave_parity(lo: i64, ranks: &[(usize, usize)]) -> bool {
    let pieces = [ranks.iter().map(|r| r.0).collect::<Vec<_>>(), ranks.iter().map(|r| r.1).collect()];
    filtration_parity(lo, &pieces)
}

/// Parity of the Koszul sign identifying `⊗_n det(⊕_α C^n_α)` with
/// `⊗_α ⊗_n det(C^n_α)`, where `ranks[α][k]` is the rank of `C^{lo+k}_α`.
///
/// Determinant lines of odd degrees are duals, so there the direct sum splits
/// in reversed order, last piece first; the pieces are then moved into
/// piece-major order under the super rule.
pub fn filtration_parity(lo: i64, ranks: &[Vec<usize>]) -> bool {
    let len = ranks.iter().map(Vec::len).max().unwrap_or(0);
    let rank = |a: usize, k: usize| ranks[a].get(k).copied().unwrap_or(0);
    let mut blocks = Vec::new();
    let mut reversed = 0usize;
    for k in 0..len {
        let n = lo + k as i64;
        for a in 0..ranks.len() {
            blocks.push(Block::new(n, rank(a, k)));
            if n.rem_euclid(2) == 1 {
                reversed += (a + 1..ranks.len()).map(|b| rank(a, k) * rank(b, k)).sum::<usize>();
            }
        }
    }
    let m = ranks.len();
    let perm: Vec<usize> = (0..m).flat_map(|a| (0..len).map(move |k| k * m + a)).collect();
    regrouping_parity(&blocks, &perm).expect("valid regrouping permutation") ^ (reversed % 2 == 1)
}

/// Sign form of [`filtration_parity`].
pub fn filtration_sign(field: Field, lo: i64, ranks: &[Vec<usize>]) -> Scalar {
    field.sign(filtration_parity(lo, ranks) as i64)
}
