use crate::cellsp::{is_locally_closed, verify_witness, CellComplex, CellSet, ClosedFiltrationWitness, Partition};
use crate::error::{Error, Result};
use crate::exactlin::{filtration_parity, regrouping_parity, Block, BoundedComplex, Matrix, Scalar};
use crate::sheaf::CellularSheaf;

/// Where each cell's stalk sits inside the total complex: `blocks[k]` lists
/// `(cell, offset, rank)` for total degree `lo + k`, cells ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectionsLayout {
    pub lo: i64,
    pub blocks: Vec<Vec<(usize, usize, usize)>>,
}

impl SectionsLayout {
    pub fn ranks(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.iter().map(|&(_, _, r)| r).sum()).collect()
    }

    pub fn block(&self, n: i64, cell: usize) -> Option<(usize, usize)> {
        let k = usize::try_from(n - self.lo).ok()?;
        self.blocks.get(k)?.iter().find(|b| b.0 == cell).map(|&(_, o, r)| (o, r))
    }
}

pub fn sections_layout(x: &CellComplex, f: &CellularSheaf, s: &CellSet) -> SectionsLayout {
    let live: Vec<usize> = s.iter().filter(|&c| !f.stalk(c).is_zero()).collect();
    let lo = live.iter().map(|&c| f.stalk(c).lo() + x.dim(c) as i64).min();
    let hi = live.iter().map(|&c| f.stalk(c).hi() + x.dim(c) as i64).max();
    let (lo, hi) = match (lo, hi) {
        (Some(a), Some(b)) => (a, b),
        _ => return SectionsLayout { lo: 0, blocks: Vec::new() },
    };
    let blocks = (lo..=hi)
        .map(|n| {
            let mut off = 0;
            let mut row = Vec::new();
            for &c in &live {
                let r = f.stalk(c).rank(n - x.dim(c) as i64);
                if r > 0 {
                    row.push((c, off, r));
                    off += r;
                }
            }
            row
        })
        .collect();
    SectionsLayout { lo, blocks }
}

/// Compactly supported cochains of `f` on the locally closed set `s`.
///
/// Degree `n` is `⊕_{σ ∈ S} stalk(σ)^{n - dim σ}`, ordered by cell then stalk
/// basis; the differential is `(-1)^{dim σ} d_σ + Σ_{σ ⋖ τ ∈ S} [σ:τ] ρ_{στ}`.
pub fn sections_complex(x: &CellComplex, f: &CellularSheaf, s: &CellSet) -> Result<BoundedComplex> {
    if !is_locally_closed(x, s) {
        return Err(Error::NotLocallyClosed);
    }
    let layout = sections_layout(x, f, s);
    let field = f.field();
    if layout.blocks.is_empty() {
        return Ok(BoundedComplex::zero(field));
    }
    let ranks = layout.ranks();
    let labels = layout
        .blocks
        .iter()
        .enumerate()
        .map(|(k, row)| {
            let n = layout.lo + k as i64;
            row.iter()
                .flat_map(|&(c, _, _)| {
                    let m = n - x.dim(c) as i64;
                    f.stalk(c).labels(m).iter().map(move |l| format!("{:?}:{l}", x.cell(c)))
                })
                .collect()
        })
        .collect();
    let mut diffs = Vec::with_capacity(ranks.len().saturating_sub(1));
    for k in 0..ranks.len().saturating_sub(1) {
        let n = layout.lo + k as i64;
        let mut d = Matrix::zeros(field, ranks[k + 1], ranks[k]);
        for &(c, off, r) in &layout.blocks[k] {
            let dim = x.dim(c) as i64;
            let m = n - dim;
            if let Some((o2, r2)) = layout.block(n + 1, c) {
                let inner = f.stalk(c).differential(m).scale(&field.sign(dim));
                paste(&mut d, &inner, o2, off, r2, r);
            }
            for &(t, sign) in x.cofaces(c) {
                if !s.contains(t) {
                    continue;
                }
                if let Some((o2, r2)) = layout.block(n + 1, t) {
                    let rho = f.rho(c, t, m).scale(&field.from_i64(sign));
                    paste(&mut d, &rho, o2, off, r2, r);
                }
            }
        }
        diffs.push(d);
    }
    BoundedComplex::with_labels(field, layout.lo, labels, diffs)
}

fn paste(d: &mut Matrix, block: &Matrix, row: usize, col: usize, rows: usize, cols: usize) {
    debug_assert_eq!((block.rows(), block.cols()), (rows, cols));
    for i in 0..rows {
        for j in 0..cols {
            let v = block.get(i, j);
            if !v.is_zero() {
                let cur = d.get(row + i, col + j).clone();
                d.set(row + i, col + j, &cur + v);
            }
        }
    }
}

/// Associated graded pieces of the filtration of `RΓ_c(ambient)` by a
/// witness-bearing partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiltrationGr {
    /// Parts in witness order.
    pub parts: Vec<CellSet>,
    /// `sections_complex` on each part, in witness order.
    pub pieces: Vec<BoundedComplex>,
    /// Sign identifying `det RΓ_c(ambient)` with `⊗ det(piece)` at chain level.
    pub sign: Scalar,
}

pub fn filtration_gr(x: &CellComplex, f: &CellularSheaf, p: &Partition, w: &ClosedFiltrationWitness) -> Result<FiltrationGr> {
    if !verify_witness(x, p, w) {
        return Err(Error::InvalidPartition("ordering is not a closed-filtration witness".into()));
    }
    let parts: Vec<CellSet> = w.order.iter().map(|&k| p.parts()[k].clone()).collect();
    let pieces = parts.iter().map(|part| sections_complex(x, f, part)).collect::<Result<Vec<_>>>()?;
    let sign = regrouping_sign_for(x, f, p.ambient(), &parts)?;
    Ok(FiltrationGr { parts, pieces, sign })
}

/// Sign of the chain-level identification `det C(ambient) ≅ ⊗_α det C(part_α)`
/// for an ordered cover by disjoint parts: per degree, the parity of reordering
/// basis vectors from ambient order into part order, times the Koszul sign of
/// regrouping determinant lines from degree-major into part-major order.
pub(crate) fn regrouping_sign_for(x: &CellComplex, f: &CellularSheaf, ambient: &CellSet, parts: &[CellSet]) -> Result<Scalar> {
    let field = f.field();
    let layout = sections_layout(x, f, ambient);
    let mut odd = false;
    let mut piece_ranks = vec![vec![0usize; layout.blocks.len()]; parts.len()];
    for (k, row) in layout.blocks.iter().enumerate() {
        let blocks: Vec<Block> = row.iter().map(|&(_, _, r)| Block::new(layout.lo + k as i64, r)).collect();
        let mut perm = Vec::with_capacity(row.len());
        for (a, part) in parts.iter().enumerate() {
            for (i, &(c, _, r)) in row.iter().enumerate() {
                if part.contains(c) {
                    perm.push(i);
                    piece_ranks[a][k] += r;
                }
            }
        }
        if perm.len() != row.len() {
            return Err(Error::InvalidPartition("parts do not cover the support".into()));
        }
        odd ^= regrouping_parity(&blocks, &perm)?;
    }
    odd ^= filtration_parity(layout.lo, &piece_ranks);
    Ok(field.sign(odd as i64))
}

/// Euler characteristic of each stalk, indexed by cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EulerFunction(pub Vec<i64>);

impl EulerFunction {
    pub fn at(&self, cell: usize) -> i64 {
        self.0[cell]
    }
}

pub fn euler_function(f: &CellularSheaf) -> EulerFunction {
    EulerFunction(f.stalks().iter().map(BoundedComplex::euler_characteristic).collect())
}

/// `Σ_{σ ∈ S} (-1)^{dim σ} χ(stalk σ)`, the Euler characteristic of `RΓ_c(S)`.
pub fn global_euler(x: &CellComplex, f: &CellularSheaf, s: &CellSet) -> Result<i64> {
    if !is_locally_closed(x, s) {
        return Err(Error::NotLocallyClosed);
    }
    let e = euler_function(f);
    Ok(s.iter().map(|c| if x.dim(c).is_multiple_of(2) { e.at(c) } else { -e.at(c) }).sum())
}
