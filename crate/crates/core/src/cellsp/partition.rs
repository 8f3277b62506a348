use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::cellsp::cellset::{closure, is_locally_closed, CellSet};
use crate::cellsp::complex::CellComplex;
use crate::error::{Error, Result};

/// A finite partition of `ambient` into nonempty locally closed parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    ambient: CellSet,
    parts: Vec<CellSet>,
}

/// An ordering of the parts of a partition in which the frontier of every part
/// lies in the union of earlier parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedFiltrationWitness {
    pub order: Vec<usize>,
}

impl Partition {
    pub fn new(x: &CellComplex, parts: Vec<CellSet>) -> Result<Self> {
        let mut ambient = CellSet::new();
        for (k, p) in parts.iter().enumerate() {
            if p.is_empty() {
                return Err(Error::InvalidPartition(format!("part {k} is empty")));
            }
            if let Some(i) = p.iter().find(|&i| i >= x.len()) {
                return Err(Error::InvalidPartition(format!("part {k} holds unknown cell index {i}")));
            }
            if !p.is_disjoint(&ambient) {
                return Err(Error::InvalidPartition(format!("part {k} overlaps an earlier part")));
            }
            if !is_locally_closed(x, p) {
                return Err(Error::InvalidPartition(format!("part {k} is not locally closed")));
            }
            ambient = ambient.union(p);
        }
        Ok(Partition { ambient, parts })
    }

    /// Like [`Partition::new`], additionally checking that the parts cover `ambient`.
    pub fn of(x: &CellComplex, ambient: &CellSet, parts: Vec<CellSet>) -> Result<Self> {
        let p = Partition::new(x, parts)?;
        if p.ambient != *ambient {
            return Err(Error::InvalidPartition("parts do not cover the ambient set".into()));
        }
        Ok(p)
    }

    pub fn whole(x: &CellComplex, ambient: &CellSet) -> Result<Self> {
        if ambient.is_empty() {
            return Ok(Partition { ambient: CellSet::new(), parts: Vec::new() });
        }
        Partition::new(x, vec![ambient.clone()])
    }

    pub fn ambient(&self) -> &CellSet {
        &self.ambient
    }

    pub fn parts(&self) -> &[CellSet] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Index of the part containing cell `i`.
    pub fn part_of(&self, i: usize) -> Option<usize> {
        self.parts.iter().position(|p| p.contains(i))
    }

    /// Whether `self` refines `coarse`: every part of `self` lies in a part of `coarse`.
    pub fn refines(&self, coarse: &Partition) -> bool {
        self.ambient == coarse.ambient
            && self.parts.iter().all(|p| coarse.parts.iter().any(|c| p.is_subset(c)))
    }

    /// The parts of `self` inside `part`, as a partition of `part`, in their
    /// original relative order.
    pub fn restrict(&self, x: &CellComplex, part: &CellSet) -> Result<Partition> {
        let parts: Vec<CellSet> = self.parts.iter().filter(|p| p.is_subset(part)).cloned().collect();
        Partition::of(x, part, parts)
    }

    /// The same parts in the witness order.
    pub fn reordered(&self, w: &ClosedFiltrationWitness) -> Partition {
        Partition { ambient: self.ambient.clone(), parts: w.order.iter().map(|&k| self.parts[k].clone()).collect() }
    }
}

/// `before[a]` lists the parts `b` that must precede `a`: those meeting
/// `cl(A) \ A`. Cells outside the ambient set are ignored.
fn frontier_relation(x: &CellComplex, p: &Partition) -> Vec<Vec<usize>> {
    p.parts
        .iter()
        .enumerate()
        .map(|(a, part)| {
            let mut before: Vec<usize> = closure(x, part)
                .difference(part)
                .iter()
                .filter_map(|i| p.part_of(i))
                .filter(|&b| b != a)
                .collect();
            before.sort_unstable();
            before.dedup();
            before
        })
        .collect()
}

/// Kahn's algorithm over the frontier relation, always emitting the lowest
/// available part index. On failure reports a cycle of parts, each required
/// to come before the next.
pub fn closed_filtration_witness(x: &CellComplex, p: &Partition) -> Result<ClosedFiltrationWitness> {
    let before = frontier_relation(x, p);
    let n = before.len();
    let mut indeg: Vec<usize> = before.iter().map(Vec::len).collect();
    let mut after = vec![Vec::new(); n];
    for (a, bs) in before.iter().enumerate() {
        for &b in bs {
            after[b].push(a);
        }
    }
    let mut ready: BinaryHeap<Reverse<usize>> = (0..n).filter(|&a| indeg[a] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse(b)) = ready.pop() {
        order.push(b);
        for &a in &after[b] {
            indeg[a] -= 1;
            if indeg[a] == 0 {
                ready.push(Reverse(a));
            }
        }
    }
    if order.len() == n {
        return Ok(ClosedFiltrationWitness { order });
    }
    // every unplaced part has an unplaced predecessor; walk back until a repeat
    let start = (0..n).find(|&a| indeg[a] > 0).expect("an unplaced part");
    let mut path = vec![start];
    let mut cur = start;
    loop {
        cur = *before[cur].iter().find(|&&b| indeg[b] > 0).expect("unplaced predecessor");
        if let Some(pos) = path.iter().position(|&q| q == cur) {
            let mut cycle = path[pos..].to_vec();
            cycle.reverse();
            return Err(Error::FiltrationCycle { cycle });
        }
        path.push(cur);
    }
}

/// Checks a proposed ordering against the frontier condition.
pub fn verify_witness(x: &CellComplex, p: &Partition, w: &ClosedFiltrationWitness) -> bool {
    let mut pos = vec![usize::MAX; p.len()];
    for (i, &k) in w.order.iter().enumerate() {
        if k >= p.len() || pos[k] != usize::MAX {
            return false;
        }
        pos[k] = i;
    }
    if w.order.len() != p.len() {
        return false;
    }
    frontier_relation(x, p).iter().enumerate().all(|(a, bs)| bs.iter().all(|&b| pos[b] < pos[a]))
}

/// Parts `A ∩ B` that are nonempty, ordered by `(index in p1, index in p2)`.
pub fn common_refinement(x: &CellComplex, p1: &Partition, p2: &Partition) -> Result<Partition> {
    if p1.ambient != p2.ambient {
        return Err(Error::InvalidPartition("partitions have different ambient sets".into()));
    }
    let parts = p1
        .parts
        .iter()
        .flat_map(|a| p2.parts.iter().map(move |b| a.intersection(b)))
        .filter(|c| !c.is_empty())
        .collect();
    Partition::of(x, &p1.ambient, parts)
}

/// Given `fine` refining `coarse`, a witness for `coarse` and one for each
/// restriction of `fine` to the parts of `coarse` (in witness order), the
/// lexicographic ordering of the parts of `fine`.
pub fn lexicographic_witness(
    coarse: &Partition,
    coarse_witness: &ClosedFiltrationWitness,
    fine: &Partition,
    restricted: &[(Partition, ClosedFiltrationWitness)],
) -> Result<ClosedFiltrationWitness> {
    if restricted.len() != coarse.len() {
        return Err(Error::InvalidPartition("need one restricted witness per coarse part".into()));
    }
    let mut order = Vec::with_capacity(fine.len());
    for &k in &coarse_witness.order {
        let (sub, w) = &restricted[k];
        if sub.ambient() != &coarse.parts[k] {
            return Err(Error::InvalidPartition(format!("restriction {k} does not cover coarse part {k}")));
        }
        for &j in &w.order {
            let idx = fine
                .parts
                .iter()
                .position(|q| *q == sub.parts[j])
                .ok_or_else(|| Error::InvalidPartition("restricted part is not a part of the fine partition".into()))?;
            order.push(idx);
        }
    }
    Ok(ClosedFiltrationWitness { order })
}
