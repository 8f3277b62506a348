use std::collections::BTreeSet;

use crate::cellsp::complex::CellComplex;
use crate::error::{Error, Result};

/// A set of cell indices of some [`CellComplex`].
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellSet(BTreeSet<usize>);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Classification {
    pub open: bool,
    pub closed: bool,
    pub locally_closed: bool,
}

impl CellSet {
    pub fn new() -> Self {
        CellSet(BTreeSet::new())
    }

    pub fn all(x: &CellComplex) -> Self {
        (0..x.len()).collect()
    }

    /// Cells given as vertex tuples.
    pub fn from_cells(x: &CellComplex, cells: &[Vec<usize>]) -> Result<Self> {
        cells
            .iter()
            .map(|c| x.index_of(c).ok_or_else(|| Error::InvalidCell(c.clone(), "not a cell of the complex".into())))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.contains(&i)
    }

    pub fn insert(&mut self, i: usize) -> bool {
        self.0.insert(i)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn union(&self, other: &CellSet) -> CellSet {
        CellSet(&self.0 | &other.0)
    }

    pub fn intersection(&self, other: &CellSet) -> CellSet {
        CellSet(&self.0 & &other.0)
    }

    pub fn difference(&self, other: &CellSet) -> CellSet {
        CellSet(&self.0 - &other.0)
    }

    pub fn is_subset(&self, other: &CellSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_disjoint(&self, other: &CellSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn to_vertex_tuples(&self, x: &CellComplex) -> Vec<Vec<usize>> {
        self.iter().map(|i| x.cell(i).to_vec()).collect()
    }

    fn in_range(&self, x: &CellComplex) -> bool {
        self.0.last().is_none_or(|&i| i < x.len())
    }
}

impl FromIterator<usize> for CellSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        CellSet(iter.into_iter().collect())
    }
}

/// Face closure.
pub fn closure(x: &CellComplex, s: &CellSet) -> CellSet {
    saturate(s, |i| x.faces(i))
}

/// Coface closure: the smallest open set containing `s`.
pub fn star(x: &CellComplex, s: &CellSet) -> CellSet {
    saturate(s, |i| x.cofaces(i))
}

fn saturate<'a>(s: &CellSet, next: impl Fn(usize) -> &'a [(usize, i64)]) -> CellSet {
    let mut out = s.clone();
    let mut stack: Vec<usize> = s.iter().collect();
    while let Some(i) = stack.pop() {
        for &(j, _) in next(i) {
            if out.insert(j) {
                stack.push(j);
            }
        }
    }
    out
}

/// Largest coface-closed subset of `s`.
pub fn interior_cells(x: &CellComplex, s: &CellSet) -> CellSet {
    let outside = CellSet::all(x).difference(s);
    s.difference(&closure(x, &outside))
}

pub fn is_open(x: &CellComplex, s: &CellSet) -> bool {
    s.iter().all(|i| x.cofaces(i).iter().all(|&(j, _)| s.contains(j)))
}

pub fn is_closed(x: &CellComplex, s: &CellSet) -> bool {
    s.iter().all(|i| x.faces(i).iter().all(|&(j, _)| s.contains(j)))
}

/// Interval condition: `cl(S) ∩ star(S) = S`.
pub fn is_locally_closed(x: &CellComplex, s: &CellSet) -> bool {
    closure(x, s).intersection(&star(x, s)) == *s
}

pub fn classify(x: &CellComplex, s: &CellSet) -> Classification {
    debug_assert!(s.in_range(x));
    Classification { open: is_open(x, s), closed: is_closed(x, s), locally_closed: is_locally_closed(x, s) }
}

/// Opens `U' ⊆ U` with `S = U \ U'`: `U = star(S)`, `U' = U \ S`. Fails when
/// `S` is not locally closed, since then `U \ S` is not open.
pub fn open_pair(x: &CellComplex, s: &CellSet) -> Result<(CellSet, CellSet)> {
    let u = star(x, s);
    let u2 = u.difference(s);
    if is_open(x, &u2) {
        Ok((u, u2))
    } else {
        Err(Error::NotLocallyClosed)
    }
}
