//! Graded super lines and Koszul signs for reordering them.

use std::fmt;

use crate::error::{Error, Result};
use crate::exactlin::scalar::{Field, Scalar};

/// An invertible graded line, recorded as its degree and the value of its
/// generator against a fixed reference generator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GradedSuperLine {
    degree: i64,
    unit: Scalar,
}

impl GradedSuperLine {
    pub fn new(degree: i64, unit: Scalar) -> Result<Self> {
        if unit.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(GradedSuperLine { degree, unit })
    }

    /// The unit line in degree 0.
    pub fn trivial(field: Field) -> Self {
        GradedSuperLine { degree: 0, unit: field.one() }
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn unit(&self) -> &Scalar {
        &self.unit
    }

    pub fn tensor(&self, other: &GradedSuperLine) -> GradedSuperLine {
        GradedSuperLine { degree: self.degree + other.degree, unit: &self.unit * &other.unit }
    }

    pub fn dual(&self) -> GradedSuperLine {
        GradedSuperLine { degree: -self.degree, unit: self.unit.inv().expect("unit is nonzero") }
    }

    /// Sign of the commutativity constraint `L ⊗ L' → L' ⊗ L`.
    pub fn swap_sign(&self, other: &GradedSuperLine) -> Scalar {
        self.unit.field().sign(self.degree * other.degree)
    }
}

impl fmt::Display for GradedSuperLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(deg {}, {})", self.degree, self.unit)
    }
}

pub fn tensor_lines(a: &GradedSuperLine, b: &GradedSuperLine) -> GradedSuperLine {
    a.tensor(b)
}

pub fn swap_sign(a: &GradedSuperLine, b: &GradedSuperLine) -> Scalar {
    a.swap_sign(b)
}

/// A based free module of `rank` placed in cohomological `degree`; its
/// determinant is a line of degree `(-1)^degree * rank`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Block {
    pub degree: i64,
    pub rank: usize,
}

impl Block {
    pub fn new(degree: i64, rank: usize) -> Self {
        Block { degree, rank }
    }

    /// A block whose determinant line has the given degree.
    pub fn with_line_degree(line_degree: i64) -> Self {
        let degree = if line_degree < 0 { 1 } else { 0 };
        Block { degree, rank: line_degree.unsigned_abs() as usize }
    }

    pub fn line_degree(&self) -> i64 {
        let r = self.rank as i64;
        if self.degree.rem_euclid(2) == 0 {
            r
        } else {
            -r
        }
    }
}

/// Parity of the Koszul sign of reordering `blocks`: `perm[i]` is the
/// source index of the block placed at position `i`.
pub fn regrouping_parity(blocks: &[Block], perm: &[usize]) -> Result<bool> {
    check_permutation(perm, blocks.len())?;
    let mut odd = false;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] && blocks[perm[i]].rank % 2 == 1 && blocks[perm[j]].rank % 2 == 1 {
                odd = !odd;
            }
        }
    }
    Ok(odd)
}

/// Koszul sign of permuting graded determinant lines under the super rule.
pub fn regrouping_sign(field: Field, blocks: &[Block], perm: &[usize]) -> Result<Scalar> {
    Ok(field.sign(regrouping_parity(blocks, perm)? as i64))
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::InvalidPermutation(format!("length {} for {n} blocks", perm.len())));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::InvalidPermutation(format!("{perm:?} is not a permutation of 0..{n}")));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Parity of an ordinary permutation (inversion count).
pub fn permutation_parity(perm: &[usize]) -> bool {
    let mut odd = false;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                odd = !odd;
            }
        }
    }
    odd
}
