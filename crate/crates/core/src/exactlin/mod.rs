//! Exact linear algebra: field elements, matrices, based complexes, cohomology,
//! torsion, and graded super lines.

pub mod complex;
pub mod line;
pub mod matrix;
pub mod scalar;

pub use complex::{cohomology, det_line, direct_sum_sign, euler_characteristic, filtration_parity, filtration_sign, torsion, BoundedComplex, CohomologyData, DegreeCohomology};
pub use line::{permutation_parity, regrouping_parity, regrouping_sign, swap_sign, tensor_lines, Block, GradedSuperLine};
pub use matrix::{Echelon, Matrix};
pub use scalar::{Field, Scalar};
