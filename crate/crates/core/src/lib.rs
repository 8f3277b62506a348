//! Exact calculator for constructible cellular sheaves on finite simplicial
//! complexes: cohomology, determinant lines and torsion, lower-star Morse
//! data, epsilon-factors on circles and characteristic cycles.

pub mod bundle;
pub mod cellsp;
pub mod error;
pub mod exactlin;
pub mod generate;
pub mod micro;
pub mod morse;
pub mod sheaf;

pub use bundle::Bundle;
pub use cellsp::{CellComplex, CellSet, ClosedFiltrationWitness, Partition};
pub use error::{Error, Result};
pub use exactlin::{BoundedComplex, CohomologyData, Field, GradedSuperLine, Matrix, Scalar};
pub use micro::{EpsilonFactor, LagrangianCycle1D, MarkedVertexSet, OrientationField};
pub use morse::{MorseDatum, PLFunction};
pub use sheaf::CellularSheaf;
