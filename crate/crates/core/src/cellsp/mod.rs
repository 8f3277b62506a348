//! Simplicial complexes, cell sets in the cell topology, partitions and
//! closed filtrations.

pub mod cellset;
pub mod complex;
pub mod partition;

pub use cellset::{classify, closure, interior_cells, is_closed, is_locally_closed, is_open, open_pair, star, CellSet, Classification};
pub use complex::{build_complex, circle, disjoint_circles, tetrahedron_boundary, CellComplex};
pub use partition::{closed_filtration_witness, common_refinement, lexicographic_witness, verify_witness, ClosedFiltrationWitness, Partition};
