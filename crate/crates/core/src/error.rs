use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("differential does not square to zero at degree {degree}")]
    NotAComplex { degree: i64 },
    #[error("cohomology data inconsistent with complex: {0}")]
    InconsistentCohomology(String),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("missing face {face:?} of cell {cell:?}")]
    MissingFace { cell: Vec<usize>, face: Vec<usize> },
    #[error("duplicate cell {0:?}")]
    DuplicateCell(Vec<usize>),
    #[error("invalid cell {0:?}: {1}")]
    InvalidCell(Vec<usize>, String),
    #[error("cell set is not locally closed")]
    NotLocallyClosed,
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("partition does not come from a closed filtration: parts {cycle:?} form a cycle")]
    FiltrationCycle { cycle: Vec<usize> },
    #[error("invalid sheaf: {0}")]
    InvalidSheaf(String),
    #[error("function is not generic: vertices {0} and {1} share a value")]
    NonGeneric(usize, usize),
    #[error("invalid function: {0}")]
    InvalidFunction(String),
    #[error("invalid open pair: {0}")]
    InvalidOpenPair(String),
    #[error("complex is not a closed 1-manifold: {0}")]
    NotOneManifold(String),
    #[error("invalid orientation field: {0}")]
    InvalidOrientation(String),
    #[error("marked vertex set is empty")]
    EmptyMarkedSet,
    #[error("sheaf is not transversal: lens complexes at vertices {0:?} are not acyclic")]
    NotTransversal(Vec<usize>),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid generator parameters: {0}")]
    InvalidParameters(String),
}
