use alloc::vec::Vec;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Hypergraph construction rejected an edge with no vertices.
    EmptyEdge { edge: usize },
    /// Hypergraph construction rejected a vertex id outside [1, n].
    VertexOutOfRange { edge: usize, vertex: usize, n: usize },
    /// An operation needs more hyperedges than the hypergraph has.
    TooFewEdges { need: usize, have: usize },
    /// A numeric parameter is outside its documented range.
    ParamOutOfRange { name: &'static str, value: usize, min: usize, max: usize },
    /// The union-difference parameter chi is 0, so no selector can
    /// satisfy the identification preconditions.
    ChiZero,
    /// chi exceeds the pool capacity declared when augmenting.
    PoolCapacity { chi: usize, declared: usize },
    /// An S-set needed more dummy vertices than the pool holds.
    PoolExhausted { capacity: usize },
    /// Matrix shape does not match the hypergraph.
    WidthMismatch { expected: usize, got: usize },
    /// A selector check indexed a column beyond the matrix width.
    ColumnOutOfRange { column: usize, width: usize },
    /// Response vector length differs from the matrix row count.
    ResponseLength { expected: usize, got: usize },
    /// The exact greedy enumeration would exceed the configured budget.
    WorkBudgetExceeded { needed: u128, budget: u128 },
    /// The randomized builder hit its retry cap; the witness names the
    /// edge tuple that still fails (distinguished edge first).
    ConstructionFailed { attempts: u32, witness_edges: Vec<usize>, found: usize, required: usize },
    /// A strict oracle was asked to hide a set that is not a hyperedge.
    DefectiveNotInHypergraph,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyEdge { edge } => write!(f, "edge {edge} is empty"),
            Error::VertexOutOfRange { edge, vertex, n } => {
                write!(f, "edge {edge} contains vertex {vertex} outside [1, {n}]")
            }
            Error::TooFewEdges { need, have } => {
                write!(f, "operation needs at least {need} hyperedges, got {have}")
            }
            Error::ParamOutOfRange { name, value, min, max } => {
                write!(f, "parameter {name}={value} outside [{min}, {max}]")
            }
            Error::ChiZero => write!(f, "chi is 0 for this hypergraph (nested edges); no selector applies"),
            Error::PoolCapacity { chi, declared } => {
                write!(f, "chi={chi} exceeds the dummy pool capacity {declared} declared at augmentation")
            }
            Error::PoolExhausted { capacity } => {
                write!(f, "dummy pool of {capacity} vertices exhausted while forming an S-set")
            }
            Error::WidthMismatch { expected, got } => {
                write!(f, "matrix has {got} columns where {expected} are required")
            }
            Error::ColumnOutOfRange { column, width } => {
                write!(f, "column {column} out of range for width {width}")
            }
            Error::ResponseLength { expected, got } => {
                write!(f, "response vector has {got} bits, matrix has {expected} rows")
            }
            Error::WorkBudgetExceeded { needed, budget } => {
                write!(f, "candidate enumeration needs {needed} vectors, budget is {budget}")
            }
            Error::ConstructionFailed { attempts, witness_edges, found, required } => {
                write!(
                    f,
                    "randomized construction failed after {attempts} attempts; edges {witness_edges:?} realize {found} of {required} identity rows"
                )
            }
            Error::DefectiveNotInHypergraph => {
                write!(f, "defective set is not a hyperedge (use permissive mode to allow this)")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
