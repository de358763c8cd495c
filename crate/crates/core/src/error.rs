use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("retry budget exhausted after {attempts} attempts: {what}")]
    RetryBudgetExhausted { attempts: usize, what: String },

    #[error("node {0} is isolated, normalized Laplacian undefined")]
    IsolatedNode(usize),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("graph is not regular")]
    NotRegular,

    #[error("exhaustive bound exceeded: n = {n} > {max}")]
    ExhaustiveBoundExceeded { n: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("missing measurement for ordered pair ({i}, {j})")]
    MissingMeasurement { i: usize, j: usize },

    #[error("aggregated measurement is not orthogonal to the ones vector (sum {0:e})")]
    NotZeroSum(f64),

    #[error("regularization q[{node}] = {value} must be < 1")]
    RegularizationOutOfRange { node: usize, value: f64 },

    #[error("parameter {value} outside domain ({lower}, {upper}) of {label}")]
    OutsideDomain {
        label: String,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("degenerate domain ({lower}, {upper}) for margin {margin}")]
    DegenerateDomain { lower: f64, upper: f64, margin: f64 },

    #[error("convergence rate index undefined: {0}")]
    UnitEigenvalue(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
