use thiserror::Error;

/// Errors produced while loading inputs or evaluating constants and checks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("vertex index {index} out of range for a graph with {len} vertices")]
    VertexOutOfRange { index: usize, len: usize },

    #[error("dimension mismatch: expected {expected} values, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("exponent p must satisfy p >= 1, got {0}")]
    InvalidExponent(f64),

    #[error("constants are only defined for finite p")]
    InfiniteExponent,

    #[error("invalid shells: {0}")]
    InvalidShells(String),

    #[error("vertices unreachable from the initial set: {}", .0.join(", "))]
    Unreachable(Vec<String>),

    #[error("partition is not admissible: K_{index} = 0")]
    Inadmissible { index: usize },

    #[error("chain is not well defined: {0}")]
    IllDefinedChain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("signal is not bandlimited: component at eigenvalue {eigenvalue} exceeds omega = {omega}")]
    NotBandlimited { eigenvalue: f64, omega: f64 },

    #[error("graph has {vertices} vertices, dense eigensolver limit is {limit}; analyse a smaller subgraph")]
    Capacity { vertices: usize, limit: usize },

    #[error("eigensolver failed to converge")]
    NoConvergence,

    #[error("vertex weights must all equal 1 for l2 spectral analysis")]
    NonUnitVertexWeights,

    #[error("uniqueness condition violated: omega = {omega} must be < K0/2 = {limit}")]
    UniquenessCondition { omega: f64, limit: f64 },

    #[error("sampling density insufficient: epsilon * delta = {0} >= 1")]
    InsufficientDensity(f64),

    #[error("relaxation {value} outside the admissible range (0, {max})")]
    Relaxation { value: f64, max: f64 },

    #[error("k = {k}, omega = {omega}: S = kZ is a sampling set iff k*omega <= pi")]
    ShannonInadmissible { k: usize, omega: f64 },

    #[error("tightness bound not applicable: (k+1)*sqrt(2-2cos(omega)) = {0} >= 1")]
    TightnessNotApplicable(f64),

    #[error("{0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
