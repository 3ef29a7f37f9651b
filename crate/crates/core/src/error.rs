use thiserror::Error;

/// Errors shared across the crate. Every precondition violation maps to a
/// variant here so callers (CLI, bindings, tests) can match on the cause.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("block geometry mismatch: {0}x{1} vs {2}x{3}")]
    GeometryMismatch(usize, usize, usize, usize),

    #[error("dimension {0} out of range (1..={1})")]
    DimensionOutOfRange(usize, usize),

    #[error("layer {layer} out of range for dimension {dim}")]
    LayerOutOfRange { dim: usize, layer: usize },

    #[error("invalid band: dim={dim} low={low} width={width}")]
    InvalidBand { dim: usize, low: usize, width: usize },

    #[error("empty operand: {0}")]
    EmptyOperand(&'static str),

    #[error("iteration count must be at least 1")]
    ZeroIterations,

    #[error("set is not contained in the band: first offender {0}")]
    NotInBand(String),

    #[error("budget exceeded: required {required}, budget {budget}")]
    BudgetExceeded { required: usize, budget: usize },

    #[error("parameter out of domain: {0}")]
    ParamDomain(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("hypothesis (1) fails: {0}")]
    GrowthHypothesisFails(String),

    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
