use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed instance: {0}")]
    MalformedInstance(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid solution vector: {0}")]
    InvalidSolution(String),

    #[error("scenario cost {value} of variable {index} lies outside [{lower}, {upper}]")]
    ScenarioOutOfBounds {
        index: usize,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("interpolation parameter {0} lies outside [0, 1]")]
    LambdaOutOfRange(f64),

    #[error("solution violates the instance constraints")]
    InfeasibleSolution,

    #[error("instance has no feasible solution")]
    InfeasibleInstance,

    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),

    #[error("relaxation is unbounded")]
    UnboundedRelaxation,

    #[error("cut pool is empty")]
    EmptyPool,

    #[error("decomposition stalled: adversary already pooled with gap {gap}")]
    StalledDecomposition { gap: f64 },

    #[error("instance too large for enumeration (n = {0}, limit 25)")]
    TooLarge(usize),

    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("baseline robustness cost {0} is zero; deviation undefined")]
    ZeroBaseline(f64),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

pub type Result<T> = std::result::Result<T, Error>;
