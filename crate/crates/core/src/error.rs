use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("generator list is empty")]
    EmptyGenerators,

    /// A generator coordinate is not strictly negative, so the set is not
    /// compactly inside the unit polydisk and its covolume is infinite.
    #[error("generator {index} has coordinate {coordinate} = {value}, must be <= -1e-9")]
    NonNegativeCoordinate {
        index: usize,
        coordinate: usize,
        value: f64,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("parameter {name} = {value} is outside {range}")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("dual vector coordinate {coordinate} = {value} is negative")]
    NegativeDualCoordinate { coordinate: usize, value: f64 },

    /// Evaluation points of the potentials must lie in the closed negative orthant.
    #[error("point coordinate {coordinate} = {value} is positive")]
    PositiveCoordinate { coordinate: usize, value: f64 },

    #[error("linear program failed: {0}")]
    LpNumericalFailure(String),

    #[error(
        "tolerance {requested:e} not reached within {evaluations} evaluations (achieved {achieved:e})"
    )]
    BudgetExceeded {
        requested: f64,
        achieved: f64,
        evaluations: u64,
    },

    #[error("exact evaluation needs a single generator, body has {generators}")]
    ExactUnavailable { generators: usize },

    #[error("generator {index} has coordinate {value} >= log R = {log_radius}")]
    ScaleTooSmall {
        index: usize,
        value: f64,
        log_radius: f64,
    },

    #[error("invalid t-grid: {0}")]
    InvalidGrid(String),

    #[error("invalid budget: {0}")]
    InvalidBudget(String),
}
