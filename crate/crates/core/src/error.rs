use thiserror::Error;

/// Errors raised by the dynamics, averaging and cocycle routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("orbit left the fiber domain at step {step} (y = {value})")]
    DomainEscape { step: u64, value: f64 },

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("point does not belong to the state space: {0}")]
    InvalidPoint(String),

    #[error("sampler strategy does not apply to this system: {0}")]
    SamplerMismatch(String),

    #[error("requested {requested} samples but only {available} exist at this depth")]
    StockExhausted { requested: u64, available: u64 },

    #[error("invalid block schedule: {0}")]
    Schedule(String),

    #[error("coordinate {index} lies beyond the horizon cap {cap}")]
    BeyondHorizon { index: usize, cap: usize },

    #[error("trace does not carry a dense tail covering [{needed_from}, {needed_to}]")]
    NotDenseTail { needed_from: u64, needed_to: u64 },

    #[error("horizon too short: {0}")]
    HorizonTooShort(String),

    #[error("singular matrix encountered at step {step}")]
    SingularMatrix { step: u64 },

    #[error("symbol {symbol} has zero weight under the measure")]
    ZeroWeight { symbol: u8 },

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, LabError>;
