use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("vector has zero norm")]
    ZeroVector,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("ensemble has no members")]
    EmptyEnsemble,

    #[error("invalid spectral exponent {alpha}: {reason}")]
    InvalidExponent { alpha: f64, reason: &'static str },

    #[error("time s = {s} outside the quadrature table [0, {s_max}]")]
    OutOfTableRange { s: f64, s_max: f64 },

    #[error("time t = {t} outside the tabulated range [{first}, {last}]")]
    OutOfRange { t: f64, first: f64, last: f64 },

    #[error("sample times must be strictly increasing (at sample {index})")]
    NonMonotonicTimes { index: usize },

    #[error("jump probability {probability:.4} on channel {channel} at t = {t} exceeds 0.1; reduce dt")]
    StepTooLarge { probability: f64, channel: usize, t: f64 },

    #[error("channel {channel} has negative rate {rate:e} at t = {t}; use the nmep solver")]
    NegativeRate { channel: usize, rate: f64, t: f64 },

    #[error("no reverse-jump target for channel {channel} at t = {t}: the jump state of member {source_member} is absent from the ensemble")]
    ReverseTargetMissing { channel: usize, source_member: usize, t: f64 },

    #[error("member {member} has non-positive count {count}; nmqj requires positive counts")]
    NonPositiveCount { member: usize, count: i64 },

    #[error("ensemble total changed from {expected} to {found}")]
    CountNotConserved { expected: i64, found: i64 },

    #[error("time grids differ at row {row}")]
    GridMismatch { row: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("step {step} (t = {t}): {source}")]
    Step {
        step: usize,
        t: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// The innermost error, with step annotations stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::Step { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
