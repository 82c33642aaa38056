use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("load-augmented port system is singular (condition estimate {condition:.3e})")]
    SingularSystem { condition: f64 },
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("invalid angular grid: {0}")]
    InvalidGrid(String),
    #[error("invalid network: {0}")]
    InvalidNetwork(String),
    #[error("invalid antenna bundle field `{field}`: {reason}")]
    InvalidBundle { field: &'static str, reason: String },
    #[error("invalid antenna coder: {0}")]
    InvalidCoder(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("open-circuit pattern matrix is identically zero")]
    DegenerateMatrix,
    #[error("pixel port {port} has zero self-impedance")]
    ZeroSelfImpedance { port: usize },
    #[error("antenna coder {coder} produces a zero pattern coder")]
    ZeroPattern { coder: String },
    #[error("codebook needs at least 2 coders, got {p}")]
    DegenerateCodebook { p: usize },
    #[error("codebook is invalid: {0}")]
    InvalidCodebook(String),
    #[error("symbol covariance is not Hermitian positive semidefinite: {0}")]
    NonPsdCovariance(String),
    #[error("{hypotheses} coder hypotheses exceed the enumeration limit {limit}")]
    EnumerationLimitExceeded { hypotheses: u128, limit: u64 },
    #[error("{trials} Monte-Carlo trials requested, at least {minimum} required")]
    InsufficientTrials { trials: usize, minimum: usize },
    #[error("exhaustive search over {count} candidates is too large")]
    TooLarge { count: u128 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::SingularSystem { .. } => "SingularSystem",
            Error::InvalidGeometry(_) => "InvalidGeometry",
            Error::InvalidGrid(_) => "InvalidGrid",
            Error::InvalidNetwork(_) => "InvalidNetwork",
            Error::InvalidBundle { .. } => "InvalidBundle",
            Error::InvalidCoder(_) => "InvalidCoder",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::DegenerateMatrix => "DegenerateMatrix",
            Error::ZeroSelfImpedance { .. } => "ZeroSelfImpedance",
            Error::ZeroPattern { .. } => "ZeroPattern",
            Error::DegenerateCodebook { .. } => "DegenerateCodebook",
            Error::InvalidCodebook(_) => "InvalidCodebook",
            Error::NonPsdCovariance(_) => "NonPsdCovariance",
            Error::EnumerationLimitExceeded { .. } => "EnumerationLimitExceeded",
            Error::InsufficientTrials { .. } => "InsufficientTrials",
            Error::TooLarge { .. } => "TooLarge",
            Error::InvalidParameter(_) => "InvalidParameter",
        }
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularSystem { .. }
                | Error::DegenerateMatrix
                | Error::ZeroPattern { .. }
                | Error::NonPsdCovariance(_)
        )
    }
}
