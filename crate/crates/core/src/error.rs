use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("division by a series without invertible leading term")]
    NotInvertible,
    #[error("logarithm of a series with constant term {0}")]
    LogDomain(String),
    #[error("series is not nilpotent: {0}")]
    NotNilpotent(String),
    #[error("pole collision in variable {0}")]
    PoleCollision(String),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("missing or invalid parameter `{0}`")]
    BadParameter(String),
    #[error("unsupported curve: {0}")]
    UnsupportedCurve(String),
    #[error("higher-order ramification unsupported at z = {0}")]
    HigherOrderRamification(String),
    #[error("truncation too small: {0}")]
    Truncation(String),
    #[error("enumeration limit exceeded: n = {0}")]
    EnumerationLimit(usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("missing data: {0}")]
    MissingData(String),
    #[error("inconsistent extraction: {0}")]
    Inconsistent(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid_argument",
            Error::NotInvertible => "not_invertible",
            Error::LogDomain(_) => "log_domain",
            Error::NotNilpotent(_) => "not_nilpotent",
            Error::PoleCollision(_) => "pole_collision",
            Error::UnknownPreset(_) => "unknown_preset",
            Error::BadParameter(_) => "bad_parameter",
            Error::UnsupportedCurve(_) => "unsupported_curve",
            Error::HigherOrderRamification(_) => "higher_order_ramification",
            Error::Truncation(_) => "truncation",
            Error::EnumerationLimit(_) => "enumeration_limit",
            Error::Parse(_) => "parse",
            Error::MissingData(_) => "missing_data",
            Error::Inconsistent(_) => "inconsistent",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
