use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("level mismatch: {0} vs {1}")]
    LevelMismatch(u32, u32),
    #[error("indeterminate zero at available precision")]
    IndeterminateZero,
    #[error("series not invertible: {0}")]
    NotInvertible(String),
    #[error("profile mismatch")]
    ProfileMismatch,
    #[error("window overflow: {0}")]
    WindowOverflow(String),
    #[error("not a unit: {0}")]
    NotAUnit(String),
    #[error("level {0} outside window [{1}, {2}]")]
    LevelOutOfWindow(u32, u32, u32),
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),
    #[error("Harder-Narasimhan join failure: {0}")]
    HNJoinFailure(String),
    #[error("certificate failure: {0}")]
    CertificateFailure(String),
    #[error("connection is not locally trivial: {0}")]
    NotLocallyTrivial(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
