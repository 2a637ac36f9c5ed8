use thiserror::Error;

use crate::augment::RingDesc;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("image of `{0}` is not a unit")]
    NotAUnit(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("validation failed: {0}")]
    ValidationFailed(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("invalid value: {0}")]
    InvalidValue(String),
    #[error("search space of {size} assignments exceeds the cap of {cap}")]
    SearchTooLarge { size: String, cap: u128 },
    #[error("operation requires a field, got {0}")]
    FieldRequired(RingDesc),
    #[error("not an augmentation: {0}")]
    NotAnAugmentation(String),
    #[error("boundary maps do not compose to zero at degree {0}")]
    NotAComplex(i64),
    #[error("augmentations live over different rings ({0} vs {1})")]
    RingMismatch(RingDesc, RingDesc),
}
