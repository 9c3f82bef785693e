use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("class file is empty")]
    EmptyFile,
    #[error("line {line}: ragged row (expected {expected} columns, found {found})")]
    RaggedRow {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: unexpected character {ch:?} (only '0' and '1' allowed)")]
    BadChar { line: usize, ch: char },
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("concept length {found} does not match domain size {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("point {point} is outside the domain 0..{n}")]
    PointOutOfRange { point: usize, n: usize },
    #[error("point subset must be nonempty")]
    EmptySubset,
    #[error("concept class is empty")]
    EmptyClass,
    #[error("concept is not a member of the class")]
    NotInClass,
    #[error("concept index {index} out of range (class has {size} concepts)")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("labeled sample is not realizable by the class")]
    Unrealizable,
    #[error("malformed side information: {0}")]
    MalformedSideInfo(String),
    #[error("class is not a (3,6) class: points {0:?} carry more than 6 patterns")]
    Not36Class([usize; 3]),
    #[error("rejection budget of {budget} draws exhausted after {accepted} concepts")]
    BudgetExhausted { budget: usize, accepted: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
