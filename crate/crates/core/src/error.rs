use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("words are over different alphabets")]
    MismatchedAlphabets,

    #[error("operation undefined on the empty word")]
    EmptyWord,

    #[error("word is too short: need length >= {min}, got {got}")]
    WordTooShort { min: usize, got: usize },

    #[error("word is not primitive")]
    NotPrimitive,

    #[error("word is not a Lyndon word")]
    NotLyndon,

    #[error("word is not a good word (failing conditions {:?})", report.failing_conditions())]
    NotGoodWord {
        report: Box<crate::runs::GoodWordReport>,
    },

    #[error("invalid letter distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("sample size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("enumeration budget exceeded: {words} words > {budget}")]
    BudgetExceeded { words: u128, budget: u128 },
}
