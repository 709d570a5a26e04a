use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An entry list was empty or contained a zero.
    #[error("invalid continued fraction: {0}")]
    InvalidEntries(String),

    /// A requested depth or level needs more entries than are stored.
    #[error("insufficient continued fraction depth: need entry {needed}, have {available}")]
    InsufficientDepth { needed: usize, available: usize },

    /// A parameter was outside its admissible range.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The slope is not in the normalized half (first entry must be at least 2).
    #[error("slope is not normalized: first entry must be >= 2")]
    NotNormalized,

    /// The stored convergents cannot resolve a ceiling for this index.
    #[error("enclosure exhausted at index {index}: extend the continued fraction")]
    EnclosureExhausted { index: u64 },

    /// A word would exceed the configured symbol budget.
    #[error("word budget exceeded: {requested} symbols requested, budget is {budget}")]
    BudgetExceeded { requested: String, budget: usize },

    /// A prefix is too short to certify a complete language slice.
    #[error("incomplete language at length {n}: prefix has {have} symbols, {need} required")]
    IncompleteLanguage { n: usize, have: usize, need: String },

    /// A slice without a completeness certificate was handed to a consumer.
    #[error("slice of length {0} is not certified complete")]
    UncertifiedSlice(usize),

    /// Right-special detection found zero or several candidates.
    #[error("data integrity: {count} right-special factors of length {n}")]
    RightSpecialCount { n: usize, count: usize },

    /// Two independent computations disagreed.
    #[error("oracle mismatch: {0}")]
    OracleMismatch(String),

    /// Words agree on their whole materialized range.
    #[error("distance unresolved: words agree on all {0} materialized symbols")]
    Unresolved(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
