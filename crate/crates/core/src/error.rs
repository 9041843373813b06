use thiserror::Error;

/// Everything that can go wrong in this crate.
///
/// Negative verdicts (an invalid table, an ambiguous basis) are not errors;
/// they come back as ordinary report values. Errors are reserved for inputs
/// that cannot be judged at all.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("party {party}: digit {value} out of range (size {size})")]
    Range {
        party: usize,
        value: usize,
        size: usize,
    },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("party {party} signals to itself: outcomes {a:?} and {a_prime:?} give different settings")]
    SelfSignaling {
        party: usize,
        a: Vec<usize>,
        a_prime: Vec<usize>,
    },

    #[error("{what}: search space of {size} exceeds cap {cap}")]
    TooLarge { what: String, size: u128, cap: u64 },

    #[error("logically inconsistent: {0}")]
    Inconsistent(String),

    #[error("not a valid process function: {0}")]
    InvalidProcess(String),

    #[error("basis is not complete and orthonormal (max deviation {deviation:e}, {count} states, expected {expected})")]
    NotABasis {
        deviation: f64,
        count: usize,
        expected: usize,
    },

    #[error("basis is ambiguous: {0}")]
    Ambiguous(String),

    #[error("labels: {0}")]
    Labels(String),

    #[error("unitaries: {0}")]
    Unitaries(String),

    #[error("retry budget of {0} exhausted")]
    RetriesExhausted(usize),

    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
