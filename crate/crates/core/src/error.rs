use thiserror::Error;

/// Errors raised by the domain operations of this crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("pattern must be non-empty")]
    EmptyPattern,
    #[error("invalid bit character {0:?} at position {1}")]
    InvalidBit(char, usize),
    #[error("malformed packed bit string: {0}")]
    MalformedPacked(String),
    #[error("de Bruijn order {order} exceeds the cap of {cap}")]
    OrderTooLarge { order: u32, cap: u32 },
    #[error("order must be at least 1")]
    ZeroOrder,
    #[error("rotation {rotation} out of range for a string of length {len}")]
    RotationOutOfRange { rotation: u64, len: u64 },
    #[error("zone {n} exceeds the materialization cap of {cap}")]
    ZoneCapExceeded { n: u32, cap: u32 },
    #[error("{what} of {requested} exceeds the budget of {budget}")]
    BudgetExceeded {
        what: &'static str,
        requested: String,
        budget: u64,
    },
    #[error("value is not representable: {0}")]
    Unrepresentable(String),
    #[error("the de Bruijn string of order {0} does not start with 0^n")]
    NotZeroPrefixed(u32),
    #[error("loop lemma makes no claim for j = {0} (neither odd nor a power of two)")]
    LemmaNotApplicable(u32),
    #[error("invalid automaton: {0}")]
    InvalidDfa(String),
    #[error("string length {len} exceeds the search cap of {cap}")]
    SearchCapExceeded { len: usize, cap: usize },
    #[error("no automaton with at most {0} states uniquely accepts the string")]
    NoWitness(usize),
    #[error("case {case} does not apply to n = {n}")]
    CaseMismatch { case: u8, n: u32 },
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("nondeterministic transition at state {state} on bit {bit}")]
    Nondeterministic { state: usize, bit: u8 },
    #[error("coefficient {0} must be positive")]
    NonPositiveCoefficient(usize),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
