//! Automatic complexity of normal sequences.
//!
//! Builds Pierce–Shields Champernowne sequences and repeated de Bruijn
//! sequences, computes the exact automatic complexity of short strings,
//! constructs chain-and-loop witness automata for long prefixes, and
//! certifies them by exact path counting and linear Diophantine enumeration.

pub mod acsearch;
pub mod analysis;
pub mod automata;
pub mod cli;
pub mod debruijn;
pub mod dio;
pub mod error;
pub mod psc;
pub mod scalar;
pub mod tseq;
pub mod witness;
pub mod words;

pub use error::{Error, Result};

/// Exact non-negative integer used for lengths, state counts and path counts.
pub type Natural = num_bigint::BigUint;
/// Exact signed integer used by the Diophantine machinery.
pub type Integer = num_bigint::BigInt;
/// Exact rational used for every rate and bound.
pub type Rational = num_rational::BigRational;

pub use automata::Dfa;
pub use words::BitString;
