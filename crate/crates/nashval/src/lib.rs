//! Exact classification of divisorial valuations on threefold germs
//! `xy = f(z, u)` inside the cyclic quotient `C^4 / (1/r)(a, -a, 1, 0)`.
//!
//! The crate computes, in exact rational arithmetic throughout:
//!
//! - Newton weights `m_k` of the defining series and their stabilization
//!   invariants ([`series`]);
//! - weighted blow-up charts of cyclic quotient spaces, discrepancies and
//!   valuation transport ([`toric`]);
//! - the stepwise partial resolution of a germ and the brute-force divisor
//!   enumeration it induces ([`resolve`]);
//! - the closed-form valuation catalog with Nash / essential classification
//!   and the surjectivity verdict for the Nash map ([`catalog`]);
//! - Q-factoriality through Newton-polygon factorization of the defining
//!   series ([`factor`]);
//! - a JSON / table reporting layer and the CLI entry points ([`report`]).
//!
//! No floating point is used anywhere; all values are arbitrary-precision
//! rationals kept in lowest terms.

pub mod catalog;
pub mod exact;
pub mod factor;
pub(crate) mod polyq;
pub mod report;
pub mod resolve;
pub mod series;
pub mod toric;

/// Arbitrary-precision integer used everywhere in the crate.
pub type Int = num_bigint::BigInt;
/// Arbitrary-precision rational, always in lowest terms with positive
/// denominator (guaranteed by the representation).
pub type Rat = num_rational::BigRational;

use thiserror::Error;

/// Crate-wide error type. Variants map onto the CLI exit codes: validation
/// failures exit 1, truncation failures exit 2.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("insufficient truncation: {0}")]
    InsufficientTruncation(String),
    #[error("invalid germ: {0}")]
    InvalidGerm(String),
    #[error("invalid weight: {0}")]
    InvalidWeight(String),
    #[error("not a terminal quotient: {0}")]
    NonTerminal(String),
    #[error("normalization violated: {0}")]
    NormalizationViolated(String),
    #[error("factorization failed: {0}")]
    Factorization(String),
    #[error("factors unavailable: {0}")]
    FactorsUnavailable(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
