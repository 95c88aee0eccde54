//! Exact analysis of linear locally repairable storage codes over prime
//! fields.
//!
//! The crate provides finite-field linear algebra ([`field_core`]), a
//! generator/parity-check code model with support enumerators
//! ([`code_model`]), MacWilliams-type transforms between a code and its
//! dual ([`macwilliams`]), repair-group discovery and robustness
//! verification ([`locality_analysis`]), an exact-rational simplex
//! ([`ratlp`]), LP upper bounds on code size and LP feasibility of
//! update-efficient parameters ([`lp_bounds`]), and a small catalog of
//! reference codes ([`catalog`]).
//!
//! Everything is computed in exact arithmetic: field elements are reduced
//! integers, counts are integers, and every optimization runs over
//! arbitrary-precision rationals. No floating point is used anywhere.

pub mod catalog;
pub mod code_model;
pub mod field_core;
pub mod locality_analysis;
pub mod lp_bounds;
pub mod macwilliams;
pub mod ratlp;

use thiserror::Error;

/// Errors reported by the analysis library.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violates a documented precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The requested modulus is not a prime number.
    #[error("{0} is not prime")]
    NotPrime(u64),

    /// An exhaustive enumeration would exceed the configured guard.
    #[error("enumeration of {needed} items exceeds the configured limit of {limit}")]
    EnumerationLimit { needed: u128, limit: u64 },

    /// The construction only describes the zero code, which stores nothing.
    #[error("the input describes the zero code (dimension 0), which cannot store data")]
    ZeroCode,

    /// A code file failed to parse; `line` is 1-based.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// No catalog entry with the requested name.
    #[error("unknown catalog entry '{0}'")]
    UnknownCatalog(String),

    /// Matrix or vector dimensions do not fit together.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// An internal linear-programming failure (malformed model).
    #[error("linear program error: {0}")]
    Lp(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Resource ceilings for exhaustive enumeration.
///
/// The library never enumerates q^K codewords, q^(N-K) dual codewords, or
/// erasure-pattern subsets without first checking the relevant limit, so
/// oversized inputs fail with an explicit [`Error::EnumerationLimit`]
/// instead of running away.
#[derive(Debug, Clone)]
pub struct Limits {
    /// Largest permitted codeword enumeration (q^K, q^(N-K), or 2^(N+K)
    /// depending on the operation). Default: 2^22.
    pub max_enumeration: u64,
    /// Largest permitted number of unavailable-node subsets examined per
    /// node when scanning erasure patterns. Default: 10^6.
    pub max_gamma_subsets: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_enumeration: 1 << 22, max_gamma_subsets: 1_000_000 }
    }
}

impl Limits {
    /// Default limits with a different enumeration ceiling.
    pub fn with_enumeration(max_enumeration: u64) -> Self {
        Limits { max_enumeration, ..Limits::default() }
    }

    pub(crate) fn check_enumeration(&self, needed: u128) -> Result<()> {
        if needed > self.max_enumeration as u128 {
            Err(Error::EnumerationLimit { needed, limit: self.max_enumeration })
        } else {
            Ok(())
        }
    }

    pub(crate) fn check_gamma_subsets(&self, needed: u128) -> Result<()> {
        if needed > self.max_gamma_subsets as u128 {
            Err(Error::EnumerationLimit { needed, limit: self.max_gamma_subsets })
        } else {
            Ok(())
        }
    }
}
