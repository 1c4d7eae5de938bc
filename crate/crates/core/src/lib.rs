//! Exact linear algebra over small finite fields, aimed at network-coding
//! constructions: field towers, subspace codes, planar spreads, matrix groups
//! and their orbits, full flag codes, and a subspace channel simulator.
//!
//! Everything here is exact integer arithmetic — no floating point, no
//! probabilistic shortcuts.  All enumerations are bounded by explicit caps and
//! fail loudly instead of truncating.  All constructions are deterministic:
//! the same parameters produce bit-identical output on every run.
//!
//! The crate is organised bottom-up:
//!
//! * [`galois`] — towers GF(p) ⊆ GF(q) ⊆ GF(q^k) ⊆ GF(q^{2k}) with canonical
//!   integer encodings, primitive polynomials, companion matrices, and the
//!   isomorphism of GF(q^k) onto a matrix algebra over GF(q).
//! * [`matspace`] — dense matrices over a tower level, reduced row echelon
//!   canonical forms, subspaces, the subspace metric, and Grassmannian
//!   enumeration.
//! * [`spread`] — the Segre planar spread of F_q^{2k}, field reduction of
//!   lines, and the block embedding GL(2, q^k) → GL(2k, q).
//! * [`groups`] — explicit matrix groups: closure, orbits, stabilizers,
//!   special linear groups, Singer subgroups, and small subgroup searches.
//! * [`flags`] — full flags, flag distance, orbit flag codes, and the
//!   optimum-distance constructions and their verification.
//! * [`channel`] — a seeded erasure/error channel for flag codewords and a
//!   minimum-distance decoder.
//! * [`suites`] — named verification suites bundling every structural check
//!   over one field tower, timed and reported uniformly.

pub mod channel;
pub mod flags;
pub mod galois;
pub mod groups;
pub mod matspace;
pub mod report;
pub mod spread;
pub mod suites;

/// Default ceiling for Grassmannian and similar combinatorial enumerations.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1_000_000;

/// Default ceiling on the number of elements a group closure may produce.
pub const DEFAULT_CLOSURE_CAP: u64 = 10_000_000;

/// Largest field size a tower level may have.  Keeps the per-level log/exp
/// tables at a few hundred megabytes in the absolute worst case; every
/// supported construction lives far below this.
pub const MAX_LEVEL_SIZE: u64 = 1 << 24;

use thiserror::Error;

/// Crate-wide error type.
///
/// Resource-cap violations are kept distinct from validation errors so that
/// callers (in particular the CLI) can map them to different exit codes.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("invalid tower parameter: {0}")]
    BadParameter(String),
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("polynomial is not primitive: {0}")]
    NotPrimitive(String),
    #[error("element encoding {enc} out of range for level {level}")]
    BadEncoding { level: usize, enc: u64 },
    #[error("expected an element of tower level {expected}, got level {got}")]
    WrongLevel { expected: usize, got: usize },
    #[error("the zero element has no multiplicative order")]
    ZeroElement,
    #[error("ambient dimensions differ: {0} vs {1}")]
    AmbientMismatch(usize, usize),
    #[error("matrix is singular")]
    Singular,
    #[error("invalid dimension: {0}")]
    BadDimension(String),
    #[error("invalid flag type vector: {0}")]
    BadFlagType(String),
    #[error("invalid input: {0}")]
    BadInput(String),
    #[error("{what} needs {needed} items, exceeding the cap of {cap}")]
    CapExceeded { what: String, needed: u64, cap: u64 },
}

impl Error {
    /// True when the error reports a resource cap, not invalid input.
    pub fn is_cap(&self) -> bool {
        matches!(self, Error::CapExceeded { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
