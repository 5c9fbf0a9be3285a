//! Exact calculators for the birational geometry of Fulton-MacPherson
//! configuration spaces `X[n]` and their close relatives: blow-up schedules
//! and Picard ranks, square-free Chow rings of products of lines, rational
//! polyhedral cones with divisor/curve pairings, genus-zero stable maps to
//! the line with their group actions, fibration descriptors, and
//! automorphism-group structure tables.
//!
//! Everything is computed over arbitrary-precision integers and rationals.
//! There is no floating point anywhere in this crate; every answer is exact
//! and every negative verdict carries a certificate or a named reason.

pub mod aut;
pub mod blowup;
pub mod chow;
pub mod cone;
pub mod fibration;
pub mod matrix;
pub mod perm;
pub mod presets;
pub mod proj;
pub mod rational;
pub mod stable;
pub mod subsets;

pub use rational::{Int, Rational};
pub use subsets::IndexSubset;

/// Error type shared by every module. Errors are reserved for malformed
/// input; mathematical denials (memberships, obstructions, rejections) are
/// ordinary return values so callers can inspect their certificates.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("lattice mismatch: {0}")]
    LatticeMismatch(String),
    #[error("degenerate pairing: {0}")]
    DegeneratePairing(String),
    #[error("unknown label: {0}")]
    UnknownLabel(String),
    #[error("search bound exceeded: {0}")]
    BoundExceeded(String),
}

pub type Result<T> = std::result::Result<T, Error>;
