//! Heegaard Floer obstructions to reducible surgeries on thin knots.
//!
//! The library models the immersed-curve invariant of a thin knot complement
//! as exact piecewise-linear data in the marked cylinder, pairs it with
//! surgery lines to obtain the spin^c-graded dimensions and relative Maslov
//! multisets of the surgered manifold, and runs the full obstruction pipeline
//! (dimension periodicity, grading-multiset periodicity, d-invariant tests)
//! deciding for each candidate slope whether a reducible surgery is excluded.
//!
//! Every geometric count is cross-checked against an independent algebraic
//! oracle: the truncated hat mapping cone of the thin knot Floer complex,
//! realized at chain level over F_2.
//!
//! # Conventions
//!
//! - Surgery slopes are positive integers; knots with positive signature are
//!   mirrored first (`tau = -sigma/2`).
//! - spin^c structures of `r`-surgery are labeled by centered representatives
//!   of `Z/rZ`; for even `r` the range is `(-r/2, r/2]`.
//! - Marked points of the cylinder sit at `x = 0, y in Z + 1/2`; curve
//!   components cross the meridian column in the gaps between them.
//! - All pairing geometry is exact rational arithmetic; float types appear
//!   only at the SVG rendering boundary.

pub mod cli_io;
pub mod curve_model;
pub mod dinvariants;
pub mod geom;
pub mod gradings;
pub mod knot_data;
pub mod obstruction;
pub mod pairing;
pub mod render;
pub mod surgery_oracle;

/// Exact scalar used by the pairing geometry. Magnitudes stay small enough
/// (heights `<= g + r`, denominators `O(r^2)`) that 64-bit rationals never
/// overflow on the sweeps this crate runs; the geometry kernel itself is
/// generic, so `BigRat` can be substituted when headroom is wanted.
pub type Rat = num_rational::Ratio<i64>;

/// Arbitrary-precision rational, available for stress checks of the kernel.
pub type BigRat = num_rational::BigRational;

use std::fmt;

/// Crate-wide error type. `Invalid` marks rejected input (CLI exit 2),
/// `Inconsistent` marks an internal cross-check failure such as a
/// geometry/oracle dimension mismatch (CLI exit 3, always a bug).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    Invalid(String),
    Inconsistent(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Invalid(m) => write!(f, "invalid input: {m}"),
            Error::Inconsistent(m) => write!(f, "internal consistency failure: {m}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
