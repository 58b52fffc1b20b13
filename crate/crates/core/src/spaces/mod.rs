//! Finitely supported vectors and norm oracles: ℓ^p, c₀, Schreier,
//! Tsirelson and direct sums.
//!
//! Every oracle has a 1-unconditional basis. Values are exact rationals
//! except ℓ^p for `p ∉ {1, ∞}`, which is a float within
//! [`APPROX_REL_ERR`] relative error.

mod oracle;
mod scalar;
mod vector;

pub use oracle::{Combine, Exponent, NormOracle, TSIRELSON_SUPPORT_CAP};
pub use scalar::{ratio, rational_str, Scalar, APPROX_REL_ERR};
pub use vector::{Coord, Vector};
