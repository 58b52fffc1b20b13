//! Executable finite-scale core of higher-order spreading models.
//!
//! The crate is organised bottom-up:
//!
//! * [`ordinal`]: Cantor-normal-form ordinals below ε₀.
//! * [`famkit`]: finite sets, index sets, regular thin families and their
//!   structural checks.
//! * [`plegma`]: plegma and block tuples, enumeration, Ramsey searches.
//! * [`spaces`]: finitely supported vectors and norm oracles.
//! * [`smodel`]: F-sequence rules, spreading-model and joint-model
//!   extraction, join constructions.
//! * [`poset`]: the domination pre-order over model handles.

pub mod error;
pub mod famkit;
pub mod ordinal;
pub mod plegma;
pub mod poset;
pub mod smodel;
pub mod spaces;

pub use error::{Error, Result};
