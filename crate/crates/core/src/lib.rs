//! Numerical toolkit for Gaussian quantum information.
//!
//! The crate covers symplectic linear algebra and Gaussian states
//! ([`symplectic`], [`gaussian`]), truncated Fock-space channels and
//! majorization ([`fock`], [`thinning`], [`lossy`]), entropy inequalities
//! ([`inequalities`]), the classical capacity of the thermal memory channel
//! ([`memcap`]), and the normal form of Gaussian-to-Gaussian maps
//! ([`superop`]). Randomized verification suites live in [`verify`] and are
//! driven by the `gaussq` command-line tool ([`cli`]).

pub mod cli;
pub mod error;
pub mod fock;
pub mod inequalities;
pub mod gaussian;
pub mod linalg;
pub mod lossy;
pub mod memcap;
pub mod random;
pub mod superop;
pub mod symplectic;
pub mod thinning;
pub mod verify;

pub use error::{Error, Result};
