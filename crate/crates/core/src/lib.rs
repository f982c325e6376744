//! Bell-inequality analysis of squeezed cat states in phase space.
//!
//! The crate evaluates closed-form Wigner and Husimi functions of (squeezed)
//! superpositions of coherent states and of the entangled two-mode states made
//! from them, maximizes the parity and on/off Bell-CHSH functionals over the
//! four displacement settings, and checks all of it against a truncated
//! Fock-space simulation.

pub mod bell;
pub mod cli;
pub mod error;
pub mod experiment;
pub mod fock;
pub mod optimize;
pub mod phasespace;
pub mod states;

mod gauss;

pub use error::{Error, Result};
pub use num_complex::Complex64;
