use thiserror::Error;

use crate::states::Family;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("odd cat state is undefined at zero amplitude")]
    OddAtZeroAmplitude,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("family `{family}` cannot be used here: expected a {expected} family")]
    WrongFamily { family: Family, expected: &'static str },

    #[error("Fock truncation violated: {mass:.3e} probability beyond n_max = {n_max} (bound {bound:.1e})")]
    Truncation { mass: f64, n_max: usize, bound: f64 },

    #[error("displacement |alpha| = {magnitude:.3} exceeds the truncation headroom {limit:.3}")]
    Headroom { magnitude: f64, limit: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error(
        "optimizer did not converge: none of {starts} starts met tol {tol:.1e} within {max_iter} iterations (best |B| = {best:.6})"
    )]
    NonConvergent {
        starts: usize,
        max_iter: usize,
        tol: f64,
        best: f64,
    },

    #[error("quadrature did not converge: last two refinements differ by {delta:.3e}")]
    Quadrature { delta: f64 },

    #[error("{quantity} is not monotone over the sweep (first violation at index {index})")]
    NonMonotone { quantity: &'static str, index: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be finite, got {value}"),
        })
    }
}
