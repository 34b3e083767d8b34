use thiserror::Error;

use crate::quantizer::PhaseState;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A grid does not cover the support required by a state or operator.
    #[error("grid [{x_min}, {x_max}] does not cover required range [{need_min}, {need_max}]")]
    Coverage {
        x_min: f64,
        x_max: f64,
        need_min: f64,
        need_max: f64,
    },

    /// A grid is too coarse for the length or momentum scale it must resolve.
    #[error("grid spacing {h} exceeds the resolution limit {limit}")]
    Resolution { h: f64, limit: f64 },

    /// Two objects that must share a grid do not.
    #[error("grid mismatch between operands")]
    GridMismatch,

    /// Adaptive quadrature stopped before reaching its tolerance.
    #[error(
        "quadrature did not converge: estimated error {achieved:e} above tolerance {requested:e}"
    )]
    Quadrature { achieved: f64, requested: f64 },

    /// A trajectory produced a non-finite state.
    #[error("integration diverged at t = {t}; last finite state q = {:e}, p = {:e}", last.q, last.p)]
    Divergence { t: f64, last: PhaseState },

    /// The inverse mass vanished where a finite mass is required.
    #[error("inverse mass vanishes at q = {q}")]
    Singularity { q: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be finite, got {x}")))
    }
}
