//! Crate-wide error type.
//!
//! Every fallible operation in the library returns [`Result`]. Variants are
//! grouped by failure mode rather than by module so that callers (notably the
//! CLI) can map them onto a stable exit-code contract: input/validation
//! problems versus numerical failures.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// All errors produced by this crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A caller-supplied value violates a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Two arguments that must agree in shape do not.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// The input is structurally valid but degenerate (e.g. an all-zero
    /// design matrix, or a shrinkage target with zero energy).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A function was evaluated outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The Φ₁ double series only converges for |x₂| < 1; callers must use
    /// the quadrature path outside that region.
    #[error("series argument outside convergence region: |x2| = {abs_x2} >= 1")]
    OutsideConvergenceRegion {
        /// Absolute value of the offending second argument.
        abs_x2: f64,
    },

    /// The Φ₁ series did not satisfy its stopping rule within the term budget.
    #[error(
        "series did not converge within {max_terms} terms \
         (last anti-diagonal relative size {last_rel:.3e})"
    )]
    SeriesBudget {
        /// Term budget that was exhausted.
        max_terms: usize,
        /// Relative size of the last anti-diagonal sum against the partial sum.
        last_rel: f64,
    },

    /// Adaptive quadrature exhausted its panel budget before reaching the
    /// requested tolerance; the achieved error estimates are attached.
    #[error(
        "quadrature stopped at absolute error {achieved_abs:.3e} \
         (relative {achieved_rel:.3e}); requested relative {requested_rel:.3e}"
    )]
    QuadratureTolerance {
        /// Estimated absolute error at the point of giving up.
        achieved_abs: f64,
        /// Estimated relative error at the point of giving up.
        achieved_rel: f64,
        /// Relative tolerance that had been requested.
        requested_rel: f64,
    },

    /// A non-finite value (NaN or ±∞) appeared where a finite one is required.
    #[error("non-finite value: {0}")]
    NonFinite(String),

    /// An iterative solver ran out of iterations; the last iterate is
    /// attached so callers can inspect or accept it explicitly.
    #[error(
        "solver did not converge within {max_iter} iterations \
         (last max coefficient change {last_change:.3e})"
    )]
    IterationBudget {
        /// Iteration budget that was exhausted.
        max_iter: usize,
        /// Convergence measure at the final iteration.
        last_change: f64,
        /// Final iterate, for inspection or explicit acceptance.
        last_iterate: Vec<f64>,
    },

    /// A one-dimensional search found no admissible point.
    #[error("search failed: {0}")]
    SearchFailure(String),
}

impl Error {
    /// True when the error reflects bad caller input (as opposed to a
    /// numerical failure during an otherwise valid computation).
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_)
                | Error::DimensionMismatch(_)
                | Error::Degenerate(_)
                | Error::Domain(_)
        )
    }
}
