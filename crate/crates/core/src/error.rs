use thiserror::Error;

/// Errors produced while building, calibrating or evaluating a design.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside its admissible domain.
    #[error("invalid {field}: {reason}")]
    Domain { field: &'static str, reason: String },

    /// Inputs that must agree in shape do not.
    #[error("structural mismatch: {0}")]
    Structure(String),

    /// Quadrature refinement disagreed by more than the requested tolerance.
    #[error("quadrature did not reach tolerance {tolerance:e} (estimated error {estimate:e})")]
    Quadrature { tolerance: f64, estimate: f64 },

    /// A root search was started on an interval without a sign change.
    #[error("no sign change on [{lo}, {hi}] (f(lo) = {f_lo}, f(hi) = {f_hi})")]
    Bracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    /// An iterative method ran out of iterations.
    #[error("{method} did not converge within {iterations} iterations")]
    Convergence {
        method: &'static str,
        iterations: usize,
    },

    /// A design search finished but does not meet its error-rate targets.
    #[error("calibration failed: {0}")]
    Calibration(String),

    /// Boundaries cross before the final stage.
    #[error("infeasible boundary shape at stage {stage}: lower {lower} >= upper {upper}")]
    InfeasibleShape { stage: usize, lower: f64, upper: f64 },
}

impl Error {
    pub(crate) fn domain(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            field,
            reason: reason.into(),
        }
    }

    /// True for errors caused by bad input rather than numerical trouble.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Domain { .. } | Error::Structure(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
