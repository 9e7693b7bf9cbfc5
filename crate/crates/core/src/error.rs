use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("construction failed: {0}")]
    Construction(String),

    /// The fitted quantity vanished (or was non-finite) on the sampled range.
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    /// Adaptive refinement ran out of budget; `value` is the best estimate.
    #[error("quadrature did not reach tolerance: {value} ± {abs_err}")]
    Accuracy { value: f64, abs_err: f64 },

    /// The eigensolver ran out of iterations; `best` holds the current
    /// (eigenvalue, residual) estimates.
    #[error("eigensolver did not converge after {iterations} iterations")]
    Convergence {
        iterations: usize,
        best: Vec<(f64, f64)>,
    },

    /// Gauge fixing hit its sweep budget before the Coulomb residual
    /// reached tolerance.
    #[error("gauge fixing stalled after {} sweeps (residual {})", history.len().saturating_sub(1), history.last().copied().unwrap_or(f64::NAN))]
    GaugeFixing { history: Vec<f64> },
}
