use num_complex::Complex64;
use thiserror::Error;

/// Failures shared by every layer of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole of order {order} at z = {pole}")]
    HigherOrderPole { pole: Complex64, order: usize },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("point is not in the chart overlap: {0}")]
    NotInOverlap(String),

    #[error("local exponent difference {0} is a negative integer")]
    ResonantExponents(Complex64),

    #[error("fixed singularity reached at t = {t} (q = {q})")]
    FixedSingularity { t: Complex64, q: Complex64 },

    #[error("step size underflow at t = {t} (h = {h:e}), the last point reached")]
    StepFailure {
        t: Complex64,
        h: f64,
        state: Vec<Complex64>,
    },

    #[error("path passes within {distance:e} of the pole {pole}")]
    PathTooClose { pole: Complex64, distance: f64 },

    #[error("point is off the variety: residual {0:e}")]
    OffVariety(f64),

    #[error("invalid path: {0}")]
    InvalidPath(String),
}

pub type Result<T> = std::result::Result<T, Error>;
