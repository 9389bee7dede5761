use std::path::PathBuf;

use crate::mirrors::PassivityViolation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// `Q = 0` together with zero frequency has no defined normal wavevector.
    #[error("degenerate spectral point: Q = 0 at zero frequency")]
    DegeneratePoint,

    #[error(transparent)]
    Passivity(#[from] PassivityViolation),

    /// A reflection formula hit a vanishing denominator.
    #[error("pole in {context} at {location}")]
    Pole { context: &'static str, location: String },

    #[error("tabulated data queried at xi = {xi:e} outside [{lo:e}, {hi:e}] and no tail rule is configured")]
    Extrapolation { xi: f64, lo: f64, hi: f64 },

    #[error("tabulated data is defined on the imaginary axis only")]
    RealAxisTable,

    #[error("quadrature did not converge on [{a:e}, {b:e}]: estimated error {error:e} (requested {requested:e})")]
    Quadrature { a: f64, b: f64, error: f64, requested: f64 },

    #[error("multiple-reflection denominator vanishes (|1 + r_d e^(2ik_d L_d)| = {0:e})")]
    Resonance(f64),

    #[error("phase tracking step too coarse: phase advance {advance:.3} rad per step, use a step below {required:e}")]
    StepTooCoarse { advance: f64, required: f64 },

    #[error("analysis window violates its invariants: {0}")]
    Window(String),

    #[error("argument-principle contour kept hitting a zero after {0} nudges")]
    ContourNudge(usize),

    #[error("numerical derivative failed to converge at omega = {0:e}")]
    Derivative(f64),

    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
