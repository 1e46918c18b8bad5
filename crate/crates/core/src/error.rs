use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation (t <= 0, x < L, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Evaluation requested at (or within the near-pole threshold of) a simple pole.
    #[error("evaluation at pole {pole} (distance {distance:e})")]
    Pole { pole: num_complex::Complex64, distance: f64 },

    /// Two pole sets that must be disjoint share a pole.
    #[error("pole collision between Q-transform pole {kappa} and resonance pole {k_n}")]
    PoleCollision { kappa: num_complex::Complex64, k_n: num_complex::Complex64 },

    /// A result could not be represented as a finite double.
    #[error("non-finite result in {0}")]
    NonFinite(&'static str),

    /// A stated precondition of the operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Resonance data violates time-reversal pairing.
    #[error("resonance pairing violated: {0}")]
    Pairing(String),

    /// No main wavefront maximum was found in the search window.
    #[error("front not found in window [{t_lo}, {t_hi}] ps")]
    FrontNotFound { t_lo: f64, t_hi: f64 },

    /// A trace is too short for the requested spectral estimate.
    #[error("insufficient span: {0}")]
    InsufficientSpan(String),

    /// Invalid parameters or configuration.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// The finite-difference grid cannot support the requested run.
    #[error("infeasible grid: {0}")]
    InfeasibleGrid(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
