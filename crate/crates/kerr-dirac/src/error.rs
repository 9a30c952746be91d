use thiserror::Error;

/// Unified error type for the solver library.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A power series failed to meet its tolerance within the term budget.
    #[error("series did not converge after {terms} terms (last |term/sum| = {last_ratio:.3e})")]
    NonconvergentSeries { terms: usize, last_ratio: f64 },

    /// An argument violates a documented precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Twice the azimuthal half-integer must be odd.
    #[error("k must be a half-integer (2k odd), got 2k = {twice}")]
    InvalidK { twice: i64 },

    /// Self-consistency under resolution refinement failed.
    #[error("refinement check failed for {what}: values {coarse:.12e} vs {fine:.12e}")]
    NotConverged { what: &'static str, coarse: f64, fine: f64 },

    /// Eigenvalue continuation could not isolate a unique root inside the step budget.
    #[error("eigenvalue tracking lost at (am, a_omega) = ({am:.6}, {a_omega:.6}): {found} roots in budget window around {guess:.9}")]
    TrackingLost { am: f64, a_omega: f64, guess: f64, found: usize },

    /// The eigenvalue condition requires m^2 - omega^2 > 0.
    #[error("energy out of range: m^2 - omega^2 = {value:.6e} <= 0")]
    EnergyOutOfRange { value: f64 },

    /// The eigenvalue condition requires kappa^2 = lambda^2 + rho^2 m^2 - mu^2 > 1/4.
    #[error("kappa^2 = {value:.6e} <= 1/4")]
    KappaTooSmall { value: f64 },

    /// Adaptive quadrature exhausted its interval budget.
    #[error("quadrature failed on [{a:.3e}, {b:.3e}]: error estimate {err:.3e} above tolerance")]
    QuadratureFailure { a: f64, b: f64, err: f64 },

    /// The adaptive integrator was forced below the minimal step size.
    #[error("step size underflow at x = {x:.6e} (h = {h:.3e})")]
    StepUnderflow { x: f64, h: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
