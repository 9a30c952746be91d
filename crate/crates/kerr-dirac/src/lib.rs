//! Bound states of the Dirac equation in the extreme Kerr-Newman geometry.
//!
//! The time-periodic Dirac equation on an extreme Kerr-Newman background
//! separates into a coupled angular/radial pair of 2x2 first-order systems.
//! This crate computes both sides of that pairing and decides existence:
//!
//! - [`angular`]: eigenvalues lambda_j of the angular operator for half-integer
//!   k and parameters (am, a*omega), by two-sided shooting with Frobenius
//!   starts, plus Lipschitz-budgeted continuation in the parameters.
//! - [`radial`]: the energy fixed by the horizon regularity condition, the
//!   derived radial coefficients, and the closed-form polynomial-times-
//!   exponential eigenfunctions with their normalization integral.
//! - [`quantize`]: the Kerr quantization condition 1 + n + alpha + kappa = 0
//!   solved over the admissible window of |am|, and the Kerr-Newman existence
//!   report for general parameters.
//! - [`verify`]: independent machinery - a dense-matrix angular eigensolver,
//!   a general linear-system integrator, and demonstrations that detuned or
//!   borderline parameters fail normalizability the way the classification
//!   says they must.
//! - [`specfun`]: the small special-function kernel (Kummer M, generalized
//!   Laguerre) that the closed forms are built from.
//!
//! Units are geometric (hbar = c = G = 1); the extremality constraint
//! M^2 = a^2 + Q^2 is enforced at parameter construction.

pub mod angular;
pub mod error;
pub mod ode;
pub mod quadrature;
pub mod quantize;
pub mod radial;
pub mod specfun;
pub mod types;
pub mod verify;

pub use error::{Error, Result};
pub use types::{HalfInteger, SampledFunction};
