//! Radial bound-state algebra for the extreme Kerr-Newman Dirac equation.
//!
//! With x = r - rho the coordinate distance from the (degenerate) horizon and
//! tau = omega (rho^2 + a^2) + k a + e Q rho forced to zero (the only energies
//! admitting normalizable states), the radial pair f reduces through two
//! constant linear transformations f = S w, w = T y to the real system
//!
//! ```text
//! x y' = [ -alpha - gamma x   -beta - sigma lambda ] y
//!        [  beta - sigma lambda    alpha + gamma x ]
//! ```
//!
//! whose normalizable solutions exist precisely when either the special pair
//! of conditions beta - sigma lambda = 0, alpha + kappa = 0 holds, or the
//! quantization condition 1 + n + alpha + kappa = 0 holds for a non-negative
//! integer n; in the latter case the solutions are generalized Laguerre
//! polynomials times x^kappa e^(-gamma x). This module computes the
//! coefficients, classifies candidate (lambda, n) pairs, evaluates the closed
//! forms and their exact derivatives, and integrates the normalization weight.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature;
use crate::specfun::{laguerre, laguerre_deriv};
use crate::types::{HalfInteger, SampledFunction};

/// Extreme Kerr-Newman background plus the Dirac particle's quantum numbers.
///
/// Extremality ties the black-hole mass to spin and charge: mass^2 = a^2 + Q^2,
/// and the horizon radius rho equals the mass.
#[derive(Debug, Clone, Copy)]
pub struct ExtremeKNParams {
    /// Black-hole mass M > 0 (geometric units); equals sqrt(a^2 + Q^2).
    pub mass: f64,
    /// Kerr parameter a = J/M (either sign).
    pub a: f64,
    /// Black-hole charge Q.
    pub charge: f64,
    /// Particle rest mass m > 0.
    pub particle_mass: f64,
    /// Particle charge e.
    pub particle_charge: f64,
    /// Azimuthal half-integer quantum number k.
    pub k: HalfInteger,
}

impl ExtremeKNParams {
    pub fn new(
        mass: f64,
        a: f64,
        charge: f64,
        particle_mass: f64,
        particle_charge: f64,
        k: HalfInteger,
    ) -> Result<Self> {
        for (name, v) in [
            ("mass", mass),
            ("a", a),
            ("charge", charge),
            ("particle_mass", particle_mass),
            ("particle_charge", particle_charge),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite")));
            }
        }
        if mass <= 0.0 {
            return Err(Error::InvalidParameter(
                "black-hole mass must be positive".into(),
            ));
        }
        if particle_mass <= 0.0 {
            return Err(Error::InvalidParameter(
                "particle rest mass must be positive".into(),
            ));
        }
        let defect = (mass * mass - a * a - charge * charge).abs();
        if defect > 1e-12 * mass * mass {
            return Err(Error::InvalidParameter(format!(
                "not extreme: mass^2 - a^2 - Q^2 = {defect:e}"
            )));
        }
        Ok(Self {
            mass,
            a,
            charge,
            particle_mass,
            particle_charge,
            k,
        })
    }

    /// Extreme Kerr background (Q = 0, mass = |a|).
    pub fn kerr(a: f64, particle_mass: f64, k: HalfInteger) -> Result<Self> {
        Self::new(a.abs(), a, 0.0, particle_mass, 0.0, k)
    }

    /// Extreme Reissner-Nordstrom background (a = 0, mass = |Q|).
    pub fn reissner_nordstrom(
        charge: f64,
        particle_mass: f64,
        particle_charge: f64,
        k: HalfInteger,
    ) -> Result<Self> {
        Self::new(charge.abs(), 0.0, charge, particle_mass, particle_charge, k)
    }

    /// Horizon radius rho; coincides with the mass in the extreme case.
    pub fn rho(&self) -> f64 {
        self.mass
    }
}

/// The unique energy for which the horizon-singular term tau vanishes:
/// omega = -(k a + e Q rho)/(a^2 + rho^2). Any other energy makes every
/// solution non-normalizable.
pub fn compute_omega(p: &ExtremeKNParams) -> f64 {
    let k = p.k.value();
    if p.charge == 0.0 {
        // rho = |a|, so the general expression collapses to -k/(2a) exactly.
        return -k / (2.0 * p.a);
    }
    if p.a == 0.0 {
        // rho = |Q|: the energy is the particle charge times the hole's sign.
        return -p.particle_charge * p.charge.signum();
    }
    let rho = p.rho();
    -(k * p.a + p.particle_charge * p.charge * rho) / (p.a * p.a + rho * rho)
}

/// tau = omega (rho^2 + a^2) + k a + e Q rho; zero exactly at `compute_omega`.
pub fn omega_defect(p: &ExtremeKNParams, omega: f64) -> f64 {
    let rho = p.rho();
    omega * (rho * rho + p.a * p.a) + p.k.value() * p.a + p.particle_charge * p.charge * rho
}

/// Coefficients of the transformed radial system at a given lambda.
#[derive(Debug, Clone, Copy)]
pub struct RadialCoefficients {
    pub omega: f64,
    /// Horizon-singular defect; zero (to rounding) by construction of omega.
    pub tau: f64,
    /// mu = 2 rho omega + e Q.
    pub mu: f64,
    /// sign(omega) with sign(0) = +1.
    pub sigma: f64,
    /// alpha = (rho m^2 - omega mu)/gamma.
    pub alpha: f64,
    /// beta = (rho |omega| - sigma mu) m / gamma.
    pub beta: f64,
    /// gamma = sqrt(m^2 - omega^2) > 0.
    pub gamma: f64,
    /// kappa = sqrt(lambda^2 + rho^2 m^2 - mu^2) > 1/2.
    pub kappa: f64,
    pub lambda: f64,
}

/// Compute the transformed-system coefficients, enforcing the two necessary
/// conditions: m^2 - omega^2 > 0 (`EnergyOutOfRange` otherwise) and
/// lambda^2 + rho^2 m^2 - mu^2 > 1/4 (`KappaTooSmall` otherwise).
pub fn compute_coefficients(p: &ExtremeKNParams, lambda: f64) -> Result<RadialCoefficients> {
    let omega = compute_omega(p);
    let m = p.particle_mass;
    let rho = p.rho();
    let gamma_sq = m * m - omega * omega;
    if gamma_sq <= 0.0 {
        return Err(Error::EnergyOutOfRange { value: omega / m });
    }
    let gamma = gamma_sq.sqrt();
    let sigma = if omega < 0.0 { -1.0 } else { 1.0 };
    let mu = 2.0 * rho * omega + p.particle_charge * p.charge;
    let kappa_sq = lambda * lambda + rho * rho * m * m - mu * mu;
    if kappa_sq <= 0.25 {
        return Err(Error::KappaTooSmall { value: kappa_sq });
    }
    Ok(RadialCoefficients {
        omega,
        tau: omega_defect(p, omega),
        mu,
        sigma,
        alpha: (rho * m * m - omega * mu) / gamma,
        beta: (rho * omega.abs() - sigma * mu) * m / gamma,
        gamma,
        kappa: kappa_sq.sqrt(),
        lambda,
    })
}

/// Which closed-form family a bound state belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// beta - sigma lambda = 0 and alpha + kappa = 0: pure power times decay.
    Special,
    /// 1 + n + alpha + kappa = 0: Laguerre polynomials of degrees n+1 and n.
    Laguerre { n: u32 },
}

/// Why a candidate lambda admits no bound state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RejectionReason {
    /// |omega| >= m: solutions oscillate at infinity instead of decaying.
    EnergyOutOfRange { omega_over_m: f64 },
    /// lambda^2 + rho^2 m^2 - mu^2 <= 1/4: solutions too large at the horizon.
    KappaTooSmall { kappa_sq: f64 },
    /// Neither branch condition holds for any n up to the search bound.
    Quantization { min_residual: f64 },
}

#[derive(Debug, Clone)]
pub enum Classification {
    Bound(Box<BoundStateSolution>),
    Rejected { omega: f64, reason: RejectionReason },
}

/// Absolute tolerance for the branch conditions; roots found by the spectral
/// solvers satisfy them far more tightly.
pub const BRANCH_TOL: f64 = 1e-9;

/// Decide whether the angular eigenvalue `lambda` (labeled `j`) yields a
/// normalizable radial solution, searching quantization indices n <= n_max.
pub fn classify_bound_state(
    p: &ExtremeKNParams,
    lambda: f64,
    j: i32,
    n_max: u32,
) -> Classification {
    let coeffs = match compute_coefficients(p, lambda) {
        Ok(c) => c,
        Err(Error::EnergyOutOfRange { value }) => {
            return Classification::Rejected {
                omega: compute_omega(p),
                reason: RejectionReason::EnergyOutOfRange {
                    omega_over_m: value,
                },
            }
        }
        Err(Error::KappaTooSmall { value }) => {
            return Classification::Rejected {
                omega: compute_omega(p),
                reason: RejectionReason::KappaTooSmall { kappa_sq: value },
            }
        }
        Err(_) => unreachable!("coefficient computation has no other failure modes"),
    };
    let branch = if (coeffs.beta - coeffs.sigma * lambda).abs() <= BRANCH_TOL
        && (coeffs.alpha + coeffs.kappa).abs() <= BRANCH_TOL
    {
        Some(Branch::Special)
    } else {
        (0..=n_max)
            .find(|&n| (1.0 + n as f64 + coeffs.alpha + coeffs.kappa).abs() <= BRANCH_TOL)
            .map(|n| Branch::Laguerre { n })
    };
    match branch {
        Some(branch) => Classification::Bound(Box::new(BoundStateSolution {
            params: *p,
            omega: coeffs.omega,
            j,
            lambda,
            branch,
            coeffs,
        })),
        None => {
            let min_residual = (0..=n_max)
                .map(|n| (1.0 + n as f64 + coeffs.alpha + coeffs.kappa).abs())
                .fold(f64::INFINITY, f64::min);
            Classification::Rejected {
                omega: coeffs.omega,
                reason: RejectionReason::Quantization { min_residual },
            }
        }
    }
}

/// A normalizable radial solution in closed form (defined up to a constant).
#[derive(Debug, Clone)]
pub struct BoundStateSolution {
    pub params: ExtremeKNParams,
    pub omega: f64,
    /// Angular branch index the lambda came from.
    pub j: i32,
    pub lambda: f64,
    pub branch: Branch,
    pub coeffs: RadialCoefficients,
}

impl BoundStateSolution {
    /// The real pair y = (u, v) solving the fully transformed system.
    pub fn radial_pair(&self, x: f64) -> [f64; 2] {
        let c = &self.coeffs;
        let envelope = x.powf(c.kappa) * (-c.gamma * x).exp();
        match self.branch {
            Branch::Special => [envelope, 0.0],
            Branch::Laguerre { n } => {
                let z = 2.0 * c.gamma * x;
                [
                    (n as f64 + 1.0) * laguerre(n + 1, 2.0 * c.kappa, z) * envelope,
                    (c.beta - c.sigma * c.lambda) * laguerre(n, 2.0 * c.kappa, z) * envelope,
                ]
            }
        }
    }

    /// Exact derivative of `radial_pair`.
    pub fn radial_pair_deriv(&self, x: f64) -> [f64; 2] {
        let c = &self.coeffs;
        let envelope = x.powf(c.kappa) * (-c.gamma * x).exp();
        let log_deriv = c.kappa / x - c.gamma;
        match self.branch {
            Branch::Special => [log_deriv * envelope, 0.0],
            Branch::Laguerre { n } => {
                let z = 2.0 * c.gamma * x;
                let u_poly = (n as f64 + 1.0) * laguerre(n + 1, 2.0 * c.kappa, z);
                let v_poly = (c.beta - c.sigma * c.lambda) * laguerre(n, 2.0 * c.kappa, z);
                let u_poly_d =
                    (n as f64 + 1.0) * laguerre_deriv(n + 1, 2.0 * c.kappa, z) * 2.0 * c.gamma;
                let v_poly_d = (c.beta - c.sigma * c.lambda)
                    * laguerre_deriv(n, 2.0 * c.kappa, z)
                    * 2.0
                    * c.gamma;
                [
                    envelope * (log_deriv * u_poly + u_poly_d),
                    envelope * (log_deriv * v_poly + v_poly_d),
                ]
            }
        }
    }

    /// Intermediate pair w = T y; |w| = |f| since the final rotation is unitary.
    pub fn w_pair(&self, x: f64) -> [f64; 2] {
        let y = self.radial_pair(x);
        self.apply_t(&y)
    }

    fn apply_t(&self, y: &[f64; 2]) -> [f64; 2] {
        let m = self.params.particle_mass;
        let t1 = (m - self.omega.abs()).sqrt();
        let t2 = (m + self.omega.abs()).sqrt();
        [t1 * (y[1] - y[0]), t2 * (y[0] + y[1])]
    }

    fn apply_s(&self, w: &[f64; 2]) -> [Complex64; 2] {
        let s = self.coeffs.sigma;
        let r = std::f64::consts::FRAC_1_SQRT_2;
        [
            Complex64::new(-r * w[0], r * s * w[1]),
            Complex64::new(-r * s * w[0], -r * w[1]),
        ]
    }

    /// The radial spinor pair f(x) of the original complex system.
    pub fn eigenfunction(&self, x: f64) -> [Complex64; 2] {
        let w = self.w_pair(x);
        self.apply_s(&w)
    }

    /// Exact derivative of `eigenfunction` (the transformations are constant).
    pub fn eigenfunction_deriv(&self, x: f64) -> [Complex64; 2] {
        let yd = self.radial_pair_deriv(x);
        let wd = self.apply_t(&yd);
        self.apply_s(&wd)
    }

    /// Sample f on the given abscissas.
    pub fn sample(&self, xs: &[f64]) -> SampledFunction {
        let mut out = SampledFunction::new("x");
        for &x in xs {
            out.push(x, self.eigenfunction(x));
        }
        out
    }

    /// Relative residual of the original first-order system at x:
    /// |f' - M(x) f| / (|f'| + |M(x) f|), with the tau/x^2 term dropped
    /// because tau = 0 defines this energy.
    pub fn rx_residual(&self, x: f64) -> f64 {
        let p = &self.params;
        let rho = p.rho();
        let m = p.particle_mass;
        let c = &self.coeffs;
        let f = self.eigenfunction(x);
        let fd = self.eigenfunction_deriv(x);
        let i = Complex64::new(0.0, 1.0);
        let m11 = -i * (c.mu / x + self.omega);
        let m12 = Complex64::new(c.lambda / x, -(m * rho / x + m));
        let m21 = Complex64::new(c.lambda / x, m * rho / x + m);
        let m22 = i * (c.mu / x + self.omega);
        let mf = [m11 * f[0] + m12 * f[1], m21 * f[0] + m22 * f[1]];
        let res = ((fd[0] - mf[0]).norm_sqr() + (fd[1] - mf[1]).norm_sqr()).sqrt();
        let scale = (fd[0].norm_sqr() + fd[1].norm_sqr()).sqrt()
            + (mf[0].norm_sqr() + mf[1].norm_sqr()).sqrt();
        res / scale
    }

    /// |f(x)|^2 = |w(x)|^2, the normalization density without the weight.
    fn density(&self, x: f64) -> f64 {
        let w = self.w_pair(x);
        w[0] * w[0] + w[1] * w[1]
    }

    /// Integral of |f|^2 ((x + rho)^2 + a^2)/x^2 over (0, infinity).
    ///
    /// The piece below x = 1 is integrated in t = sqrt(x), which regularizes
    /// the x^(2 kappa - 2) endpoint behavior; the upper truncation point is
    /// grown until an elementary decay bound certifies the dropped tail.
    pub fn normalization_integral(&self, rel_tol: f64) -> Result<f64> {
        let p = &self.params;
        let rho = p.rho();
        let a = p.a;
        let weight = |x: f64| ((x + rho) * (x + rho) + a * a) / (x * x);
        let c = &self.coeffs;
        let n = match self.branch {
            Branch::Special => 0,
            Branch::Laguerre { n } => n,
        };

        let near = quadrature::adaptive(
            |t| {
                let x = t * t;
                2.0 * t * self.density(x) * weight(x)
            },
            0.0,
            1.0,
            rel_tol,
            1e-300,
            4000,
        )?;

        // Truncation with a certified tail: for x >= X,
        //   |f|^2 <= 4 m (u^2 + v^2) <= B (x/X)^(2n+2) x^(2 kappa) e^(-2 gamma x)
        // using |L(z)| <= L(-z) for z >= 0, and the weight is monotone there.
        let deg = 2.0 * c.kappa + 2.0 * (n as f64 + 1.0);
        let mut x_hi = (2.0_f64).max(rho + 1.0).max(deg / c.gamma);
        let mut far = quadrature::adaptive(
            |x| self.density(x) * weight(x),
            1.0,
            x_hi,
            rel_tol,
            1e-300,
            4000,
        )?;
        loop {
            let z = 2.0 * c.gamma * x_hi;
            let l_bound = match self.branch {
                Branch::Special => 1.0,
                Branch::Laguerre { n } => {
                    let lu = (n as f64 + 1.0) * laguerre(n + 1, 2.0 * c.kappa, -z);
                    let lv = (c.beta - c.sigma * c.lambda).abs() * laguerre(n, 2.0 * c.kappa, -z);
                    lu * lu + lv * lv
                }
            };
            let b = 4.0 * p.particle_mass * l_bound * weight(x_hi);
            // integral_X^inf x^p e^(-2 gamma x) dx <= X^p e^(-2 gamma X)/gamma
            // once X >= p/gamma (so that 2 gamma - p/X >= gamma); the
            // polynomial-growth factor (x/X)^(2n+2) is already folded in.
            let tail = b * x_hi.powf(2.0 * c.kappa) * (-2.0 * c.gamma * x_hi).exp() / c.gamma;
            let total = near + far;
            if tail <= rel_tol.max(1e-14) * total {
                return Ok(total);
            }
            if x_hi > 1e7 {
                return Err(Error::QuadratureFailure {
                    a: x_hi,
                    b: f64::INFINITY,
                    err: tail,
                });
            }
            far += quadrature::adaptive(
                |x| self.density(x) * weight(x),
                x_hi,
                2.0 * x_hi,
                rel_tol,
                1e-300,
                4000,
            )?;
            x_hi *= 2.0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn k(twice: i64) -> HalfInteger {
        HalfInteger::from_twice(twice).unwrap()
    }

    /// Kerr parameters with L = a m in the admissible window, plus a lambda
    /// manufactured so that 1 + n + alpha + kappa = 0 holds to rounding.
    fn synthetic_laguerre(a: f64, m: f64, tw: i64, n: u32) -> (ExtremeKNParams, f64) {
        let p = ExtremeKNParams::kerr(a, m, k(tw)).unwrap();
        let c_probe = compute_coefficients(&p, 1e6).unwrap(); // large lambda: valid kappa
        let alpha = c_probe.alpha;
        let kappa = -(1.0 + n as f64 + alpha);
        assert!(kappa > 0.5, "test setup requires kappa > 1/2, got {kappa}");
        let rho_m = p.rho() * m;
        let mu = c_probe.mu;
        let lambda_sq = kappa * kappa - rho_m * rho_m + mu * mu;
        (p, lambda_sq.sqrt())
    }

    #[test]
    fn constructor_enforces_extremality_and_positivity() {
        assert!(ExtremeKNParams::new(1.0, 0.6, 0.8, 1.0, 0.0, k(1)).is_ok());
        assert!(matches!(
            ExtremeKNParams::new(1.0, 0.6, 0.9, 1.0, 0.0, k(1)),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            ExtremeKNParams::new(1.0, 0.6, 0.8, -1.0, 0.0, k(1)),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            ExtremeKNParams::kerr(0.0, 1.0, k(1)),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn omega_kerr_closed_form() {
        // Q = 0 collapses the energy to -k/(2a), exactly.
        let p = ExtremeKNParams::kerr(-1.264065, 1.0, k(5)).unwrap();
        let omega = compute_omega(&p);
        assert_eq!(omega, -2.5 / (2.0 * -1.264065));
        // Published value for this parameter set, 6 decimals.
        assert!((omega / 1.0 - 0.988873).abs() < 5e-7);
        let p2 = ExtremeKNParams::kerr(-1.266630, 1.0, k(5)).unwrap();
        assert!((compute_omega(&p2) - 0.986871).abs() < 5e-7);
        let p3 = ExtremeKNParams::kerr(-4.594167, 1.0, k(17)).unwrap();
        assert!((compute_omega(&p3) - 0.925086).abs() < 5e-7);
    }

    #[test]
    fn omega_reissner_nordstrom_closed_form() {
        let p = ExtremeKNParams::reissner_nordstrom(2.0, 1.0, 0.3, k(1)).unwrap();
        assert_eq!(compute_omega(&p), -0.3);
        let p = ExtremeKNParams::reissner_nordstrom(-2.0, 1.0, 0.3, k(1)).unwrap();
        assert_eq!(compute_omega(&p), 0.3);
    }

    #[test]
    fn omega_annihilates_defect() {
        for &(mass, a, q, e, tw) in &[
            (1.0, 0.6, 0.8, 0.25, 1),
            (2.0, -1.2, 1.6, -0.4, 3),
            (1.264065, -1.264065, 0.0, 0.0, 5),
        ] {
            let p = ExtremeKNParams::new(mass, a, q, 1.0, e, k(tw)).unwrap();
            let omega = compute_omega(&p);
            let scale = omega.abs() * (mass * mass + a * a);
            assert!(
                omega_defect(&p, omega).abs() <= 1e-13 * scale.max(1.0),
                "defect too large"
            );
        }
    }

    #[test]
    fn coefficient_identity_alpha_beta_kappa() {
        // alpha^2 - beta^2 = rho^2 m^2 - mu^2 = kappa^2 - lambda^2.
        for &(mass, a, q, m, e, tw, lambda) in &[
            (1.0, 0.6, 0.8, 1.0, 0.25, 1, 2.0),
            (0.3, -0.3, 0.0, 1.0, 0.0, 1, 1.7),
            (2.0, 1.2, -1.6, 0.9, -0.3, 3, -3.5),
        ] {
            let p = ExtremeKNParams::new(mass, a, q, m, e, k(tw)).unwrap();
            let c = compute_coefficients(&p, lambda).unwrap();
            let lhs = c.alpha * c.alpha - c.beta * c.beta;
            let mid = p.rho() * p.rho() * m * m - c.mu * c.mu;
            let rhs = c.kappa * c.kappa - lambda * lambda;
            let scale = lhs.abs().max(mid.abs()).max(1.0);
            assert!((lhs - mid).abs() <= 1e-12 * scale);
            assert!((lhs - rhs).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn kerr_coefficients_match_window_formulas() {
        // For Q = 0: mu^2 = k^2, alpha = (2L^2-k^2)/sqrt(4L^2-k^2),
        // beta = -|kL|/sqrt(4L^2-k^2), with L = a m.
        for &(a, m, tw) in &[(-0.3, 1.0, 1), (0.29, 1.0, 1), (-1.27, 1.0, 5)] {
            let p = ExtremeKNParams::kerr(a, m, k(tw)).unwrap();
            let c = compute_coefficients(&p, 10.0).unwrap();
            let kk = k(tw).value();
            let l = a * m;
            let disc = (4.0 * l * l - kk * kk).sqrt();
            assert_relative_eq!(c.mu * c.mu, kk * kk, max_relative = 1e-12);
            assert_relative_eq!(
                c.alpha,
                (2.0 * l * l - kk * kk) / disc,
                max_relative = 1e-12
            );
            assert_relative_eq!(c.beta, -(kk * l).abs() / disc, max_relative = 1e-12);
        }
    }

    #[test]
    fn energy_and_kappa_guards() {
        // |L| <= |k|/2 puts |omega| >= m.
        let p = ExtremeKNParams::kerr(0.2, 1.0, k(1)).unwrap();
        assert!(matches!(
            compute_coefficients(&p, 2.0),
            Err(Error::EnergyOutOfRange { .. })
        ));
        // Inside the window but lambda too small: kappa^2 <= 1/4.
        let p = ExtremeKNParams::kerr(0.3, 1.0, k(1)).unwrap();
        assert!(matches!(
            compute_coefficients(&p, 0.2),
            Err(Error::KappaTooSmall { .. })
        ));
        let c = compute_coefficients(&p, 2.0).unwrap();
        assert!(c.gamma > 0.0 && c.kappa > 0.5);
    }

    #[test]
    fn classify_detects_laguerre_branch() {
        let (p, lambda) = synthetic_laguerre(-0.2505, 1.0, 1, 0);
        match classify_bound_state(&p, lambda, 1, 5) {
            Classification::Bound(bs) => {
                assert_eq!(bs.branch, Branch::Laguerre { n: 0 });
                let c = &bs.coeffs;
                assert!((1.0 + c.alpha + c.kappa).abs() <= BRANCH_TOL);
            }
            other => panic!("expected bound state, got {other:?}"),
        }
    }

    #[test]
    fn classify_detects_special_branch() {
        // For Kerr, lambda = sigma * beta satisfies both special conditions
        // automatically thanks to alpha^2 - beta^2 = L^2 - k^2; the spot must
        // sit close enough to the window edge that kappa = -alpha > 1/2.
        let p = ExtremeKNParams::kerr(-0.27, 1.0, k(1)).unwrap();
        let probe = compute_coefficients(&p, 1e3).unwrap();
        let lambda = probe.sigma * probe.beta;
        match classify_bound_state(&p, lambda, -1, 5) {
            Classification::Bound(bs) => assert_eq!(bs.branch, Branch::Special),
            other => panic!("expected special branch, got {other:?}"),
        }
    }

    #[test]
    fn classify_rejects_with_ordered_reasons() {
        // Energy check precedes everything.
        let p = ExtremeKNParams::kerr(0.2, 1.0, k(1)).unwrap();
        assert!(matches!(
            classify_bound_state(&p, 2.0, 1, 5),
            Classification::Rejected {
                reason: RejectionReason::EnergyOutOfRange { .. },
                ..
            }
        ));
        // Then the kappa bound.
        let p = ExtremeKNParams::kerr(0.3, 1.0, k(1)).unwrap();
        assert!(matches!(
            classify_bound_state(&p, 0.2, 1, 5),
            Classification::Rejected {
                reason: RejectionReason::KappaTooSmall { .. },
                ..
            }
        ));
        // Then quantization, with the smallest residual over n reported.
        match classify_bound_state(&p, 2.0, 1, 5) {
            Classification::Rejected {
                reason: RejectionReason::Quantization { min_residual },
                ..
            } => {
                let c = compute_coefficients(&p, 2.0).unwrap();
                let expect = (0..=5)
                    .map(|n| (1.0 + n as f64 + c.alpha + c.kappa).abs())
                    .fold(f64::INFINITY, f64::min);
                assert_relative_eq!(min_residual, expect, max_relative = 1e-14);
            }
            other => panic!("expected quantization rejection, got {other:?}"),
        }
    }

    #[test]
    fn extreme_rn_always_rejects_by_quantization() {
        // a = 0 with e^2 < m^2 gives alpha > 0, so no n can quantize.
        for &q in &[0.5, 1.0, 2.0] {
            for &e in &[-0.6, 0.1, 0.7] {
                let p = ExtremeKNParams::reissner_nordstrom(q, 1.0, e, k(1)).unwrap();
                for &lambda in &[1.0, 2.5, -4.0] {
                    match classify_bound_state(&p, lambda, 1, 10) {
                        Classification::Rejected {
                            reason: RejectionReason::Quantization { .. },
                            ..
                        } => {}
                        other => panic!("expected quantization rejection, got {other:?}"),
                    }
                }
            }
        }
    }

    #[test]
    fn eigenfunction_residual_small_on_axis() {
        for n in [0_u32, 2] {
            let (p, lambda) = synthetic_laguerre(-0.2505, 1.0, 1, n);
            let bs = match classify_bound_state(&p, lambda, 1, 5) {
                Classification::Bound(bs) => bs,
                other => panic!("setup failed: {other:?}"),
            };
            for &x in &[0.1, 1.0, 10.0] {
                let r = bs.rx_residual(x);
                assert!(r < 1e-8, "n={n}, x={x}: residual {r:.3e}");
            }
        }
    }

    #[test]
    fn analytic_derivative_matches_finite_difference() {
        let (p, lambda) = synthetic_laguerre(-0.2505, 1.0, 1, 1);
        let bs = match classify_bound_state(&p, lambda, 1, 5) {
            Classification::Bound(bs) => bs,
            other => panic!("setup failed: {other:?}"),
        };
        for &x in &[0.1_f64, 1.0, 10.0] {
            let h = 1e-6 * x.max(1.0);
            let fp = bs.eigenfunction(x + h);
            let fm = bs.eigenfunction(x - h);
            let fd = bs.eigenfunction_deriv(x);
            for i in 0..2 {
                let approx_d = (fp[i] - fm[i]) / (2.0 * h);
                let scale = fd[i].norm().max(1e-12);
                assert!(
                    (approx_d - fd[i]).norm() / scale < 1e-7,
                    "x={x}, component {i}"
                );
            }
        }
    }

    #[test]
    fn transformations_preserve_norm() {
        // |f| = |w| because the first transformation is unitary.
        let (p, lambda) = synthetic_laguerre(-0.2505, 1.0, 1, 0);
        let bs = match classify_bound_state(&p, lambda, 1, 5) {
            Classification::Bound(bs) => bs,
            other => panic!("setup failed: {other:?}"),
        };
        for &x in &[0.05, 0.7, 3.0, 12.0] {
            let w = bs.w_pair(x);
            let f = bs.eigenfunction(x);
            let nw = (w[0] * w[0] + w[1] * w[1]).sqrt();
            let nf = (f[0].norm_sqr() + f[1].norm_sqr()).sqrt();
            assert!((nw - nf).abs() <= 1e-14 * nw.max(1.0));
        }
    }

    #[test]
    fn endpoint_scalings_of_closed_form() {
        let (p, lambda) = synthetic_laguerre(-0.2505, 1.0, 1, 1);
        let bs = match classify_bound_state(&p, lambda, 1, 5) {
            Classification::Bound(bs) => bs,
            other => panic!("setup failed: {other:?}"),
        };
        let c = &bs.coeffs;
        // |f| / x^kappa tends to a nonzero constant at the horizon.
        let r1 = {
            let f = bs.eigenfunction(1e-8);
            (f[0].norm_sqr() + f[1].norm_sqr()).sqrt() / 1e-8_f64.powf(c.kappa)
        };
        let r2 = {
            let f = bs.eigenfunction(1e-10);
            (f[0].norm_sqr() + f[1].norm_sqr()).sqrt() / 1e-10_f64.powf(c.kappa)
        };
        assert!(r1.is_finite() && r1 > 0.0);
        assert_relative_eq!(r1, r2, max_relative = 1e-5);
        // |f| e^(gamma x) x^(-kappa - n - 1) stays bounded at infinity: the
        // scaled norm approaches its limit with shrinking 1/x corrections.
        let n = match bs.branch {
            Branch::Laguerre { n } => n as f64,
            Branch::Special => 0.0,
        };
        let v_at = |x: f64| {
            let f = bs.eigenfunction(x);
            (f[0].norm_sqr() + f[1].norm_sqr()).sqrt() * (c.gamma * x).exp()
                / x.powf(c.kappa + n + 1.0)
        };
        let (v1, v2, v3) = (v_at(200.0), v_at(400.0), v_at(800.0));
        assert!(v1.is_finite() && v2.is_finite() && v3.is_finite());
        let r12 = (v2 / v1 - 1.0).abs();
        let r23 = (v3 / v2 - 1.0).abs();
        assert!(v3 / v1 < 1.5 && v1 / v3 < 1.5);
        assert!(r23 <= 0.6 * r12 + 1e-12, "corrections must shrink: {r12} -> {r23}");
    }

    #[test]
    fn radial_pair_nodes_count_and_interlace() {
        // u carries n+1 sign changes, v carries n, and they alternate.
        let (p, lambda) = synthetic_laguerre(-0.2505, 1.0, 1, 2);
        let bs = match classify_bound_state(&p, lambda, 1, 5) {
            Classification::Bound(bs) => bs,
            other => panic!("setup failed: {other:?}"),
        };
        let mut u_nodes = Vec::new();
        let mut v_nodes = Vec::new();
        let xs: Vec<f64> = (1..40000).map(|i| i as f64 * 0.01).collect();
        let mut prev = bs.radial_pair(xs[0]);
        for &x in &xs[1..] {
            let cur = bs.radial_pair(x);
            if prev[0] * cur[0] < 0.0 {
                u_nodes.push(x);
            }
            if prev[1] * cur[1] < 0.0 {
                v_nodes.push(x);
            }
            prev = cur;
        }
        assert_eq!(u_nodes.len(), 3);
        assert_eq!(v_nodes.len(), 2);
        // Interlacing: each v node sits between consecutive u nodes.
        assert!(u_nodes[0] < v_nodes[0] && v_nodes[0] < u_nodes[1]);
        assert!(u_nodes[1] < v_nodes[1] && v_nodes[1] < u_nodes[2]);
    }

    #[test]
    fn normalization_integral_finite_and_stable() {
        for n in [0_u32, 3] {
            let (p, lambda) = synthetic_laguerre(-0.2501, 1.0, 1, n);
            let bs = match classify_bound_state(&p, lambda, 1, 5) {
                Classification::Bound(bs) => bs,
                other => panic!("setup failed: {other:?}"),
            };
            let coarse = bs.normalization_integral(1e-9).unwrap();
            let fine = bs.normalization_integral(5e-10).unwrap();
            assert!(coarse.is_finite() && coarse > 0.0);
            assert_relative_eq!(coarse, fine, max_relative = 1e-8);
        }
    }

    #[test]
    fn normalization_matches_fixed_grid_oracle() {
        let (p, lambda) = synthetic_laguerre(-0.2505, 1.0, 1, 1);
        let bs = match classify_bound_state(&p, lambda, 1, 5) {
            Classification::Bound(bs) => bs,
            other => panic!("setup failed: {other:?}"),
        };
        let adaptivev = bs.normalization_integral(1e-10).unwrap();
        // Independent route: fixed Gauss-Legendre panels, t-substitution on
        // [0,1], dyadic panels beyond, truncated where the integrand is dead.
        let rho = bs.params.rho();
        let a = bs.params.a;
        let weight = |x: f64| ((x + rho) * (x + rho) + a * a) / (x * x);
        let mut total = quadrature::gauss_legendre_integrate(
            |t| {
                let x = t * t;
                2.0 * t * bs.density(x) * weight(x)
            },
            0.0,
            1.0,
            120,
        );
        let mut lo = 1.0;
        while lo < 4096.0 {
            total += quadrature::gauss_legendre_integrate(
                |x| bs.density(x) * weight(x),
                lo,
                2.0 * lo,
                80,
            );
            lo *= 2.0;
        }
        assert_relative_eq!(adaptivev, total, max_relative = 1e-6);
    }
}
