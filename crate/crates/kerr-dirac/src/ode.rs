//! Embedded Dormand-Prince 5(4) stepping for two-component linear systems.
//!
//! One stepper serves both the real angular shooting system and the complex
//! radial systems; the scalar type is abstracted by [`OdeScalar`]. Step size
//! is driven by the usual mixed absolute/relative error norm with a PI-style
//! limiter, and the first same-as-last stage is reused.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Scalar admissible as a state component.
pub trait OdeScalar:
    Copy
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn abs2(self) -> f64;
}

impl OdeScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn abs2(self) -> f64 {
        self * self
    }
}

impl OdeScalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn abs2(self) -> f64 {
        self.norm_sqr()
    }
}

pub fn norm2<S: OdeScalar>(y: &[S; 2]) -> f64 {
    (y[0].abs2() + y[1].abs2()).sqrt()
}

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Initial step magnitude; chosen from the interval if absent.
    pub first_step: Option<f64>,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            first_step: None,
            max_steps: 2_000_000,
        }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Error weights: 5th-order minus embedded 4th-order solution.
const E1: f64 = B1 - 5179.0 / 57600.0;
const E3: f64 = B3 - 7571.0 / 16695.0;
const E4: f64 = B4 - 393.0 / 640.0;
const E5: f64 = B5 + 92097.0 / 339200.0;
const E6: f64 = B6 - 187.0 / 2100.0;
const E7: f64 = -1.0 / 40.0;

#[inline]
fn lc2<S: OdeScalar>(a: &[S; 2], b: &[S; 2], wb: f64) -> [S; 2] {
    [a[0] + b[0] * wb, a[1] + b[1] * wb]
}

/// Integrate y' = f(x, y) from `x0` to `x1` (either direction).
///
/// `on_step(x, &y)` is called at the initial point and after every accepted
/// step; it may be used to record samples or running minima.
pub fn integrate<S, F, C>(
    mut f: F,
    x0: f64,
    x1: f64,
    y0: [S; 2],
    opts: &OdeOptions,
    mut on_step: C,
) -> Result<[S; 2]>
where
    S: OdeScalar,
    F: FnMut(f64, &[S; 2]) -> [S; 2],
    C: FnMut(f64, &[S; 2]),
{
    if !(x0.is_finite() && x1.is_finite()) || x0 == x1 {
        return Err(Error::InvalidParameter(format!(
            "integration interval [{x0}, {x1}] is degenerate"
        )));
    }
    let dir = (x1 - x0).signum();
    let span = (x1 - x0).abs();
    let mut h = dir * opts.first_step.unwrap_or(span / 100.0).abs().min(span);
    let mut x = x0;
    let mut y = y0;
    let mut k1 = f(x, &y);
    on_step(x, &y);
    let mut prev_err_ratio: f64 = 1.0;

    for _ in 0..opts.max_steps {
        if dir * (x1 - x) <= 0.0 {
            return Ok(y);
        }
        if (x + h - x) == 0.0 || h.abs() < 1e-14 * x.abs().max(1e-30) {
            return Err(Error::StepUnderflow { x, h });
        }
        // Do not step past the endpoint.
        if dir * (x + h - x1) > 0.0 {
            h = x1 - x;
        }

        let y2 = lc2(&y, &k1, h * A21);
        let k2 = f(x + C2 * h, &y2);
        let y3 = lc2(&lc2(&y, &k1, h * A31), &k2, h * A32);
        let k3 = f(x + C3 * h, &y3);
        let y4 = lc2(&lc2(&lc2(&y, &k1, h * A41), &k2, h * A42), &k3, h * A43);
        let k4 = f(x + C4 * h, &y4);
        let y5 = lc2(
            &lc2(&lc2(&lc2(&y, &k1, h * A51), &k2, h * A52), &k3, h * A53),
            &k4,
            h * A54,
        );
        let k5 = f(x + C5 * h, &y5);
        let y6 = lc2(
            &lc2(
                &lc2(&lc2(&lc2(&y, &k1, h * A61), &k2, h * A62), &k3, h * A63),
                &k4,
                h * A64,
            ),
            &k5,
            h * A65,
        );
        let k6 = f(x + h, &y6);
        let ynew = lc2(
            &lc2(&lc2(&lc2(&lc2(&y, &k1, h * B1), &k3, h * B3), &k4, h * B4), &k5, h * B5),
            &k6,
            h * B6,
        );
        let k7 = f(x + h, &ynew);

        // Embedded error estimate.
        let ecomp = |i: usize| {
            (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h
        };
        let err = [ecomp(0), ecomp(1)];
        let mut ratio2 = 0.0_f64;
        for i in 0..2 {
            let scale = opts.abs_tol
                + opts.rel_tol * y[i].abs2().sqrt().max(ynew[i].abs2().sqrt());
            ratio2 = ratio2.max(err[i].abs2() / (scale * scale));
        }
        let err_ratio = ratio2.sqrt();

        if err_ratio <= 1.0 {
            x += h;
            y = ynew;
            k1 = k7;
            on_step(x, &y);
            // PI controller: history-damped growth, capped at 5x.
            let fac = 0.9 * err_ratio.max(1e-10).powf(-0.7 / 5.0)
                * prev_err_ratio.max(1e-10).powf(0.4 / 5.0);
            prev_err_ratio = err_ratio;
            h *= fac.clamp(0.2, 5.0);
        } else {
            h *= (0.9 * err_ratio.powf(-0.2)).clamp(0.1, 0.9);
        }
    }
    Err(Error::StepUnderflow { x, h })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn real_exponential_pair() {
        // y1' = y1, y2' = -2 y2 on [0, 1].
        let opts = OdeOptions::default();
        let y = integrate(
            |_x, y: &[f64; 2]| [y[0], -2.0 * y[1]],
            0.0,
            1.0,
            [1.0, 1.0],
            &opts,
            |_, _| {},
        )
        .unwrap();
        assert!((y[0] - 1.0_f64.exp()).abs() < 1e-9);
        assert!((y[1] - (-2.0_f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn complex_rotation_preserves_norm() {
        // y' = i y rotates; |y| is conserved.
        let opts = OdeOptions::default();
        let i = Complex64::new(0.0, 1.0);
        let y = integrate(
            |_x, y: &[Complex64; 2]| [i * y[0], i * y[1]],
            0.0,
            7.0,
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.5)],
            &opts,
            |_, _| {},
        )
        .unwrap();
        assert!((norm2(&y) - (1.25_f64).sqrt()).abs() < 1e-9);
        assert!((y[0] - Complex64::new(7.0_f64.cos(), 7.0_f64.sin())).norm() < 1e-8);
    }

    #[test]
    fn reversal_returns_to_seed() {
        let opts = OdeOptions {
            rel_tol: 1e-12,
            ..OdeOptions::default()
        };
        let f = |x: f64, y: &[f64; 2]| [y[1], -x.sin() * y[0]];
        let seed = [0.3, -1.1];
        let fwd = integrate(f, 0.5, 4.0, seed, &opts, |_, _| {}).unwrap();
        let back = integrate(f, 4.0, 0.5, fwd, &opts, |_, _| {}).unwrap();
        assert!((back[0] - seed[0]).abs() < 1e-9);
        assert!((back[1] - seed[1]).abs() < 1e-9);
    }

    #[test]
    fn rejects_degenerate_interval() {
        let opts = OdeOptions::default();
        assert!(matches!(
            integrate(
                |_x, y: &[f64; 2]| *y,
                1.0,
                1.0,
                [1.0, 0.0],
                &opts,
                |_, _| {}
            ),
            Err(Error::InvalidParameter(_))
        ));
    }
}
