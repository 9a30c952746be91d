//! Confluent hypergeometric and Laguerre evaluation for the closed-form
//! radial eigenfunctions.
//!
//! Everything here is real-argument and small-degree: the bound-state
//! construction only ever needs
//!
//! - Kummer's function M(p, q, z) = sum_n (p)_n / (q)_n * z^n / n!,
//!   which terminates in a finite sum when p is a non-positive integer,
//! - generalized Laguerre polynomials L_n^(a)(z), related to terminating
//!   Kummer functions by M(-n, q, z) = n! / (q)_n * L_n^(q-1)(z),
//! - the contiguous differential relation
//!   z M'(p, q, z) + (q - p - z) M(p, q, z) = (q - p) M(p - 1, q, z),
//!   which is what turns one solved second-order component into its partner.
//!
//! The series is evaluated by direct ascending summation under a
//! [`SeriesControl`] budget; in the bound-state regime (z = 2*gamma*x with
//! moderate x, q = 1 + 2*kappa > 2) this is accurate to near machine
//! precision without asymptotic switching.

use crate::error::{Error, Result};

/// Truncation control for ascending series.
#[derive(Debug, Clone, Copy)]
pub struct SeriesControl {
    pub max_terms: usize,
    pub rel_tol: f64,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            max_terms: 500,
            rel_tol: 1e-15,
        }
    }
}

/// Rising factorial (p)_n = p (p+1) ... (p+n-1), with (p)_0 = 1.
pub fn pochhammer(p: f64, n: u32) -> f64 {
    let mut acc = 1.0;
    for i in 0..n {
        acc *= p + i as f64;
    }
    acc
}

fn check_kummer_q(q: f64) -> Result<()> {
    if q <= 0.0 && q == q.round() {
        return Err(Error::InvalidParameter(format!(
            "kummer_m requires q not in {{0, -1, -2, ...}}, got q = {q}"
        )));
    }
    Ok(())
}

/// Kummer's confluent hypergeometric function M(p, q, z) by ascending series.
///
/// Terminates exactly when p is a non-positive integer (the term vanishes);
/// otherwise stops once two consecutive terms fall below `rel_tol` relative
/// to the running sum.
pub fn kummer_m(p: f64, q: f64, z: f64, ctl: SeriesControl) -> Result<f64> {
    check_kummer_q(q)?;
    let mut sum = 1.0_f64;
    let mut term = 1.0_f64;
    let mut small_streak = 0;
    for n in 0..ctl.max_terms {
        let nf = n as f64;
        term *= (p + nf) / (q + nf) * z / (nf + 1.0);
        sum += term;
        if term == 0.0 {
            return Ok(sum);
        }
        if term.abs() <= ctl.rel_tol * sum.abs().max(f64::MIN_POSITIVE) {
            small_streak += 1;
            if small_streak >= 2 {
                return Ok(sum);
            }
        } else {
            small_streak = 0;
        }
    }
    Err(Error::NonconvergentSeries {
        terms: ctl.max_terms,
        last_ratio: term.abs() / sum.abs().max(f64::MIN_POSITIVE),
    })
}

/// d/dz M(p, q, z) via the term-wise differentiated series.
pub fn kummer_m_deriv(p: f64, q: f64, z: f64, ctl: SeriesControl) -> Result<f64> {
    check_kummer_q(q)?;
    // First derivative term is p/q; successive ratios (p+n)/(q+n) * z/n.
    let mut term = p / q;
    let mut sum = term;
    let mut small_streak = 0;
    for n in 1..ctl.max_terms {
        let nf = n as f64;
        term *= (p + nf) / (q + nf) * z / nf;
        sum += term;
        if term == 0.0 {
            return Ok(sum);
        }
        if term.abs() <= ctl.rel_tol * sum.abs().max(f64::MIN_POSITIVE) {
            small_streak += 1;
            if small_streak >= 2 {
                return Ok(sum);
            }
        } else {
            small_streak = 0;
        }
    }
    Err(Error::NonconvergentSeries {
        terms: ctl.max_terms,
        last_ratio: term.abs() / sum.abs().max(f64::MIN_POSITIVE),
    })
}

/// Generalized Laguerre polynomial L_n^(alpha)(z) by the three-term upward
/// recurrence (j+1) L_{j+1} = (2j + 1 + alpha - z) L_j - (j + alpha) L_{j-1}.
pub fn laguerre(n: u32, alpha: f64, z: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut curr = 1.0 + alpha - z;
    for j in 1..n {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + alpha - z) * curr - (jf + alpha) * prev) / (jf + 1.0);
        prev = curr;
        curr = next;
    }
    curr
}

/// d/dz L_n^(alpha)(z) = -L_{n-1}^(alpha+1)(z); zero for n = 0.
pub fn laguerre_deriv(n: u32, alpha: f64, z: f64) -> f64 {
    if n == 0 {
        0.0
    } else {
        -laguerre(n - 1, alpha + 1.0, z)
    }
}
