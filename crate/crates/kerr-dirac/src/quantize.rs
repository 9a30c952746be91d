//! Discrete extreme-Kerr parameters carrying Dirac bound states.
//!
//! For Q = 0 the energy lock omega = -k/(2a) freezes the angular frequency
//! product at a*omega = -k/2, so with L = a m the whole spectral problem
//! collapses onto one real axis: a bound state with quantum numbers (k, n, j)
//! exists exactly where
//!
//! ```text
//! F_n(L) = 1 + n + alpha(L) + kappa_j(L) = 0,
//! alpha(L) = (2L^2 - k^2)/sqrt(4L^2 - k^2),
//! kappa_j(L) = sqrt(lambda_j(L)^2 + L^2 - k^2),
//! ```
//!
//! and lambda_j(L) is the j-th angular eigenvalue at (L, -k/2). Since
//! alpha < 0 forces k^2/4 < L^2 < k^2/2, roots live in a fixed window of |L|;
//! alpha runs from -infinity (inner edge) to 0 (outer edge), so each n has at
//! least one root per side and the outermost roots march monotonically toward
//! |L| = |k|/2 as n grows. This module samples lambda_j across the window by
//! continuation, brackets the sign changes of F_n, polishes each root in L,
//! and re-validates every solution at doubled angular resolution.

use crate::angular::{self, Solver};
use crate::error::{Error, Result};
use crate::radial::{
    classify_bound_state, compute_omega, BoundStateSolution, Classification, ExtremeKNParams,
    RejectionReason,
};
use crate::types::HalfInteger;

/// Admissible band of |L| = |a| m for extreme-Kerr bound states.
#[derive(Debug, Clone, Copy)]
pub struct KerrWindow {
    pub k: HalfInteger,
    pub m: f64,
    /// Lower bound |k|/2 (energy condition |omega| < m).
    pub lo: f64,
    /// Upper bound |k|/sqrt(2) (sign condition alpha < 0).
    pub hi: f64,
}

impl KerrWindow {
    pub fn new(k: HalfInteger, m: f64) -> Result<Self> {
        if !(m > 0.0) || !m.is_finite() {
            return Err(Error::InvalidParameter(
                "particle mass must be positive and finite".into(),
            ));
        }
        let ak = k.abs();
        Ok(Self {
            k,
            m,
            lo: ak / 2.0,
            hi: ak / std::f64::consts::SQRT_2,
        })
    }

    /// Window in the Kerr parameter a = L/m.
    pub fn a_bounds(&self) -> (f64, f64) {
        (self.lo / self.m, self.hi / self.m)
    }

    /// No |k| window is compatible with M m at or below this bound.
    pub const MASS_PRODUCT_BOUND: f64 = 0.25;
}

/// Which half-axis of a (equivalently L) to search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Positive,
    Negative,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Positive => 1.0,
            Side::Negative => -1.0,
        }
    }
}

/// Angular frequency product fixed by the Kerr energy lock: a*omega = -k/2.
fn a_omega_locked(k: HalfInteger) -> f64 {
    -k.value() / 2.0
}

/// alpha(L) on the window; requires 4L^2 - k^2 > 0.
fn alpha_of(k: HalfInteger, l: f64) -> f64 {
    let kk = k.value();
    (2.0 * l * l - kk * kk) / (4.0 * l * l - kk * kk).sqrt()
}

/// kappa_j(L)^2 given the angular eigenvalue there; may be negative.
fn kappa_sq_of(k: HalfInteger, l: f64, lambda: f64) -> f64 {
    lambda * lambda + l * l - k.value() * k.value()
}

/// The sampled angular branch lambda_j across one window side, at the locked
/// a*omega = -k/2; the expensive part, shared by every n.
#[derive(Debug, Clone)]
pub struct WindowCurve {
    pub k: HalfInteger,
    pub m: f64,
    pub j: i32,
    pub side: Side,
    /// Strictly interior L samples, ordered from the inner edge outwards in |L|.
    pub ls: Vec<f64>,
    pub lambdas: Vec<f64>,
}

/// One quantization-condition sample; `f` is None where kappa^2 <= 0 makes
/// the condition undefined (no root can hide in such a segment).
#[derive(Debug, Clone, Copy)]
pub struct CurveSample {
    pub l: f64,
    pub lambda: f64,
    pub f: Option<f64>,
}

/// F_n(L) tabulated on a window side for one (k, m, n, j).
#[derive(Debug, Clone)]
pub struct QuantizationCurve {
    pub k: HalfInteger,
    pub m: f64,
    pub n: u32,
    pub j: i32,
    pub side: Side,
    pub samples: Vec<CurveSample>,
}

/// Solutions of F_n = 0 on one window side, plus roots too close to the
/// window edge to trust at the working resolution.
#[derive(Debug, Clone)]
pub struct KerrRoots {
    pub solutions: Vec<BoundStateSolution>,
    /// L values of sign changes within 1e-6 of a window endpoint.
    pub suspicious: Vec<f64>,
}

/// Existence survey of a general extreme Kerr-Newman background.
#[derive(Debug, Clone)]
pub struct ExistenceReport {
    pub omega: f64,
    pub bound_states: Vec<BoundStateSolution>,
    /// (j, lambda_j, why no bound state) for every rejected branch.
    pub rejections: Vec<(i32, f64, RejectionReason)>,
}

const EDGE_MARGIN: f64 = 1e-6;
/// lambda re-solve budget slack while stepping in L (Lipschitz constant 1).
const PAD: f64 = 1e-6;

/// Sample lambda_j over the open window on one side by continuation from the
/// reference point, with `scan` interior points (offset half-step from the
/// edges). Resolution `grid` controls the angular integrator tolerance.
pub fn window_curve(
    k: HalfInteger,
    m: f64,
    j: i32,
    side: Side,
    scan: u32,
    grid: u32,
) -> Result<WindowCurve> {
    let window = KerrWindow::new(k, m)?;
    let step = (window.hi - window.lo) / scan.max(1) as f64;
    let range = (
        side.sign() * (window.lo + 0.5 * step),
        side.sign() * (window.hi - 0.5 * step),
    );
    sample_branch(k, m, j, range, scan, grid)
}

/// Sample lambda_j along an arbitrary segment of the L axis (at the locked
/// a*omega = -k/2), `scan` points from `range.0` to `range.1` inclusive.
/// Both endpoints must be finite, nonzero, and of one sign.
pub fn sample_branch(
    k: HalfInteger,
    m: f64,
    j: i32,
    range: (f64, f64),
    scan: u32,
    grid: u32,
) -> Result<WindowCurve> {
    if scan < 16 {
        return Err(Error::InvalidParameter("scan must be >= 16".into()));
    }
    if j == 0 {
        return Err(Error::InvalidParameter("j = 0 is not a valid branch".into()));
    }
    let (l0, l1) = range;
    if !(l0.is_finite() && l1.is_finite()) || l0 * l1 <= 0.0 || l0 == l1 {
        return Err(Error::InvalidParameter(
            "L range must be finite, nonzero, and on one side of the axis".into(),
        ));
    }
    if !(m > 0.0) || !m.is_finite() {
        return Err(Error::InvalidParameter(
            "particle mass must be positive and finite".into(),
        ));
    }
    let side = if l0 > 0.0 { Side::Positive } else { Side::Negative };
    let a_omega = a_omega_locked(k);
    let solver = Solver::with_grid(k, grid);
    let ls: Vec<f64> = (0..scan)
        .map(|i| l0 + (l1 - l0) * i as f64 / (scan - 1) as f64)
        .collect();
    let lambda0 = solver.lambda_at(ls[0], a_omega, j, 1)?;
    let lambdas = solver.track((ls[0], a_omega), lambda0, (l1, a_omega), scan - 1, 1e-9)?;
    Ok(WindowCurve {
        k,
        m,
        j,
        side,
        ls,
        lambdas,
    })
}

impl WindowCurve {
    /// Tabulate F_n on the stored samples.
    pub fn quantization_curve(&self, n: u32) -> QuantizationCurve {
        let samples = self
            .ls
            .iter()
            .zip(self.lambdas.iter())
            .map(|(&l, &lambda)| {
                let ksq = kappa_sq_of(self.k, l, lambda);
                let f = (ksq > 0.0)
                    .then(|| 1.0 + n as f64 + alpha_of(self.k, l) + ksq.sqrt());
                CurveSample { l, lambda, f }
            })
            .collect();
        QuantizationCurve {
            k: self.k,
            m: self.m,
            n,
            j: self.j,
            side: self.side,
            samples,
        }
    }

    /// Locate and validate every root of F_n hiding in these samples.
    pub fn solve(&self, n: u32, grid: u32) -> Result<KerrRoots> {
        let window = KerrWindow::new(self.k, self.m)?;
        let a_omega = a_omega_locked(self.k);
        let solver = Solver::with_grid(self.k, grid);
        let fine = Solver::with_grid(self.k, grid * 2);
        let curve = self.quantization_curve(n);
        let mut solutions = Vec::new();
        let mut suspicious = Vec::new();
        for w in curve.samples.windows(2) {
            let (s0, s1) = (w[0], w[1]);
            let (Some(f0), Some(f1)) = (s0.f, s1.f) else {
                continue;
            };
            if f0 == 0.0 || f0 * f1 >= 0.0 {
                // Exact zeros at sample points are vanishingly unlikely and
                // would reappear in the refined bracket of a neighbor anyway.
                continue;
            }
            let l_coarse = self.refine_root(&solver, n, a_omega, s0, s1)?;
            // Re-solve lambda at doubled resolution and re-polish the root
            // with it; the condition must hold to 1e-9 there or the working
            // resolution is too low to trust this sign change.
            let slope = (s1.f.unwrap() - s0.f.unwrap()) / (s1.l - s0.l);
            let (l_root, lambda_fine) = polish_root(
                self.k,
                n,
                a_omega,
                &fine,
                l_coarse,
                self.lambda_near(l_coarse),
                slope,
                self.spacing(),
            )?;
            if l_root.abs() - window.lo < EDGE_MARGIN || window.hi - l_root.abs() < EDGE_MARGIN {
                suspicious.push(l_root);
                continue;
            }
            let p = ExtremeKNParams::kerr(l_root / self.m, self.m, self.k)?;
            match classify_bound_state(&p, lambda_fine, self.j, n) {
                Classification::Bound(bs) => solutions.push(*bs),
                // kappa^2 <= 1/4 at the root: a sign change that fails the
                // necessary condition is discarded, not reported.
                Classification::Rejected { .. } => {}
            }
        }
        Ok(KerrRoots {
            solutions,
            suspicious,
        })
    }

    fn spacing(&self) -> f64 {
        (self.ls[1] - self.ls[0]).abs()
    }

    /// lambda sample nearest to l (for seeding local re-solves).
    fn lambda_near(&self, l: f64) -> f64 {
        let mut best = (f64::INFINITY, self.lambdas[0]);
        for (&ls, &lam) in self.ls.iter().zip(self.lambdas.iter()) {
            let d = (ls - l).abs();
            if d < best.0 {
                best = (d, lam);
            }
        }
        best.1
    }

    /// Bracketed-secant root of F_n between two samples of opposite sign.
    /// Each F evaluation re-solves lambda_j near the interpolated value.
    fn refine_root(
        &self,
        solver: &Solver,
        n: u32,
        a_omega: f64,
        s0: CurveSample,
        s1: CurveSample,
    ) -> Result<f64> {
        let spacing = (s1.l - s0.l).abs();
        let eval = |l: f64| -> Result<f64> {
            let t = (l - s0.l) / (s1.l - s0.l);
            let guess = s0.lambda + t * (s1.lambda - s0.lambda);
            let lambda = solver.refine_near(l, a_omega, guess, 0.6 * spacing + PAD, 1e-10)?;
            let ksq = kappa_sq_of(self.k, l, lambda);
            if ksq <= 0.0 {
                // Extremely unlikely between two valid samples; treat the
                // condition as deeply violated so the bracket contracts away.
                return Ok(f64::NEG_INFINITY);
            }
            Ok(1.0 + n as f64 + alpha_of(self.k, l) + ksq.sqrt())
        };
        let (mut a, mut b) = (s0.l, s1.l);
        let (mut fa, mut fb) = (s0.f.unwrap(), s1.f.unwrap());
        for _ in 0..90 {
            if (b - a).abs() <= 1e-12 {
                break;
            }
            let mut c = b - fb * (b - a) / (fb - fa);
            let lo = a.min(b);
            let hi = a.max(b);
            if !(c > lo && c < hi) || (c - b).abs() < 0.01 * (b - a).abs() {
                c = 0.5 * (a + b);
            }
            let fc = eval(c)?;
            if fc == 0.0 {
                return Ok(c);
            }
            if fc * fb < 0.0 {
                a = b;
                fa = fb;
            } else {
                fa *= 0.5;
            }
            b = c;
            fb = fc;
        }
        Ok(0.5 * (a + b))
    }
}

/// Re-polish a coarse root of F_n with doubled-resolution eigenvalues and
/// gate it: the returned location satisfies |F_n| <= 1e-9 at the doubled
/// resolution or the whole solve fails as under-resolved. The secant slope is
/// updated from successive iterates (the coarse inter-sample slope can be off
/// by orders of magnitude near the window edge, where F_n steepens); if the
/// secant still stalls, a bisection over the guard interval settles it. A
/// spurious coarse sign change cannot pass because no phase converges near it.
#[allow(clippy::too_many_arguments)]
fn polish_root(
    k: HalfInteger,
    n: u32,
    a_omega: f64,
    fine: &Solver,
    l_coarse: f64,
    lambda_guess: f64,
    slope: f64,
    spacing: f64,
) -> Result<(f64, f64)> {
    let mut lam_state = lambda_guess;
    let mut eval = |l: f64, radius: f64| -> Result<f64> {
        lam_state = fine.refine_near(l, a_omega, lam_state, radius, 1e-12)?;
        let ksq = kappa_sq_of(k, l, lam_state);
        Ok(if ksq > 0.0 {
            1.0 + n as f64 + alpha_of(k, l) + ksq.sqrt()
        } else {
            f64::NAN
        })
    };
    let guard = 2.0 * spacing;
    let mut l = l_coarse;
    let mut radius = spacing + PAD;
    let mut slope = slope;
    let mut prev: Option<(f64, f64)> = None;
    let mut f_first = f64::NAN;
    let mut f = f64::NAN;
    for it in 0..25 {
        f = eval(l, radius)?;
        if it == 0 {
            f_first = f;
        }
        if f.abs() <= 1e-10 {
            return Ok((l, lam_state));
        }
        if let Some((lp, fp)) = prev {
            let s = (f - fp) / (l - lp);
            if s.is_finite() && s != 0.0 {
                slope = s;
            }
        }
        prev = Some((l, f));
        let step = if f.is_nan() || slope == 0.0 { f64::NAN } else { -f / slope };
        if !step.is_finite() {
            break;
        }
        let target = (l + step).clamp(l_coarse - guard, l_coarse + guard);
        if target == l {
            break;
        }
        radius = (target - l).abs() + PAD;
        l = target;
    }
    if f.is_finite() && f.abs() <= 1e-9 {
        return Ok((l, lam_state));
    }

    // Fallback: bisect F_n over the guard interval, clipped to where the
    // condition is defined (|L| must stay beyond the inner axis |k|/2).
    let edge = k.value().abs() / 2.0 + 1e-12;
    let clip = |v: f64| {
        if v < 0.0 {
            v.min(-edge)
        } else {
            v.max(edge)
        }
    };
    let (mut a, mut b) = (
        clip(l_coarse - guard.min(spacing)),
        clip(l_coarse + guard.min(spacing)),
    );
    let mut fa = eval(a, spacing + PAD)?;
    let fb = eval(b, spacing + PAD)?;
    if fa.is_finite() && fb.is_finite() && fa * fb < 0.0 {
        let mut c = 0.5 * (a + b);
        for _ in 0..80 {
            c = 0.5 * (a + b);
            let fc = eval(c, 0.5 * (b - a).abs() + PAD)?;
            if !fc.is_finite() {
                break;
            }
            f = fc;
            if fc.abs() <= 1e-10 || (b - a).abs() <= 4.0 * f64::EPSILON * c.abs() {
                break;
            }
            if fa * fc < 0.0 {
                b = c;
            } else {
                a = c;
                fa = fc;
            }
        }
        if f.is_finite() && f.abs() <= 1e-9 {
            return Ok((c, lam_state));
        }
    }
    Err(Error::NotConverged {
        what: "quantization root under grid doubling",
        coarse: f_first,
        fine: f,
    })
}

/// Find all bound states with quantum numbers (k, n, j) on one side of the
/// window, scanning `scan` points. Resolution `grid` maps to the angular
/// integrator tolerance; every root is re-validated at `2 * grid`.
pub fn solve_kerr(
    k: HalfInteger,
    m: f64,
    n: u32,
    j: i32,
    side: Side,
    scan: u32,
    grid: u32,
) -> Result<KerrRoots> {
    window_curve(k, m, j, side, scan, grid)?.solve(n, grid)
}

/// Outermost root per n for n_lo..=n_hi: the |L_n| decrease strictly toward
/// the inner window edge |k|/2.
///
/// n_lo is solved by scanning; each later n walks inward from the previous
/// root (F_{n+1} = F_n + 1 > 0 there) until F turns negative, then refines.
pub fn enumerate_sequence(
    k: HalfInteger,
    m: f64,
    j: i32,
    side: Side,
    n_lo: u32,
    n_hi: u32,
    scan: u32,
    grid: u32,
) -> Result<Vec<(u32, f64)>> {
    if n_lo > n_hi {
        return Err(Error::InvalidParameter("n_lo must be <= n_hi".into()));
    }
    let window = KerrWindow::new(k, m)?;
    let a_omega = a_omega_locked(k);
    let solver = Solver::with_grid(k, grid);
    let fine = Solver::with_grid(k, grid * 2);
    let curve = window_curve(k, m, j, side, scan, grid)?;
    let first = curve.solve(n_lo, grid)?;
    let Some(outer) = first
        .solutions
        .iter()
        .max_by(|x, y| (x.params.a.abs()).total_cmp(&y.params.a.abs()))
    else {
        return Err(Error::InvalidParameter(format!(
            "no quantization root for n = {n_lo}, j = {j} at scan = {scan}; increase scan"
        )));
    };
    let mut out = Vec::with_capacity((n_hi - n_lo + 1) as usize);
    let mut l_prev = outer.params.a * m;
    let mut lambda_prev = outer.lambda;
    out.push((n_lo, l_prev));
    for n in (n_lo + 1)..=n_hi {
        // At the previous root, F_n = F_{n-1} + 1 = 1 > 0. Walk toward the
        // inner edge, halving the distance, until F_n < 0.
        let edge = side.sign() * window.lo;
        let mut frac = 0.5;
        let mut l_neg = None;
        let mut l_pos = (l_prev, 1.0);
        let mut lam = lambda_prev;
        let mut l_cur = l_prev;
        for _ in 0..60 {
            let l_try = edge + frac * (l_prev - edge);
            lam = solver.refine_near(l_try, a_omega, lam, (l_try - l_cur).abs() + PAD, 1e-10)?;
            l_cur = l_try;
            let ksq = kappa_sq_of(k, l_try, lam);
            if ksq <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "kappa^2 <= 0 at L = {l_try} while walking branch j = {j}"
                )));
            }
            let f = 1.0 + n as f64 + alpha_of(k, l_try) + ksq.sqrt();
            if f < 0.0 {
                l_neg = Some((l_try, f));
                break;
            }
            l_pos = (l_try, f);
            frac *= 0.5;
        }
        let Some((ln, fnn)) = l_neg else {
            return Err(Error::InvalidParameter(format!(
                "could not bracket the n = {n} root near the window edge"
            )));
        };
        let s0 = CurveSample {
            l: ln,
            lambda: lam,
            f: Some(fnn),
        };
        let lam_pos =
            solver.refine_near(l_pos.0, a_omega, lam, (l_pos.0 - l_cur).abs() + PAD, 1e-10)?;
        let s1 = CurveSample {
            l: l_pos.0,
            lambda: lam_pos,
            f: Some(l_pos.1),
        };
        let l_coarse = curve.refine_root(&solver, n, a_omega, s0, s1)?;
        let slope = (s1.f.unwrap() - s0.f.unwrap()) / (s1.l - s0.l);
        let width = (s1.l - s0.l).abs();
        let (l_root, lambda_fine) =
            polish_root(k, n, a_omega, &fine, l_coarse, lam, slope, width)?;
        let ksq = kappa_sq_of(k, l_root, lambda_fine);
        if ksq <= 0.25 {
            return Err(Error::KappaTooSmall { value: ksq });
        }
        lambda_prev = lambda_fine;
        out.push((n, l_root));
        l_prev = l_root;
    }
    Ok(out)
}

/// Survey a general extreme Kerr-Newman background: compute the locked
/// energy, the angular spectrum at (a m, a omega), and classify every branch.
pub fn check_kerr_newman(
    p: &ExtremeKNParams,
    jmax: u32,
    n_max: u32,
    grid: u32,
) -> Result<ExistenceReport> {
    let omega = compute_omega(p);
    let problem = angular::AngularProblem::new(p.k, p.a * p.particle_mass, p.a * omega)?;
    let spectrum = angular::angular_spectrum(&problem, jmax, grid)?;
    let mut bound_states = Vec::new();
    let mut rejections = Vec::new();
    for &(j, lambda) in &spectrum.eigenvalues {
        match classify_bound_state(p, lambda, j, n_max) {
            Classification::Bound(bs) => bound_states.push(*bs),
            Classification::Rejected { reason, .. } => rejections.push((j, lambda, reason)),
        }
    }
    Ok(ExistenceReport {
        omega,
        bound_states,
        rejections,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::Branch;

    fn k(twice: i64) -> HalfInteger {
        HalfInteger::from_twice(twice).unwrap()
    }

    #[test]
    fn window_bounds() {
        let w = KerrWindow::new(k(1), 1.0).unwrap();
        assert!((w.lo - 0.25).abs() < 1e-15);
        assert!((w.hi - 0.25 * std::f64::consts::SQRT_2).abs() < 1e-15);
        assert!(w.lo > KerrWindow::MASS_PRODUCT_BOUND - 1e-15);
        let (alo, ahi) = KerrWindow::new(k(5), 2.0).unwrap().a_bounds();
        assert!((alo - 0.625).abs() < 1e-15 && (ahi - 0.625 * std::f64::consts::SQRT_2).abs() < 1e-12);
        assert!(KerrWindow::new(k(1), 0.0).is_err());
    }

    #[test]
    fn curve_samples_stay_inside_window() {
        let curve = window_curve(k(1), 1.0, -1, Side::Negative, 32, 96).unwrap();
        let w = KerrWindow::new(k(1), 1.0).unwrap();
        for &l in &curve.ls {
            assert!(l < 0.0 && l.abs() > w.lo && l.abs() < w.hi);
        }
        // All kappa^2 valid here, so F is defined everywhere on the curve.
        let q = curve.quantization_curve(0);
        assert!(q.samples.iter().all(|s| s.f.is_some()));
    }

    #[test]
    fn solve_kerr_finds_validated_roots() {
        // Every root must satisfy the quantization condition, the necessary
        // conditions, the exact Kerr energy, and window containment.
        let mut found = 0;
        for j in [-1, 1] {
            let roots = solve_kerr(k(1), 1.0, 0, j, Side::Negative, 400, 160).unwrap();
            for bs in &roots.solutions {
                found += 1;
                assert_eq!(bs.branch, Branch::Laguerre { n: 0 });
                assert_eq!(bs.j, j);
                let c = &bs.coeffs;
                assert!((1.0 + c.alpha + c.kappa).abs() <= 1e-9);
                assert!(c.kappa > 0.5);
                assert!(bs.omega == -0.5 / (2.0 * bs.params.a));
                assert!(bs.omega.abs() < 1.0);
                let l = bs.params.a * 1.0;
                let w = KerrWindow::new(k(1), 1.0).unwrap();
                assert!(l.abs() > w.lo && l.abs() < w.hi);
            }
        }
        assert!(found >= 1, "expected at least one (n=0, |j|=1) bound state");
    }

    #[test]
    fn roots_stable_under_scan_doubling() {
        let a = solve_kerr(k(1), 1.0, 0, -1, Side::Negative, 300, 128).unwrap();
        let b = solve_kerr(k(1), 1.0, 0, -1, Side::Negative, 600, 128).unwrap();
        assert_eq!(a.solutions.len(), b.solutions.len());
        for (x, y) in a.solutions.iter().zip(b.solutions.iter()) {
            assert!((x.params.a - y.params.a).abs() < 1e-9);
        }
    }

    #[test]
    fn enumerate_sequence_marches_to_inner_edge() {
        let seq = enumerate_sequence(k(1), 1.0, -1, Side::Negative, 0, 20, 400, 128).unwrap();
        assert_eq!(seq.len(), 21);
        let w = KerrWindow::new(k(1), 1.0).unwrap();
        for pair in seq.windows(2) {
            assert!(pair[1].1.abs() < pair[0].1.abs(), "|L_n| must decrease");
        }
        for &(_, l) in &seq {
            assert!(l.abs() > w.lo && l.abs() < w.hi);
        }
        // By n = 20 the root has collapsed onto the inner edge.
        assert!(seq.last().unwrap().1.abs() - w.lo < 0.05);
    }

    #[test]
    fn round_trip_through_existence_check() {
        let roots = solve_kerr(k(1), 1.0, 0, -1, Side::Negative, 400, 128).unwrap();
        let bs = roots.solutions.first().expect("need a root to round-trip");
        let report = check_kerr_newman(&bs.params, 2, 3, 128).unwrap();
        let twin = report
            .bound_states
            .iter()
            .find(|s| s.j == bs.j && s.branch == bs.branch)
            .expect("solved root must reappear in the existence survey");
        assert!((twin.lambda - bs.lambda).abs() < 1e-7);
    }

    #[test]
    fn kerr_newman_rejects_reissner_nordstrom() {
        let p = ExtremeKNParams::reissner_nordstrom(1.0, 1.0, 0.3, k(1)).unwrap();
        let report = check_kerr_newman(&p, 3, 8, 96).unwrap();
        assert!(report.bound_states.is_empty());
        assert_eq!(report.rejections.len(), 6);
        for (_, _, reason) in &report.rejections {
            assert!(matches!(reason, RejectionReason::Quantization { .. }));
        }
    }

    #[test]
    fn kerr_newman_rejects_small_mass_product() {
        // Mm = 0.2 <= 1/4: the energy condition fails on every branch.
        let p = ExtremeKNParams::kerr(0.2, 1.0, k(1)).unwrap();
        let report = check_kerr_newman(&p, 2, 5, 96).unwrap();
        assert!(report.bound_states.is_empty());
        for (_, _, reason) in &report.rejections {
            assert!(matches!(reason, RejectionReason::EnergyOutOfRange { .. }));
        }
    }

    #[test]
    fn scan_rejects_degenerate_arguments() {
        assert!(matches!(
            window_curve(k(1), 1.0, 0, Side::Positive, 64, 96),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            window_curve(k(1), 1.0, 1, Side::Positive, 4, 96),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            enumerate_sequence(k(1), 1.0, 1, Side::Positive, 3, 1, 64, 96),
            Err(Error::InvalidParameter(_))
        ));
    }
}
