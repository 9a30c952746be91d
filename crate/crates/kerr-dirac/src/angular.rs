//! Angular eigenvalues of the separated Dirac operator by two-sided shooting.
//!
//! The angular pair, after multiplying by sqrt(sin(theta)) to absorb the
//! cot(theta)/2 term, satisfies on (0, pi)
//!
//! ```text
//! g1' =  W(theta) g1 + (L cos(theta) - lambda) g2
//! g2' = (lambda + L cos(theta)) g1 - W(theta) g2,     W = k/sin(theta) + Om*sin(theta)
//! ```
//!
//! with L = a*m, Om = a*omega, and half-integer k. Both endpoints are regular
//! singular points with indicial exponents +|k| (recessive) and -|k|; only the
//! recessive branch is square-integrable, so eigenvalues are exactly the lambda
//! for which the recessive solutions from both ends are linearly dependent at
//! the midpoint. The pi end maps onto the 0 end of the same family under
//! (k, Om, lambda) -> (-k, -Om, -lambda).
//!
//! Numerics: the solver integrates q = theta^(-|k|) g, whose recessive branch
//! is analytic at the endpoint; the extracted power turns the accuracy
//! constraint near the endpoint into a mild stability constraint. Starting
//! values at theta = 1e-6 come from an order-8 Frobenius series. Eigenvalues
//! are zeros of the normalized midpoint Wronskian, located by scan plus
//! bracketed secant refinement to |d(lambda)| <= 1e-12.
//!
//! Indexing: j in Z \ {0}, anchored at the reference point (L, Om) = (0, 0)
//! where the spectrum splits by sign (j = 1 is the smallest positive
//! eigenvalue), and carried to other parameters by continuation. Each
//! continuation step may move an eigenvalue by at most the step's parameter
//! distance (the operator is Lipschitz in (L, Om) with constant 1 in each),
//! which is what makes nearest-root matching sound.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ode::{integrate, norm2, OdeOptions};
use crate::types::{HalfInteger, SampledFunction};

/// Angular problem parameters: half-integer k and the products a*m, a*omega.
#[derive(Debug, Clone, Copy)]
pub struct AngularProblem {
    pub k: HalfInteger,
    /// L = a * m (particle mass times Kerr parameter).
    pub am: f64,
    /// Om = a * omega (energy times Kerr parameter).
    pub a_omega: f64,
}

impl AngularProblem {
    pub fn new(k: HalfInteger, am: f64, a_omega: f64) -> Result<Self> {
        if !am.is_finite() || !a_omega.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "angular parameters must be finite, got am = {am}, a_omega = {a_omega}"
            )));
        }
        Ok(Self { k, am, a_omega })
    }

}

/// Eigenvalues lambda_j, j = -jmax..-1, 1..jmax, strictly increasing with j.
#[derive(Debug, Clone)]
pub struct AngularSpectrum {
    pub problem: AngularProblem,
    /// (j, lambda_j) sorted by j ascending, j = 0 absent.
    pub eigenvalues: Vec<(i32, f64)>,
}

impl AngularSpectrum {
    pub fn lambda(&self, j: i32) -> Option<f64> {
        self.eigenvalues
            .iter()
            .find(|&&(jj, _)| jj == j)
            .map(|&(_, l)| l)
    }
}

/// Start of the two-sided shooting interval.
pub(crate) const THETA_EPS: f64 = 1e-6;
const SERIES_ORDER: usize = 8;
const MATCH_POINT: f64 = std::f64::consts::FRAC_PI_2;
/// Reference-scan spacing; gaps at (0, 0) are >= 1 so this cannot skip roots.
const REF_SCAN_STEP: f64 = 0.25;
/// Continuation never steps further than this in |dL| + |dOm|.
const TRACK_MAX_STEP: f64 = 0.1;
/// Slack added to the per-step Lipschitz budget (absorbs root-solve error).
const BUDGET_PAD: f64 = 1e-6;
/// lambda resolution while walking a continuation path.
const TRACK_TOL: f64 = 1e-9;
/// lambda resolution for reported eigenvalues.
const FINAL_TOL: f64 = 1e-12;

/// Map the `grid` resolution knob to an integrator tolerance; doubling the
/// grid tightens the tolerance by about a factor 6.
pub(crate) fn tol_of_grid(grid: u32) -> f64 {
    (0.05 / grid as f64).powf(2.5).clamp(1e-13, 1e-6)
}

/// 1/sin(theta) - 1/theta without cancellation (series below 1e-3).
fn inv_sin_defect(theta: f64) -> f64 {
    if theta < 1e-3 {
        let t2 = theta * theta;
        theta * (1.0 / 6.0 + t2 * (7.0 / 360.0 + t2 * (31.0 / 15120.0)))
    } else {
        1.0 / theta.sin() - 1.0 / theta
    }
}

/// Right-hand side of the scaled system q' = (M(theta) - s/theta) q for one
/// parameter set; s = |k| and exactly one diagonal keeps a -2s/theta pole.
struct ScaledSystem {
    k: f64,
    s: f64,
    l: f64,
    om: f64,
    lambda: f64,
}

impl ScaledSystem {
    #[inline]
    fn rhs(&self, theta: f64, q: &[f64; 2]) -> [f64; 2] {
        let (sin_t, cos_t) = theta.sin_cos();
        let defect = inv_sin_defect(theta);
        let m11 = self.k * defect + (self.k - self.s) / theta + self.om * sin_t;
        let m22 = -self.k * defect + (-self.k - self.s) / theta - self.om * sin_t;
        let m12 = self.l * cos_t - self.lambda;
        let m21 = self.lambda + self.l * cos_t;
        [
            m11 * q[0] + m12 * q[1],
            m21 * q[0] + m22 * q[1],
        ]
    }

    /// Order-8 Frobenius value of the recessive scaled solution at `theta`.
    ///
    /// Coefficients follow ((s + i) I - diag(k, -k)) c_i = sum_j M_j c_{i-1-j}
    /// with c_0 the null direction of the i = 0 diagonal.
    fn frobenius_start(&self, theta: f64) -> [f64; 2] {
        // Odd Taylor coefficients of W - k/theta and even ones of L cos(theta).
        let mut w = [0.0_f64; SERIES_ORDER + 1];
        w[1] = self.k / 6.0 + self.om;
        w[3] = 7.0 * self.k / 360.0 - self.om / 6.0;
        w[5] = 31.0 * self.k / 15120.0 + self.om / 120.0;
        w[7] = 127.0 * self.k / 604800.0 - self.om / 5040.0;
        let mut lc = [0.0_f64; SERIES_ORDER + 1];
        lc[0] = self.l;
        lc[2] = -self.l / 2.0;
        lc[4] = self.l / 24.0;
        lc[6] = -self.l / 720.0;
        lc[8] = self.l / 40320.0;

        let mut c = [[0.0_f64; 2]; SERIES_ORDER + 1];
        c[0] = if self.k > 0.0 { [1.0, 0.0] } else { [0.0, 1.0] };
        for i in 1..=SERIES_ORDER {
            let mut rhs = [0.0_f64; 2];
            for j in 0..i {
                let prev = c[i - 1 - j];
                if j % 2 == 1 {
                    rhs[0] += w[j] * prev[0];
                    rhs[1] += -w[j] * prev[1];
                } else {
                    let off = lc[j];
                    let lam = if j == 0 { self.lambda } else { 0.0 };
                    rhs[0] += (off - lam) * prev[1];
                    rhs[1] += (lam + off) * prev[0];
                }
            }
            let i_f = i as f64;
            c[i] = [
                rhs[0] / (self.s + i_f - self.k),
                rhs[1] / (self.s + i_f + self.k),
            ];
        }
        let mut value = [0.0_f64; 2];
        let mut tp = 1.0;
        for ci in c.iter() {
            value[0] += ci[0] * tp;
            value[1] += ci[1] * tp;
            tp *= theta;
        }
        value
    }
}

#[derive(Clone, Copy)]
enum End {
    Zero,
    Pi,
}

/// Shooting engine for a fixed k; carries the integrator tolerance.
#[derive(Debug, Clone)]
pub(crate) struct Solver {
    k: HalfInteger,
    ode: OdeOptions,
}

impl Solver {
    pub(crate) fn new(k: HalfInteger, tol: f64) -> Self {
        Self {
            k,
            ode: OdeOptions {
                rel_tol: tol,
                abs_tol: tol * 1e-4,
                first_step: None,
                max_steps: 200_000,
            },
        }
    }

    pub(crate) fn with_grid(k: HalfInteger, grid: u32) -> Self {
        Self::new(k, tol_of_grid(grid))
    }

    fn system(&self, end: End, am: f64, a_omega: f64, lambda: f64) -> ScaledSystem {
        let k = self.k.value();
        match end {
            End::Zero => ScaledSystem {
                k,
                s: k.abs(),
                l: am,
                om: a_omega,
                lambda,
            },
            End::Pi => ScaledSystem {
                k: -k,
                s: k.abs(),
                l: am,
                om: -a_omega,
                lambda: -lambda,
            },
        }
    }

    /// Scaled recessive solution carried from the endpoint to the midpoint.
    fn half_value(&self, end: End, am: f64, a_omega: f64, lambda: f64) -> Result<[f64; 2]> {
        let sys = self.system(end, am, a_omega, lambda);
        let q0 = sys.frobenius_start(THETA_EPS);
        let mut opts = self.ode;
        opts.first_step = Some(THETA_EPS / (4.0 * (1.0 + sys.s)));
        integrate(
            |t, q: &[f64; 2]| sys.rhs(t, q),
            THETA_EPS,
            MATCH_POINT,
            q0,
            &opts,
            |_, _| {},
        )
    }

    /// Normalized midpoint Wronskian; zero exactly at eigenvalues.
    pub(crate) fn match_det(&self, am: f64, a_omega: f64, lambda: f64) -> Result<f64> {
        let a = self.half_value(End::Zero, am, a_omega, lambda)?;
        let b = self.half_value(End::Pi, am, a_omega, lambda)?;
        Ok((a[0] * b[1] - a[1] * b[0]) / (norm2(&a) * norm2(&b)))
    }

    /// Bracketed secant (Illinois) root of the matching determinant.
    fn illinois(
        &self,
        am: f64,
        a_omega: f64,
        mut a: f64,
        mut fa: f64,
        mut b: f64,
        mut fb: f64,
        xtol: f64,
    ) -> Result<f64> {
        debug_assert!(fa * fb <= 0.0);
        for _ in 0..120 {
            if (b - a).abs() <= xtol {
                break;
            }
            let mut c = b - fb * (b - a) / (fb - fa);
            // Keep the iterate strictly interior; fall back to bisection.
            let lo = a.min(b);
            let hi = a.max(b);
            if !(c > lo && c < hi) || (c - b).abs() < 0.01 * (b - a).abs() {
                c = 0.5 * (a + b);
            }
            let fc = self.match_det(am, a_omega, c)?;
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

    /// Locate the unique determinant zero within `center +- radius`.
    ///
    /// Zero or multiple roots in the window mean the continuation budget was
    /// violated (crossing or lost branch) and surface as `TrackingLost`.
    pub(crate) fn refine_near(
        &self,
        am: f64,
        a_omega: f64,
        center: f64,
        radius: f64,
        xtol: f64,
    ) -> Result<f64> {
        let lo = center - radius;
        let hi = center + radius;
        let flo = self.match_det(am, a_omega, lo)?;
        let fhi = self.match_det(am, a_omega, hi)?;
        if flo == 0.0 {
            return Ok(lo);
        }
        if fhi == 0.0 {
            return Ok(hi);
        }
        if flo * fhi < 0.0 {
            return self.illinois(am, a_omega, lo, flo, hi, fhi, xtol);
        }
        // Same sign at the edges: subdivide to distinguish "no root" from
        // "an even number of roots" inside the budget window.
        const SUBDIV: usize = 8;
        let mut xs = [0.0_f64; SUBDIV + 1];
        let mut fs = [0.0_f64; SUBDIV + 1];
        xs[0] = lo;
        fs[0] = flo;
        xs[SUBDIV] = hi;
        fs[SUBDIV] = fhi;
        for (i, (x, f)) in xs.iter_mut().zip(fs.iter_mut()).enumerate().take(SUBDIV).skip(1) {
            *x = lo + (hi - lo) * i as f64 / SUBDIV as f64;
            *f = self.match_det(am, a_omega, *x)?;
        }
        let mut brackets = Vec::new();
        for i in 0..SUBDIV {
            if fs[i] == 0.0 {
                brackets.push((xs[i], xs[i], fs[i], fs[i]));
            } else if fs[i] * fs[i + 1] < 0.0 {
                brackets.push((xs[i], xs[i + 1], fs[i], fs[i + 1]));
            }
        }
        match brackets.len() {
            1 => {
                let (a, b, fa, fb) = brackets[0];
                if a == b {
                    Ok(a)
                } else {
                    self.illinois(am, a_omega, a, fa, b, fb, xtol)
                }
            }
            n => Err(Error::TrackingLost {
                am,
                a_omega,
                guess: center,
                found: n,
            }),
        }
    }

    /// All determinant zeros in [lo, hi] at fixed parameters, by scanning with
    /// `step` and refining each sign change.
    pub(crate) fn eigenvalues_in(
        &self,
        am: f64,
        a_omega: f64,
        lo: f64,
        hi: f64,
        step: f64,
        xtol: f64,
    ) -> Result<Vec<f64>> {
        // Offset the grid so exact eigenvalues do not land on scan points.
        let start = lo + 0.0137 * step;
        let n = ((hi - start) / step).ceil() as usize;
        let mut roots = Vec::new();
        let mut prev: Option<(f64, f64)> = None;
        for i in 0..=n {
            let x = (start + i as f64 * step).min(hi);
            let f = self.match_det(am, a_omega, x)?;
            if let Some((xp, fp)) = prev {
                if fp * f < 0.0 {
                    roots.push(self.illinois(am, a_omega, xp, fp, x, f, xtol)?);
                }
            }
            prev = Some((x, f));
        }
        Ok(roots)
    }

    /// Spectrum at the reference point (L, Om) = (0, 0), split by sign:
    /// j = 1 is the smallest positive eigenvalue, j = -1 the largest negative.
    pub(crate) fn reference_spectrum(&self, jmax: u32) -> Result<Vec<(i32, f64)>> {
        let s = self.k.abs();
        let mut range = s + jmax as f64 + 2.5;
        for _attempt in 0..3 {
            let roots = self.eigenvalues_in(0.0, 0.0, -range, range, REF_SCAN_STEP, FINAL_TOL)?;
            let pos: Vec<f64> = roots.iter().copied().filter(|&r| r > 0.0).collect();
            let mut neg: Vec<f64> = roots.iter().copied().filter(|&r| r < 0.0).collect();
            neg.reverse(); // descending: nearest zero first
            if pos.len() >= jmax as usize && neg.len() >= jmax as usize {
                let mut out = Vec::with_capacity(2 * jmax as usize);
                for j in (1..=jmax as i32).rev() {
                    out.push((-j, neg[(j - 1) as usize]));
                }
                for j in 1..=jmax as i32 {
                    out.push((j, pos[(j - 1) as usize]));
                }
                return Ok(out);
            }
            range *= 1.6;
        }
        Err(Error::InvalidParameter(format!(
            "could not collect {jmax} eigenvalue pairs at the reference point for k = {}",
            self.k
        )))
    }

    /// Continue one eigenvalue along the straight segment `from -> to`.
    ///
    /// Returns lambda at each of the `steps + 1` segment points including both
    /// ends. Per-step movement is bounded by the step's parameter distance
    /// plus slack; a step that cannot isolate a unique root fails.
    pub(crate) fn track(
        &self,
        from: (f64, f64),
        lambda0: f64,
        to: (f64, f64),
        steps: u32,
        xtol: f64,
    ) -> Result<Vec<f64>> {
        let steps = steps.max(1);
        let total = (to.0 - from.0).abs() + (to.1 - from.1).abs();
        let budget = total / steps as f64 + BUDGET_PAD;
        let mut out = Vec::with_capacity(steps as usize + 1);
        out.push(lambda0);
        let mut lambda = lambda0;
        for i in 1..=steps {
            let t = i as f64 / steps as f64;
            let am = from.0 + t * (to.0 - from.0);
            let aom = from.1 + t * (to.1 - from.1);
            lambda = self.refine_near(am, aom, lambda, budget, xtol)?;
            out.push(lambda);
        }
        Ok(out)
    }

    /// Track lambda_j from the reference point to arbitrary parameters.
    pub(crate) fn lambda_at(
        &self,
        am: f64,
        a_omega: f64,
        j: i32,
        jmax_hint: u32,
    ) -> Result<f64> {
        let reference = self.reference_spectrum(j.unsigned_abs().max(jmax_hint))?;
        let lambda0 = reference
            .iter()
            .find(|&&(jj, _)| jj == j)
            .map(|&(_, l)| l)
            .ok_or_else(|| Error::InvalidParameter(format!("no branch j = {j}")))?;
        let total = am.abs() + a_omega.abs();
        if total < 1e-14 {
            return Ok(lambda0);
        }
        let steps = (total / TRACK_MAX_STEP).ceil() as u32;
        let path = self.track((0.0, 0.0), lambda0, (am, a_omega), steps, TRACK_TOL)?;
        let last = *path.last().unwrap();
        self.refine_near(am, a_omega, last, TRACK_TOL * 10.0 + BUDGET_PAD, FINAL_TOL)
    }

    /// Sample the (unscaled, desingularized) eigenfunction pair on an offset
    /// uniform theta grid, gluing the two half-solutions at the midpoint.
    /// Returns the samples of g (original weight-sin(theta) spinor pair) and
    /// the relative midpoint mismatch.
    pub(crate) fn sample_eigenfunction(
        &self,
        am: f64,
        a_omega: f64,
        lambda: f64,
        n: usize,
    ) -> Result<(SampledFunction, f64)> {
        let n = n.max(8);
        let s = self.k.abs();
        let thetas: Vec<f64> = (0..n)
            .map(|i| (i as f64 + 0.5) * std::f64::consts::PI / n as f64)
            .collect();

        // Left sweep: forced stops at every grid point up to the midpoint.
        let sys_l = self.system(End::Zero, am, a_omega, lambda);
        let mut q = sys_l.frobenius_start(THETA_EPS);
        let mut x = THETA_EPS;
        let mut opts = self.ode;
        opts.first_step = Some(THETA_EPS / (4.0 * (1.0 + s)));
        let mut left: Vec<(f64, [f64; 2])> = Vec::new();
        for &theta in thetas.iter().filter(|&&t| t <= MATCH_POINT) {
            q = integrate(|t, y: &[f64; 2]| sys_l.rhs(t, y), x, theta, q, &opts, |_, _| {})?;
            x = theta;
            opts.first_step = None;
            left.push((theta, [q[0] * theta.powf(s), q[1] * theta.powf(s)]));
        }
        let g_l_mid = {
            let qm = integrate(
                |t, y: &[f64; 2]| sys_l.rhs(t, y),
                x,
                MATCH_POINT,
                q,
                &opts,
                |_, _| {},
            )?;
            [qm[0] * MATCH_POINT.powf(s), qm[1] * MATCH_POINT.powf(s)]
        };

        // Right sweep in phi = pi - theta, also hitting mapped grid points.
        let sys_r = self.system(End::Pi, am, a_omega, lambda);
        let mut q = sys_r.frobenius_start(THETA_EPS);
        let mut x = THETA_EPS;
        let mut opts = self.ode;
        opts.first_step = Some(THETA_EPS / (4.0 * (1.0 + s)));
        let mut right: Vec<(f64, [f64; 2])> = Vec::new();
        for &theta in thetas.iter().rev().filter(|&&t| t > MATCH_POINT) {
            let phi = std::f64::consts::PI - theta;
            q = integrate(|t, y: &[f64; 2]| sys_r.rhs(t, y), x, phi, q, &opts, |_, _| {})?;
            x = phi;
            opts.first_step = None;
            right.push((theta, [q[0] * phi.powf(s), q[1] * phi.powf(s)]));
        }
        let g_r_mid = {
            let qm = integrate(
                |t, y: &[f64; 2]| sys_r.rhs(t, y),
                x,
                MATCH_POINT,
                q,
                &opts,
                |_, _| {},
            )?;
            [qm[0] * MATCH_POINT.powf(s), qm[1] * MATCH_POINT.powf(s)]
        };

        // Align the right half with the left: scale by the least-squares factor.
        let denom = g_r_mid[0] * g_r_mid[0] + g_r_mid[1] * g_r_mid[1];
        let scale = (g_l_mid[0] * g_r_mid[0] + g_l_mid[1] * g_r_mid[1]) / denom;
        let mis = {
            let d0 = g_l_mid[0] - scale * g_r_mid[0];
            let d1 = g_l_mid[1] - scale * g_r_mid[1];
            (d0 * d0 + d1 * d1).sqrt() / (g_l_mid[0] * g_l_mid[0] + g_l_mid[1] * g_l_mid[1]).sqrt()
        };

        let mut out = SampledFunction::new("theta");
        for (theta, gh) in left {
            let w = theta.sin().sqrt();
            out.push(
                theta,
                [
                    Complex64::new(gh[0] / w, 0.0),
                    Complex64::new(gh[1] / w, 0.0),
                ],
            );
        }
        for (theta, gh) in right.into_iter().rev() {
            let w = theta.sin().sqrt();
            out.push(
                theta,
                [
                    Complex64::new(scale * gh[0] / w, 0.0),
                    Complex64::new(scale * gh[1] / w, 0.0),
                ],
            );
        }
        Ok((out, mis))
    }
}

/// Eigenvalues lambda_j for |j| <= jmax at parameters `p`, resolution `grid`.
///
/// Labels are anchored at the reference point and carried by continuation;
/// every reported value is re-solved at the doubled resolution and must agree
/// to 1e-8 relative, otherwise `NotConverged`.
pub fn angular_spectrum(p: &AngularProblem, jmax: u32, grid: u32) -> Result<AngularSpectrum> {
    if jmax < 1 {
        return Err(Error::InvalidParameter("jmax must be >= 1".into()));
    }
    if grid < 16 {
        return Err(Error::InvalidParameter("grid must be >= 16".into()));
    }
    let solver = Solver::with_grid(p.k, grid);
    let fine = Solver::with_grid(p.k, grid * 2);
    let reference = solver.reference_spectrum(jmax)?;
    let total = p.am.abs() + p.a_omega.abs();
    let steps = (total / TRACK_MAX_STEP).ceil().max(1.0) as u32;
    let mut eigenvalues = Vec::with_capacity(reference.len());
    for &(j, lambda0) in &reference {
        let lambda_end = if total < 1e-14 {
            lambda0
        } else {
            *solver
                .track((0.0, 0.0), lambda0, (p.am, p.a_omega), steps, TRACK_TOL)?
                .last()
                .unwrap()
        };
        let radius = TRACK_TOL * 10.0 + BUDGET_PAD;
        let coarse = solver.refine_near(p.am, p.a_omega, lambda_end, radius, FINAL_TOL)?;
        let refined = fine.refine_near(p.am, p.a_omega, coarse, radius, FINAL_TOL)?;
        if (coarse - refined).abs() > 1e-8 * coarse.abs().max(1.0) {
            return Err(Error::NotConverged {
                what: "angular eigenvalue under grid doubling",
                coarse,
                fine: refined,
            });
        }
        eigenvalues.push((j, refined));
    }
    for w in eigenvalues.windows(2) {
        if w[0].1 >= w[1].1 {
            return Err(Error::TrackingLost {
                am: p.am,
                a_omega: p.a_omega,
                guess: w[1].1,
                found: 2,
            });
        }
    }
    Ok(AngularSpectrum {
        problem: *p,
        eigenvalues,
    })
}

/// lambda_j along the straight segment p0 -> p1 in `steps` steps.
///
/// The result has steps + 1 entries including both ends; consecutive entries
/// differ by at most (|dL| + |dOm|)/steps plus solver slack.
pub fn lambda_track(
    p0: &AngularProblem,
    p1: &AngularProblem,
    j: i32,
    steps: u32,
) -> Result<Vec<f64>> {
    if p0.k != p1.k {
        return Err(Error::InvalidParameter(
            "lambda_track requires identical k at both ends".into(),
        ));
    }
    if j == 0 {
        return Err(Error::InvalidParameter("j = 0 is not a valid branch".into()));
    }
    if steps < 1 {
        return Err(Error::InvalidParameter("steps must be >= 1".into()));
    }
    let solver = Solver::with_grid(p0.k, 500);
    let lambda0 = solver.lambda_at(p0.am, p0.a_omega, j, 1)?;
    solver.track(
        (p0.am, p0.a_omega),
        lambda0,
        (p1.am, p1.a_omega),
        steps,
        TRACK_TOL,
    )
}

/// Eigenvalue and sampled eigenfunction pair g(theta) of branch j at `p`,
/// on `samples` offset-uniform interior grid points.
///
/// Returns (lambda_j, samples, mismatch) where mismatch is the relative gap
/// between the two one-sided sweeps at the gluing point; it is a quality
/// indicator and should be of the order of the solver tolerance.
pub fn angular_eigenfunction(
    p: &AngularProblem,
    j: i32,
    grid: u32,
    samples: usize,
) -> Result<(f64, SampledFunction, f64)> {
    if j == 0 {
        return Err(Error::InvalidParameter("j = 0 is not a valid branch".into()));
    }
    if grid < 16 {
        return Err(Error::InvalidParameter("grid must be >= 16".into()));
    }
    let solver = Solver::with_grid(p.k, grid);
    let lambda = solver.lambda_at(p.am, p.a_omega, j, j.unsigned_abs())?;
    let (sf, mismatch) = solver.sample_eigenfunction(p.am, p.a_omega, lambda, samples)?;
    Ok((lambda, sf, mismatch))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k_half() -> HalfInteger {
        HalfInteger::from_twice(1).unwrap()
    }

    #[test]
    fn frobenius_start_consistent_with_integration() {
        // The series at eps and at 3*eps must agree with integrating between them.
        for &(tw, am, aom, lambda) in &[
            (1_i64, 0.4, -0.2, 1.3),
            (-3, -0.7, 0.5, -2.2),
            (17, 0.0, -4.25, 9.7),
        ] {
            let k = HalfInteger::from_twice(tw).unwrap();
            let solver = Solver::new(k, 1e-12);
            let sys = solver.system(End::Zero, am, aom, lambda);
            let q0 = sys.frobenius_start(THETA_EPS);
            let q1_series = sys.frobenius_start(3.0 * THETA_EPS);
            let mut opts = solver.ode;
            opts.first_step = Some(THETA_EPS / 10.0);
            let q1 = integrate(
                |t, y: &[f64; 2]| sys.rhs(t, y),
                THETA_EPS,
                3.0 * THETA_EPS,
                q0,
                &opts,
                |_, _| {},
            )
            .unwrap();
            let err = ((q1[0] - q1_series[0]).powi(2) + (q1[1] - q1_series[1]).powi(2)).sqrt();
            let scale = norm2(&q1_series).max(1e-30);
            assert!(err / scale < 1e-9, "k={k}, mismatch {:.3e}", err / scale);
        }
    }

    #[test]
    fn reference_spectrum_k_half_is_integer_spaced() {
        // At (L, Om) = (0, 0), k = 1/2: eigenvalues are the nonzero integers.
        let solver = Solver::new(k_half(), 1e-11);
        let spec = solver.reference_spectrum(3).unwrap();
        let expect = [(-3, -3.0), (-2, -2.0), (-1, -1.0), (1, 1.0), (2, 2.0), (3, 3.0)];
        assert_eq!(spec.len(), expect.len());
        for ((j, l), (je, le)) in spec.iter().zip(expect.iter()) {
            assert_eq!(j, je);
            assert!(
                (l - le).abs() < 1e-8,
                "j = {j}: lambda = {l}, expected {le}"
            );
        }
    }

    #[test]
    fn reference_spectrum_k_three_halves() {
        // k = 3/2 shifts the ladder outward by one: +-2, +-3, ...
        let k = HalfInteger::from_twice(3).unwrap();
        let solver = Solver::new(k, 1e-11);
        let spec = solver.reference_spectrum(2).unwrap();
        let expect = [(-2, -3.0), (-1, -2.0), (1, 2.0), (2, 3.0)];
        for ((j, l), (je, le)) in spec.iter().zip(expect.iter()) {
            assert_eq!(j, je);
            assert!((l - le).abs() < 1e-8, "j = {j}: lambda = {l}");
        }
    }

    #[test]
    fn spectrum_self_consistent_under_grid_doubling() {
        let p = AngularProblem::new(k_half(), 0.35, -0.25).unwrap();
        let s1 = angular_spectrum(&p, 1, 96).unwrap();
        let s2 = angular_spectrum(&p, 1, 192).unwrap();
        for (a, b) in s1.eigenvalues.iter().zip(s2.eigenvalues.iter()) {
            assert_eq!(a.0, b.0);
            assert!((a.1 - b.1).abs() <= 1e-8 * a.1.abs().max(1.0));
        }
    }

    #[test]
    fn spectrum_rejects_bad_arguments() {
        let p = AngularProblem::new(k_half(), 0.0, 0.0).unwrap();
        assert!(matches!(
            angular_spectrum(&p, 0, 500),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            angular_spectrum(&p, 1, 4),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn track_drift_obeys_lipschitz_budget() {
        // Straight move of length 0.3 in L cannot move lambda_1 further than 0.3.
        let p0 = AngularProblem::new(k_half(), 0.0, 0.0).unwrap();
        let p1 = AngularProblem::new(k_half(), 0.3, 0.0).unwrap();
        let path = lambda_track(&p0, &p1, 1, 30).unwrap();
        assert_eq!(path.len(), 31);
        assert!((path[0] - 1.0).abs() < 1e-8);
        let drift = (path.last().unwrap() - path[0]).abs();
        assert!(drift <= 0.3 + 1e-6, "drift = {drift}");
        for w in path.windows(2) {
            assert!((w[1] - w[0]).abs() <= 0.01 + 1e-6);
        }
        // Endpoint agrees with an independent spectrum solve at p1.
        let spec = angular_spectrum(&p1, 1, 500).unwrap();
        assert!((spec.lambda(1).unwrap() - path.last().unwrap()).abs() < 1e-7);
    }

    #[test]
    fn track_total_variation_bounded() {
        let k = HalfInteger::from_twice(3).unwrap();
        let p0 = AngularProblem::new(k, 0.0, 0.0).unwrap();
        let p1 = AngularProblem::new(k, 0.0, 0.5).unwrap();
        let path = lambda_track(&p0, &p1, -1, 50).unwrap();
        let tv: f64 = path.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
        assert!(tv <= 0.5 + 1e-6, "total variation {tv}");
    }

    #[test]
    fn track_requires_matching_k() {
        let p0 = AngularProblem::new(k_half(), 0.0, 0.0).unwrap();
        let p1 =
            AngularProblem::new(HalfInteger::from_twice(3).unwrap(), 0.1, 0.0).unwrap();
        assert!(matches!(
            lambda_track(&p0, &p1, 1, 5),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn eigenfunction_halves_glue_at_midpoint() {
        let solver = Solver::new(k_half(), 1e-11);
        let lambda = solver.lambda_at(0.3, -0.25, 1, 1).unwrap();
        let (samples, mismatch) = solver
            .sample_eigenfunction(0.3, -0.25, lambda, 64)
            .unwrap();
        assert_eq!(samples.len(), 64);
        assert!(mismatch < 1e-6, "midpoint mismatch {mismatch}");
        assert!(samples.density().iter().all(|&d| d.is_finite() && d >= 0.0));
    }
}
