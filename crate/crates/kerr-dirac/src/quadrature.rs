//! Adaptive Gauss-Kronrod quadrature and Gauss-Legendre node generation.
//!
//! The normalization integral of a bound state is smooth away from the
//! horizon but carries an x^(2*kappa - 2) endpoint power; callers substitute
//! that away and hand this module regular integrands. The 15-point Kronrod
//! pair provides the per-interval error estimate; intervals are split worst
//! first until the global estimate meets tolerance.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_33,
    0.949_107_912_342_758_524_526_189_684_047_85,
    0.864_864_423_359_769_072_789_712_788_640_93,
    0.741_531_185_599_394_439_863_864_773_280_79,
    0.586_087_235_467_691_130_294_144_838_258_73,
    0.405_845_151_377_397_166_906_606_412_076_96,
    0.207_784_955_007_898_467_600_689_403_773_24,
    0.0,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_08,
    0.279_705_391_489_276_667_901_467_771_423_78,
    0.381_830_050_505_118_944_950_369_775_488_98,
    0.417_959_183_673_469_387_755_102_040_816_33,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_97,
    0.063_092_092_629_978_553_290_700_663_189_2,
    0.104_790_010_322_250_183_839_876_322_541_52,
    0.140_653_259_715_525_918_745_189_590_510_24,
    0.169_004_726_639_267_902_826_583_426_598_55,
    0.190_350_578_064_785_409_913_256_402_421_01,
    0.204_432_940_075_298_892_414_161_999_234_65,
    0.209_482_141_084_727_828_012_999_174_891_71,
];

/// One 15-point Kronrod evaluation: (integral, error estimate).
fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let center = 0.5 * (a + b);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Integrate `f` over [a, b], splitting until the summed error estimate is
/// below `max(abs_tol, rel_tol * |integral|)`.
pub fn adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_intervals: usize,
) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) || a >= b {
        return Err(Error::InvalidParameter(format!(
            "quadrature interval [{a}, {b}] is invalid"
        )));
    }
    struct Cell {
        a: f64,
        b: f64,
        val: f64,
        err: f64,
    }
    let (val, err) = gk15(&mut f, a, b);
    let mut cells = vec![Cell { a, b, val, err }];
    loop {
        let total: f64 = cells.iter().map(|c| c.val).sum();
        let total_err: f64 = cells.iter().map(|c| c.err).sum();
        if total_err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(total);
        }
        if cells.len() >= max_intervals {
            return Err(Error::QuadratureFailure {
                a,
                b,
                err: total_err,
            });
        }
        let worst = cells
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .map(|(i, _)| i)
            .unwrap();
        let Cell { a: ca, b: cb, .. } = cells.swap_remove(worst);
        let mid = 0.5 * (ca + cb);
        let (v1, e1) = gk15(&mut f, ca, mid);
        let (v2, e2) = gk15(&mut f, mid, cb);
        cells.push(Cell {
            a: ca,
            b: mid,
            val: v1,
            err: e1,
        });
        cells.push(Cell {
            a: mid,
            b: cb,
            val: v2,
            err: e2,
        });
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre recurrence. Used as an independent fixed-grid quadrature route.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi-style initial guess for the i-th root.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Evaluate P_n(x) and P_n'(x).
            let mut p0 = 1.0;
            let mut p1 = x;
            for j in 2..=n {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Fixed Gauss-Legendre integral of `f` over [a, b] with `n` nodes.
pub fn gauss_legendre_integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize) -> f64 {
    let (xs, ws) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let center = 0.5 * (a + b);
    xs.iter()
        .zip(&ws)
        .map(|(&x, &w)| w * f(center + half * x))
        .sum::<f64>()
        * half
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let v = adaptive(|x| 3.0 * x * x, 0.0, 2.0, 1e-12, 0.0, 100).unwrap();
        assert!((v - 8.0).abs() < 1e-12);
    }

    #[test]
    fn sine_integral() {
        let v = adaptive(|x| x.sin(), 0.0, std::f64::consts::PI, 1e-13, 0.0, 200).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn integrable_endpoint_power() {
        // int_0^1 x^(-1/2) dx = 2; endpoint nodes are interior so this refines through.
        let v = adaptive(|x| x.powf(-0.5), 0.0, 1.0, 1e-9, 0.0, 5000).unwrap();
        assert!((v - 2.0).abs() < 1e-8, "got {v}");
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        assert!(matches!(
            adaptive(|x: f64| x.powf(-0.5), 0.0, 1.0, 1e-14, 0.0, 8),
            Err(Error::QuadratureFailure { .. })
        ));
    }

    #[test]
    fn gauss_legendre_low_order_exactness() {
        // n nodes integrate polynomials up to degree 2n-1 exactly.
        let v = gauss_legendre_integrate(|x| x.powi(7) + 2.0 * x.powi(4), -1.0, 1.0, 4);
        assert!((v - 4.0 / 5.0).abs() < 1e-13);
        let (xs, ws) = gauss_legendre(64);
        assert!((ws.iter().sum::<f64>() - 2.0).abs() < 1e-12);
        assert!(xs.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn gauss_legendre_matches_adaptive() {
        let f = |x: f64| (x * 1.3).cos() * (-0.4 * x).exp();
        let a = adaptive(f, 0.0, 5.0, 1e-12, 0.0, 400).unwrap();
        let g = gauss_legendre_integrate(f, 0.0, 5.0, 80);
        assert!((a - g).abs() < 1e-11);
    }
}
