use num_complex::Complex64;

use crate::error::{Error, Result};

/// Half-integer azimuthal quantum number: stored as twice its value, which must be odd.
///
/// The separation of the Dirac equation on an axisymmetric background produces
/// one angular/radial pair per such k; integer values never occur for spin 1/2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HalfInteger {
    twice: i64,
}

impl HalfInteger {
    pub fn from_twice(twice: i64) -> Result<Self> {
        if twice.rem_euclid(2) == 0 {
            return Err(Error::InvalidK { twice });
        }
        Ok(Self { twice })
    }

    /// Accepts a float that is exactly representable as n/2 with n odd.
    pub fn try_from_f64(v: f64) -> Result<Self> {
        let twice = (2.0 * v).round();
        if !twice.is_finite() || (2.0 * v - twice).abs() > 1e-9 {
            return Err(Error::InvalidK {
                twice: (2.0 * v) as i64,
            });
        }
        Self::from_twice(twice as i64)
    }

    pub fn twice(self) -> i64 {
        self.twice
    }

    pub fn value(self) -> f64 {
        self.twice as f64 / 2.0
    }

    pub fn abs(self) -> f64 {
        self.value().abs()
    }
}

impl std::fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/2", self.twice)
    }
}

/// A function sampled on a coordinate grid, two complex components per point.
///
/// Used for eigenfunction export and for residual checks; `coordinate` names
/// the abscissa in emitted files (x = r - rho for radial data, theta for angular).
#[derive(Debug, Clone)]
pub struct SampledFunction {
    pub coordinate: &'static str,
    pub xs: Vec<f64>,
    pub values: Vec<[Complex64; 2]>,
}

impl SampledFunction {
    pub fn new(coordinate: &'static str) -> Self {
        Self {
            coordinate,
            xs: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn push(&mut self, x: f64, v: [Complex64; 2]) {
        self.xs.push(x);
        self.values.push(v);
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Pointwise |v1|^2 + |v2|^2.
    pub fn density(&self) -> Vec<f64> {
        self.values
            .iter()
            .map(|v| v[0].norm_sqr() + v[1].norm_sqr())
            .collect()
    }
}
