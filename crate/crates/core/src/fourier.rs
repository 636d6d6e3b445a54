//! Finite Fourier series on the circle, in the basis e^{ijz}.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::TAU;

/// Grid size used for sampled sup norms.
const SUP_GRID: usize = 4096;

/// Real trigonometric polynomial c₀ + Σ_j (a_j cos jz + b_j sin jz), j ≥ 1.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrigSeries {
    #[serde(default)]
    pub constant: f64,
    /// a_j for j = 1, 2, ...
    #[serde(default)]
    pub cos: Vec<f64>,
    /// b_j for j = 1, 2, ...
    #[serde(default)]
    pub sin: Vec<f64>,
}

impl TrigSeries {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn new(constant: f64, cos: Vec<f64>, sin: Vec<f64>) -> Self {
        Self { constant, cos, sin }
    }

    pub fn cos_term(amplitude: f64, order: usize) -> Self {
        let mut cos = vec![0.0; order];
        cos[order - 1] = amplitude;
        Self::new(0.0, cos, vec![])
    }

    pub fn sin_term(amplitude: f64, order: usize) -> Self {
        let mut sin = vec![0.0; order];
        sin[order - 1] = amplitude;
        Self::new(0.0, vec![], sin)
    }

    pub fn is_zero(&self) -> bool {
        self.constant == 0.0 && self.cos.iter().chain(&self.sin).all(|&c| c == 0.0)
    }

    /// Highest frequency with a nonzero coefficient.
    pub fn degree(&self) -> usize {
        let top = |v: &[f64]| v.iter().rposition(|&c| c != 0.0).map_or(0, |i| i + 1);
        top(&self.cos).max(top(&self.sin))
    }

    pub fn eval(&self, z: f64) -> f64 {
        let mut acc = self.constant;
        for (j, &a) in self.cos.iter().enumerate() {
            acc += a * ((j + 1) as f64 * z).cos();
        }
        for (j, &b) in self.sin.iter().enumerate() {
            acc += b * ((j + 1) as f64 * z).sin();
        }
        acc
    }

    pub fn derivative(&self, z: f64) -> f64 {
        let mut acc = 0.0;
        for (j, &a) in self.cos.iter().enumerate() {
            let k = (j + 1) as f64;
            acc -= a * k * (k * z).sin();
        }
        for (j, &b) in self.sin.iter().enumerate() {
            let k = (j + 1) as f64;
            acc += b * k * (k * z).cos();
        }
        acc
    }

    pub fn second_derivative(&self, z: f64) -> f64 {
        let mut acc = 0.0;
        for (j, &a) in self.cos.iter().enumerate() {
            let k = (j + 1) as f64;
            acc -= a * k * k * (k * z).cos();
        }
        for (j, &b) in self.sin.iter().enumerate() {
            let k = (j + 1) as f64;
            acc -= b * k * k * (k * z).sin();
        }
        acc
    }

    /// sup |f| sampled on a uniform grid.
    pub fn sup_norm(&self) -> f64 {
        sampled_sup(|z| self.eval(z))
    }

    /// sup |f| + sup |f'|.
    pub fn c1_norm(&self) -> f64 {
        self.sup_norm() + sampled_sup(|z| self.derivative(z))
    }

    pub fn to_fourier(&self) -> FourierSeries {
        let mut out = FourierSeries::constant(Complex64::new(self.constant, 0.0));
        for (j, &a) in self.cos.iter().enumerate() {
            let k = j as i32 + 1;
            out.add_coefficient(k, Complex64::new(a / 2.0, 0.0));
            out.add_coefficient(-k, Complex64::new(a / 2.0, 0.0));
        }
        for (j, &b) in self.sin.iter().enumerate() {
            let k = j as i32 + 1;
            out.add_coefficient(k, Complex64::new(0.0, -b / 2.0));
            out.add_coefficient(-k, Complex64::new(0.0, b / 2.0));
        }
        out
    }
}

fn sampled_sup(f: impl Fn(f64) -> f64) -> f64 {
    (0..SUP_GRID)
        .map(|i| f(TAU * i as f64 / SUP_GRID as f64).abs())
        .fold(0.0, f64::max)
}

/// Finite sum Σ c_j e^{ijz} with exactly-zero coefficients dropped.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FourierSeries {
    coeffs: BTreeMap<i32, Complex64>,
}

impl FourierSeries {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Complex64) -> Self {
        let mut s = Self::zero();
        s.add_coefficient(0, c);
        s
    }

    pub fn from_pairs(pairs: &[(i32, Complex64)]) -> Self {
        let mut s = Self::zero();
        for &(j, c) in pairs {
            s.add_coefficient(j, c);
        }
        s
    }

    pub fn add_coefficient(&mut self, j: i32, c: Complex64) {
        let merged = self.coefficient(j) + c;
        if merged == Complex64::new(0.0, 0.0) {
            self.coeffs.remove(&j);
        } else {
            self.coeffs.insert(j, merged);
        }
    }

    pub fn coefficient(&self, j: i32) -> Complex64 {
        self.coeffs.get(&j).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, Complex64)> + '_ {
        self.coeffs.iter().map(|(&j, &c)| (j, c))
    }

    /// Largest |j| with a nonzero coefficient.
    pub fn bandwidth(&self) -> usize {
        self.coeffs.keys().map(|j| j.unsigned_abs() as usize).max().unwrap_or(0)
    }

    pub fn add(&self, other: &FourierSeries) -> FourierSeries {
        let mut out = self.clone();
        for (j, c) in other.iter() {
            out.add_coefficient(j, c);
        }
        out
    }

    pub fn scale(&self, factor: f64) -> FourierSeries {
        let mut out = FourierSeries::zero();
        for (j, c) in self.iter() {
            out.add_coefficient(j, c * factor);
        }
        out
    }

    pub fn mul(&self, other: &FourierSeries) -> FourierSeries {
        let mut out = FourierSeries::zero();
        for (j, a) in self.iter() {
            for (k, b) in other.iter() {
                out.add_coefficient(j + k, a * b);
            }
        }
        out
    }

    /// Coefficients of z ↦ f(z − shift).
    pub fn translate(&self, shift: f64) -> FourierSeries {
        let mut out = FourierSeries::zero();
        for (j, c) in self.iter() {
            out.add_coefficient(j, c * Complex64::from_polar(1.0, -(j as f64) * shift));
        }
        out
    }

    pub fn eval(&self, z: f64) -> Complex64 {
        self.iter()
            .map(|(j, c)| c * Complex64::from_polar(1.0, j as f64 * z))
            .sum()
    }
}

/// Values u(2πj/P), j = 0..P, of u = Σ_{|m|≤M} u_m e^{imz}/√(2π) from the
/// centred coefficient vector (length 2M + 1 < P).
pub fn sample_on_grid(coeffs: &[Complex64], points: usize) -> Vec<Complex64> {
    assert!(coeffs.len() < points, "grid too coarse for the coefficient vector");
    let c = (coeffs.len() / 2) as i64;
    let mut buffer = vec![Complex64::new(0.0, 0.0); points];
    for (i, u) in coeffs.iter().enumerate() {
        let m = i as i64 - c;
        buffer[m.rem_euclid(points as i64) as usize] = *u / TAU.sqrt();
    }
    FftPlanner::new().plan_fft_inverse(points).process(&mut buffer);
    buffer
}

/// Plain Fourier coefficients f̂_j = (1/P)Σ f(2πj'/P)e^{−ijz_{j'}} of grid
/// samples, indexed by j mod P.
pub fn grid_coefficients(values: &[Complex64]) -> Vec<Complex64> {
    let points = values.len();
    let mut buffer = values.to_vec();
    FftPlanner::new().plan_fft_forward(points).process(&mut buffer);
    let scale = 1.0 / points as f64;
    buffer.iter_mut().for_each(|v| *v *= scale);
    buffer
}
