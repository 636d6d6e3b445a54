//! Hermite functions and the cutoff, rescaled Hermite quasimodes of the
//! Mathieu operator localized in the well at z = 0.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_4, PI, TAU};
use std::fmt::Write;

use crate::circle_spectral::{assemble_mathieu, suggested_cutoff, CircleOperator, SpectralPair};
use crate::error::{LabError, Result};
use crate::phasespace::chi;
use crate::trend::{fit_power_law, TrendFit};

/// Number of points of the z-grid on [−π, π).
pub const GRID_POINTS: usize = 8192;

/// Default cutoff radius δ.
pub const DEFAULT_DELTA: f64 = 0.5;

/// Normalized Hermite function φ_k(t) by the three-term recurrence.
pub fn hermite_eval(k: usize, t: f64) -> f64 {
    hermite_all(k, t)[k]
}

/// φ_0(t), …, φ_k(t).
pub fn hermite_all(k: usize, t: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(k + 1);
    out.push(PI.powf(-0.25) * (-0.5 * t * t).exp());
    if k >= 1 {
        out.push(2f64.sqrt() * t * out[0]);
    }
    for j in 1..k {
        let next = (2.0 / (j + 1) as f64).sqrt() * t * out[j] - (j as f64 / (j + 1) as f64).sqrt() * out[j - 1];
        out.push(next);
    }
    out
}

/// v_{k,n}(z) = χ(z/δ)·n^{1/4}·φ_k(√n z), on a uniform grid and in Fourier form.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Quasimode {
    pub k: usize,
    pub n: i64,
    pub delta: f64,
    /// samples at z_j = −π + 2πj/GRID_POINTS
    pub values: Vec<f64>,
    /// coefficients in the basis e^{imz}/√(2π), m = −M..=M
    pub fourier: Vec<Complex64>,
}

pub fn grid_point(j: usize) -> f64 {
    -PI + TAU * j as f64 / GRID_POINTS as f64
}

pub fn build_quasimode(k: usize, n: i64, delta: f64) -> Result<Quasimode> {
    build_quasimode_with_cutoff(k, n, delta, suggested_cutoff([n, 0], k + 1))
}

pub fn build_quasimode_with_cutoff(k: usize, n: i64, delta: f64, cutoff: usize) -> Result<Quasimode> {
    if !(delta > 0.0 && delta <= FRAC_PI_4) {
        return Err(LabError::InvalidArgument(format!("delta = {delta} must lie in (0, π/4]")));
    }
    if n < 16 {
        return Err(LabError::InvalidArgument(format!("n = {n} below 16")));
    }
    let scale = (n as f64).sqrt();
    let amplitude = (n as f64).powf(0.25);
    let values: Vec<f64> = (0..GRID_POINTS)
        .map(|j| {
            let z = grid_point(j);
            let cut = chi(z / delta);
            if cut == 0.0 {
                0.0
            } else {
                cut * amplitude * hermite_eval(k, scale * z)
            }
        })
        .collect();
    // widen the cutoff until the top coefficients are negligible
    let mut cutoff = cutoff;
    let mut fourier = fourier_coefficients(&values, cutoff);
    while relative_tail(&fourier) > TAIL_TOLERANCE && 2 * cutoff <= MAX_CUTOFF {
        cutoff *= 2;
        fourier = fourier_coefficients(&values, cutoff);
    }
    Ok(Quasimode {
        k,
        n,
        delta,
        values,
        fourier,
    })
}

/// Largest cutoff used for quasimodes (a quarter of the grid).
pub const MAX_CUTOFF: usize = GRID_POINTS / 4;

/// Relative size of the top Fourier coefficients accepted as resolved.
pub const TAIL_TOLERANCE: f64 = 1e-12;

fn relative_tail(fourier: &[Complex64]) -> f64 {
    let top = fourier[0].norm().max(fourier[fourier.len() - 1].norm());
    let peak = fourier.iter().map(|c| c.norm()).fold(0.0, f64::max);
    top / peak.max(f64::MIN_POSITIVE)
}

/// Trapezoidal (spectrally accurate) projection onto e^{imz}/√(2π), |m| ≤ M,
/// with the phase advanced incrementally along the grid.
fn fourier_coefficients(values: &[f64], cutoff: usize) -> Vec<Complex64> {
    let c = cutoff as i64;
    let weight = TAU / values.len() as f64 / TAU.sqrt();
    let mut out = vec![Complex64::new(0.0, 0.0); 2 * cutoff + 1];
    for (j, &v) in values.iter().enumerate() {
        if v == 0.0 {
            continue;
        }
        let z = grid_point(j);
        let step = Complex64::from_polar(1.0, -z);
        let mut phase = Complex64::from_polar(1.0, c as f64 * z);
        for slot in out.iter_mut() {
            *slot += v * weight * phase;
            phase *= step;
        }
    }
    out
}

impl Quasimode {
    pub fn cutoff(&self) -> usize {
        (self.fourier.len() - 1) / 2
    }

    /// E_k(n) = (2k+1)/n.
    pub fn energy(&self) -> f64 {
        (2 * self.k + 1) as f64 / self.n as f64
    }

    pub fn norm(&self) -> f64 {
        self.fourier.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// L² norm by grid quadrature.
    pub fn grid_norm(&self) -> f64 {
        let dz = TAU / GRID_POINTS as f64;
        (self.values.iter().map(|v| v * v).sum::<f64>() * dz).sqrt()
    }

    /// ∫_{|z| ≥ δ} |v|² dz.
    pub fn tail_mass(&self) -> f64 {
        let dz = TAU / GRID_POINTS as f64;
        self.values
            .iter()
            .enumerate()
            .filter(|(j, _)| grid_point(*j).abs() >= self.delta)
            .map(|(_, v)| v * v * dz)
            .sum()
    }

    /// Mirror image in the well at z = π: coefficients times e^{−imπ}.
    pub fn translated_by_pi(&self) -> Vec<Complex64> {
        let c = self.cutoff() as i64;
        self.fourier
            .iter()
            .enumerate()
            .map(|(i, u)| if (i as i64 - c) % 2 == 0 { *u } else { -*u })
            .collect()
    }

    pub fn operator(&self) -> Result<CircleOperator> {
        assemble_mathieu([self.n, 0], self.cutoff())
    }

    /// Size of the top Fourier coefficients relative to the largest one.
    pub fn fourier_tail(&self) -> f64 {
        relative_tail(&self.fourier)
    }

    pub fn check_resolved(&self) -> Result<()> {
        let tail = self.fourier_tail();
        if tail > TAIL_TOLERANCE {
            return Err(LabError::CutoffNotConverged {
                index: self.k,
                change: tail,
            });
        }
        Ok(())
    }

    /// ‖M̂_n v − E_k(n) v‖ in the Fourier basis.
    pub fn residual(&self) -> Result<f64> {
        self.check_resolved()?;
        let op = self.operator()?;
        Ok(residual_against(&op, &self.fourier, self.energy()))
    }

    pub fn grid_csv(&self) -> String {
        let mut out = String::from("z,v\n");
        for (j, v) in self.values.iter().enumerate() {
            let _ = writeln!(out, "{:.15e},{:.15e}", grid_point(j), v);
        }
        out
    }
}

pub fn residual_against(op: &CircleOperator, u: &[Complex64], energy: f64) -> f64 {
    op.apply(u)
        .iter()
        .zip(u)
        .map(|(a, v)| (a - energy * v).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub k: usize,
    pub n: Vec<i64>,
    pub residuals: Vec<f64>,
    pub fit: TrendFit,
}

/// Slope of log ‖M̂_n v_{k,n} − E_k(n)v_{k,n}‖ against log n, with the
/// operator for each n supplied by `op_factory(n, cutoff)`.
pub fn residual_rate<F>(k: usize, n_list: &[i64], delta: f64, op_factory: F) -> Result<RateReport>
where
    F: Fn(i64, usize) -> Result<CircleOperator>,
{
    if n_list.len() < 3 {
        return Err(LabError::InvalidArgument("residual rate needs at least 3 values of n".into()));
    }
    let mut residuals = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let v = build_quasimode(k, n, delta)?;
        v.check_resolved()?;
        let op = op_factory(n, v.cutoff())?;
        residuals.push(residual_against(&op, &v.fourier, v.energy()));
    }
    let points: Vec<(f64, f64)> = n_list.iter().zip(&residuals).map(|(&n, &r)| (n as f64, r)).collect();
    Ok(RateReport {
        k,
        n: n_list.to_vec(),
        residuals,
        fit: fit_power_law(&points)?,
    })
}

/// The Mathieu operator for mode (n, 0), as an `op_factory`.
pub fn mathieu_factory(n: i64, cutoff: usize) -> Result<CircleOperator> {
    assemble_mathieu([n, 0], cutoff)
}

/// Share of ‖v‖² carried by the span of the given eigenvectors.
pub fn span_overlap(v: &[Complex64], pairs: &[&SpectralPair]) -> f64 {
    let norm_sq: f64 = v.iter().map(|c| c.norm_sqr()).sum();
    let captured: f64 = pairs
        .iter()
        .map(|p| {
            let c = p.cutoff() as i64;
            let vc = (v.len() as i64 - 1) / 2;
            (-c.min(vc)..=c.min(vc))
                .map(|m| p.coefficient(m).conj() * v[(m + vc) as usize])
                .sum::<Complex64>()
                .norm_sqr()
        })
        .sum();
    captured / norm_sq
}

/// (u_even ± u_odd)/√2 with the sign putting the mass in the well at `centre`.
pub fn localized_combination(even: &SpectralPair, odd: &SpectralPair, centre: f64) -> SpectralPair {
    let combine = |sign: f64| -> Vec<Complex64> {
        even.eigenvector
            .iter()
            .zip(&odd.eigenvector)
            .map(|(a, b)| (a + sign * b) / 2f64.sqrt())
            .collect()
    };
    let candidate = |sign: f64| SpectralPair {
        mode: even.mode,
        eigenvalue: 0.5 * (even.eigenvalue + odd.eigenvalue),
        eigenvector: combine(sign),
        residual: even.residual.hypot(odd.residual),
        sector: even.sector,
    };
    let plus = candidate(1.0);
    let minus = candidate(-1.0);
    let near = |p: &SpectralPair| {
        (0..256)
            .map(|i| centre - PI / 2.0 + PI * (i as f64 + 0.5) / 256.0)
            .map(|z| p.eval(z).norm_sqr())
            .sum::<f64>()
    };
    if near(&plus) >= near(&minus) {
        plus
    } else {
        minus
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_values_at_zero() {
        assert!((hermite_eval(0, 0.0) - 0.751_125_544_464_942_5).abs() < 1e-15);
        assert_eq!(hermite_eval(1, 0.0), 0.0);
        assert_eq!(hermite_eval(3, 0.0), 0.0);
    }

    #[test]
    fn rejects_wide_cutoff() {
        assert!(build_quasimode(0, 256, 1.0).is_err());
        assert!(build_quasimode(0, 8, 0.5).is_err());
    }
}
