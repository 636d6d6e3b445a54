//! Weyl quantization on the circle in the Fourier basis e^{imz}/√(2π):
//! A_{m',m} = â_{m'−m}(h(m+m')/2).

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::TAU;
use std::sync::Arc;

use crate::error::{LabError, Result};
use crate::fourier::grid_coefficients;

type Profile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type Evaluator = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Relative size below which symbol Fourier coefficients count as resolved.
pub const SYMBOL_TAIL_TOLERANCE: f64 = 1e-12;

/// A real symbol a(z, ζ), 2π-periodic in z, optionally factorized as b(z)·c(ζ).
#[derive(Clone)]
pub struct CircleSymbol {
    eval: Evaluator,
    factors: Option<(Profile, Profile)>,
}

impl std::fmt::Debug for CircleSymbol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CircleSymbol")
            .field("factorized", &self.factors.is_some())
            .finish()
    }
}

impl CircleSymbol {
    pub fn new(eval: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            eval: Arc::new(eval),
            factors: None,
        }
    }

    /// b(z)·c(ζ).
    pub fn factorized(
        position: impl Fn(f64) -> f64 + Send + Sync + 'static,
        momentum: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        let position: Profile = Arc::new(position);
        let momentum: Profile = Arc::new(momentum);
        let (b, c) = (position.clone(), momentum.clone());
        Self {
            eval: Arc::new(move |z, zeta| b(z) * c(zeta)),
            factors: Some((position, momentum)),
        }
    }

    pub fn eval(&self, z: f64, zeta: f64) -> f64 {
        (self.eval)(z, zeta)
    }

    pub fn is_factorized(&self) -> bool {
        self.factors.is_some()
    }

    /// Fourier coefficients of z ↦ a(z, ζ) on a grid of `points`, indexed by j mod points.
    fn coefficients_at(&self, zeta: f64, points: usize) -> Vec<Complex64> {
        let values: Vec<Complex64> = (0..points)
            .map(|j| Complex64::new(self.eval(TAU * j as f64 / points as f64, zeta), 0.0))
            .collect();
        grid_coefficients(&values)
    }
}

fn quadrature_points(band: usize) -> usize {
    (4 * band + 8).next_power_of_two().max(1024)
}

fn coefficient(table: &[Complex64], j: i64) -> Complex64 {
    table[j.rem_euclid(table.len() as i64) as usize]
}

/// Largest |â_j| with |j| ≥ `from`, relative to max(1, max|â|).
fn tail_ratio(table: &[Complex64], from: usize) -> f64 {
    let points = table.len();
    let peak = table.iter().map(|c| c.norm()).fold(1.0, f64::max);
    let tail = (from..=points / 2)
        .flat_map(|j| [table[j], table[(points - j) % points]])
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    tail / peak
}

/// Dense Weyl matrix on |m| ≤ M, row m', column m.
#[derive(Clone, Debug)]
pub struct WeylMatrix {
    pub cutoff: usize,
    pub h: f64,
    entries: Vec<Complex64>,
}

impl WeylMatrix {
    pub fn dim(&self) -> usize {
        2 * self.cutoff + 1
    }

    pub fn get(&self, m_prime: i64, m: i64) -> Complex64 {
        let c = self.cutoff as i64;
        self.entries[((m_prime + c) as usize) * self.dim() + (m + c) as usize]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Complex64]> {
        self.entries.chunks(self.dim())
    }

    pub fn apply(&self, u: &[Complex64]) -> Vec<Complex64> {
        self.rows().map(|row| row.iter().zip(u).map(|(a, v)| a * v).sum()).collect()
    }

    /// max |A_{m',m} − conj(A_{m,m'})|.
    pub fn hermitian_defect(&self) -> f64 {
        let c = self.cutoff as i64;
        let mut worst: f64 = 0.0;
        for mp in -c..=c {
            for m in -c..=c {
                worst = worst.max((self.get(mp, m) - self.get(m, mp).conj()).norm());
            }
        }
        worst
    }
}

/// Weyl matrix of `symbol` at semiclassical parameter h on |m| ≤ M.
pub fn weyl_circle(symbol: &CircleSymbol, h: f64, cutoff: usize) -> Result<WeylMatrix> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(LabError::InvalidArgument(format!("h = {h} must be positive")));
    }
    let c = cutoff as i64;
    let dim = 2 * cutoff + 1;
    let points = quadrature_points(2 * cutoff);
    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    if let Some((position, momentum)) = &symbol.factors {
        let values: Vec<Complex64> = (0..points)
            .map(|j| Complex64::new(position(TAU * j as f64 / points as f64), 0.0))
            .collect();
        let table = grid_coefficients(&values);
        if tail_ratio(&table, cutoff) > SYMBOL_TAIL_TOLERANCE {
            return Err(LabError::QuadratureFailure(cutoff));
        }
        for mp in -c..=c {
            for m in -c..=c {
                let zeta = h * (m + mp) as f64 / 2.0;
                entries[((mp + c) as usize) * dim + (m + c) as usize] = coefficient(&table, mp - m) * momentum(zeta);
            }
        }
    } else {
        // one z-transform per value of m + m'
        let tables: Vec<Vec<Complex64>> = (-2 * c..=2 * c)
            .into_par_iter()
            .map(|sum| symbol.coefficients_at(h * sum as f64 / 2.0, points))
            .collect();
        if tables.iter().any(|t| tail_ratio(t, cutoff) > SYMBOL_TAIL_TOLERANCE) {
            return Err(LabError::QuadratureFailure(cutoff));
        }
        for mp in -c..=c {
            for m in -c..=c {
                let table = &tables[(m + mp + 2 * c) as usize];
                entries[((mp + c) as usize) * dim + (m + c) as usize] = coefficient(table, mp - m);
            }
        }
    }
    Ok(WeylMatrix { cutoff, h, entries })
}

/// ⟨Op_h^w(a)u, u⟩ for a centred coefficient vector u, summing only over the
/// modes where u is non-negligible. No cutoff check is made: the symbol is
/// resolved on a grid fine enough for every index pair that contributes.
pub fn weyl_pairing(symbol: &CircleSymbol, h: f64, u: &[Complex64]) -> Complex64 {
    let c = (u.len() / 2) as i64;
    let peak = u.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let active: Vec<i64> = (-c..=c).filter(|m| u[(m + c) as usize].norm() > 1e-15 * peak).collect();
    let low = active[0];
    let high = active[active.len() - 1];
    let band = (high - low) as usize;
    let points = quadrature_points(band);
    let at = |m: i64| u[(m + c) as usize];
    (2 * low..=2 * high)
        .into_par_iter()
        .map(|sum| {
            let table = symbol.coefficients_at(h * sum as f64 / 2.0, points);
            let mut acc = Complex64::new(0.0, 0.0);
            // m + m' = sum with both indices in [low, high]
            let first = (sum - high).max(low);
            let last = (sum - low).min(high);
            for m in first..=last {
                let mp = sum - m;
                acc += at(mp).conj() * coefficient(&table, mp - m) * at(m);
            }
            acc
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum()
}
