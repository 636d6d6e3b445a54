//! Ladder operators a = h(∂z + s(z)), a* = h(−∂z + s(z)) with
//! s = n₁sin z − n₂cos z, acting on Fourier coefficient vectors.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circle_spectral::assemble_mathieu;
use crate::error::{LabError, Result};
use crate::quasimodes::{build_quasimode_with_cutoff, Quasimode};

/// Number of top Fourier modes a vector must leave empty.
pub const BAND_MARGIN: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ladder {
    Lower,
    Raise,
}

/// Tridiagonal realization of a on |m| ≤ M: a(m,m) = ihm, a(m,m−1) = h·s₁,
/// a(m,m+1) = h·conj(s₁), s₁ = −n₂/2 − i n₁/2. a* is its conjugate transpose.
#[derive(Clone, Debug)]
pub struct LadderPair {
    pub mode: [i64; 2],
    pub h: f64,
    pub cutoff: usize,
    /// rows (sub, diag, super) of a
    lower: Vec<[Complex64; 3]>,
}

impl LadderPair {
    pub fn new(mode: [i64; 2], h: f64, cutoff: usize) -> Self {
        let s1 = Complex64::new(-(mode[1] as f64) / 2.0, -(mode[0] as f64) / 2.0);
        let c = cutoff as i64;
        let lower = (-c..=c)
            .map(|m| [h * s1, Complex64::new(0.0, h * m as f64), h * s1.conj()])
            .collect();
        Self {
            mode,
            h,
            cutoff,
            lower,
        }
    }

    pub fn dim(&self) -> usize {
        2 * self.cutoff + 1
    }

    /// Entry (m, m') of the requested operator.
    pub fn entry(&self, which: Ladder, m: i64, m_prime: i64) -> Complex64 {
        let c = self.cutoff as i64;
        if m.abs() > c || m_prime.abs() > c || (m - m_prime).abs() > 1 {
            return Complex64::new(0.0, 0.0);
        }
        match which {
            Ladder::Lower => self.lower[(m + c) as usize][(m_prime - m + 1) as usize],
            Ladder::Raise => self.entry(Ladder::Lower, m_prime, m).conj(),
        }
    }

    fn check_margin(&self, u: &[Complex64]) -> Result<()> {
        if u.len() != self.dim() {
            return Err(LabError::InvalidArgument(format!(
                "vector of length {} for cutoff {}",
                u.len(),
                self.cutoff
            )));
        }
        let n = u.len();
        let occupied = (0..BAND_MARGIN).any(|i| u[i] != Complex64::new(0.0, 0.0) || u[n - 1 - i] != Complex64::new(0.0, 0.0));
        if occupied {
            return Err(LabError::BandOverflow);
        }
        Ok(())
    }

    fn apply_unchecked(&self, which: Ladder, u: &[Complex64]) -> Vec<Complex64> {
        let c = self.cutoff as i64;
        let idx = |m: i64| (m + c) as usize;
        (-c..=c)
            .map(|m| {
                let mut acc = Complex64::new(0.0, 0.0);
                for mp in (m - 1).max(-c)..=(m + 1).min(c) {
                    acc += self.entry(which, m, mp) * u[idx(mp)];
                }
                acc
            })
            .collect()
    }

    /// Exact banded product; u must leave the top two modes empty.
    pub fn apply(&self, which: Ladder, u: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_margin(u)?;
        Ok(self.apply_unchecked(which, u))
    }

    /// `outer(inner(u))`, exact under the same margin.
    pub fn apply_product(&self, outer: Ladder, inner: Ladder, u: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_margin(u)?;
        Ok(self.apply_unchecked(outer, &self.apply_unchecked(inner, u)))
    }

    /// Multiplication by h²(n₁cos z + n₂sin z), the derivative term s'.
    fn apply_frame_derivative(&self, u: &[Complex64]) -> Vec<Complex64> {
        let c = self.cutoff as i64;
        let h2 = self.h * self.h;
        // n₁cos z + n₂sin z = t₁e^{iz} + conj(t₁)e^{−iz}
        let t1 = Complex64::new(self.mode[0] as f64 / 2.0, -(self.mode[1] as f64) / 2.0);
        let idx = |m: i64| (m + c) as usize;
        (-c..=c)
            .map(|m| {
                let mut acc = Complex64::new(0.0, 0.0);
                if m - 1 >= -c {
                    acc += t1 * u[idx(m - 1)];
                }
                if m + 1 <= c {
                    acc += t1.conj() * u[idx(m + 1)];
                }
                h2 * acc
            })
            .collect()
    }

    /// ‖a*a u − (h²‖n‖²M̂_n − h²(n₁cos z + n₂sin z))u‖, relative to the second term's norm.
    pub fn factorization_defect(&self, u: &[Complex64]) -> Result<f64> {
        let lhs = self.apply_product(Ladder::Raise, Ladder::Lower, u)?;
        let rhs = self.reference_product(u, -1.0)?;
        Ok(relative_gap(&lhs, &rhs))
    }

    /// Same identity in the other order: a a* = h²‖n‖²M̂_n + h²(n₁cos z + n₂sin z).
    pub fn reverse_factorization_defect(&self, u: &[Complex64]) -> Result<f64> {
        let lhs = self.apply_product(Ladder::Lower, Ladder::Raise, u)?;
        let rhs = self.reference_product(u, 1.0)?;
        Ok(relative_gap(&lhs, &rhs))
    }

    fn reference_product(&self, u: &[Complex64], sign: f64) -> Result<Vec<Complex64>> {
        let norm_sq = (self.mode[0] * self.mode[0] + self.mode[1] * self.mode[1]) as f64;
        let h2 = self.h * self.h;
        let kinetic: Vec<Complex64> = if norm_sq == 0.0 {
            let c = self.cutoff as i64;
            (-c..=c).zip(u).map(|(m, v)| v * (m * m) as f64).collect()
        } else {
            let mathieu = assemble_mathieu(self.mode, self.cutoff)?;
            mathieu.apply(u).into_iter().map(|v| v * norm_sq).collect()
        };
        let derivative = self.apply_frame_derivative(u);
        Ok(kinetic.iter().zip(&derivative).map(|(k, d)| h2 * k + sign * d).collect())
    }

    /// ‖[a, a*]u − 2h²(n₁cos z + n₂sin z)u‖, relative to the second term's norm.
    pub fn commutator_defect(&self, u: &[Complex64]) -> Result<f64> {
        let aa_star = self.apply_product(Ladder::Lower, Ladder::Raise, u)?;
        let a_star_a = self.apply_product(Ladder::Raise, Ladder::Lower, u)?;
        let commutator: Vec<Complex64> = aa_star.iter().zip(&a_star_a).map(|(x, y)| x - y).collect();
        let expected: Vec<Complex64> = self.apply_frame_derivative(u).into_iter().map(|v| 2.0 * v).collect();
        Ok(relative_gap(&commutator, &expected))
    }
}

/// Zero the top `BAND_MARGIN` modes on both ends (they only carry roundoff
/// for a resolved vector).
pub fn clear_margin(u: &mut [Complex64]) {
    let n = u.len();
    for i in 0..BAND_MARGIN.min(n) {
        u[i] = Complex64::new(0.0, 0.0);
        u[n - 1 - i] = Complex64::new(0.0, 0.0);
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn relative_gap(a: &[Complex64], b: &[Complex64]) -> f64 {
    let gap = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
    gap / norm(b).max(f64::MIN_POSITIVE)
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderReport {
    pub k: usize,
    pub n: i64,
    pub h: f64,
    /// ‖a v_k − c v_{k−1}‖ (‖a v_0‖ for k = 0)
    pub lowering_defect: f64,
    pub lowering_coefficient: Complex64,
    /// ‖a* v_k − c' v_{k+1}‖
    pub raising_defect: f64,
    pub raising_coefficient: Complex64,
}

/// Best multiple of `target` approximating `image`, and the remaining defect.
fn project(image: &[Complex64], target: &[Complex64]) -> (Complex64, f64) {
    let coefficient = inner(target, image) / inner(target, target).re;
    let rest: Vec<Complex64> = image.iter().zip(target).map(|(x, t)| x - coefficient * t).collect();
    (coefficient, norm(&rest))
}

/// Lowering and raising defects of the ladder on the level-k quasimode of
/// mode (n, 0), at h = 1/√((2k+1)n).
pub fn ladder_on_quasimode(k: usize, n: i64, delta: f64) -> Result<LadderReport> {
    let probe = crate::quasimodes::build_quasimode(k + 1, n, delta)?;
    let cutoff = probe.cutoff() + BAND_MARGIN;
    let build = |level: usize| -> Result<Quasimode> {
        let mut v = build_quasimode_with_cutoff(level, n, delta, cutoff)?;
        clear_margin(&mut v.fourier);
        Ok(v)
    };
    let h = 1.0 / (((2 * k + 1) as f64) * n as f64).sqrt();
    let pair = LadderPair::new([n, 0], h, cutoff);
    let current = build(k)?;
    let lowered = pair.apply(Ladder::Lower, &current.fourier)?;
    let (lowering_coefficient, lowering_defect) = if k == 0 {
        (Complex64::new(0.0, 0.0), norm(&lowered))
    } else {
        project(&lowered, &build(k - 1)?.fourier)
    };
    let raised = pair.apply(Ladder::Raise, &current.fourier)?;
    let (raising_coefficient, raising_defect) = project(&raised, &build(k + 1)?.fourier);
    Ok(LadderReport {
        k,
        n,
        h,
        lowering_defect,
        lowering_coefficient,
        raising_defect,
        raising_coefficient,
    })
}
