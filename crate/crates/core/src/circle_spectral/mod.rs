//! Separable circle operators of the flat-torus reduction, in the Fourier
//! basis e^{imz}/√(2π), |m| ≤ M.
//!
//! For ψ = u(z)e^{i n·(x,y)} the operator −h²Δ_sR − ih²QX + W acts on u as
//! h²(−∂z² + (n₁sin z − n₂cos z)²) + h²Q(z)(n₁cos z + n₂sin z) + W(z).
//! Without Q and W the operator is stored normalized as the Mathieu operator
//! −‖n‖⁻²∂z² + sin²(z − z_n).

mod banded;
mod export;

pub use banded::BandedHermitian;
pub use export::{pair_csv, SpectrumManifest};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::fourier::{FourierSeries, TrigSeries};

/// Smallest accepted Fourier cutoff.
pub const MIN_CUTOFF: usize = 8;

/// Relative tolerance of the cutoff-doubling convergence test.
pub const CUTOFF_TOLERANCE: f64 = 1e-10;

/// Relative tolerance below which eigenvalues count as degenerate.
const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum OperatorKind {
    Mathieu,
    Perturbed { q: TrigSeries, w: TrigSeries },
}

#[derive(Clone, Debug)]
pub struct CircleOperator {
    pub mode: [i64; 2],
    pub h: f64,
    pub cutoff: usize,
    pub z_offset: f64,
    pub kind: OperatorKind,
    /// coefficient of m² on the diagonal
    kinetic: f64,
    /// multiplication part, already translated by the offset
    potential: FourierSeries,
}

pub fn mode_norm(mode: [i64; 2]) -> f64 {
    (mode[0] as f64).hypot(mode[1] as f64)
}

/// Angle z_n with n₁sin z − n₂cos z = ‖n‖sin(z − z_n).
pub fn mode_angle(mode: [i64; 2]) -> f64 {
    (mode[1] as f64).atan2(mode[0] as f64)
}

/// Fourier cutoff resolving the first levels of a mode comfortably.
pub fn suggested_cutoff(mode: [i64; 2], max_level: usize) -> usize {
    let width = (mode_norm(mode) * (2 * max_level + 2) as f64).sqrt();
    ((10.0 * width).ceil() as usize + 16).max(MIN_CUTOFF)
}

/// sin²(z − z_n) as a Fourier series.
fn shifted_sin_squared(angle: f64) -> FourierSeries {
    FourierSeries::from_pairs(&[
        (0, Complex64::new(0.5, 0.0)),
        (2, Complex64::new(-0.25, 0.0)),
        (-2, Complex64::new(-0.25, 0.0)),
    ])
    .translate(angle)
}

/// Assemble the circle operator for mode n. With Q = W = 0 the Mathieu
/// normalization is used (eigenvalues λ(n)); otherwise the full h-dependent
/// form (eigenvalues λ_h).
pub fn assemble(
    mode: [i64; 2],
    h: f64,
    cutoff: usize,
    q: &TrigSeries,
    w: &TrigSeries,
    z_offset: f64,
) -> Result<CircleOperator> {
    if cutoff < MIN_CUTOFF {
        return Err(LabError::InvalidArgument(format!("cutoff M = {cutoff} below {MIN_CUTOFF}")));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(LabError::InvalidArgument(format!("h = {h} must be positive")));
    }
    let q_sup = q.sup_norm();
    if q_sup >= 1.0 {
        return Err(LabError::QTooLarge(q_sup));
    }
    let norm = mode_norm(mode);
    let angle = mode_angle(mode);
    let (kind, kinetic, potential) = if q.is_zero() && w.is_zero() {
        if norm == 0.0 {
            return Err(LabError::InvalidArgument("the Mathieu operator needs n ≠ 0".into()));
        }
        (OperatorKind::Mathieu, 1.0 / (norm * norm), shifted_sin_squared(angle))
    } else {
        let h2 = h * h;
        let cross = FourierSeries::from_pairs(&[
            (1, Complex64::new(0.5, 0.0)),
            (-1, Complex64::new(0.5, 0.0)),
        ])
        .translate(angle);
        let potential = shifted_sin_squared(angle)
            .scale(h2 * norm * norm)
            .add(&q.to_fourier().mul(&cross).scale(h2 * norm))
            .add(&w.to_fourier());
        (
            OperatorKind::Perturbed { q: q.clone(), w: w.clone() },
            h2,
            potential,
        )
    };
    Ok(CircleOperator {
        mode,
        h,
        cutoff,
        z_offset,
        kind,
        kinetic,
        potential: potential.translate(z_offset),
    })
}

/// Mathieu operator M̂_n with the given cutoff.
pub fn assemble_mathieu(mode: [i64; 2], cutoff: usize) -> Result<CircleOperator> {
    assemble(mode, 1.0, cutoff, &TrigSeries::zero(), &TrigSeries::zero(), 0.0)
}

impl CircleOperator {
    pub fn dim(&self) -> usize {
        2 * self.cutoff + 1
    }

    pub fn mode_norm(&self) -> f64 {
        mode_norm(self.mode)
    }

    pub fn is_mathieu(&self) -> bool {
        matches!(self.kind, OperatorKind::Mathieu)
    }

    /// Factor turning a stored eigenvalue into λ_h (h²‖n‖² for Mathieu).
    pub fn physical_scale(&self) -> f64 {
        match self.kind {
            OperatorKind::Mathieu => self.h * self.h * self.mode_norm().powi(2),
            OperatorKind::Perturbed { .. } => 1.0,
        }
    }

    pub fn with_cutoff(&self, cutoff: usize) -> CircleOperator {
        CircleOperator {
            cutoff,
            ..self.clone()
        }
    }

    pub fn with_h(&self, h: f64) -> Result<CircleOperator> {
        let (q, w) = match &self.kind {
            OperatorKind::Mathieu => (TrigSeries::zero(), TrigSeries::zero()),
            OperatorKind::Perturbed { q, w } => (q.clone(), w.clone()),
        };
        assemble(self.mode, h, self.cutoff, &q, &w, self.z_offset)
    }

    /// Multiplication part as a Fourier series.
    pub fn potential(&self) -> &FourierSeries {
        &self.potential
    }

    /// Largest |m − m'| with a nonzero entry.
    pub fn bandwidth(&self) -> usize {
        self.potential.bandwidth()
    }

    /// Matrix entry ⟨e_m, Op e_m'⟩ for |m|, |m'| ≤ M.
    pub fn entry(&self, m: i64, m_prime: i64) -> Complex64 {
        let mut v = self.potential.coefficient((m - m_prime) as i32);
        if m == m_prime {
            v += self.kinetic * (m * m) as f64;
        }
        v
    }

    /// Index of mode m in coefficient vectors.
    pub fn index(&self, m: i64) -> usize {
        (m + self.cutoff as i64) as usize
    }

    pub fn modes(&self) -> impl Iterator<Item = i64> {
        let c = self.cutoff as i64;
        -c..=c
    }

    pub fn apply(&self, u: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(u.len(), self.dim());
        let c = self.cutoff as i64;
        let mut out = vec![Complex64::new(0.0, 0.0); u.len()];
        for (j, coeff) in self.potential.iter() {
            let j = j as i64;
            for m in (-c).max(-c + j)..=c.min(c + j) {
                out[self.index(m)] += coeff * u[self.index(m - j)];
            }
        }
        for m in self.modes() {
            out[self.index(m)] += self.kinetic * (m * m) as f64 * u[self.index(m)];
        }
        out
    }

    /// Residue-class step of the coupling: modes m, m' interact only when
    /// m ≡ m' mod `sector_step`.
    pub fn sector_step(&self) -> usize {
        let mut g = 0usize;
        for (j, _) in self.potential.iter() {
            if j != 0 {
                g = gcd(g, j.unsigned_abs() as usize);
            }
        }
        g.max(1)
    }

    /// Decoupled blocks: for each residue r, the modes m ≡ r (mod step)
    /// (least nonnegative residue, so r = 0 holds the even modes when step = 2).
    pub fn sectors(&self) -> Vec<Vec<i64>> {
        let step = self.sector_step() as i64;
        (0..step)
            .map(|r| self.modes().filter(|m| m.rem_euclid(step) == r).collect())
            .collect()
    }

    fn sector_matrix(&self, sector: &[i64]) -> BandedHermitian {
        let step = self.sector_step();
        let bw = self.bandwidth().div_ceil(step);
        let mut a = BandedHermitian::zeros(sector.len(), bw);
        for (i, &m) in sector.iter().enumerate() {
            for d in 0..=bw.min(sector.len() - 1 - i) {
                a.set_upper(i, d, self.entry(m, sector[i + d]));
            }
        }
        a
    }

    /// Lowest `count` eigenvalues per sector.
    fn sector_spectra(&self, count: usize) -> Vec<(usize, Vec<f64>, BandedHermitian, Vec<i64>)> {
        self.sectors()
            .into_iter()
            .enumerate()
            .map(|(r, modes)| {
                let a = self.sector_matrix(&modes);
                let values = a.lowest_eigenvalues(count);
                (r, values, a, modes)
            })
            .collect()
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn is_tie(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE_TOLERANCE * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Ascending eigenvalue, ties broken by sector (even modes first).
fn ordered(mut entries: Vec<(f64, usize, usize)>) -> Vec<(f64, usize, usize)> {
    entries.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    // stable insertion pass so near-equal eigenvalues are ordered by sector
    for i in 1..entries.len() {
        let mut j = i;
        while j > 0 && is_tie(entries[j - 1].0, entries[j].0) && entries[j - 1].1 > entries[j].1 {
            entries.swap(j - 1, j);
            j -= 1;
        }
    }
    entries
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectralPair {
    pub mode: [i64; 2],
    pub eigenvalue: f64,
    /// coefficients u_m for m = −M..=M
    pub eigenvector: Vec<Complex64>,
    pub residual: f64,
    /// residue class of the modes carrying the eigenvector
    pub sector: usize,
}

impl SpectralPair {
    pub fn cutoff(&self) -> usize {
        (self.eigenvector.len() - 1) / 2
    }

    pub fn coefficient(&self, m: i64) -> Complex64 {
        let c = self.cutoff() as i64;
        if m.abs() > c {
            Complex64::new(0.0, 0.0)
        } else {
            self.eigenvector[(m + c) as usize]
        }
    }

    pub fn norm(&self) -> f64 {
        self.eigenvector.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// u(z) = Σ u_m e^{imz}/√(2π).
    pub fn eval(&self, z: f64) -> Complex64 {
        let c = self.cutoff() as i64;
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, u) in self.eigenvector.iter().enumerate() {
            acc += u * Complex64::from_polar(1.0, (i as i64 - c) as f64 * z);
        }
        acc / std::f64::consts::TAU.sqrt()
    }
}

/// Lowest eigenvalues only, with the cutoff-doubling convergence test.
pub fn eigenvalues(op: &CircleOperator, count: usize) -> Result<Vec<f64>> {
    check_count(op, count)?;
    let coarse = lowest_values(op, count);
    check_doubling(op, &coarse)?;
    Ok(coarse)
}

fn check_count(op: &CircleOperator, count: usize) -> Result<()> {
    if count > op.dim() {
        return Err(LabError::InvalidArgument(format!(
            "requested {count} eigenpairs from a {}-dimensional basis",
            op.dim()
        )));
    }
    Ok(())
}

fn lowest_values(op: &CircleOperator, count: usize) -> Vec<f64> {
    let entries = op
        .sector_spectra(count)
        .into_iter()
        .flat_map(|(r, values, _, _)| values.into_iter().enumerate().map(move |(j, v)| (v, r, j)))
        .collect();
    ordered(entries).into_iter().take(count).map(|e| e.0).collect()
}

fn check_doubling(op: &CircleOperator, values: &[f64]) -> Result<()> {
    let fine = lowest_values(&op.with_cutoff(2 * op.cutoff), values.len());
    for (index, (a, b)) in values.iter().zip(&fine).enumerate() {
        let change = (a - b).abs();
        if change > CUTOFF_TOLERANCE * a.abs().max(1.0) {
            return Err(LabError::CutoffNotConverged { index, change });
        }
    }
    Ok(())
}

/// Lowest `count` eigenpairs, ascending; degenerate pairs ordered by sector.
pub fn eigensolve(op: &CircleOperator, count: usize) -> Result<Vec<SpectralPair>> {
    check_count(op, count)?;
    let spectra = op.sector_spectra(count);
    let entries = spectra
        .iter()
        .flat_map(|(r, values, _, _)| values.iter().enumerate().map(move |(j, &v)| (v, *r, j)))
        .collect();
    let chosen: Vec<(f64, usize, usize)> = ordered(entries).into_iter().take(count).collect();
    check_doubling(op, &chosen.iter().map(|e| e.0).collect::<Vec<_>>())?;

    let mut pairs = Vec::with_capacity(count);
    for (r, values, matrix, modes) in &spectra {
        let mut found: Vec<(usize, Vec<Complex64>)> = Vec::new();
        for (j, &lambda) in values.iter().enumerate() {
            if !chosen.iter().any(|e| e.1 == *r && e.2 == j) {
                continue;
            }
            let deflate: Vec<Vec<Complex64>> = found
                .iter()
                .filter(|(i, _)| (values[*i] - lambda).abs() <= 1e-9 * lambda.abs().max(1e-300))
                .map(|(_, v)| v.clone())
                .collect();
            let local = matrix.eigenvector(lambda, &deflate);
            found.push((j, local.clone()));
            let mut full = vec![Complex64::new(0.0, 0.0); op.dim()];
            for (i, &m) in modes.iter().enumerate() {
                full[op.index(m)] = local[i];
            }
            let applied = op.apply(&full);
            let residual = applied
                .iter()
                .zip(&full)
                .map(|(a, u)| (a - lambda * u).norm_sqr())
                .sum::<f64>()
                .sqrt();
            pairs.push((
                (lambda, *r, j),
                SpectralPair {
                    mode: op.mode,
                    eigenvalue: lambda,
                    eigenvector: full,
                    residual,
                    sector: *r,
                },
            ));
        }
    }
    let order = chosen;
    pairs.sort_by_key(|(key, _)| order.iter().position(|e| e.1 == key.1 && e.2 == key.2));
    Ok(pairs.into_iter().map(|(_, p)| p).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AprioriReport {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// Relative slack in the a priori comparison (the Q = W = 0 case is an equality).
pub const APRIORI_TOLERANCE: f64 = 1e-9;

/// Compare ‖hX⊥ψ‖² + ‖hVψ‖² with the explicit a priori bound
/// (‖W‖₀ + |λ_h| + 2h‖Q‖₁)/(1 − ‖Q‖₀ − h‖Q‖₁/2)·‖ψ‖².
pub fn apriori_check(pair: &SpectralPair, op: &CircleOperator) -> Result<AprioriReport> {
    let norm = pair.norm();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(LabError::NotNormalized(norm));
    }
    if pair.cutoff() != op.cutoff {
        return Err(LabError::InvalidArgument("pair and operator use different cutoffs".into()));
    }
    let h = op.h;
    let c = op.cutoff as i64;
    // n₁sin z − n₂cos z as Fourier series, translated like the operator
    let n1 = op.mode[0] as f64;
    let n2 = op.mode[1] as f64;
    let s1 = Complex64::new(-n2 / 2.0, -n1 / 2.0);
    let frame = FourierSeries::from_pairs(&[(1, s1), (-1, s1.conj())]).translate(op.z_offset);
    let mut horizontal = 0.0;
    for m in -c - 1..=c + 1 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, coeff) in frame.iter() {
            acc += coeff * pair.coefficient(m - j as i64);
        }
        horizontal += acc.norm_sqr();
    }
    let vertical: f64 = op.modes().map(|m| (m * m) as f64 * pair.coefficient(m).norm_sqr()).sum();
    let lhs = h * h * (horizontal + vertical);

    let lambda_h = pair.eigenvalue * op.physical_scale();
    let (q0, q1, w0) = match &op.kind {
        OperatorKind::Mathieu => (0.0, 0.0, 0.0),
        OperatorKind::Perturbed { q, w } => (q.sup_norm(), q.c1_norm(), w.sup_norm()),
    };
    let denominator = 1.0 - q0 - h * q1 / 2.0;
    let rhs = if denominator > 0.0 {
        (w0 + lambda_h.abs() + 2.0 * h * q1) / denominator * norm * norm
    } else {
        f64::INFINITY
    };
    let pass = denominator > 0.0 && lhs <= rhs * (1.0 + APRIORI_TOLERANCE);
    Ok(AprioriReport { lhs, rhs, pass })
}

/// h making the Mathieu eigenvalue λ the physical value 1: h = 1/(‖n‖√λ).
pub fn h_from_eigenvalue(mode: [i64; 2], eigenvalue: f64) -> f64 {
    1.0 / (mode_norm(mode) * eigenvalue.sqrt())
}
