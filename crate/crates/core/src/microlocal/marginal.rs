//! The lifted measure in the variable E = hH₁ = h²(n₁cos z + n₂sin z) for
//! states ψ = e^{in·(x,y)}u(z), its E-marginal and the quantized levels.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::fmt::Write;
use std::sync::Arc;

use super::weyl::{weyl_pairing, CircleSymbol};
use crate::circle_spectral::{assemble_mathieu, eigensolve, h_from_eigenvalue, mode_norm, suggested_cutoff, SpectralPair};
use crate::error::{LabError, Result};
use crate::fourier::sample_on_grid;
use crate::phasespace::{CutoffFamily, CutoffInput, CutoffKind};
use crate::plot::plot_script;

/// Default number of E bins.
pub const E_BINS: usize = 401;

/// Half-range of the bins in units of max E = h²‖n‖.
pub const E_RANGE_FACTOR: f64 = 1.5;

/// Smallest z-grid used for pushforwards and surrogate integrals.
const MIN_GRID: usize = 65536;

/// E(z) = h²(n₁cos z + n₂sin z).
pub fn energy_variable(mode: [i64; 2], h: f64, z: f64) -> f64 {
    h * h * (mode[0] as f64 * z.cos() + mode[1] as f64 * z.sin())
}

fn density_grid(u: &[Complex64]) -> Vec<f64> {
    let points = (8 * u.len()).next_power_of_two().max(MIN_GRID);
    sample_on_grid(u, points).iter().map(|v| v.norm_sqr()).collect()
}

/// Ball radius R, cone aperture ε and energy scale R₁ of the lifted cutoffs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftedCutoffs {
    pub r_ball: f64,
    pub eps: f64,
    pub r_energy: f64,
}

impl LiftedCutoffs {
    /// R = ‖n‖^{1/2}, ε = ‖n‖^{−1/8}, R₁ = 4.
    pub fn schedule(mode: [i64; 2]) -> Self {
        let n = mode_norm(mode);
        Self {
            r_ball: n.sqrt(),
            eps: n.powf(-0.125),
            r_energy: 4.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftedPairing {
    /// ⟨Op_h^w(κ)u, u⟩
    pub value: f64,
    /// ∫ b(E(z))|u(z)|² dz
    pub surrogate: f64,
    /// value − surrogate
    pub gap: f64,
}

/// The circle symbol κ(z, ζ) = b(E)·χ̃_ε^C·χ̃_R^B·χ(E/R₁) with frame values
/// H₁ = h(n₁cos z + n₂sin z), H₂ = h(n₁sin z − n₂cos z), H₃ = ζ.
pub fn lifted_symbol(
    mode: [i64; 2],
    b: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    cutoffs: LiftedCutoffs,
    h: f64,
) -> CircleSymbol {
    let family = CutoffFamily::new(cutoffs.r_ball, cutoffs.eps, cutoffs.r_energy, h);
    let (n1, n2) = (mode[0] as f64, mode[1] as f64);
    CircleSymbol::new(move |z, zeta| {
        let (s, c) = z.sin_cos();
        let frame = CutoffInput::Frame {
            h1: h * (n1 * c + n2 * s),
            h2: h * (n1 * s - n2 * c),
            h3: zeta,
        };
        let energy = h * h * (n1 * c + n2 * s);
        b(energy)
            * family.eval(CutoffKind::TildeCone, frame)
            * family.eval(CutoffKind::TildeBall, frame)
            * family.eval(CutoffKind::TildeRho, frame)
    })
}

/// Lifted pairing of a centred coefficient vector u of mode n.
pub fn lifted_pairing_coefficients(
    u: &[Complex64],
    mode: [i64; 2],
    b: impl Fn(f64) -> f64 + Send + Sync + 'static,
    cutoffs: LiftedCutoffs,
    h: f64,
) -> LiftedPairing {
    let b: Arc<dyn Fn(f64) -> f64 + Send + Sync> = Arc::new(b);
    let symbol = lifted_symbol(mode, b.clone(), cutoffs, h);
    let value = weyl_pairing(&symbol, h, u).re;
    let density = density_grid(u);
    let dz = TAU / density.len() as f64;
    let surrogate: f64 = density
        .iter()
        .enumerate()
        .map(|(j, rho)| b(energy_variable(mode, h, j as f64 * dz)) * rho * dz)
        .sum();
    LiftedPairing {
        value,
        surrogate,
        gap: value - surrogate,
    }
}

pub fn lifted_pairing(
    state: &SpectralPair,
    b: impl Fn(f64) -> f64 + Send + Sync + 'static,
    cutoffs: LiftedCutoffs,
    h: f64,
) -> LiftedPairing {
    lifted_pairing_coefficients(&state.eigenvector, state.mode, b, cutoffs, h)
}

/// Binned distribution of E under |u(z)|²dz.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EMarginal {
    pub mode: [i64; 2],
    pub h: f64,
    /// h²‖n‖
    pub max_energy: f64,
    pub edges: Vec<f64>,
    pub masses: Vec<f64>,
}

impl EMarginal {
    pub fn bin_count(&self) -> usize {
        self.masses.len()
    }

    pub fn bin_width(&self) -> f64 {
        self.edges[1] - self.edges[0]
    }

    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Mass in [lo, hi], counting partially covered bins by their overlap.
    pub fn mass_between(&self, lo: f64, hi: f64) -> f64 {
        self.edges
            .windows(2)
            .zip(&self.masses)
            .map(|(w, mass)| {
                let overlap = (hi.min(w[1]) - lo.max(w[0])).max(0.0);
                mass * overlap / (w[1] - w[0])
            })
            .sum()
    }

    /// Σ b(E_bin)·mass over bin centres.
    pub fn integrate(&self, b: impl Fn(f64) -> f64) -> f64 {
        self.centers().iter().zip(&self.masses).map(|(e, m)| b(*e) * m).sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("E_bin_center,mass\n");
        for (e, m) in self.centers().iter().zip(&self.masses) {
            let _ = writeln!(out, "{e:.15e},{m:.15e}");
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("marginal serializes")
    }

    pub fn plot_script(&self, csv_name: &str) -> String {
        plot_script(csv_name, "E-marginal", "E", "mass", "boxes")
    }
}

fn deposit(masses: &mut [f64], lower: f64, width: f64, from: f64, to: f64, mass: f64) {
    let bins = masses.len();
    let locate = |e: f64| (((e - lower) / width).floor().max(0.0) as usize).min(bins - 1);
    let (a, b) = if from <= to { (from, to) } else { (to, from) };
    let (first, last) = (locate(a), locate(b));
    if first == last || b - a <= 0.0 {
        masses[first] += mass;
        return;
    }
    for (i, slot) in masses.iter_mut().enumerate().take(last + 1).skip(first) {
        let left = if i == first { a } else { lower + i as f64 * width };
        let right = if i == last { b } else { lower + (i + 1) as f64 * width };
        *slot += mass * (right - left) / (b - a);
    }
}

/// Pushforward of |u(z)|²dz under E(z), with linear interpolation of E inside
/// each grid cell; `bins` uniform bins over ±1.5·h²‖n‖.
pub fn e_marginal_coefficients(u: &[Complex64], mode: [i64; 2], h: f64, bins: usize) -> Result<EMarginal> {
    if bins == 0 {
        return Err(LabError::InvalidArgument("at least one bin is needed".into()));
    }
    let max_energy = h * h * mode_norm(mode);
    if !(max_energy > 0.0) {
        return Err(LabError::InvalidArgument("E-marginal needs n ≠ 0 and h > 0".into()));
    }
    let half = E_RANGE_FACTOR * max_energy;
    let width = 2.0 * half / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|i| -half + i as f64 * width).collect();
    let density = density_grid(u);
    let points = density.len();
    let dz = TAU / points as f64;
    let energies: Vec<f64> = (0..points).map(|j| energy_variable(mode, h, j as f64 * dz)).collect();
    let mut masses = vec![0.0; bins];
    for j in 0..points {
        let next = (j + 1) % points;
        let mass = 0.5 * (density[j] + density[next]) * dz;
        deposit(&mut masses, -half, width, energies[j], energies[next], mass);
    }
    Ok(EMarginal {
        mode,
        h,
        max_energy,
        edges,
        masses,
    })
}

pub fn e_marginal(state: &SpectralPair, h: f64, bins: usize) -> Result<EMarginal> {
    e_marginal_coefficients(&state.eigenvector, state.mode, h, bins)
}

/// Predicted levels E± and the marginal mass captured around them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    pub k: u32,
    pub e_plus: f64,
    pub e_minus: f64,
    pub captured_mass_plus: f64,
    pub captured_mass_minus: f64,
    pub delta: f64,
}

impl LevelReport {
    pub fn captured_total(&self) -> f64 {
        self.captured_mass_plus + self.captured_mass_minus
    }

    pub fn to_csv(&self) -> String {
        format!(
            "k,e_plus,e_minus,captured_mass_plus,captured_mass_minus,delta\n{},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e}\n",
            self.k, self.e_plus, self.e_minus, self.captured_mass_plus, self.captured_mass_minus, self.delta
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("level report serializes")
    }
}

/// E± = ±(λ₀ − W)/(2k + 1 ± Q) at the concentration point and the marginal
/// mass within δ of each.
pub fn level_mass(
    marginal: &EMarginal,
    k: u32,
    lambda0: f64,
    w_at_peak: f64,
    q_at_peak: f64,
    delta: f64,
) -> Result<LevelReport> {
    if !(delta > 0.0) {
        return Err(LabError::InvalidArgument(format!("window δ = {delta} must be positive")));
    }
    if !(lambda0 > w_at_peak) {
        return Err(LabError::InvalidArgument(format!(
            "λ₀ = {lambda0} must exceed W = {w_at_peak} at the concentration point"
        )));
    }
    let level = (2 * k + 1) as f64;
    for denominator in [level + q_at_peak, level - q_at_peak] {
        if !(denominator > 0.0) {
            return Err(LabError::DegenerateLevel { k, denominator });
        }
    }
    let e_plus = (lambda0 - w_at_peak) / (level + q_at_peak);
    let e_minus = -(lambda0 - w_at_peak) / (level - q_at_peak);
    Ok(LevelReport {
        k,
        e_plus,
        e_minus,
        captured_mass_plus: marginal.mass_between(e_plus - delta, e_plus + delta),
        captured_mass_minus: marginal.mass_between(e_minus - delta, e_minus + delta),
        delta,
    })
}

/// Mass near E = 0 for the eigenstate picked by h ≈ 1/√(K n).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubcriticalReport {
    pub n: i64,
    pub scale: u32,
    /// index of the chosen Mathieu eigenvalue
    pub index: usize,
    pub eigenvalue: f64,
    pub h: f64,
    /// half-width 2/K of the E window
    pub window: f64,
    pub mass: f64,
}

/// Smallest n for which the subcritical contract is asserted.
pub const SUBCRITICAL_MIN_N: i64 = 256;

/// ⌊n^{1/4}⌋ in integer arithmetic.
pub fn fourth_root_floor(n: i64) -> u32 {
    let mut k: i64 = (n.max(0) as f64).powf(0.25) as i64;
    while (k + 1).pow(4) <= n {
        k += 1;
    }
    while k > 0 && k.pow(4) > n {
        k -= 1;
    }
    k as u32
}

/// Subcritical experiment with K = ⌊n^{1/4}⌋.
pub fn subcritical_mass(n: i64) -> Result<SubcriticalReport> {
    subcritical_mass_with_scale(n, fourth_root_floor(n))
}

/// Mode (n, 0): take the Mathieu eigenvalue nearest 1/(h n)² = K/n, set
/// h = 1/(n√λ) from it, and measure the E-marginal mass in |E| ≤ 2/K.
pub fn subcritical_mass_with_scale(n: i64, scale: u32) -> Result<SubcriticalReport> {
    if scale == 0 {
        return Err(LabError::InvalidArgument("scale K must be positive".into()));
    }
    let mode = [n, 0];
    let levels = scale as usize + 3;
    let op = assemble_mathieu(mode, suggested_cutoff(mode, levels))?;
    let pairs = eigensolve(&op, levels)?;
    let target = scale as f64 / n as f64;
    let (index, pair) = pairs
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1.eigenvalue - target).abs().total_cmp(&(b.1.eigenvalue - target).abs()))
        .expect("at least one eigenpair");
    let h = h_from_eigenvalue(mode, pair.eigenvalue);
    let marginal = e_marginal(pair, h, E_BINS)?;
    let window = 2.0 / scale as f64;
    Ok(SubcriticalReport {
        n,
        scale,
        index,
        eigenvalue: pair.eigenvalue,
        h,
        window,
        mass: marginal.mass_between(-window, window),
    })
}
