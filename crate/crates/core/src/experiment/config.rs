//! TOML experiment configuration: a seed, an optional output directory and one
//! optional section per experiment kind.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{LabError, Result};
use crate::fourier::TrigSeries;
use crate::phasespace::ConformalChart;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Spectrum,
    QuasimodeRate,
    LadderCheck,
    Levels,
    Subcritical,
    Invariance,
    NormalformCheck,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::Spectrum,
        ExperimentKind::QuasimodeRate,
        ExperimentKind::LadderCheck,
        ExperimentKind::Levels,
        ExperimentKind::Subcritical,
        ExperimentKind::Invariance,
        ExperimentKind::NormalformCheck,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Spectrum => "spectrum",
            ExperimentKind::QuasimodeRate => "quasimode-rate",
            ExperimentKind::LadderCheck => "ladder-check",
            ExperimentKind::Levels => "levels",
            ExperimentKind::Subcritical => "subcritical",
            ExperimentKind::Invariance => "invariance",
            ExperimentKind::NormalformCheck => "normalform-check",
        }
    }

    /// Prefix used in artifact file names.
    pub fn file_stem(&self) -> String {
        self.name().replace('-', "_")
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| LabError::ConfigInvalid(format!("unknown experiment kind `{s}`")))
    }
}

fn default_levels() -> usize {
    4
}
fn default_ratio_window() -> [f64; 2] {
    [0.3, 0.7]
}
fn default_quasimode_levels() -> Vec<usize> {
    vec![0, 1, 2]
}
fn default_half() -> f64 {
    0.5
}
fn default_slope_window() -> [f64; 2] {
    [-1.8, -1.2]
}
fn default_ladder_levels() -> Vec<usize> {
    vec![0, 1]
}
fn default_samples() -> usize {
    10
}
fn default_identity_tolerance() -> f64 {
    1e-12
}
fn default_level_indices() -> Vec<u32> {
    vec![0]
}
fn default_level_delta() -> f64 {
    0.1
}
fn default_bins() -> usize {
    crate::microlocal::E_BINS
}
fn default_min_capture() -> f64 {
    0.95
}
fn default_parity_tolerance() -> f64 {
    0.01
}
fn default_monotone_slack() -> f64 {
    0.02
}
fn default_subcritical_mass() -> f64 {
    0.9
}
fn default_branch() -> usize {
    1
}
fn default_bump_radius() -> f64 {
    1.8
}
fn default_max_ratio() -> f64 {
    0.8
}
fn default_charts() -> Vec<String> {
    vec!["flat".into(), "bump(0.8,1)".into()]
}
fn default_order_samples() -> usize {
    20
}
fn default_order_step() -> f64 {
    0.1
}
fn default_h1_window() -> [f64; 2] {
    [12.0, 20.0]
}
fn default_symbol_halving_window() -> [f64; 2] {
    [3.5, 4.5]
}
fn default_symbol_doubling_window() -> [f64; 2] {
    [0.4, 0.6]
}

/// Mathieu levels λ_k(n), k < `levels`, or with `q`/`w` set the perturbed
/// operator at fixed `h`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSection {
    pub n: Vec<i64>,
    #[serde(default = "default_levels")]
    pub levels: usize,
    #[serde(default = "default_ratio_window")]
    pub ratio_window: [f64; 2],
    #[serde(default)]
    pub q: TrigSeries,
    #[serde(default)]
    pub w: TrigSeries,
    #[serde(default)]
    pub h: Option<f64>,
}

impl SpectrumSection {
    pub fn is_perturbed(&self) -> bool {
        !(self.q.is_zero() && self.w.is_zero())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuasimodeRateSection {
    pub n: Vec<i64>,
    #[serde(default = "default_quasimode_levels")]
    pub k: Vec<usize>,
    #[serde(default = "default_half")]
    pub delta: f64,
    #[serde(default = "default_slope_window")]
    pub slope_window: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LadderSection {
    pub n: Vec<i64>,
    #[serde(default = "default_ladder_levels")]
    pub k: Vec<usize>,
    #[serde(default = "default_half")]
    pub delta: f64,
    /// random band-limited vectors per n for the exact identities
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_identity_tolerance")]
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelsSection {
    pub n: Vec<i64>,
    #[serde(default = "default_level_indices")]
    pub k: Vec<u32>,
    #[serde(default = "default_level_delta")]
    pub delta: f64,
    #[serde(default = "default_bins")]
    pub bins: usize,
    #[serde(default = "default_min_capture")]
    pub min_capture: f64,
    #[serde(default = "default_parity_tolerance")]
    pub parity_tolerance: f64,
    #[serde(default = "default_monotone_slack")]
    pub monotone_slack: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubcriticalSection {
    pub n: Vec<i64>,
    #[serde(default = "default_subcritical_mass")]
    pub min_mass: f64,
}

/// W = 0 uses the rotated (n,0)/(0,n) ground states; W ≠ 0 tunes h to a level crossing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvarianceSection {
    pub n: Vec<i64>,
    #[serde(default)]
    pub w: TrigSeries,
    #[serde(default = "default_branch")]
    pub branch: usize,
    #[serde(default = "default_bump_radius")]
    pub bump_radius: f64,
    #[serde(default = "default_max_ratio")]
    pub max_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalFormSection {
    #[serde(default = "default_charts")]
    pub charts: Vec<String>,
    #[serde(default = "default_order_samples")]
    pub samples: usize,
    /// cone parameter t = |Z|/H₁ before halving
    #[serde(default = "default_order_step")]
    pub t: f64,
    #[serde(default = "default_h1_window")]
    pub h1_window: [f64; 2],
    #[serde(default = "default_symbol_halving_window")]
    pub symbol_halving_window: [f64; 2],
    #[serde(default = "default_symbol_doubling_window")]
    pub symbol_doubling_window: [f64; 2],
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<String>,
    pub spectrum: Option<SpectrumSection>,
    pub quasimode_rate: Option<QuasimodeRateSection>,
    pub ladder_check: Option<LadderSection>,
    pub levels: Option<LevelsSection>,
    pub subcritical: Option<SubcriticalSection>,
    pub invariance: Option<InvarianceSection>,
    pub normalform_check: Option<NormalFormSection>,
}

fn invalid(field: &str, message: impl fmt::Display) -> LabError {
    LabError::ConfigInvalid(format!("{field}: {message}"))
}

fn check_n_list(field: &str, n: &[i64], minimum: i64, at_least: usize) -> Result<()> {
    if n.is_empty() {
        return Err(invalid(field, "n list is empty"));
    }
    if n.len() < at_least {
        return Err(invalid(field, format!("needs at least {at_least} values of n, got {}", n.len())));
    }
    if let Some(bad) = n.iter().find(|&&v| v < minimum) {
        return Err(invalid(field, format!("n = {bad} is below the minimum {minimum}")));
    }
    if let Some(w) = n.windows(2).find(|w| w[1] <= w[0]) {
        return Err(invalid(field, format!("n list must be strictly increasing ({} then {})", w[0], w[1])));
    }
    Ok(())
}

fn check_window(field: &str, window: [f64; 2]) -> Result<()> {
    if !(window[0].is_finite() && window[1].is_finite() && window[0] <= window[1]) {
        return Err(invalid(field, format!("window [{}, {}] is not an interval", window[0], window[1])));
    }
    Ok(())
}

fn check_positive(field: &str, value: f64) -> Result<()> {
    if !(value > 0.0 && value.is_finite()) {
        return Err(invalid(field, format!("{value} must be positive")));
    }
    Ok(())
}

fn check_series(field: &str, series: &TrigSeries) -> Result<()> {
    let finite = series.constant.is_finite() && series.cos.iter().chain(&series.sin).all(|c| c.is_finite());
    if !finite {
        return Err(invalid(field, "coefficients must be finite"));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| LabError::ConfigInvalid(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::ConfigInvalid(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Canonical text of the seed plus the section run by `kind`.
    pub fn canonical_section(&self, kind: ExperimentKind) -> String {
        let mut reduced = ExperimentConfig {
            seed: self.seed,
            ..Default::default()
        };
        match kind {
            ExperimentKind::Spectrum => reduced.spectrum = self.spectrum.clone(),
            ExperimentKind::QuasimodeRate => reduced.quasimode_rate = self.quasimode_rate.clone(),
            ExperimentKind::LadderCheck => reduced.ladder_check = self.ladder_check.clone(),
            ExperimentKind::Levels => reduced.levels = self.levels.clone(),
            ExperimentKind::Subcritical => reduced.subcritical = self.subcritical.clone(),
            ExperimentKind::Invariance => reduced.invariance = self.invariance.clone(),
            ExperimentKind::NormalformCheck => reduced.normalform_check = self.normalform_check.clone(),
        }
        reduced.to_toml()
    }

    pub fn has_section(&self, kind: ExperimentKind) -> bool {
        match kind {
            ExperimentKind::Spectrum => self.spectrum.is_some(),
            ExperimentKind::QuasimodeRate => self.quasimode_rate.is_some(),
            ExperimentKind::LadderCheck => self.ladder_check.is_some(),
            ExperimentKind::Levels => self.levels.is_some(),
            ExperimentKind::Subcritical => self.subcritical.is_some(),
            ExperimentKind::Invariance => self.invariance.is_some(),
            ExperimentKind::NormalformCheck => self.normalform_check.is_some(),
        }
    }

    /// Field-level validation of every section present.
    pub fn validate(&self) -> Result<()> {
        if let Some(s) = &self.spectrum {
            check_n_list("spectrum.n", &s.n, 1, 1)?;
            if s.levels == 0 {
                return Err(invalid("spectrum.levels", "must be at least 1"));
            }
            check_window("spectrum.ratio_window", s.ratio_window)?;
            check_series("spectrum.q", &s.q)?;
            check_series("spectrum.w", &s.w)?;
            let q_sup = s.q.sup_norm();
            if q_sup >= 1.0 {
                return Err(invalid("spectrum.q", format!("sup|Q| = {q_sup} must be below 1")));
            }
            match s.h {
                Some(h) => check_positive("spectrum.h", h)?,
                None if s.is_perturbed() => {
                    return Err(invalid("spectrum.h", "required when q or w is non-zero"));
                }
                None => {}
            }
        }
        if let Some(s) = &self.quasimode_rate {
            check_n_list("quasimode-rate.n", &s.n, 1, 3)?;
            if s.k.is_empty() {
                return Err(invalid("quasimode-rate.k", "k list is empty"));
            }
            check_positive("quasimode-rate.delta", s.delta)?;
            check_window("quasimode-rate.slope_window", s.slope_window)?;
        }
        if let Some(s) = &self.ladder_check {
            check_n_list("ladder-check.n", &s.n, 1, 1)?;
            check_positive("ladder-check.delta", s.delta)?;
            check_positive("ladder-check.tolerance", s.tolerance)?;
        }
        if let Some(s) = &self.levels {
            check_n_list("levels.n", &s.n, 1, 1)?;
            if s.k.is_empty() {
                return Err(invalid("levels.k", "k list is empty"));
            }
            check_positive("levels.delta", s.delta)?;
            if s.bins < 2 {
                return Err(invalid("levels.bins", "needs at least 2 bins"));
            }
        }
        if let Some(s) = &self.subcritical {
            check_n_list("subcritical.n", &s.n, 1, 1)?;
        }
        if let Some(s) = &self.invariance {
            check_n_list("invariance.n", &s.n, 1, 1)?;
            check_series("invariance.w", &s.w)?;
            check_positive("invariance.bump_radius", s.bump_radius)?;
            check_positive("invariance.max_ratio", s.max_ratio)?;
        }
        if let Some(s) = &self.normalform_check {
            if s.charts.is_empty() {
                return Err(invalid("normalform-check.charts", "chart list is empty"));
            }
            for name in &s.charts {
                ConformalChart::from_name(name).map_err(|e| invalid("normalform-check.charts", e))?;
            }
            if s.samples == 0 {
                return Err(invalid("normalform-check.samples", "must be at least 1"));
            }
            check_positive("normalform-check.t", s.t)?;
            check_window("normalform-check.h1_window", s.h1_window)?;
            check_window("normalform-check.symbol_halving_window", s.symbol_halving_window)?;
            check_window("normalform-check.symbol_doubling_window", s.symbol_doubling_window)?;
        }
        Ok(())
    }
}
