//! Observed orders of the normal-form remainders at seeded phase-space points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, TAU};

use super::coef::ScalarField;
use super::normal_form::{build_h1_deformation, point_with_frame_values, symbol_defect};
use super::zsym::ZSymbol;
use crate::error::Result;
use crate::phasespace::ConformalChart;

/// Ratios of the remainders at one sampled point.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrderSample {
    pub chart: String,
    pub point: [f64; 3],
    pub h1: f64,
    pub t: f64,
    pub angle: f64,
    /// 𝐇₁ residual at t over the residual at t/2
    pub h1_halving: f64,
    /// 𝐚 defect at t over the defect at t/2
    pub symbol_halving: f64,
    /// 𝐚 defect at 2H₁ over the defect at H₁
    pub symbol_doubling: f64,
}

/// Test symbol used for the 𝐚 remainder.
pub fn default_test_symbol() -> ScalarField {
    ScalarField::new("cos x sin y (sin z + 1/2)", |x, y, z| {
        &(&x.cos() * &y.sin()) * &z.sin().add_scalar(0.5)
    })
}

fn magnitude(symbol: &ZSymbol, chart: &ConformalChart, point: [f64; 3], h1: f64, t: f64, angle: f64) -> Result<f64> {
    let target = [h1, t * h1 * angle.cos(), t * h1 * angle.sin()];
    let pt = point_with_frame_values(chart, point[0], point[1], point[2], target);
    Ok(symbol.eval(chart, &pt)?.norm())
}

/// Draws `count` points with (x, y) in [−1/2, 1/2]², z uniform, H₁ in [10, 40]
/// and the angle of (H₂, H₃) within π/16 of an odd multiple of π/8, away from
/// the directions where the flat 𝐇₁ residual vanishes.
pub fn sample_orders(chart: &ConformalChart, seed: u64, count: usize, t: f64) -> Result<Vec<OrderSample>> {
    let deformation = build_h1_deformation(chart)?;
    let residual = deformation.residual();
    let defect = symbol_defect(&default_test_symbol(), chart)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(count);
    for _ in 0..count {
        let point = [rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5), rng.random_range(0.0..TAU)];
        let h1 = rng.random_range(10.0..40.0);
        let sector = rng.random_range(0..8) as f64;
        let angle = FRAC_PI_8 + sector * FRAC_PI_4 + rng.random_range(-1.0..1.0) * FRAC_PI_8 / 2.0;
        let h1_halving = magnitude(&residual, chart, point, h1, t, angle)?
            / magnitude(&residual, chart, point, h1, t / 2.0, angle)?;
        let base = magnitude(&defect, chart, point, h1, t, angle)?;
        let symbol_halving = base / magnitude(&defect, chart, point, h1, t / 2.0, angle)?;
        let symbol_doubling = magnitude(&defect, chart, point, 2.0 * h1, t, angle)? / base;
        samples.push(OrderSample {
            chart: chart.name(),
            point,
            h1,
            t,
            angle,
            h1_halving,
            symbol_halving,
            symbol_doubling,
        });
    }
    Ok(samples)
}
