//! Browser bindings: Mathieu spectra, eigenfunction and quasimode densities,
//! and E-marginals for the mode (n, 0).

use wasm_bindgen::prelude::*;

pub mod demo {
    use num_complex::Complex64;
    use sublab_core::circle_spectral::{assemble_mathieu, eigensolve, h_from_eigenvalue, suggested_cutoff, SpectralPair};
    use sublab_core::fourier::sample_on_grid;
    use sublab_core::microlocal::e_marginal;
    use sublab_core::quasimodes::build_quasimode;
    use sublab_core::{LabError, Result};

    /// Largest n accepted from the page; keeps a solve well under a second.
    pub const MAX_N: i64 = 1 << 16;
    pub const MAX_LEVELS: usize = 12;

    fn check_inputs(n: i64, levels: usize) -> Result<()> {
        if !(1..=MAX_N).contains(&n) {
            return Err(LabError::InvalidArgument(format!("n = {n} must lie in 1..={MAX_N}")));
        }
        if !(1..=MAX_LEVELS).contains(&levels) {
            return Err(LabError::InvalidArgument(format!("levels = {levels} must lie in 1..={MAX_LEVELS}")));
        }
        Ok(())
    }

    fn lowest_pairs(n: i64, count: usize) -> Result<Vec<SpectralPair>> {
        let mode = [n, 0];
        let op = assemble_mathieu(mode, suggested_cutoff(mode, count / 2 + 1))?;
        eigensolve(&op, count)
    }

    /// λ_i·n/(2⌊i/2⌋ + 1) for the 2·levels lowest Mathieu eigenvalues.
    pub fn scaled_spectrum(n: i64, levels: usize) -> Result<Vec<f64>> {
        check_inputs(n, levels)?;
        Ok(lowest_pairs(n, 2 * levels)?
            .iter()
            .enumerate()
            .map(|(i, p)| p.eigenvalue * n as f64 / (2 * (i / 2) + 1) as f64)
            .collect())
    }

    /// |u(z)|² at z = −π + 2πj/points from Fourier coefficients.
    fn density(coefficients: &[Complex64], points: usize) -> Result<Vec<f64>> {
        if points < 2 || points % 2 != 0 {
            return Err(LabError::InvalidArgument(format!("points = {points} must be even and ≥ 2")));
        }
        // a multiple of `points` fine enough for the coefficient vector, then every stride-th value
        let stride = coefficients.len() / points + 1;
        let fine = sample_on_grid(coefficients, stride * points);
        let mut values: Vec<f64> = fine.iter().step_by(stride).map(|v| v.norm_sqr()).collect();
        values.rotate_left(points / 2);
        Ok(values)
    }

    /// Density of the `index`-th Mathieu eigenfunction.
    pub fn eigenfunction_density(n: i64, index: usize, points: usize) -> Result<Vec<f64>> {
        check_inputs(n, index / 2 + 1)?;
        let pairs = lowest_pairs(n, index + 1)?;
        density(&pairs[index].eigenvector, points)
    }

    /// Density of the level-k Hermite quasimode centred at z = 0.
    pub fn quasimode_density(n: i64, k: usize, points: usize) -> Result<Vec<f64>> {
        check_inputs(n, k + 1)?;
        density(&build_quasimode(k, n, 0.5)?.fourier, points)
    }

    /// Bin centres followed by masses of the E-marginal of the `index`-th
    /// eigenfunction, with h taken from its eigenvalue.
    pub fn energy_marginal(n: i64, index: usize, bins: usize) -> Result<Vec<f64>> {
        check_inputs(n, index / 2 + 1)?;
        let pairs = lowest_pairs(n, index + 1)?;
        let pair = &pairs[index];
        let marginal = e_marginal(pair, h_from_eigenvalue([n, 0], pair.eigenvalue), bins)?;
        let mut out = marginal.centers();
        out.extend_from_slice(&marginal.masses);
        Ok(out)
    }
}

fn to_js<T>(result: sublab_core::Result<T>) -> Result<T, JsError> {
    result.map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn scaled_spectrum(n: u32, levels: u32) -> Result<Vec<f64>, JsError> {
    to_js(demo::scaled_spectrum(n as i64, levels as usize))
}

#[wasm_bindgen]
pub fn eigenfunction_density(n: u32, index: u32, points: u32) -> Result<Vec<f64>, JsError> {
    to_js(demo::eigenfunction_density(n as i64, index as usize, points as usize))
}

#[wasm_bindgen]
pub fn quasimode_density(n: u32, k: u32, points: u32) -> Result<Vec<f64>, JsError> {
    to_js(demo::quasimode_density(n as i64, k as usize, points as usize))
}

#[wasm_bindgen]
pub fn energy_marginal(n: u32, index: u32, bins: u32) -> Result<Vec<f64>, JsError> {
    to_js(demo::energy_marginal(n as i64, index as usize, bins as usize))
}
