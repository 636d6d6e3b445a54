//! ∫ Y_W(a)|ψ|² dμ_L on the flat torus for superpositions
//! ψ = Σ_j w_j e^{in_j·(x,y)}u_j(z)/(2π) of eigenstates sharing one eigenvalue,
//! with Y_W = X + V(ln(λ₀−W))X⊥ − X⊥(ln(λ₀−W))V and
//! X = cos z∂x + sin z∂y, X⊥ = sin z∂x − cos z∂y, V = ∂z.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, TAU};
use std::sync::Arc;

use crate::circle_spectral::{
    assemble, assemble_mathieu, eigensolve, eigenvalues, h_from_eigenvalue, suggested_cutoff, CircleOperator,
    SpectralPair,
};
use crate::error::{LabError, Result};
use crate::fourier::{sample_on_grid, TrigSeries};
use crate::phasespace::chi;

/// Relative eigenvalue mismatch tolerated between superposed states.
pub const DEGENERACY_TOLERANCE: f64 = 1e-10;

/// One eigenstate of the superposition.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Component {
    pub weight: Complex64,
    pub mode: [i64; 2],
    /// centred coefficients of u_j in the basis e^{imz}/√(2π)
    pub coefficients: Vec<Complex64>,
    /// eigenvalue λ_h of −h²Δ_sR (+ lower order terms)
    pub eigenvalue: f64,
}

impl Component {
    pub fn from_pair(weight: Complex64, pair: &SpectralPair, op: &CircleOperator) -> Self {
        Self {
            weight,
            mode: pair.mode,
            coefficients: pair.eigenvector.clone(),
            eigenvalue: pair.eigenvalue * op.physical_scale(),
        }
    }
}

/// a(x, y, z) = g(z)·Σ c_k e^{ik·(x,y)}.
#[derive(Clone)]
pub struct TestFunction {
    pub terms: Vec<([i64; 2], Complex64)>,
    profile: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl std::fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TestFunction").field("terms", &self.terms).finish()
    }
}

impl TestFunction {
    pub fn new(terms: Vec<([i64; 2], Complex64)>, profile: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            terms,
            profile: Arc::new(profile),
        }
    }

    /// a = g(z).
    pub fn z_only(profile: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(vec![([0, 0], Complex64::new(1.0, 0.0))], profile)
    }

    /// a = cos(k·(x,y))·g(z).
    pub fn cosine(frequency: [i64; 2], profile: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        let half = Complex64::new(0.5, 0.0);
        Self::new(vec![(frequency, half), ([-frequency[0], -frequency[1]], half)], profile)
    }

    pub fn profile(&self, z: f64) -> f64 {
        (self.profile)(z)
    }
}

fn grid_size(components: &[Component]) -> usize {
    let longest = components.iter().map(|c| c.coefficients.len()).max().unwrap_or(1);
    (8 * longest).next_power_of_two().max(4096)
}

/// ∫ Y_W(a)|ψ|² dμ_L by orthogonality of the (x,y)-modes: only pairs (j, l)
/// with k = n_l − n_j contribute, each through a z-quadrature. W depends on z
/// only, so X⊥(ln(λ₀−W)) vanishes and the V(a) term drops out.
pub fn invariance_defect(components: &[Component], test: &TestFunction, w: &TrigSeries, lambda0: f64) -> Result<f64> {
    if components.is_empty() {
        return Err(LabError::InvalidArgument("empty superposition".into()));
    }
    for c in components {
        if (c.eigenvalue - lambda0).abs() > DEGENERACY_TOLERANCE * lambda0.abs().max(f64::MIN_POSITIVE) {
            return Err(LabError::NotDegenerate(c.eigenvalue, lambda0));
        }
    }
    let points = grid_size(components);
    let dz = TAU / points as f64;
    let zs: Vec<f64> = (0..points).map(|j| j as f64 * dz).collect();
    let profile: Vec<f64> = zs.iter().map(|&z| test.profile(z)).collect();
    // V(ln(λ₀ − W)) = −W'/(λ₀ − W) on the support of g
    let mut log_slope = vec![0.0; points];
    for (j, &z) in zs.iter().enumerate() {
        if profile[j] == 0.0 {
            continue;
        }
        let gap = lambda0 - w.eval(z);
        if !(gap > 0.0) {
            return Err(LabError::ForbiddenRegion);
        }
        log_slope[j] = -w.derivative(z) / gap;
    }
    let samples: Vec<Vec<Complex64>> = components
        .iter()
        .map(|c| sample_on_grid(&c.coefficients, points))
        .collect();
    let mut total = Complex64::new(0.0, 0.0);
    for &(k, amplitude) in &test.terms {
        let (k1, k2) = (k[0] as f64, k[1] as f64);
        for (j, cj) in components.iter().enumerate() {
            for (l, cl) in components.iter().enumerate() {
                if cl.mode[0] - cj.mode[0] != k[0] || cl.mode[1] - cj.mode[1] != k[1] {
                    continue;
                }
                let mut integral = Complex64::new(0.0, 0.0);
                for (i, &z) in zs.iter().enumerate() {
                    if profile[i] == 0.0 {
                        continue;
                    }
                    let (s, c) = z.sin_cos();
                    // Y_W(e^{ik·x}g) = e^{ik·x}·i[(k₁cos z + k₂sin z) + V(ln)(k₁sin z − k₂cos z)]g
                    let factor = Complex64::new(0.0, (k1 * c + k2 * s) + log_slope[i] * (k1 * s - k2 * c));
                    integral += factor * profile[i] * samples[j][i] * samples[l][i].conj();
                }
                total += amplitude * cj.weight * cl.weight.conj() * integral * dz;
            }
        }
    }
    Ok(total.re)
}

/// The (n,0)/(0,n) superposition used for invariance trends, its common
/// eigenvalue and test function.
#[derive(Clone, Debug)]
pub struct DegenerateSetup {
    pub n: i64,
    pub h: f64,
    pub lambda0: f64,
    pub w: TrigSeries,
    pub components: Vec<Component>,
    pub test: TestFunction,
}

impl DegenerateSetup {
    pub fn defect(&self) -> Result<f64> {
        invariance_defect(&self.components, &self.test, &self.w, self.lambda0)
    }
}

fn rotation_weights() -> [Complex64; 2] {
    [Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(0.0, FRAC_1_SQRT_2)]
}

/// W = 0: ground states of modes (n,0) and (0,n) at h = 1/(n√λ₀(n)), weights
/// (1/√2, i/√2), test function cos(n(x−y))·g(z) with g(z) = 1 + cos z.
pub fn flat_setup(n: i64) -> Result<DegenerateSetup> {
    let mut components = Vec::with_capacity(2);
    let mut h = 0.0;
    for (mode, weight) in [[n, 0], [0, n]].into_iter().zip(rotation_weights()) {
        let mathieu = assemble_mathieu(mode, suggested_cutoff(mode, 1))?;
        let ground = &eigensolve(&mathieu, 1)?[0];
        if h == 0.0 {
            h = h_from_eigenvalue(mode, ground.eigenvalue);
        }
        let op = mathieu.with_h(h)?;
        components.push(Component::from_pair(weight, ground, &op));
    }
    let lambda0 = components[0].eigenvalue;
    Ok(DegenerateSetup {
        n,
        h,
        lambda0,
        w: TrigSeries::zero(),
        components,
        test: TestFunction::cosine([-n, n], |z| 1.0 + z.cos()),
    })
}

/// Difference between the `branch`-th eigenvalue of mode (n,0) and the
/// ground eigenvalue of mode (0,n) for the perturbed operator with potential W.
fn branch_gap(n: i64, w: &TrigSeries, branch: usize, h: f64, cutoff: usize) -> Result<f64> {
    let zero = TrigSeries::zero();
    let horizontal = assemble([n, 0], h, cutoff, &zero, w, 0.0)?;
    let vertical = assemble([0, n], h, cutoff, &zero, w, 0.0)?;
    Ok(eigenvalues(&horizontal, branch + 1)?[branch] - eigenvalues(&vertical, 1)?[0])
}

/// W ≠ 0 breaks the rotation degeneracy; h is tuned by bisection until the
/// `branch`-th level of (n,0) meets the (0,n) ground level. The test function
/// is cos(n(x−y))·g(z) with g a bump around z = π of half-width `bump_radius`.
pub fn perturbed_setup(n: i64, w: &TrigSeries, branch: usize, bump_radius: f64) -> Result<DegenerateSetup> {
    let cutoff = suggested_cutoff([n, 0], branch + 2);
    // scan h²n over [0.02, 2] for a sign change
    let samples: Vec<f64> = (0..=40).map(|i| (0.02f64.ln() + (100f64).ln() * i as f64 / 40.0).exp()).collect();
    let mut bracket = None;
    let mut previous: Option<(f64, f64)> = None;
    for scale in samples {
        let h = (scale / n as f64).sqrt();
        let gap = branch_gap(n, w, branch, h, cutoff)?;
        if let Some((h_prev, gap_prev)) = previous {
            if gap_prev.signum() != gap.signum() {
                bracket = Some((h_prev, gap_prev, h));
                break;
            }
        }
        previous = Some((h, gap));
    }
    let (mut lo, gap_lo, mut hi) =
        bracket.ok_or_else(|| LabError::InvalidArgument(format!("no level crossing found for n = {n}")))?;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let gap = branch_gap(n, w, branch, mid, cutoff)?;
        if gap == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if gap.signum() == gap_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let h = 0.5 * (lo + hi);
    let zero = TrigSeries::zero();
    let horizontal = assemble([n, 0], h, cutoff, &zero, w, 0.0)?;
    let vertical = assemble([0, n], h, cutoff, &zero, w, 0.0)?;
    let weights = rotation_weights();
    let components = vec![
        Component::from_pair(weights[0], &eigensolve(&horizontal, branch + 1)?[branch], &horizontal),
        Component::from_pair(weights[1], &eigensolve(&vertical, 1)?[0], &vertical),
    ];
    let lambda0 = 0.5 * (components[0].eigenvalue + components[1].eigenvalue);
    let radius = bump_radius;
    Ok(DegenerateSetup {
        n,
        h,
        lambda0,
        w: w.clone(),
        components,
        test: TestFunction::cosine([-n, n], move |z| {
            let centred = (z - std::f64::consts::PI).rem_euclid(TAU);
            let offset = if centred > std::f64::consts::PI { centred - TAU } else { centred };
            chi(2.0 * offset / radius)
        }),
    })
}
