use std::f64::consts::{FRAC_PI_2, PI, TAU};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;
use sublab_core::circle_spectral::{
    apriori_check, assemble, assemble_mathieu, eigensolve, eigenvalues, h_from_eigenvalue, pair_csv, CircleOperator,
    SpectralPair, SpectrumManifest,
};
use sublab_core::fourier::TrigSeries;
use sublab_core::LabError;

fn dense(op: &CircleOperator, modes: &[i64]) -> DMatrix<Complex64> {
    DMatrix::from_fn(modes.len(), modes.len(), |i, j| op.entry(modes[i], modes[j]))
}

fn dense_eigenvalues(op: &CircleOperator, modes: &[i64]) -> Vec<f64> {
    let mut v: Vec<f64> = dense(op, modes).symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Periodic second-order finite differences of the perturbed circle operator.
fn finite_difference_spectrum(mode: [i64; 2], h: f64, q: &TrigSeries, w: &TrigSeries, points: usize) -> Vec<f64> {
    let dz = TAU / points as f64;
    let (n1, n2) = (mode[0] as f64, mode[1] as f64);
    let mut a = DMatrix::<f64>::zeros(points, points);
    for i in 0..points {
        let z = i as f64 * dz;
        let s = n1 * z.sin() - n2 * z.cos();
        let c = n1 * z.cos() + n2 * z.sin();
        a[(i, i)] = h * h * (2.0 / (dz * dz) + s * s) + h * h * q.eval(z) * c + w.eval(z);
        a[(i, (i + 1) % points)] = -h * h / (dz * dz);
        a[(i, (i + points - 1) % points)] = -h * h / (dz * dz);
    }
    let mut v: Vec<f64> = a.symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

fn perturbed_example() -> CircleOperator {
    let q = TrigSeries::cos_term(0.3, 1);
    let w = TrigSeries::sin_term(0.1, 1);
    assemble([4, 3], 0.1, 64, &q, &w, 0.0).unwrap()
}

#[test]
fn perturbed_operator_is_hermitian_and_banded() {
    let op = perturbed_example();
    assert!(op.bandwidth() <= 2 + 1);
    assert_eq!(op.sector_step(), 1);
    for m in op.modes() {
        for mp in op.modes() {
            assert_eq!(op.entry(m, mp), op.entry(mp, m).conj());
            if (m - mp).abs() > 3 {
                assert_eq!(op.entry(m, mp), Complex64::new(0.0, 0.0));
            }
        }
    }
}

#[test]
fn perturbed_spectrum_matches_finite_difference_oracle() {
    let op = perturbed_example();
    let q = TrigSeries::cos_term(0.3, 1);
    let w = TrigSeries::sin_term(0.1, 1);
    let spectral = eigenvalues(&op, 6).unwrap();
    let fd = finite_difference_spectrum([4, 3], 0.1, &q, &w, 800);
    for (a, b) in spectral.iter().zip(&fd) {
        assert!((a - b).abs() < 1e-4, "{a} vs {b}");
    }
}

#[test]
fn banded_solver_matches_dense_oracle() {
    let op = perturbed_example();
    let modes: Vec<i64> = op.modes().collect();
    let oracle = dense_eigenvalues(&op, &modes);
    let pairs = eigensolve(&op, 8).unwrap();
    for (p, o) in pairs.iter().zip(&oracle) {
        assert!((p.eigenvalue - o).abs() < 1e-12 * (1.0 + o.abs()), "{} vs {o}", p.eigenvalue);
        assert!(p.residual <= 1e-8 * (1.0 + p.eigenvalue.abs()));
        assert!((p.norm() - 1.0).abs() < 1e-12);
    }
    let mathieu = assemble_mathieu([7, 0], 48).unwrap();
    let oracle = dense_eigenvalues(&mathieu, &mathieu.modes().collect::<Vec<_>>());
    for (a, b) in eigenvalues(&mathieu, 10).unwrap().iter().zip(&oracle) {
        assert!((a - b).abs() < 1e-13);
    }
}

#[test]
fn mathieu_ground_state_at_n_64() {
    let op = assemble_mathieu([64, 0], 256).unwrap();
    let pairs = eigensolve(&op, 2).unwrap();
    let scaled = pairs[0].eigenvalue * 64.0;
    // dense oracle at M = 256, frozen: 0.9648...
    let oracle = dense_eigenvalues(&op, &op.modes().collect::<Vec<_>>())[0] * 64.0;
    assert!((scaled - oracle).abs() < 1e-11);
    assert!((0.8..=1.0).contains(&scaled), "{scaled}");
    assert!(assemble_mathieu([1, 0], 16).map(|op| eigenvalues(&op, 1).unwrap()[0]).unwrap() >= 0.0);
}

#[test]
fn rotated_modes_share_the_spectrum() {
    let a = eigenvalues(&assemble_mathieu([2, 0], 32).unwrap(), 6).unwrap();
    let b = eigenvalues(&assemble_mathieu([0, 2], 32).unwrap(), 6).unwrap();
    let shifted = assemble([0, 2], 1.0, 32, &TrigSeries::zero(), &TrigSeries::zero(), FRAC_PI_2).unwrap();
    let c = eigenvalues(&shifted, 6).unwrap();
    for i in 0..6 {
        assert!((a[i] - b[i]).abs() < 1e-10 && (a[i] - c[i]).abs() < 1e-10);
    }
    let d = eigenvalues(&assemble_mathieu([5, 0], 64).unwrap(), 8).unwrap();
    let e = eigenvalues(&assemble_mathieu([3, 4], 64).unwrap(), 8).unwrap();
    let f = eigenvalues(&assemble_mathieu([-4, 3], 64).unwrap(), 8).unwrap();
    for i in 0..8 {
        assert!((d[i] - e[i]).abs() < 1e-10 && (d[i] - f[i]).abs() < 1e-10);
    }
}

#[test]
fn bloch_sectors_match_pi_circle_oracle() {
    // on the π-circle the even modes are the periodic and the odd modes the
    // antiperiodic boundary problem
    let op = assemble_mathieu([24, 0], 96).unwrap();
    let even: Vec<i64> = op.modes().filter(|m| m % 2 == 0).collect();
    let odd: Vec<i64> = op.modes().filter(|m| m % 2 != 0).collect();
    let mut oracle: Vec<f64> = dense_eigenvalues(&op, &even)
        .into_iter()
        .take(6)
        .chain(dense_eigenvalues(&op, &odd).into_iter().take(6))
        .collect();
    oracle.sort_by(f64::total_cmp);
    let pairs = eigensolve(&op, 6).unwrap();
    for (p, o) in pairs.iter().zip(&oracle) {
        assert!((p.eigenvalue - o).abs() < 1e-13);
    }
    for p in &pairs {
        for i in 0..64 {
            let z = TAU * i as f64 / 64.0;
            assert!((p.eval(z + PI).norm() - p.eval(z).norm()).abs() < 1e-8);
        }
    }
}

#[test]
fn degenerate_doublets_are_ordered_even_first() {
    let op = assemble_mathieu([1024, 0], sublab_core::circle_spectral::suggested_cutoff([1024, 0], 2)).unwrap();
    let pairs = eigensolve(&op, 4).unwrap();
    assert_eq!(pairs[0].sector, 0);
    assert_eq!(pairs[1].sector, 1);
    assert!(pairs[1].eigenvalue - pairs[0].eigenvalue < 1024f64.powi(-3));
    let overlap: Complex64 = pairs[0]
        .eigenvector
        .iter()
        .zip(&pairs[1].eigenvector)
        .map(|(a, b)| a.conj() * b)
        .sum();
    assert!(overlap.norm() < 1e-12);
}

#[test]
fn under_resolved_cutoff_is_reported() {
    let op = assemble_mathieu([4096, 0], 16).unwrap();
    assert!(matches!(eigensolve(&op, 1), Err(LabError::CutoffNotConverged { .. })));
    assert!(eigensolve(&assemble_mathieu([3, 0], 8).unwrap(), 18).is_err());
}

#[test]
fn apriori_equality_without_perturbation() {
    let op0 = assemble_mathieu([40, 0], 128).unwrap();
    let pairs = eigensolve(&op0, 4).unwrap();
    for p in &pairs {
        let h = h_from_eigenvalue([40, 0], p.eigenvalue);
        let op = op0.with_h(h).unwrap();
        let report = apriori_check(p, &op).unwrap();
        assert!(report.pass);
        assert!((report.lhs - 1.0).abs() < 1e-10 && (report.rhs - 1.0).abs() < 1e-12);
    }
}

#[test]
fn apriori_passes_with_perturbation() {
    let q = TrigSeries::cos_term(0.3, 1);
    let w = TrigSeries::sin_term(0.1, 1);
    let op = assemble([40, 0], 0.05, 96, &q, &w, 0.0).unwrap();
    for p in eigensolve(&op, 6).unwrap() {
        let report = apriori_check(&p, &op).unwrap();
        assert!(report.pass, "{report:?}");
        assert!(report.lhs > 0.0);
    }
}

#[test]
fn apriori_rejects_zero_vector() {
    let op = assemble_mathieu([4, 0], 16).unwrap();
    let pair = SpectralPair {
        mode: [4, 0],
        eigenvalue: 0.1,
        eigenvector: vec![Complex64::new(0.0, 0.0); op.dim()],
        residual: 0.0,
        sector: 0,
    };
    assert!(matches!(apriori_check(&pair, &op), Err(LabError::NotNormalized(_))));
}

#[test]
fn exports_are_well_formed() {
    let op = assemble_mathieu([6, 0], 16).unwrap();
    let pairs = eigensolve(&op, 3).unwrap();
    let csv = pair_csv(&pairs[0]);
    assert!(csv.starts_with("m,re,im\n-16,"));
    assert_eq!(csv.lines().count(), 1 + op.dim());
    let manifest = SpectrumManifest::new(&op, &pairs);
    let back: SpectrumManifest = serde_json::from_str(&manifest.to_json()).unwrap();
    assert_eq!(back, manifest);
}

#[test]
fn eigenvector_residuals_are_small() {
    for mode in [[16, 0], [9, 12], [256, 0]] {
        let op = assemble_mathieu(mode, sublab_core::circle_spectral::suggested_cutoff(mode, 3)).unwrap();
        for p in eigensolve(&op, 8).unwrap() {
            assert!(p.residual <= 1e-8 * (1.0 + p.eigenvalue.abs()), "{mode:?}: {}", p.residual);
            assert!((DVector::from_vec(p.eigenvector.clone()).norm() - 1.0).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn spectra_are_invariant_under_translation(offset in 0.0..6.28f64, n in 3i64..20) {
        let q = TrigSeries::cos_term(0.2, 1);
        let w = TrigSeries::new(0.0, vec![0.0, 0.1], vec![0.05]);
        let base = assemble([n, 0], 0.2, 48, &q, &w, 0.0).unwrap();
        let moved = assemble([n, 0], 0.2, 48, &q, &w, offset).unwrap();
        let a = eigenvalues(&base, 4).unwrap();
        let b = eigenvalues(&moved, 4).unwrap();
        for i in 0..4 {
            prop_assert!((a[i] - b[i]).abs() < 1e-10);
        }
    }
}
