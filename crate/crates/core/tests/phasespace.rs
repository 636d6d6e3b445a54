use std::f64::consts::{FRAC_PI_2, TAU};

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sublab_core::phasespace::{
    chi, chi_derivative, eval_frame, in_cone, poisson_bracket, tilde_chi, ConformalChart, CutoffFamily, CutoffInput,
    CutoffKind, PhaseJet, PhasePoint, ETA, X, XI, Y, Z, ZETA,
};

fn unit_bump() -> ConformalChart {
    ConformalChart::Bump {
        amplitude: 1.0,
        radius: 1.0,
    }
}

fn h1(c: &ConformalChart, p: &PhasePoint) -> PhaseJet {
    eval_frame(c, p).h1
}

fn h2(c: &ConformalChart, p: &PhasePoint) -> PhaseJet {
    eval_frame(c, p).h2
}

fn h3(c: &ConformalChart, p: &PhasePoint) -> PhaseJet {
    eval_frame(c, p).h3
}

fn random_point(rng: &mut ChaCha8Rng) -> PhasePoint {
    PhasePoint::new(
        rng.random_range(-0.7..0.7),
        rng.random_range(-0.7..0.7),
        rng.random_range(0.0..TAU),
        rng.random_range(-5.0..5.0),
        rng.random_range(-5.0..5.0),
        rng.random_range(-5.0..5.0),
    )
}

#[test]
fn closed_form_values() {
    let flat = ConformalChart::Flat;
    let v = eval_frame(&flat, &PhasePoint::new(0.0, 0.0, 0.0, 1.0, 0.0, 0.0)).values();
    assert_eq!(v, [1.0, 0.0, 0.0]);
    let v = eval_frame(&flat, &PhasePoint::new(0.0, 0.0, FRAC_PI_2, 1.0, 0.0, 0.0)).values();
    assert!(v[0].abs() < 1e-15 && (v[1] - 1.0).abs() < 1e-15 && v[2] == 0.0);
}

#[test]
fn bump_chart_matches_finite_difference_oracle() {
    let bump = unit_bump();
    let pt = PhasePoint::new(0.0, 0.0, 0.0, 1.0, 0.0, 0.0);
    let frame = eval_frame(&bump, &pt);
    assert!((frame.h1.value - (-(-1.0f64).exp()).exp()).abs() < 1e-15);
    let step = 1e-5;
    let coords = pt.coords();
    for (name, jet) in [("H1", &frame.h1), ("H2", &frame.h2), ("H3", &frame.h3)] {
        for slot in [X, Y, Z, XI, ETA, ZETA] {
            let shifted = |d: f64| {
                let mut c = coords;
                c[slot] += d;
                let v = eval_frame(&bump, &PhasePoint::from_coords(c)).values();
                match name {
                    "H1" => v[0],
                    "H2" => v[1],
                    _ => v[2],
                }
            };
            let fd = (shifted(step) - shifted(-step)) / (2.0 * step);
            assert!((jet.grad[slot] - fd).abs() < 1e-6, "{name} slot {slot}: {} vs {fd}", jet.grad[slot]);
        }
    }
}

#[test]
fn chart_derivatives_pass_self_check() {
    let bump = ConformalChart::from_name("bump(0.8,1.2)").unwrap();
    for &(x, y) in &[(0.0, 0.0), (0.3, -0.2), (-0.5, 0.6)] {
        let coarse = bump.finite_difference_check(x, y, 1e-3);
        let fine = bump.finite_difference_check(x, y, 5e-4);
        assert!(coarse.grad_error < 1e-5 && coarse.hess_error < 1e-4);
        // central differences are second order
        if coarse.grad_error > 1e-11 {
            let ratio = coarse.grad_error / fine.grad_error;
            assert!((3.0..5.0).contains(&ratio), "ratio {ratio}");
        }
    }
    assert_eq!(ConformalChart::Flat.curvature(0.3, 0.1), 0.0);
}

#[test]
fn bracket_examples() {
    let flat = ConformalChart::Flat;
    let p = PhasePoint::new(0.0, 0.0, FRAC_PI_2, 1.0, 0.0, 0.0);
    assert!((poisson_bracket(&flat, h1, h3, &p) - 1.0).abs() < 1e-15);
    let p = PhasePoint::new(0.0, 0.0, 0.0, 1.0, 0.0, 0.0);
    assert!((poisson_bracket(&flat, h2, h3, &p) + 1.0).abs() < 1e-15);
    let p = PhasePoint::new(0.4, -1.0, 2.0, 0.3, 1.7, -2.2);
    assert!(poisson_bracket(&flat, h1, h2, &p).abs() < 1e-15);
}

#[test]
fn bracket_identities_at_seeded_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for chart in [ConformalChart::Flat, unit_bump()] {
        for _ in 0..1000 {
            let pt = random_point(&mut rng);
            let frame = eval_frame(&chart, &pt);
            let [v1, v2, v3] = frame.values();
            let curvature = chart.curvature(pt.x, pt.y);
            assert!((poisson_bracket(&chart, h1, h3, &pt) - v2).abs() < 1e-9);
            assert!((poisson_bracket(&chart, h2, h3, &pt) + v1).abs() < 1e-9);
            assert!((poisson_bracket(&chart, h1, h2, &pt) + curvature * v3).abs() < 1e-9);
        }
    }
}

#[test]
fn identity_lemma_relations() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let bump = unit_bump();
    for _ in 0..200 {
        let pt = random_point(&mut rng);
        let f = eval_frame(&bump, &pt);
        let [v1, v2, v3] = f.values();
        assert!((f.h2.grad[Z] - v1).abs() < 1e-9);
        assert!((f.h1.grad[Z] + v2).abs() < 1e-9);
        assert_eq!([f.h3.grad[X], f.h3.grad[Y], f.h3.grad[Z]], [0.0; 3]);

        let [lx, ly] = bump.grad_lambda(pt.x, pt.y);
        let [[lxx, lxy], [_, lyy]] = bump.hess_lambda(pt.x, pt.y);
        let damp = (-bump.lambda(pt.x, pt.y)).exp();
        let (s, c) = pt.z.sin_cos();
        let expected = [
            (f.h1.grad[X], -lx * v1 - damp * (lxx * s - lxy * c) * v3),
            (f.h1.grad[Y], -ly * v1 - damp * (lxy * s - lyy * c) * v3),
            (f.h2.grad[X], -lx * v2 + damp * (lxx * c + lxy * s) * v3),
            (f.h2.grad[Y], -ly * v2 + damp * (lxy * c + lyy * s) * v3),
        ];
        for (got, want) in expected {
            assert!((got - want).abs() < 1e-9, "{got} vs {want}");
        }
    }
}

#[test]
fn norm_comparison_holds_on_sample() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for chart in [ConformalChart::Flat, unit_bump(), ConformalChart::from_name("bump(0.8,1.2)").unwrap()] {
        let c0 = chart.norm_comparison_constant();
        for _ in 0..2000 {
            let pt = random_point(&mut rng);
            let [v1, v2, v3] = eval_frame(&chart, &pt).values();
            let frame_norm = v1 * v1 + v2 * v2 + v3 * v3;
            let p_norm = pt.xi * pt.xi + pt.eta * pt.eta + pt.zeta * pt.zeta;
            assert!(frame_norm <= c0 * p_norm * (1.0 + 1e-12));
            assert!(p_norm <= c0 * frame_norm * (1.0 + 1e-12));
        }
    }
}

#[test]
fn cutoff_examples() {
    assert_eq!(chi(0.5), 1.0);
    assert_eq!(chi(3.0), 0.0);
    let mid = chi(1.5);
    assert!(mid > 0.0 && mid < 1.0);
    assert_eq!(mid + tilde_chi(1.5), 1.0);
    let family = CutoffFamily::new(4.0, 0.5, 2.0, 0.1);
    let frame = CutoffInput::Frame {
        h1: 1.0,
        h2: 0.5,
        h3: 0.5,
    };
    let ball = family.eval(CutoffKind::Ball, frame);
    assert_eq!(ball, chi(1.5 / 4.0));
    assert_eq!(family.eval(CutoffKind::TildeBall, frame), 1.0 - ball);
    assert_eq!(family.eval(CutoffKind::Cone, frame), chi(0.5 / 1.5f64.sqrt()));
    assert_eq!(family.eval(CutoffKind::Rho, frame), tilde_chi(0.1 / 2.0));
}

#[test]
fn chi_is_monotone_on_each_half_line() {
    let samples: Vec<f64> = (-3000..=3000).map(|i| i as f64 * 1e-3).collect();
    for pair in samples.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if b <= 0.0 {
            assert!(chi(b) >= chi(a));
        } else if a >= 0.0 {
            assert!(chi(b) <= chi(a));
        }
    }
    for &t in &samples {
        if t.abs() < 1.0 || t.abs() > 2.0 {
            assert_eq!(chi_derivative(t), 0.0, "t = {t}");
        }
    }
}

#[test]
fn cone_membership() {
    let flat = ConformalChart::Flat;
    assert!(in_cone(&flat, &PhasePoint::new(0.0, 0.0, 0.0, 100.0, 0.0, 0.0), 0.5));
    assert!(!in_cone(&flat, &PhasePoint::new(0.0, 0.0, 0.0, 1.0, 0.0, 0.0), 0.5));
    for eps in [0.01, 0.5, 1.0] {
        assert!(!in_cone(&flat, &PhasePoint::new(0.0, 0.0, 0.0, 0.0, 5.0, 0.0), eps));
    }
}

#[test]
fn z_is_reduced_mod_two_pi() {
    let p = PhasePoint::new(0.0, 0.0, -1.0, 0.0, 0.0, 0.0);
    assert!((p.z - (TAU - 1.0)).abs() < 1e-15);
    let p = PhasePoint::new(0.0, 0.0, 7.0 * TAU + 0.25, 0.0, 0.0, 0.0);
    assert!((p.z - 0.25).abs() < 1e-12);
}

proptest! {
    #[test]
    fn jet_gradients_are_linear(a in -3.0..3.0f64, b in -3.0..3.0f64, x in -0.6..0.6f64, z in 0.0..6.28f64, xi in -4.0..4.0f64) {
        let bump = unit_bump();
        let pt = PhasePoint::new(x, 0.1, z, xi, 1.0, -0.5);
        let f = eval_frame(&bump, &pt);
        let combo = f.h1.scale(a) + f.h2.scale(b);
        for slot in 0..6 {
            prop_assert!((combo.grad[slot] - (a * f.h1.grad[slot] + b * f.h2.grad[slot])).abs() < 1e-12);
        }
        let constant = PhaseJet::constant(a);
        prop_assert_eq!(constant.grad, [0.0; 6]);
    }

    #[test]
    fn tilde_chi_complements_chi(t in -5.0..5.0f64) {
        prop_assert_eq!(chi(t) + tilde_chi(t), 1.0);
        prop_assert!((0.0..=1.0).contains(&chi(t)));
    }
}
