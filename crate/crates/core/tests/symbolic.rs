use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sublab_core::phasespace::{bracket_jets, ConformalChart, PhasePoint};
use sublab_core::symbolic::*;
use sublab_core::taylor::Taylor3;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn bump() -> ConformalChart {
    ConformalChart::Bump {
        amplitude: 0.8,
        radius: 1.0,
    }
}

fn random_point(rng: &mut ChaCha8Rng, chart: &ConformalChart) -> PhasePoint {
    loop {
        let x = rng.random_range(-0.6..0.6);
        let y = rng.random_range(-0.6..0.6);
        if !chart.contains(x, y) {
            continue;
        }
        let h1 = rng.random_range(2.0..6.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let target = [h1, rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
        let z = rng.random_range(0.0..std::f64::consts::TAU);
        return point_with_frame_values(chart, x, y, z, target);
    }
}

fn field_a() -> ScalarField {
    ScalarField::new("a", |x, y, z| &(&x.sin() * &y.cos()) * &(&z.scale(2.0)).cos().add_scalar(1.5))
}

fn field_b() -> ScalarField {
    ScalarField::new("b", |x, y, z| (&(x * y) + &z.sin()).exp())
}

fn random_symbol(rng: &mut ChaCha8Rng) -> ZSymbol {
    let fields = [field_a(), field_b()];
    let mut s = ZSymbol::zero();
    for _ in 0..3 {
        let w = rng.random_range(-2..=1);
        let k = rng.random_range(0..=2);
        let l = rng.random_range(0..=2);
        let c = Coef::field(fields[rng.random_range(0..2)].clone())
            .scale(Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        s.add_term(w, k, l, c);
    }
    s
}

fn numeric_bracket(a: &ZSymbol, b: &ZSymbol, chart: &ConformalChart, pt: &PhasePoint) -> Complex64 {
    let ja = a.eval_jet(chart, pt).unwrap();
    let jb = b.eval_jet(chart, pt).unwrap();
    bracket_jets(&ja, &jb)
}

#[test]
fn bracket_of_z_norm_with_h1() {
    let zz = PolySymbol::term(2, 2, 0, Coef::one()).add(&PolySymbol::term(2, 0, 2, Coef::one()));
    let h1 = PolySymbol::term(1, 0, 0, Coef::one());
    let b = bracket_poly(&zz, &h1).unwrap();
    let expect = ZSymbol::monomial(0, 2, 0, Coef::k_minus().scale(I))
        .add(&ZSymbol::monomial(0, 0, 2, Coef::k_minus().scale(-I)));
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for chart in [ConformalChart::Flat, bump()] {
        for _ in 0..50 {
            let pt = random_point(&mut rng, &chart);
            let got = b.eval(&chart, &pt).unwrap();
            let want = expect.eval(&chart, &pt).unwrap();
            assert!((got - want).norm() < 1e-10 * (1.0 + want.norm()), "{got} vs {want}");
        }
    }
}

#[test]
fn bracket_of_z_norm_with_primitive_of_z() {
    // {|Z|², Z/(−2i)} = H₁Z
    let zz = ZSymbol::z_norm_sq();
    let g = ZSymbol::monomial(0, 1, 0, Coef::constant(Complex64::new(1.0, 0.0) / Complex64::new(0.0, -2.0)));
    let b = bracket_z(&zz, &g);
    let target = ZSymbol::monomial(1, 1, 0, Coef::one());
    let flat = ConformalChart::Flat;
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..100 {
        let pt = random_point(&mut rng, &flat);
        let got = b.eval(&flat, &pt).unwrap();
        let numeric = numeric_bracket(&zz, &g, &flat, &pt);
        let want = target.eval(&flat, &pt).unwrap();
        assert!((got - want).norm() < 1e-8 * want.norm().max(1.0));
        assert!((numeric - want).norm() < 1e-8 * want.norm().max(1.0));
    }
}

#[test]
fn symbolic_bracket_matches_numeric_bracket() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for chart in [ConformalChart::Flat, bump()] {
        for _ in 0..100 {
            let a = random_symbol(&mut rng);
            let b = random_symbol(&mut rng);
            let pt = random_point(&mut rng, &chart);
            let sym = bracket_z(&a, &b).eval(&chart, &pt).unwrap();
            let num = numeric_bracket(&a, &b, &chart, &pt);
            assert!((sym - num).norm() <= 1e-8 * num.norm().max(1.0), "{sym} vs {num}");
        }
    }
}

#[test]
fn poly_bracket_matches_numeric_bracket() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let chart = bump();
    for _ in 0..100 {
        let a = PolySymbol::from_z(&random_symbol(&mut rng));
        let b = PolySymbol::from_z(&random_symbol(&mut rng));
        let pt = random_point(&mut rng, &chart);
        let sym = bracket_poly(&a, &b).unwrap().eval(&chart, &pt).unwrap();
        let num = numeric_bracket(&a.to_z(), &b.to_z(), &chart, &pt);
        assert!((sym - num).norm() <= 1e-8 * num.norm().max(1.0));
    }
}

#[test]
fn antisymmetry_and_leibniz() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let chart = bump();
    for _ in 0..30 {
        let a = random_symbol(&mut rng);
        let b = random_symbol(&mut rng);
        let c = random_symbol(&mut rng);
        let pt = random_point(&mut rng, &chart);
        let ab = bracket_z(&a, &b).eval(&chart, &pt).unwrap();
        let ba = bracket_z(&b, &a).eval(&chart, &pt).unwrap();
        assert!((ab + ba).norm() <= 1e-9 * ab.norm().max(1.0));
        let lhs = bracket_z(&a, &b.mul(&c)).eval(&chart, &pt).unwrap();
        let rhs = bracket_z(&a, &b).eval(&chart, &pt).unwrap() * c.eval(&chart, &pt).unwrap()
            + b.eval(&chart, &pt).unwrap() * bracket_z(&a, &c).eval(&chart, &pt).unwrap();
        assert!((lhs - rhs).norm() <= 1e-9 * lhs.norm().max(1.0));
    }
}

#[test]
fn cohomological_identity_for_constant_coefficients() {
    let flat = ConformalChart::Flat;
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for k in 0..4u32 {
        for l in 0..4u32 {
            if k == l {
                continue;
            }
            for w in [-2, 0, 1] {
                let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                let t = ComplexTerm::new(k, l, Coef::constant(c), w);
                let g = solve_cohomological(&t).unwrap();
                let lhs = bracket_z(&ZSymbol::z_norm_sq(), &g.to_symbol());
                // the primitive is exact up to the bracket with the H₁ power
                let correction = if w == 0 {
                    ZSymbol::zero()
                } else {
                    let h1w = ZSymbol::monomial(w, 0, 0, Coef::one());
                    bracket_z(&ZSymbol::z_norm_sq(), &h1w).mul(&ZSymbol::monomial(
                        -w,
                        0,
                        0,
                        Coef::one(),
                    )).mul(&g.to_symbol())
                };
                let residual = lhs
                    .sub(&correction)
                    .sub(&t.to_symbol().mul(&ZSymbol::h1()));
                for _ in 0..10 {
                    let pt = random_point(&mut rng, &flat);
                    let scale = t.to_symbol().mul(&ZSymbol::h1()).eval(&flat, &pt).unwrap().norm();
                    assert!(residual.eval(&flat, &pt).unwrap().norm() <= 1e-8 * scale.max(1.0));
                }
            }
        }
    }
}

#[test]
fn primitive_of_km_zbar_squared() {
    let t = ComplexTerm::new(0, 2, Coef::k_minus(), 0);
    let g = solve_cohomological(&t).unwrap();
    let flat = ConformalChart::Flat;
    // K₋ Z̄²/(4i) with K₋ = 1/2 on the flat chart
    let c = g.coeff.value(&flat, 0.0, 0.0, 0.0).unwrap();
    assert!((c - Complex64::new(0.5, 0.0) / Complex64::new(0.0, 4.0)).norm() < 1e-15);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let lhs = bracket_z(&ZSymbol::z_norm_sq(), &g.to_symbol());
    let rhs = t.to_symbol().mul(&ZSymbol::h1());
    for _ in 0..20 {
        let pt = random_point(&mut rng, &flat);
        let a = lhs.eval(&flat, &pt).unwrap();
        let b = rhs.eval(&flat, &pt).unwrap();
        assert!((a - b).norm() < 1e-10 * b.norm().max(1.0));
    }
}

#[test]
fn flat_p2_has_quarter_coefficients() {
    let d = build_h1_deformation(&ConformalChart::Flat).unwrap();
    let flat = ConformalChart::Flat;
    let c20 = d.p2.coefficient(0, 2, 0).unwrap().value(&flat, 0.1, 0.2, 0.3).unwrap();
    let c02 = d.p2.coefficient(0, 0, 2).unwrap().value(&flat, 0.1, 0.2, 0.3).unwrap();
    assert!((c20 - Complex64::new(0.25, 0.0)).norm() < 1e-15);
    assert!((c02 - Complex64::new(-0.25, 0.0)).norm() < 1e-15);
    assert_eq!(d.p2.len(), 2);
}

#[test]
fn flat_p3_vanishes_numerically() {
    let flat = ConformalChart::Flat;
    let d = build_h1_deformation(&flat).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    for _ in 0..20 {
        let pt = random_point(&mut rng, &flat);
        assert!(d.h1_p3.eval(&flat, &pt).unwrap().norm() < 1e-14);
    }
}

#[test]
fn curved_p3_is_nontrivial_and_odd_degree() {
    let chart = bump();
    let d = build_h1_deformation(&chart).unwrap();
    assert!(!d.h1_p3.is_empty());
    for (&(_, k, l), _) in d.h1_p3.terms() {
        assert_eq!(k + l, 3);
    }
}

/// Residual of {|Z|², 𝐇₁} at a generic angle of Z, with |Z| = t·H₁.
fn residual_at(d: &H1Deformation, chart: &ConformalChart, base: (f64, f64, f64), h1: f64, t: f64, angle: f64) -> f64 {
    let target = [h1, t * h1 * angle.cos(), t * h1 * angle.sin()];
    let pt = point_with_frame_values(chart, base.0, base.1, base.2, target);
    d.residual().eval(chart, &pt).unwrap().norm()
}

#[test]
fn flat_h1_residual_is_quartic() {
    let flat = ConformalChart::Flat;
    let d = build_h1_deformation(&flat).unwrap();
    for t in [0.1, 0.05] {
        let r = residual_at(&d, &flat, (0.3, 0.1, 0.7), 10.0, t, 0.3)
            / residual_at(&d, &flat, (0.3, 0.1, 0.7), 10.0, t / 2.0, 0.3);
        assert!((12.0..=20.0).contains(&r), "ratio {r}");
    }
}

#[test]
fn flat_h1_residual_vanishes_on_the_diagonal() {
    // residual = −i(Z⁴ − Z̄⁴)/(16H₁²) is zero when H₂ = H₃
    let flat = ConformalChart::Flat;
    let d = build_h1_deformation(&flat).unwrap();
    let r = residual_at(&d, &flat, (0.0, 0.0, 0.0), 10.0, 0.1 * 2f64.sqrt(), std::f64::consts::FRAC_PI_4);
    assert!(r < 1e-12, "{r}");
}

#[test]
fn undeformed_residual_is_quadratic() {
    let flat = ConformalChart::Flat;
    let h1 = ZSymbol::h1();
    for t in [0.1, 0.05] {
        let eval = |t: f64| {
            let pt = point_with_frame_values(&flat, 0.3, 0.1, 0.7, [10.0, t * 10.0 * 0.3f64.cos(), t * 10.0 * 0.3f64.sin()]);
            bracket_z(&ZSymbol::z_norm_sq(), &h1).eval(&flat, &pt).unwrap().norm()
        };
        let r = eval(t) / eval(t / 2.0);
        assert!((3.5..=4.5).contains(&r), "ratio {r}");
    }
}

#[test]
fn curved_h1_residual_is_quartic() {
    let chart = bump();
    let d = build_h1_deformation(&chart).unwrap();
    for t in [0.1, 0.05] {
        let r = residual_at(&d, &chart, (0.2, -0.3, 1.1), 40.0, t, 0.7)
            / residual_at(&d, &chart, (0.2, -0.3, 1.1), 40.0, t / 2.0, 0.7);
        assert!((12.0..=20.0).contains(&r), "ratio {r}");
    }
}

#[test]
fn symbol_deformation_of_constant_is_constant() {
    let one = ScalarField::new("1", |x, _, _| Taylor3::constant(x.order(), 1.0));
    let s = build_symbol_deformation(&one, &ConformalChart::Flat).unwrap();
    let flat = ConformalChart::Flat;
    for &(x, y, z) in &[(0.1, -0.3, 0.4), (1.2, 0.5, 2.9), (-0.7, 2.0, 5.5)] {
        for (key, c) in s.terms() {
            let v = c.value(&flat, x, y, z).unwrap();
            let expected = if *key == (0, 0, 0) { 1.0 } else { 0.0 };
            assert!((v.re - expected).abs() < 1e-14 && v.im.abs() < 1e-14, "{key:?}");
        }
    }
}

#[test]
fn symbol_deformation_of_sin_z() {
    let flat = ConformalChart::Flat;
    let sz = ScalarField::new("sin z", |_, _, z| z.sin());
    let s = build_symbol_deformation(&sz, &flat).unwrap();
    let z = 0.8;
    let a10 = s.coefficient(0, 1, 0).unwrap().value(&flat, 0.1, 0.2, z).unwrap();
    let a01 = s.coefficient(0, 0, 1).unwrap().value(&flat, 0.1, 0.2, z).unwrap();
    assert!((a10.re + z.cos()).abs() < 1e-15 && a10.im == 0.0);
    assert_eq!(a01.norm(), 0.0);
}

#[test]
fn symbol_deformation_requires_second_derivatives() {
    let g = ScalarField::from_gradient("g", |x, _, _| (x, [1.0, 0.0, 0.0]));
    let err = build_symbol_deformation(&g, &ConformalChart::Flat).unwrap_err();
    assert!(matches!(err, sublab_core::LabError::MissingDerivative { .. }));
}

#[test]
fn bracket_rejects_unavailable_derivatives() {
    let g = ScalarField::from_gradient("g", |x, _, _| (x, [1.0, 0.0, 0.0]));
    let a = PolySymbol::term(0, 0, 0, Coef::field(g));
    let h1 = PolySymbol::term(1, 0, 0, Coef::one());
    let first = bracket_poly(&h1, &a).unwrap();
    assert!(bracket_poly(&h1, &first).is_err());
}

fn defect_at(defect: &ZSymbol, chart: &ConformalChart, h1: f64, t: f64) -> f64 {
    let angle: f64 = 0.4;
    let pt = point_with_frame_values(chart, 0.2, 0.1, 0.9, [h1, t * h1 * angle.cos(), t * h1 * angle.sin()]);
    defect.eval(chart, &pt).unwrap().norm()
}

#[test]
fn symbol_defect_observed_orders() {
    // observed scaling of the remainder: cubic in t and linear in H₁
    let a = ScalarField::new("a", |x, y, z| &(&x.cos() * &y.sin()) * &z.sin().add_scalar(0.5));
    for chart in [ConformalChart::Flat, bump()] {
        let defect = symbol_defect(&a, &chart).unwrap();
        for t in [0.2, 0.1, 0.05] {
            for h1 in [10.0, 20.0, 40.0] {
                let halving = defect_at(&defect, &chart, h1, t) / defect_at(&defect, &chart, h1, t / 2.0);
                assert!((7.0..=9.0).contains(&halving), "t-halving ratio {halving}");
                let doubling = defect_at(&defect, &chart, 2.0 * h1, t) / defect_at(&defect, &chart, h1, t);
                assert!((doubling - 2.0).abs() < 1e-6, "H1-doubling ratio {doubling}");
            }
        }
    }
}

#[test]
fn golden_pretty_print_of_symbol_deformation() {
    let a = ScalarField::new("a", |x, y, z| &(x * y) * &z.sin());
    let s = build_symbol_deformation(&a, &ConformalChart::Flat).unwrap();
    let golden = include_str!("golden/symbol_deformation.txt");
    assert_eq!(s.to_string(), golden);
}

#[test]
fn golden_pretty_print_of_p2() {
    let d = build_h1_deformation(&ConformalChart::Flat).unwrap();
    let golden = include_str!("golden/p2.txt");
    assert_eq!(d.p2.to_string(), golden);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn flat_residual_ratio_is_quartic_over_parameters(
        t in prop::sample::select(vec![0.2, 0.1, 0.05]),
        h1 in prop::sample::select(vec![10.0, 20.0, 40.0]),
        angle in 0.1f64..1.4,
    ) {
        // stay away from the zero set of sin(4·angle)
        prop_assume!((4.0 * angle).sin().abs() > 0.2);
        let flat = ConformalChart::Flat;
        let d = build_h1_deformation(&flat).unwrap();
        let r = residual_at(&d, &flat, (0.1, 0.2, 0.3), h1, t, angle)
            / residual_at(&d, &flat, (0.1, 0.2, 0.3), h1, t / 2.0, angle);
        prop_assert!((12.0..=20.0).contains(&r));
    }
}
