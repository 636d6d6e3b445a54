use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use super::chart::ConformalChart;
use super::jet::{bracket_jets, PhaseJet, ETA, X, XI, Y, Z, ZETA};
use crate::taylor::Scalar;

/// A point (x, y, z; ξ, η, ζ) of T*(ℝ² × S¹), with z reduced to [0, 2π).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub xi: f64,
    pub eta: f64,
    pub zeta: f64,
}

impl PhasePoint {
    pub fn new(x: f64, y: f64, z: f64, xi: f64, eta: f64, zeta: f64) -> Self {
        let mut z = z.rem_euclid(TAU);
        if z >= TAU {
            z = 0.0;
        }
        Self {
            x,
            y,
            z,
            xi,
            eta,
            zeta,
        }
    }

    pub fn coords(&self) -> [f64; 6] {
        [self.x, self.y, self.z, self.xi, self.eta, self.zeta]
    }

    pub fn from_coords(c: [f64; 6]) -> Self {
        Self::new(c[0], c[1], c[2], c[3], c[4], c[5])
    }
}

/// Jets of the frame Hamiltonians H₁, H₂, H₃ at one point.
#[derive(Clone, Copy, Debug)]
pub struct FrameJets {
    pub h1: PhaseJet,
    pub h2: PhaseJet,
    pub h3: PhaseJet,
}

impl FrameJets {
    pub fn values(&self) -> [f64; 3] {
        [self.h1.value, self.h2.value, self.h3.value]
    }

    /// Z = H₂ + iH₃.
    pub fn z(&self) -> PhaseJet<Complex64> {
        self.h2.to_complex() + self.h3.to_complex().scale(Complex64::i())
    }

    /// Z̄ = H₂ − iH₃.
    pub fn zbar(&self) -> PhaseJet<Complex64> {
        self.h2.to_complex() - self.h3.to_complex().scale(Complex64::i())
    }
}

/// Evaluate H₁, H₂, H₃ with exact gradients.
pub fn eval_frame(chart: &ConformalChart, pt: &PhasePoint) -> FrameJets {
    let lam = chart.lambda_jet(pt.x, pt.y, 2);
    let lam_jet = PhaseJet::new(
        lam.value(),
        [lam.derivative(1, 0, 0), lam.derivative(0, 1, 0), 0.0, 0.0, 0.0, 0.0],
    );
    let lx = PhaseJet::new(
        lam.derivative(1, 0, 0),
        [lam.derivative(2, 0, 0), lam.derivative(1, 1, 0), 0.0, 0.0, 0.0, 0.0],
    );
    let ly = PhaseJet::new(
        lam.derivative(0, 1, 0),
        [lam.derivative(1, 1, 0), lam.derivative(0, 2, 0), 0.0, 0.0, 0.0, 0.0],
    );
    let z = PhaseJet::variable(Z, pt.z);
    let (s, c) = (z.sin(), z.cos());
    let xi = PhaseJet::variable(XI, pt.xi);
    let eta = PhaseJet::variable(ETA, pt.eta);
    let zeta = PhaseJet::variable(ZETA, pt.zeta);
    let weight = (-lam_jet).exp();
    let h1 = weight * (xi * c + eta * s + zeta * (ly * c - lx * s));
    let h2 = weight * (xi * s - eta * c + zeta * (lx * c + ly * s));
    FrameJets { h1, h2, h3: zeta }
}

/// Jets of the base coordinates (x, y, z), for lifting coefficient functions.
pub fn base_jets(pt: &PhasePoint) -> [PhaseJet; 3] {
    [
        PhaseJet::variable(X, pt.x),
        PhaseJet::variable(Y, pt.y),
        PhaseJet::variable(Z, pt.z),
    ]
}

/// {f, g} at `pt` for jet-valued phase functions.
pub fn poisson_bracket<T, F, G>(chart: &ConformalChart, f: F, g: G, pt: &PhasePoint) -> T
where
    T: Scalar,
    F: Fn(&ConformalChart, &PhasePoint) -> PhaseJet<T>,
    G: Fn(&ConformalChart, &PhasePoint) -> PhaseJet<T>,
{
    bracket_jets(&f(chart, pt), &g(chart, pt))
}

/// Conic region ε|H₁| ≥ √(1 + H₂² + H₃²).
pub fn in_cone(chart: &ConformalChart, pt: &PhasePoint, eps: f64) -> bool {
    let [h1, h2, h3] = eval_frame(chart, pt).values();
    eps * h1.abs() >= (1.0 + h2 * h2 + h3 * h3).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn h1(c: &ConformalChart, p: &PhasePoint) -> PhaseJet {
        eval_frame(c, p).h1
    }
    fn h2(c: &ConformalChart, p: &PhasePoint) -> PhaseJet {
        eval_frame(c, p).h2
    }
    fn h3(c: &ConformalChart, p: &PhasePoint) -> PhaseJet {
        eval_frame(c, p).h3
    }

    #[test]
    fn flat_chart_values() {
        let flat = ConformalChart::Flat;
        let f = eval_frame(&flat, &PhasePoint::new(0.0, 0.0, 0.0, 1.0, 0.0, 0.0));
        assert_eq!(f.values(), [1.0, 0.0, 0.0]);
        let f = eval_frame(&flat, &PhasePoint::new(0.0, 0.0, FRAC_PI_2, 1.0, 0.0, 0.0));
        assert!(f.h1.value.abs() < 1e-15);
        assert!((f.h2.value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn flat_chart_brackets() {
        let flat = ConformalChart::Flat;
        let p = PhasePoint::new(0.0, 0.0, FRAC_PI_2, 1.0, 0.0, 0.0);
        assert!((poisson_bracket(&flat, h1, h3, &p) - 1.0).abs() < 1e-15);
        let p = PhasePoint::new(0.0, 0.0, 0.0, 1.0, 0.0, 0.0);
        assert!((poisson_bracket(&flat, h2, h3, &p) + 1.0).abs() < 1e-15);
        let p = PhasePoint::new(0.3, 2.0, 1.1, 0.4, -2.0, 0.9);
        assert!(poisson_bracket(&flat, h1, h2, &p).abs() < 1e-15);
    }

    #[test]
    fn bump_value_at_origin() {
        let bump = ConformalChart::Bump {
            amplitude: 1.0,
            radius: 1.0,
        };
        let f = eval_frame(&bump, &PhasePoint::new(0.0, 0.0, 0.0, 1.0, 0.0, 0.0));
        assert!((f.h1.value - (-(-1.0f64).exp()).exp()).abs() < 1e-15);
    }

    #[test]
    fn cone_membership() {
        let flat = ConformalChart::Flat;
        assert!(in_cone(&flat, &PhasePoint::new(0.0, 0.0, 0.0, 100.0, 0.0, 0.0), 0.5));
        assert!(!in_cone(&flat, &PhasePoint::new(0.0, 0.0, 0.0, 1.0, 0.0, 0.0), 0.5));
        for eps in [0.1, 0.5, 1.0] {
            assert!(!in_cone(&flat, &PhasePoint::new(0.0, 0.0, 0.0, 0.0, 5.0, 0.0), eps));
        }
    }

    #[test]
    fn z_is_reduced() {
        let p = PhasePoint::new(0.0, 0.0, -0.5, 0.0, 0.0, 0.0);
        assert!((p.z - (TAU - 0.5)).abs() < 1e-15);
        let p = PhasePoint::new(0.0, 0.0, 3.0 * TAU + 0.25, 0.0, 0.0, 0.0);
        assert!((p.z - 0.25).abs() < 1e-12);
    }
}
