use serde::{Deserialize, Serialize};

/// exp(−1/t) for t > 0, 0 otherwise.
fn flat_exp(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

fn flat_exp_derivative(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp() / (t * t)
    } else {
        0.0
    }
}

/// Smooth step rising from 0 (s ≤ 0) to 1 (s ≥ 1).
fn smooth_step(s: f64) -> f64 {
    let a = flat_exp(s);
    let b = flat_exp(1.0 - s);
    a / (a + b)
}

fn smooth_step_derivative(s: f64) -> f64 {
    let a = flat_exp(s);
    let b = flat_exp(1.0 - s);
    let da = flat_exp_derivative(s);
    let db = -flat_exp_derivative(1.0 - s);
    (da * b - a * db) / ((a + b) * (a + b))
}

/// χ: 1 on [−1, 1], 0 outside [−2, 2], monotone on each half-line.
pub fn chi(t: f64) -> f64 {
    1.0 - smooth_step(t.abs() - 1.0)
}

/// χ' (vanishes outside 1 ≤ |t| ≤ 2).
pub fn chi_derivative(t: f64) -> f64 {
    -smooth_step_derivative(t.abs() - 1.0) * t.signum()
}

pub fn tilde_chi(t: f64) -> f64 {
    1.0 - chi(t)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CutoffKind {
    Chi,
    TildeChi,
    /// χ_R^B = χ((H₁² + H₂² + H₃²)/R)
    Ball,
    TildeBall,
    /// χ_ε^C = χ(εH₁/√(1 + H₂² + H₃²))
    Cone,
    TildeCone,
    /// ρ_{R₁} = χ̃(hH₁/R₁)
    Rho,
    TildeRho,
}

/// Argument of a cutoff: a bare scalar for χ/χ̃, frame values otherwise.
#[derive(Clone, Copy, Debug)]
pub enum CutoffInput {
    Scalar(f64),
    Frame { h1: f64, h2: f64, h3: f64 },
}

/// Scale parameters of the cutoff families.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutoffFamily {
    /// ball scale R > 1
    pub r_ball: f64,
    /// cone aperture ε ∈ (0, 1)
    pub eps: f64,
    /// energy scale R₁ > 1
    pub r_energy: f64,
    /// semiclassical parameter entering ρ_{R₁}
    pub h: f64,
}

impl CutoffFamily {
    pub fn new(r_ball: f64, eps: f64, r_energy: f64, h: f64) -> Self {
        Self {
            r_ball,
            eps,
            r_energy,
            h,
        }
    }

    pub fn eval(&self, which: CutoffKind, input: CutoffInput) -> f64 {
        let plain = |kind: CutoffKind| -> f64 {
            match (kind, input) {
                (CutoffKind::Chi, CutoffInput::Scalar(t)) => chi(t),
                (CutoffKind::Ball, CutoffInput::Frame { h1, h2, h3 }) => {
                    chi((h1 * h1 + h2 * h2 + h3 * h3) / self.r_ball)
                }
                (CutoffKind::Cone, CutoffInput::Frame { h1, h2, h3 }) => {
                    chi(self.eps * h1 / (1.0 + h2 * h2 + h3 * h3).sqrt())
                }
                (CutoffKind::Rho, CutoffInput::Frame { h1, .. }) => tilde_chi(self.h * h1 / self.r_energy),
                (CutoffKind::Chi, CutoffInput::Frame { h1, .. }) => chi(h1),
                (_, CutoffInput::Scalar(t)) => chi(t),
                _ => unreachable!(),
            }
        };
        match which {
            CutoffKind::Chi | CutoffKind::Ball | CutoffKind::Cone | CutoffKind::Rho => plain(which),
            CutoffKind::TildeChi => 1.0 - plain(CutoffKind::Chi),
            CutoffKind::TildeBall => 1.0 - plain(CutoffKind::Ball),
            CutoffKind::TildeCone => 1.0 - plain(CutoffKind::Cone),
            CutoffKind::TildeRho => 1.0 - plain(CutoffKind::Rho),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_support_and_partition() {
        assert_eq!(chi(0.5), 1.0);
        assert_eq!(chi(-1.0), 1.0);
        assert_eq!(chi(3.0), 0.0);
        assert_eq!(chi(-2.0), 0.0);
        let v = chi(1.5);
        assert!(v > 0.0 && v < 1.0);
        assert_eq!(v + tilde_chi(1.5), 1.0);
    }

    #[test]
    fn derivative_matches_differences_and_vanishes_off_transition() {
        for i in -300..=300 {
            let t = i as f64 * 0.01;
            let fd = (chi(t + 1e-6) - chi(t - 1e-6)) / 2e-6;
            assert!((chi_derivative(t) - fd).abs() < 1e-5, "t={t}");
            if t.abs() <= 1.0 || t.abs() >= 2.0 {
                assert_eq!(chi_derivative(t), 0.0);
            }
        }
    }

    #[test]
    fn family_variants() {
        let fam = CutoffFamily::new(4.0, 0.5, 2.0, 0.1);
        let frame = CutoffInput::Frame {
            h1: 1.0,
            h2: 0.0,
            h3: 0.0,
        };
        assert_eq!(fam.eval(CutoffKind::Ball, frame), 1.0);
        assert_eq!(fam.eval(CutoffKind::TildeBall, frame), 0.0);
        assert_eq!(fam.eval(CutoffKind::Cone, frame), 1.0);
        assert_eq!(fam.eval(CutoffKind::Rho, frame), 0.0);
        let far = CutoffInput::Frame {
            h1: 100.0,
            h2: 0.0,
            h3: 0.0,
        };
        assert_eq!(fam.eval(CutoffKind::TildeCone, far), 1.0);
        assert_eq!(fam.eval(CutoffKind::Rho, far), 1.0);
        assert_eq!(fam.eval(CutoffKind::TildeChi, CutoffInput::Scalar(0.2)), 0.0);
    }
}
