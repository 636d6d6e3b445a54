use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::taylor::Taylor3;

/// Conformal factor λ(x,y) of an isothermal chart, g = e^{2λ}(dx² + dy²).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ConformalChart {
    /// λ ≡ 0: the flat torus.
    Flat,
    /// λ = a·exp(−1/(1 − ρ²)) with ρ² = (x² + y²)/r² inside the disk of radius r, 0 outside.
    Bump { amplitude: f64, radius: f64 },
}

/// Finite-difference consistency of the chart derivatives at one point.
#[derive(Clone, Copy, Debug)]
pub struct DerivativeCheck {
    pub grad_error: f64,
    pub hess_error: f64,
}

impl ConformalChart {
    /// Look a chart up by name: `flat`, `bump` (a = r = 1) or `bump(a,r)`.
    pub fn from_name(name: &str) -> Result<Self> {
        let trimmed: String = name.chars().filter(|c| !c.is_whitespace()).collect();
        match trimmed.as_str() {
            "flat" => return Ok(ConformalChart::Flat),
            "bump" => {
                return Ok(ConformalChart::Bump {
                    amplitude: 1.0,
                    radius: 1.0,
                })
            }
            _ => {}
        }
        let args = trimmed
            .strip_prefix("bump(")
            .and_then(|rest| rest.strip_suffix(')'))
            .ok_or_else(|| LabError::UnknownChart(name.to_string()))?;
        let parts: Vec<f64> = args
            .split(',')
            .map(|p| p.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| LabError::UnknownChart(name.to_string()))?;
        match parts.as_slice() {
            [a, r] if a.is_finite() && *r > 0.0 => Ok(ConformalChart::Bump {
                amplitude: *a,
                radius: *r,
            }),
            _ => Err(LabError::UnknownChart(name.to_string())),
        }
    }

    pub fn name(&self) -> String {
        match self {
            ConformalChart::Flat => "flat".to_string(),
            ConformalChart::Bump { amplitude, radius } => format!("bump({amplitude},{radius})"),
        }
    }

    pub fn is_flat(&self) -> bool {
        matches!(self, ConformalChart::Flat)
    }

    /// Points where the chart formula is smooth (the open disk for a bump).
    pub fn contains(&self, x: f64, y: f64) -> bool {
        match self {
            ConformalChart::Flat => true,
            ConformalChart::Bump { radius, .. } => x * x + y * y < radius * radius,
        }
    }

    /// λ composed with Taylor-expanded coordinates.
    pub fn lambda_taylor(&self, x: &Taylor3, y: &Taylor3) -> Taylor3 {
        let order = x.order().min(y.order());
        match *self {
            ConformalChart::Flat => Taylor3::zero(order),
            ConformalChart::Bump { amplitude, radius } => {
                let rho2 = (&(x * x) + &(y * y)).scale(1.0 / (radius * radius));
                if rho2.value() >= 1.0 {
                    return Taylor3::zero(order);
                }
                let gap = (-&rho2).add_scalar(1.0);
                (-&gap.recip()).exp().scale(amplitude)
            }
        }
    }

    /// Taylor expansion of λ at (x0, y0) in the variables (x, y, z).
    pub fn lambda_jet(&self, x0: f64, y0: f64, order: usize) -> Taylor3 {
        self.lambda_taylor(&Taylor3::variable(order, 0, x0), &Taylor3::variable(order, 1, y0))
    }

    pub fn lambda(&self, x: f64, y: f64) -> f64 {
        self.lambda_jet(x, y, 0).value()
    }

    pub fn grad_lambda(&self, x: f64, y: f64) -> [f64; 2] {
        let t = self.lambda_jet(x, y, 1);
        [t.derivative(1, 0, 0), t.derivative(0, 1, 0)]
    }

    pub fn hess_lambda(&self, x: f64, y: f64) -> [[f64; 2]; 2] {
        let t = self.lambda_jet(x, y, 2);
        let xy = t.derivative(1, 1, 0);
        [[t.derivative(2, 0, 0), xy], [xy, t.derivative(0, 2, 0)]]
    }

    /// Taylor expansion of the curvature K = −e^{−2λ}Δλ at (x0, y0).
    pub fn curvature_taylor(&self, x0: f64, y0: f64, order: usize) -> Taylor3 {
        if self.is_flat() {
            return Taylor3::zero(order);
        }
        let lam = self.lambda_jet(x0, y0, order + 2);
        let laplacian = &lam.partial(0).partial(0) + &lam.partial(1).partial(1);
        let weight = lam.truncate(order).scale(-2.0).exp();
        -&(&weight * &laplacian)
    }

    pub fn curvature(&self, x: f64, y: f64) -> f64 {
        self.curvature_taylor(x, y, 0).value()
    }

    /// K₊ = (1 + K)/2.
    pub fn k_plus(&self, x: f64, y: f64) -> f64 {
        0.5 * (1.0 + self.curvature(x, y))
    }

    /// K₋ = (1 − K)/2.
    pub fn k_minus(&self, x: f64, y: f64) -> f64 {
        0.5 * (1.0 - self.curvature(x, y))
    }

    /// Central-difference check of the gradient and Hessian against λ itself.
    pub fn finite_difference_check(&self, x: f64, y: f64, step: f64) -> DerivativeCheck {
        let lam = |a: f64, b: f64| self.lambda(a, b);
        let grad = self.grad_lambda(x, y);
        let fd_grad = [
            (lam(x + step, y) - lam(x - step, y)) / (2.0 * step),
            (lam(x, y + step) - lam(x, y - step)) / (2.0 * step),
        ];
        let hess = self.hess_lambda(x, y);
        let gx = |a: f64, b: f64| self.grad_lambda(a, b);
        let fd_hess = [
            [
                (gx(x + step, y)[0] - gx(x - step, y)[0]) / (2.0 * step),
                (gx(x, y + step)[0] - gx(x, y - step)[0]) / (2.0 * step),
            ],
            [
                (gx(x + step, y)[1] - gx(x - step, y)[1]) / (2.0 * step),
                (gx(x, y + step)[1] - gx(x, y - step)[1]) / (2.0 * step),
            ],
        ];
        let grad_error = (0..2).map(|i| (grad[i] - fd_grad[i]).abs()).fold(0.0, f64::max);
        let hess_error = (0..2)
            .flat_map(|i| (0..2).map(move |j| (i, j)))
            .map(|(i, j)| (hess[i][j] - fd_hess[i][j]).abs())
            .fold(0.0, f64::max);
        DerivativeCheck {
            grad_error,
            hess_error,
        }
    }

    /// Bounds (sup|λ|, sup|∇λ|) over the chart, by radial sampling for the bump.
    pub fn c1_bounds(&self) -> (f64, f64) {
        match *self {
            ConformalChart::Flat => (0.0, 0.0),
            ConformalChart::Bump { amplitude, radius } => {
                let sup_lambda = amplitude.abs() * (-1.0f64).exp();
                let sup_grad = (1..4000)
                    .map(|i| {
                        let x = radius * i as f64 / 4000.0;
                        let g = self.grad_lambda(x, 0.0);
                        g[0].hypot(g[1])
                    })
                    .fold(0.0, f64::max);
                // sampling slack: the profile is smooth on the 1/4000 grid
                (sup_lambda, sup_grad * 1.01)
            }
        }
    }

    /// Constant C₀ with C₀⁻¹|p|² ≤ H₁² + H₂² + H₃² ≤ C₀|p|².
    pub fn norm_comparison_constant(&self) -> f64 {
        let (l0, l1) = self.c1_bounds();
        (2.0 * l0).exp() * (1.0 + l1 * l1) + 1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_parses_names() {
        assert_eq!(ConformalChart::from_name("flat").unwrap(), ConformalChart::Flat);
        assert_eq!(
            ConformalChart::from_name("bump(0.5, 2)").unwrap(),
            ConformalChart::Bump {
                amplitude: 0.5,
                radius: 2.0
            }
        );
        assert!(ConformalChart::from_name("sphere").is_err());
        assert!(ConformalChart::from_name("bump(1)").is_err());
        assert!(ConformalChart::from_name("bump(1,-1)").is_err());
        let bump = ConformalChart::from_name("bump(0.5,2)").unwrap();
        assert_eq!(ConformalChart::from_name(&bump.name()).unwrap(), bump);
    }

    #[test]
    fn flat_chart_has_zero_curvature() {
        let flat = ConformalChart::Flat;
        assert_eq!(flat.curvature(0.3, -1.2), 0.0);
        assert_eq!(flat.k_minus(0.3, -1.2), 0.5);
        assert_eq!(flat.k_plus(0.3, -1.2), 0.5);
    }

    #[test]
    fn bump_derivatives_pass_finite_difference_check() {
        let bump = ConformalChart::Bump {
            amplitude: 1.0,
            radius: 1.0,
        };
        for &(x, y) in &[(0.0, 0.0), (0.2, -0.3), (-0.5, 0.1), (0.1, 0.6)] {
            let c = bump.finite_difference_check(x, y, 1e-4);
            assert!(c.grad_error < 1e-7, "{c:?}");
            assert!(c.hess_error < 1e-6, "{c:?}");
        }
    }

    #[test]
    fn bump_curvature_matches_finite_difference_laplacian() {
        let bump = ConformalChart::Bump {
            amplitude: 0.7,
            radius: 1.3,
        };
        let (x, y, h) = (0.25, -0.4, 1e-3);
        let lam = |a: f64, b: f64| bump.lambda(a, b);
        let lap = (lam(x + h, y) + lam(x - h, y) + lam(x, y + h) + lam(x, y - h) - 4.0 * lam(x, y)) / (h * h);
        let expect = -(-2.0 * lam(x, y)).exp() * lap;
        assert!((bump.curvature(x, y) - expect).abs() < 1e-5);
    }
}
