use num_complex::Complex64;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::taylor::Scalar;

/// Slots of the gradient: (∂x, ∂y, ∂z, ∂ξ, ∂η, ∂ζ).
pub const X: usize = 0;
pub const Y: usize = 1;
pub const Z: usize = 2;
pub const XI: usize = 3;
pub const ETA: usize = 4;
pub const ZETA: usize = 5;

/// Value of a phase-space function together with its exact 6-gradient.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseJet<T = f64> {
    pub value: T,
    pub grad: [T; 6],
}

impl<T: Scalar> PhaseJet<T> {
    pub fn constant(value: T) -> Self {
        Self {
            value,
            grad: [T::zero(); 6],
        }
    }

    /// The coordinate function in slot `slot`, evaluated at `value`.
    pub fn variable(slot: usize, value: T) -> Self {
        let mut grad = [T::zero(); 6];
        grad[slot] = T::one();
        Self { value, grad }
    }

    pub fn new(value: T, grad: [T; 6]) -> Self {
        Self { value, grad }
    }

    pub fn scale(self, factor: T) -> Self {
        Self {
            value: self.value * factor,
            grad: self.grad.map(|g| g * factor),
        }
    }

    /// Apply a univariate function with value `f` and derivative `df` at `self.value`.
    pub fn chain(self, f: T, df: T) -> Self {
        Self {
            value: f,
            grad: self.grad.map(|g| g * df),
        }
    }

    pub fn exp(self) -> Self {
        let e = self.value.exp();
        self.chain(e, e)
    }

    pub fn sin(self) -> Self {
        self.chain(self.value.sin(), self.value.cos())
    }

    pub fn cos(self) -> Self {
        self.chain(self.value.cos(), -self.value.sin())
    }

    pub fn sqrt(self) -> Self {
        let s = self.value.sqrt();
        self.chain(s, T::real(0.5) / s)
    }

    pub fn recip(self) -> Self {
        let r = T::one() / self.value;
        self.chain(r, -r * r)
    }

    pub fn ln(self) -> Self {
        self.chain(self.value.ln(), T::one() / self.value)
    }

    pub fn powi(self, k: i32) -> Self {
        if k == 0 {
            return Self::constant(T::one());
        }
        self.chain(self.value.powi(k), T::real(k as f64) * self.value.powi(k - 1))
    }
}

impl PhaseJet<f64> {
    pub fn to_complex(self) -> PhaseJet<Complex64> {
        PhaseJet {
            value: self.value.into(),
            grad: self.grad.map(Complex64::from),
        }
    }
}

impl<T: Scalar> Add for PhaseJet<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self {
            value: self.value + rhs.value,
            grad: std::array::from_fn(|i| self.grad[i] + rhs.grad[i]),
        }
    }
}

impl<T: Scalar> Sub for PhaseJet<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self {
            value: self.value - rhs.value,
            grad: std::array::from_fn(|i| self.grad[i] - rhs.grad[i]),
        }
    }
}

impl<T: Scalar> Mul for PhaseJet<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self {
            value: self.value * rhs.value,
            grad: std::array::from_fn(|i| self.grad[i] * rhs.value + self.value * rhs.grad[i]),
        }
    }
}

impl<T: Scalar> Div for PhaseJet<T> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        self * rhs.recip()
    }
}

impl<T: Scalar> Neg for PhaseJet<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-T::one())
    }
}

/// Poisson bracket Σⱼ (∂pⱼf ∂qⱼg − ∂qⱼf ∂pⱼg) of two jets at the same point.
pub fn bracket_jets<T: Scalar>(f: &PhaseJet<T>, g: &PhaseJet<T>) -> T {
    (0..3).fold(T::zero(), |acc, j| {
        acc + f.grad[j + 3] * g.grad[j] - f.grad[j] * g.grad[j + 3]
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_has_zero_gradient() {
        let c = PhaseJet::constant(3.5);
        assert_eq!(c.grad, [0.0; 6]);
        let v = PhaseJet::variable(ETA, 2.0);
        let p = c * v;
        assert_eq!(p.grad[ETA], 3.5);
    }

    #[test]
    fn canonical_brackets() {
        let x = PhaseJet::variable(X, 0.1);
        let xi = PhaseJet::variable(XI, 0.7);
        assert_eq!(bracket_jets(&xi, &x), 1.0);
        assert_eq!(bracket_jets(&x, &xi), -1.0);
        let z = PhaseJet::variable(Z, 0.2);
        assert_eq!(bracket_jets(&xi, &z), 0.0);
    }

    #[test]
    fn quotient_and_functions() {
        let a = PhaseJet::variable(X, 0.8);
        let b = PhaseJet::variable(Y, 1.6);
        let q = (a.sin() * b.exp()) / b;
        let expect_dx = 0.8f64.cos() * 1.6f64.exp() / 1.6;
        let expect_dy = 0.8f64.sin() * 1.6f64.exp() * (1.6 - 1.0) / (1.6 * 1.6);
        assert!((q.grad[X] - expect_dx).abs() < 1e-13);
        assert!((q.grad[Y] - expect_dy).abs() < 1e-13);
    }
}
