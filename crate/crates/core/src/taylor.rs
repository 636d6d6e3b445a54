//! Truncated Taylor polynomials in three variables.
//!
//! A `Taylor3` stores the coefficients of a polynomial in the displacements
//! `(dx, dy, dz)` around an expansion point, truncated at a fixed total degree.
//! Arithmetic and elementary functions propagate exact derivatives up to that
//! degree, which is how chart derivatives (λ, K, K±) and coefficient
//! derivatives along the frame vector fields are obtained.

use num_complex::{Complex64, ComplexFloat};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

/// Largest supported truncation order.
pub const MAX_ORDER: usize = 10;

/// Scalar types usable as Taylor coefficients (`f64` and `Complex64`).
pub trait Scalar:
    ComplexFloat<Real = f64> + From<f64> + Send + Sync + std::fmt::Debug + 'static
{
    fn real(x: f64) -> Self {
        <Self as From<f64>>::from(x)
    }
}

impl<T> Scalar for T where
    T: ComplexFloat<Real = f64> + From<f64> + Send + Sync + std::fmt::Debug + 'static
{
}

/// Number of monomials of total degree ≤ `order` in three variables.
pub const fn monomial_count(order: usize) -> usize {
    (order + 1) * (order + 2) * (order + 3) / 6
}

/// Position of the monomial `dx^i dy^j dz^k` in the graded ordering.
#[inline]
pub fn monomial_index(i: usize, j: usize, k: usize) -> usize {
    let d = i + j + k;
    let r = j + k;
    d * (d + 1) * (d + 2) / 6 + r * (r + 1) / 2 + k
}

fn exponent_table() -> &'static [[usize; 3]] {
    static TABLE: OnceLock<Vec<[usize; 3]>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut out = Vec::with_capacity(monomial_count(MAX_ORDER));
        for d in 0..=MAX_ORDER {
            for r in 0..=d {
                for k in 0..=r {
                    out.push([d - r, r - k, k]);
                }
            }
        }
        out
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Taylor3<T = f64> {
    order: usize,
    coeffs: Vec<T>,
}

impl<T: Scalar> Taylor3<T> {
    pub fn constant(order: usize, value: T) -> Self {
        assert!(order <= MAX_ORDER, "Taylor order {order} exceeds {MAX_ORDER}");
        let mut coeffs = vec![T::zero(); monomial_count(order)];
        coeffs[0] = value;
        Self { order, coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self::constant(order, T::zero())
    }

    /// The coordinate function `axis` (0 = x, 1 = y, 2 = z) expanded at `value`.
    pub fn variable(order: usize, axis: usize, value: T) -> Self {
        let mut t = Self::constant(order, value);
        if order >= 1 {
            let mut e = [0usize; 3];
            e[axis] = 1;
            t.coeffs[monomial_index(e[0], e[1], e[2])] = T::one();
        }
        t
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self) -> T {
        self.coeffs[0]
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Raw Taylor coefficient of `dx^i dy^j dz^k`.
    pub fn coefficient(&self, i: usize, j: usize, k: usize) -> T {
        if i + j + k > self.order {
            return T::zero();
        }
        self.coeffs[monomial_index(i, j, k)]
    }

    /// Mixed partial derivative ∂x^i ∂y^j ∂z^k at the expansion point.
    pub fn derivative(&self, i: usize, j: usize, k: usize) -> T {
        let fact = |n: usize| (1..=n).fold(1.0, |acc, v| acc * v as f64);
        self.coefficient(i, j, k) * T::real(fact(i) * fact(j) * fact(k))
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        Self {
            order,
            coeffs: self.coeffs[..monomial_count(order)].to_vec(),
        }
    }

    /// Partial derivative along `axis`, as a Taylor polynomial of one lower order.
    pub fn partial(&self, axis: usize) -> Self {
        assert!(self.order >= 1, "cannot differentiate an order-0 Taylor polynomial");
        let order = self.order - 1;
        let table = exponent_table();
        let coeffs = table[..monomial_count(order)]
            .iter()
            .map(|e| {
                let mut up = *e;
                up[axis] += 1;
                self.coeffs[monomial_index(up[0], up[1], up[2])] * T::real(up[axis] as f64)
            })
            .collect();
        Self { order, coeffs }
    }

    pub fn scale(&self, factor: T) -> Self {
        Self {
            order: self.order,
            coeffs: self.coeffs.iter().map(|&c| c * factor).collect(),
        }
    }

    pub fn add_scalar(&self, shift: T) -> Self {
        let mut out = self.clone();
        out.coeffs[0] = out.coeffs[0] + shift;
        out
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> Taylor3<U> {
        Taylor3 {
            order: self.order,
            coeffs: self.coeffs.iter().map(|&c| f(c)).collect(),
        }
    }

    fn binary(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        let order = self.order.min(other.order);
        let len = monomial_count(order);
        Self {
            order,
            coeffs: (0..len).map(|i| f(self.coeffs[i], other.coeffs[i])).collect(),
        }
    }

    pub fn mul_truncated(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        let table = exponent_table();
        let mut coeffs = vec![T::zero(); monomial_count(order)];
        for (a, ea) in table[..monomial_count(order)].iter().enumerate() {
            let ca = self.coeffs[a];
            if ca == T::zero() {
                continue;
            }
            let da = ea[0] + ea[1] + ea[2];
            for (b, eb) in table[..monomial_count(order - da)].iter().enumerate() {
                let cb = other.coeffs[b];
                if cb == T::zero() {
                    continue;
                }
                let idx = monomial_index(ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]);
                coeffs[idx] = coeffs[idx] + ca * cb;
            }
        }
        Self { order, coeffs }
    }

    /// Compose with a univariate function given its scaled derivatives
    /// `series[k] = f^(k)(a0) / k!` at the constant term `a0`.
    pub fn compose(&self, series: &[T]) -> Self {
        let mut delta = self.clone();
        delta.coeffs[0] = T::zero();
        let mut out = Self::constant(self.order, series[self.order.min(series.len() - 1)]);
        for k in (0..self.order.min(series.len() - 1)).rev() {
            out = out.mul_truncated(&delta).add_scalar(series[k]);
        }
        out
    }

    pub fn exp(&self) -> Self {
        let e = self.value().exp();
        let mut series = Vec::with_capacity(self.order + 1);
        let mut fact = 1.0;
        for k in 0..=self.order {
            if k > 0 {
                fact *= k as f64;
            }
            series.push(e / T::real(fact));
        }
        self.compose(&series)
    }

    fn trig_series(&self, phase: usize) -> Vec<T> {
        let a0 = self.value();
        let cycle = [a0.sin(), a0.cos(), -a0.sin(), -a0.cos()];
        let mut fact = 1.0;
        (0..=self.order)
            .map(|k| {
                if k > 0 {
                    fact *= k as f64;
                }
                cycle[(k + phase) % 4] / T::real(fact)
            })
            .collect()
    }

    pub fn sin(&self) -> Self {
        self.compose(&self.trig_series(0))
    }

    pub fn cos(&self) -> Self {
        self.compose(&self.trig_series(1))
    }

    pub fn recip(&self) -> Self {
        let inv = T::one() / self.value();
        let mut series = Vec::with_capacity(self.order + 1);
        let mut term = inv;
        for _ in 0..=self.order {
            series.push(term);
            term = -term * inv;
        }
        self.compose(&series)
    }

    pub fn powf(&self, exponent: f64) -> Self {
        let a0 = self.value();
        let mut series = Vec::with_capacity(self.order + 1);
        let mut binom = 1.0;
        for k in 0..=self.order {
            if k > 0 {
                binom *= (exponent - (k as f64 - 1.0)) / k as f64;
            }
            series.push(T::real(binom) * a0.powf(exponent - k as f64));
        }
        self.compose(&series)
    }

    pub fn sqrt(&self) -> Self {
        self.powf(0.5)
    }

    pub fn ln(&self) -> Self {
        let a0 = self.value();
        let mut series = vec![a0.ln()];
        let mut pow = T::one();
        for k in 1..=self.order {
            pow = pow * a0;
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            series.push(T::real(sign / k as f64) / pow);
        }
        self.compose(&series)
    }

    /// Evaluate the truncated polynomial at a displacement from the expansion point.
    pub fn eval_displacement(&self, d: [f64; 3]) -> T {
        let table = exponent_table();
        table[..self.coeffs.len()]
            .iter()
            .zip(&self.coeffs)
            .fold(T::zero(), |acc, (e, &c)| {
                acc + c * T::real(d[0].powi(e[0] as i32) * d[1].powi(e[1] as i32) * d[2].powi(e[2] as i32))
            })
    }
}

impl Taylor3<f64> {
    pub fn to_complex(&self) -> Taylor3<Complex64> {
        self.map(Complex64::from)
    }
}

impl<T: Scalar> Add for &Taylor3<T> {
    type Output = Taylor3<T>;
    fn add(self, rhs: Self) -> Taylor3<T> {
        self.binary(rhs, |a, b| a + b)
    }
}

impl<T: Scalar> Sub for &Taylor3<T> {
    type Output = Taylor3<T>;
    fn sub(self, rhs: Self) -> Taylor3<T> {
        self.binary(rhs, |a, b| a - b)
    }
}

impl<T: Scalar> Mul for &Taylor3<T> {
    type Output = Taylor3<T>;
    fn mul(self, rhs: Self) -> Taylor3<T> {
        self.mul_truncated(rhs)
    }
}

impl<T: Scalar> Neg for &Taylor3<T> {
    type Output = Taylor3<T>;
    fn neg(self) -> Taylor3<T> {
        self.scale(-T::one())
    }
}

macro_rules! owned_binop {
    ($tr:ident, $method:ident) => {
        impl<T: Scalar> $tr for Taylor3<T> {
            type Output = Taylor3<T>;
            fn $method(self, rhs: Self) -> Taylor3<T> {
                (&self).$method(&rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl<T: Scalar> Neg for Taylor3<T> {
    type Output = Taylor3<T>;
    fn neg(self) -> Taylor3<T> {
        -&self
    }
}
