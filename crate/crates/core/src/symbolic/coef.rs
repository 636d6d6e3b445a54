use num_complex::Complex64;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{LabError, Result};
use crate::phasespace::ConformalChart;
use crate::taylor::Taylor3;

type TaylorFn = dyn Fn(&Taylor3, &Taylor3, &Taylor3) -> Taylor3 + Send + Sync;

/// A named real function of (x, y, z) that can be expanded in Taylor series.
#[derive(Clone)]
pub struct ScalarField {
    name: String,
    max_order: Option<usize>,
    eval: Arc<TaylorFn>,
}

impl ScalarField {
    /// A closed-form function, differentiable to any order.
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(&Taylor3, &Taylor3, &Taylor3) -> Taylor3 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            max_order: None,
            eval: Arc::new(f),
        }
    }

    /// A function known only through its value and gradient.
    pub fn from_gradient(
        name: impl Into<String>,
        f: impl Fn(f64, f64, f64) -> (f64, [f64; 3]) + Send + Sync + 'static,
    ) -> Self {
        let eval = move |x: &Taylor3, y: &Taylor3, z: &Taylor3| {
            let (v, g) = f(x.value(), y.value(), z.value());
            let dx = x.add_scalar(-x.value());
            let dy = y.add_scalar(-y.value());
            let dz = z.add_scalar(-z.value());
            (&(&dx.scale(g[0]) + &dy.scale(g[1])) + &dz.scale(g[2])).add_scalar(v)
        };
        Self {
            name: name.into(),
            max_order: Some(1),
            eval: Arc::new(eval),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn max_order(&self) -> Option<usize> {
        self.max_order
    }

    pub fn taylor(&self, x: &Taylor3, y: &Taylor3, z: &Taylor3) -> Taylor3 {
        (self.eval)(x, y, z)
    }

    pub fn value(&self, x: f64, y: f64, z: f64) -> f64 {
        self.taylor(
            &Taylor3::constant(0, x),
            &Taylor3::constant(0, y),
            &Taylor3::constant(0, z),
        )
        .value()
    }
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ScalarField({})", self.name)
    }
}

/// Frame vector fields acting on coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FrameField {
    X,
    XPerp,
    V,
}

impl FrameField {
    fn label(self) -> &'static str {
        match self {
            FrameField::X => "X",
            FrameField::XPerp => "Xperp",
            FrameField::V => "V",
        }
    }
}

/// Quantities derived from the chart.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChartQuantity {
    Curvature,
    KPlus,
    KMinus,
}

enum Node {
    Const(Complex64),
    Field(ScalarField),
    Chart(ChartQuantity),
    Sum(Vec<Coef>),
    Product(Vec<Coef>),
    Deriv(FrameField, Coef),
}

/// Complex coefficient function of (x, y, z), stored as an expression tree.
#[derive(Clone)]
pub struct Coef(Arc<Node>);

impl Coef {
    fn node(n: Node) -> Self {
        Coef(Arc::new(n))
    }

    pub fn constant(c: Complex64) -> Self {
        Self::node(Node::Const(c))
    }

    pub fn real(v: f64) -> Self {
        Self::constant(Complex64::new(v, 0.0))
    }

    pub fn zero() -> Self {
        Self::real(0.0)
    }

    pub fn one() -> Self {
        Self::real(1.0)
    }

    pub fn field(f: ScalarField) -> Self {
        Self::node(Node::Field(f))
    }

    pub fn chart(q: ChartQuantity) -> Self {
        Self::node(Node::Chart(q))
    }

    pub fn k_minus() -> Self {
        Self::chart(ChartQuantity::KMinus)
    }

    pub fn k_plus() -> Self {
        Self::chart(ChartQuantity::KPlus)
    }

    pub fn as_const(&self) -> Option<Complex64> {
        match &*self.0 {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(Complex64::new(0.0, 0.0))
    }

    pub fn add(&self, other: &Coef) -> Coef {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if let (Some(a), Some(b)) = (self.as_const(), other.as_const()) {
            return Coef::constant(a + b);
        }
        let mut parts = Vec::new();
        for c in [self, other] {
            match &*c.0 {
                Node::Sum(inner) => parts.extend(inner.iter().cloned()),
                _ => parts.push(c.clone()),
            }
        }
        Coef::node(Node::Sum(parts))
    }

    pub fn sub(&self, other: &Coef) -> Coef {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &Coef) -> Coef {
        if self.is_zero() || other.is_zero() {
            return Coef::zero();
        }
        match (self.as_const(), other.as_const()) {
            (Some(a), Some(b)) => return Coef::constant(a * b),
            (Some(a), None) if a == Complex64::new(1.0, 0.0) => return other.clone(),
            (None, Some(b)) if b == Complex64::new(1.0, 0.0) => return self.clone(),
            _ => {}
        }
        let mut constant = Complex64::new(1.0, 0.0);
        let mut parts = Vec::new();
        for c in [self, other] {
            let items: Vec<Coef> = match &*c.0 {
                Node::Product(inner) => inner.clone(),
                _ => vec![c.clone()],
            };
            for item in items {
                match item.as_const() {
                    Some(k) => constant *= k,
                    None => parts.push(item),
                }
            }
        }
        if constant == Complex64::new(0.0, 0.0) {
            return Coef::zero();
        }
        if constant != Complex64::new(1.0, 0.0) {
            parts.insert(0, Coef::constant(constant));
        }
        if parts.len() == 1 {
            return parts.pop().unwrap();
        }
        Coef::node(Node::Product(parts))
    }

    pub fn scale(&self, factor: Complex64) -> Coef {
        self.mul(&Coef::constant(factor))
    }

    /// Apply a frame vector field.
    pub fn deriv(&self, field: FrameField) -> Coef {
        if self.as_const().is_some() {
            return Coef::zero();
        }
        Coef::node(Node::Deriv(field, self.clone()))
    }

    /// Largest derivative order each named field must supply, given that
    /// `extra` further derivatives will be taken of the whole expression.
    pub fn check_orders(&self, extra: usize) -> Result<()> {
        match &*self.0 {
            Node::Const(_) | Node::Chart(_) => Ok(()),
            Node::Field(f) => match f.max_order {
                Some(m) if extra > m => Err(LabError::MissingDerivative {
                    name: f.name.clone(),
                    available: m,
                    required: extra,
                }),
                _ => Ok(()),
            },
            Node::Sum(parts) | Node::Product(parts) => {
                parts.iter().try_for_each(|p| p.check_orders(extra))
            }
            Node::Deriv(_, inner) => inner.check_orders(extra + 1),
        }
    }

    /// Value at a base point.
    pub fn value(&self, chart: &ConformalChart, x: f64, y: f64, z: f64) -> Result<Complex64> {
        let mut ctx = EvalContext::new(chart, x, y, z);
        Ok(ctx.eval(self, 0)?.value())
    }

    /// For a product led by a negative real constant, the product with that constant negated.
    fn negated_product(&self) -> Option<Coef> {
        let Node::Product(parts) = &*self.0 else {
            return None;
        };
        let Node::Const(c) = &*parts.first()?.0 else {
            return None;
        };
        if c.im != 0.0 || c.re >= 0.0 {
            return None;
        }
        let mut rest: Vec<Coef> = parts[1..].to_vec();
        if c.re != -1.0 {
            rest.insert(0, Coef::constant(-*c));
        }
        Some(if rest.len() == 1 {
            rest.pop().unwrap()
        } else {
            Coef(Arc::new(Node::Product(rest)))
        })
    }

    fn fmt_inner(&self, f: &mut fmt::Formatter<'_>, nested: bool) -> fmt::Result {
        match &*self.0 {
            Node::Const(c) => write_complex(f, *c),
            Node::Field(s) => write!(f, "{}", s.name),
            Node::Chart(ChartQuantity::Curvature) => write!(f, "K"),
            Node::Chart(ChartQuantity::KPlus) => write!(f, "K+"),
            Node::Chart(ChartQuantity::KMinus) => write!(f, "K-"),
            Node::Sum(parts) => {
                if nested {
                    write!(f, "(")?;
                }
                for (i, p) in parts.iter().enumerate() {
                    match (i, p.negated_product()) {
                        (0, _) => p.fmt_inner(f, true)?,
                        (_, Some(neg)) => {
                            write!(f, " - ")?;
                            neg.fmt_inner(f, true)?;
                        }
                        (_, None) => {
                            write!(f, " + ")?;
                            p.fmt_inner(f, true)?;
                        }
                    }
                }
                if nested {
                    write!(f, ")")?;
                }
                Ok(())
            }
            Node::Product(parts) => {
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    p.fmt_inner(f, true)?;
                }
                Ok(())
            }
            Node::Deriv(field, inner) => {
                write!(f, "{}(", field.label())?;
                inner.fmt_inner(f, false)?;
                write!(f, ")")
            }
        }
    }
}

fn write_complex(f: &mut fmt::Formatter<'_>, c: Complex64) -> fmt::Result {
    if c.im == 0.0 {
        write!(f, "{}", c.re)
    } else if c.re == 0.0 {
        write!(f, "{}i", c.im)
    } else {
        write!(f, "({}{:+}i)", c.re, c.im)
    }
}

impl fmt::Display for Coef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_inner(f, false)
    }
}

impl fmt::Debug for Coef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Coef({self})")
    }
}

/// Taylor coefficients of the frame vector fields in the coordinate basis.
struct FrameCoeffs {
    x: [Taylor3<Complex64>; 3],
    xperp: [Taylor3<Complex64>; 3],
}

/// Evaluation of coefficient trees at one base point, with memoisation.
pub struct EvalContext<'a> {
    chart: &'a ConformalChart,
    point: [f64; 3],
    frames: HashMap<usize, FrameCoeffs>,
    memo: HashMap<(usize, usize), (Coef, Taylor3<Complex64>)>,
}

impl<'a> EvalContext<'a> {
    pub fn new(chart: &'a ConformalChart, x: f64, y: f64, z: f64) -> Self {
        Self {
            chart,
            point: [x, y, z],
            frames: HashMap::new(),
            memo: HashMap::new(),
        }
    }

    fn variables(&self, order: usize) -> [Taylor3; 3] {
        std::array::from_fn(|axis| Taylor3::variable(order, axis, self.point[axis]))
    }

    fn frame(&mut self, order: usize) -> &FrameCoeffs {
        if !self.frames.contains_key(&order) {
            let [xv, yv, zv] = self.variables(order + 1);
            let lam = self.chart.lambda_taylor(&xv, &yv);
            let lx = lam.partial(0);
            let ly = lam.partial(1);
            let lam = lam.truncate(order);
            let zt = zv.truncate(order);
            let (s, c) = (zt.sin(), zt.cos());
            let w = (-&lam).exp();
            let frame = FrameCoeffs {
                x: [
                    (&w * &c).to_complex(),
                    (&w * &s).to_complex(),
                    (&w * &(&(&ly * &c) - &(&lx * &s))).to_complex(),
                ],
                xperp: [
                    (&w * &s).to_complex(),
                    (-&(&w * &c)).to_complex(),
                    (&w * &(&(&lx * &c) + &(&ly * &s))).to_complex(),
                ],
            };
            self.frames.insert(order, frame);
        }
        &self.frames[&order]
    }

    /// Taylor expansion of `coef` to `order` around the base point.
    pub fn eval(&mut self, coef: &Coef, order: usize) -> Result<Taylor3<Complex64>> {
        let key = (Arc::as_ptr(&coef.0) as *const () as usize, order);
        if let Some((_, t)) = self.memo.get(&key) {
            return Ok(t.clone());
        }
        let out = match &*coef.0 {
            Node::Const(c) => Taylor3::constant(order, *c),
            Node::Field(f) => {
                if let Some(m) = f.max_order {
                    if order > m {
                        return Err(LabError::MissingDerivative {
                            name: f.name.clone(),
                            available: m,
                            required: order,
                        });
                    }
                }
                let [x, y, z] = self.variables(order);
                f.taylor(&x, &y, &z).to_complex()
            }
            Node::Chart(q) => {
                let k = self.chart.curvature_taylor(self.point[0], self.point[1], order);
                let t = match q {
                    ChartQuantity::Curvature => k,
                    ChartQuantity::KPlus => k.add_scalar(1.0).scale(0.5),
                    ChartQuantity::KMinus => (-&k).add_scalar(1.0).scale(0.5),
                };
                t.to_complex()
            }
            Node::Sum(parts) => {
                let mut acc = Taylor3::zero(order);
                for p in parts {
                    acc = &acc + &self.eval(p, order)?;
                }
                acc
            }
            Node::Product(parts) => {
                let mut acc = Taylor3::constant(order, Complex64::new(1.0, 0.0));
                for p in parts {
                    acc = &acc * &self.eval(p, order)?;
                }
                acc
            }
            Node::Deriv(field, inner) => {
                let t = self.eval(inner, order + 1)?;
                let partials = [t.partial(0), t.partial(1), t.partial(2)];
                match field {
                    FrameField::V => partials[2].clone(),
                    FrameField::X | FrameField::XPerp => {
                        let frame = self.frame(order);
                        let comps = if *field == FrameField::X { &frame.x } else { &frame.xperp };
                        let mut acc = Taylor3::zero(order);
                        for axis in 0..3 {
                            acc = &acc + &(&comps[axis] * &partials[axis]);
                        }
                        acc
                    }
                }
            }
        };
        self.memo.insert(key, (coef.clone(), out.clone()));
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sin_z() -> ScalarField {
        ScalarField::new("sin z", |_, _, z| z.sin())
    }

    #[test]
    fn frame_derivatives_on_flat_chart() {
        let flat = ConformalChart::Flat;
        let a = Coef::field(ScalarField::new("a", |x, y, z| &(x * y) * &z.cos()));
        let (x, y, z) = (0.4, -0.3, 0.9);
        let xa = a.deriv(FrameField::X).value(&flat, x, y, z).unwrap().re;
        let expect = z.cos() * (y * z.cos()) + z.sin() * (x * z.cos());
        assert!((xa - expect).abs() < 1e-14);
        let va = a.deriv(FrameField::V).value(&flat, x, y, z).unwrap().re;
        assert!((va + x * y * z.sin()).abs() < 1e-14);
        let sz = Coef::field(sin_z());
        assert_eq!(sz.deriv(FrameField::XPerp).value(&flat, x, y, z).unwrap().re, 0.0);
    }

    #[test]
    fn second_derivative_commutator_on_flat_chart() {
        // [V, X⊥] = X on the flat torus
        let flat = ConformalChart::Flat;
        let a = Coef::field(ScalarField::new("a", |x, y, _| &x.sin() * &y.exp()));
        let vxp = a.deriv(FrameField::XPerp).deriv(FrameField::V);
        let xpv = a.deriv(FrameField::V).deriv(FrameField::XPerp);
        let xa = a.deriv(FrameField::X);
        let p = (0.3, 0.2, 1.3);
        let lhs = vxp.value(&flat, p.0, p.1, p.2).unwrap() - xpv.value(&flat, p.0, p.1, p.2).unwrap();
        let rhs = xa.value(&flat, p.0, p.1, p.2).unwrap();
        assert!((lhs - rhs).norm() < 1e-13);
    }

    #[test]
    fn gradient_only_fields_reject_second_derivatives() {
        let g = ScalarField::from_gradient("g", |x, _, _| (x * x, [2.0 * x, 0.0, 0.0]));
        let c = Coef::field(g);
        assert!(c.deriv(FrameField::X).check_orders(0).is_ok());
        let err = c.deriv(FrameField::X).deriv(FrameField::X).check_orders(0).unwrap_err();
        assert!(matches!(err, LabError::MissingDerivative { required: 2, .. }));
    }

    #[test]
    fn constant_folding() {
        let c = Coef::real(0.25).mul(&Coef::constant(Complex64::new(0.0, -4.0)));
        assert_eq!(c.as_const(), Some(Complex64::new(0.0, -1.0)));
        assert!(Coef::one().deriv(FrameField::X).is_zero());
        let k = Coef::k_minus().scale(Complex64::new(2.0, 0.0));
        assert_eq!(format!("{k}"), "2*K-");
    }
}
