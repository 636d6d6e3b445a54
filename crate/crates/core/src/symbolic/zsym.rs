use num_complex::Complex64;
use std::collections::BTreeMap;
use std::fmt;

use super::coef::{Coef, EvalContext, FrameField};
use crate::error::{LabError, Result};
use crate::phasespace::{eval_frame, ConformalChart, PhaseJet, PhasePoint};

/// Evaluators refuse points with |H₁| below this threshold.
pub const H1_FLOOR: f64 = 1e-8;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// One monomial coeff(x,y,z)·H₁^h1pow·Z^k·Z̄^l.
#[derive(Clone, Debug)]
pub struct ComplexTerm {
    pub k: u32,
    pub l: u32,
    pub coeff: Coef,
    pub h1pow: i32,
}

impl ComplexTerm {
    pub fn new(k: u32, l: u32, coeff: Coef, h1pow: i32) -> Self {
        Self { k, l, coeff, h1pow }
    }

    pub fn to_symbol(&self) -> ZSymbol {
        let mut s = ZSymbol::zero();
        s.add_term(self.h1pow, self.k, self.l, self.coeff.clone());
        s
    }
}

/// Key (w, k, l) of the monomial H₁^w Z^k Z̄^l.
pub type ZKey = (i32, u32, u32);

/// Finite sum of monomials c(x,y,z)·H₁^w·Z^k·Z̄^l, Z = H₂ + iH₃.
#[derive(Clone, Debug, Default)]
pub struct ZSymbol {
    terms: BTreeMap<ZKey, Coef>,
}

impl ZSymbol {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(w: i32, k: u32, l: u32, coeff: Coef) -> Self {
        let mut s = Self::zero();
        s.add_term(w, k, l, coeff);
        s
    }

    /// |Z|² = Z Z̄.
    pub fn z_norm_sq() -> Self {
        Self::monomial(0, 1, 1, Coef::one())
    }

    pub fn h1() -> Self {
        Self::monomial(1, 0, 0, Coef::one())
    }

    pub fn add_term(&mut self, w: i32, k: u32, l: u32, coeff: Coef) {
        if coeff.is_zero() {
            return;
        }
        let merged = match self.terms.get(&(w, k, l)) {
            Some(old) => old.add(&coeff),
            None => coeff,
        };
        if merged.is_zero() {
            self.terms.remove(&(w, k, l));
        } else {
            self.terms.insert((w, k, l), merged);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ZKey, &Coef)> {
        self.terms.iter()
    }

    pub fn get(&self, w: i32, k: u32, l: u32) -> Option<&Coef> {
        self.terms.get(&(w, k, l))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &ZSymbol) -> ZSymbol {
        let mut out = self.clone();
        for (&(w, k, l), c) in &other.terms {
            out.add_term(w, k, l, c.clone());
        }
        out
    }

    pub fn scale(&self, factor: Complex64) -> ZSymbol {
        let mut out = ZSymbol::zero();
        for (&(w, k, l), c) in &self.terms {
            out.add_term(w, k, l, c.scale(factor));
        }
        out
    }

    pub fn sub(&self, other: &ZSymbol) -> ZSymbol {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &ZSymbol) -> ZSymbol {
        let mut out = ZSymbol::zero();
        for (&(w1, k1, l1), c1) in &self.terms {
            for (&(w2, k2, l2), c2) in &other.terms {
                out.add_term(w1 + w2, k1 + k2, l1 + l2, c1.mul(c2));
            }
        }
        out
    }

    /// Keep only the monomials for which `keep(w, k, l)` holds.
    pub fn filter(&self, keep: impl Fn(i32, u32, u32) -> bool) -> ZSymbol {
        ZSymbol {
            terms: self
                .terms
                .iter()
                .filter(|(&(w, k, l), _)| keep(w, k, l))
                .map(|(key, c)| (*key, c.clone()))
                .collect(),
        }
    }

    pub fn check_orders(&self, extra: usize) -> Result<()> {
        self.terms.values().try_for_each(|c| c.check_orders(extra))
    }

    /// Numeric value at a phase-space point.
    pub fn eval(&self, chart: &ConformalChart, pt: &PhasePoint) -> Result<Complex64> {
        Ok(self.eval_jet_order(chart, pt, false)?.value)
    }

    /// Value and exact 6-gradient at a phase-space point.
    pub fn eval_jet(&self, chart: &ConformalChart, pt: &PhasePoint) -> Result<PhaseJet<Complex64>> {
        self.eval_jet_order(chart, pt, true)
    }

    fn eval_jet_order(&self, chart: &ConformalChart, pt: &PhasePoint, with_grad: bool) -> Result<PhaseJet<Complex64>> {
        let frame = eval_frame(chart, pt);
        if frame.h1.value.abs() < H1_FLOOR {
            return Err(LabError::DegenerateRegion(frame.h1.value.abs()));
        }
        let h1 = frame.h1.to_complex();
        let z = frame.z();
        let zb = frame.zbar();
        let order = usize::from(with_grad);
        let mut ctx = EvalContext::new(chart, pt.x, pt.y, pt.z);
        let mut acc = PhaseJet::constant(Complex64::new(0.0, 0.0));
        for (&(w, k, l), c) in &self.terms {
            let t = ctx.eval(c, order)?;
            let cj = if with_grad {
                PhaseJet::new(
                    t.value(),
                    [
                        t.derivative(1, 0, 0),
                        t.derivative(0, 1, 0),
                        t.derivative(0, 0, 1),
                        Complex64::new(0.0, 0.0),
                        Complex64::new(0.0, 0.0),
                        Complex64::new(0.0, 0.0),
                    ],
                )
            } else {
                PhaseJet::constant(t.value())
            };
            acc = acc + cj * h1.powi(w) * z.powi(k as i32) * zb.powi(l as i32);
        }
        Ok(acc)
    }
}

/// Generators of the bracket algebra besides the base coefficients.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Gen {
    H1,
    Z,
    Zbar,
}

/// {g, g'} for generators, as a list of (w, k, l, coefficient).
fn generator_bracket(a: Gen, b: Gen) -> Vec<(i32, u32, u32, Coef)> {
    let kp = Coef::k_plus();
    let km = Coef::k_minus();
    match (a, b) {
        (Gen::H1, Gen::Z) => vec![(0, 1, 0, kp.scale(I)), (0, 0, 1, km.scale(I))],
        (Gen::H1, Gen::Zbar) => vec![(0, 1, 0, km.scale(-I)), (0, 0, 1, kp.scale(-I))],
        (Gen::Z, Gen::Zbar) => vec![(1, 0, 0, Coef::constant(2.0 * I))],
        (x, y) if x == y => vec![],
        (x, y) => generator_bracket(y, x)
            .into_iter()
            .map(|(w, k, l, c)| (w, k, l, c.scale(Complex64::new(-1.0, 0.0))))
            .collect(),
    }
}

/// {g, c} for a generator and a base coefficient.
fn generator_on_coef(g: Gen, c: &Coef) -> Coef {
    match g {
        Gen::H1 => c.deriv(FrameField::X),
        Gen::Z => c.deriv(FrameField::XPerp).add(&c.deriv(FrameField::V).scale(I)),
        Gen::Zbar => c.deriv(FrameField::XPerp).sub(&c.deriv(FrameField::V).scale(I)),
    }
}

/// Partial derivatives of H₁^w Z^k Z̄^l with respect to each generator.
fn generator_partials(w: i32, k: u32, l: u32) -> Vec<(Gen, f64, ZKey)> {
    let mut out = Vec::new();
    if w != 0 {
        out.push((Gen::H1, w as f64, (w - 1, k, l)));
    }
    if k > 0 {
        out.push((Gen::Z, k as f64, (w, k - 1, l)));
    }
    if l > 0 {
        out.push((Gen::Zbar, l as f64, (w, k, l - 1)));
    }
    out
}

/// Poisson bracket of two Z-symbols, expanded with the generator relations
/// {H₁,Z} = iK₊Z + iK₋Z̄, {H₁,Z̄} = −iK₋Z − iK₊Z̄, {Z,Z̄} = 2iH₁ and the
/// frame derivative rules for base coefficients.
pub fn bracket_z(a: &ZSymbol, b: &ZSymbol) -> ZSymbol {
    let mut out = ZSymbol::zero();
    for (&(w1, k1, l1), c1) in &a.terms {
        let pa = generator_partials(w1, k1, l1);
        for (&(w2, k2, l2), c2) in &b.terms {
            let pb = generator_partials(w2, k2, l2);
            let cc = c1.mul(c2);
            // c1 c2 {m_A, m_B}
            for &(ga, ma, (wa, ka, la)) in &pa {
                for &(gb, mb, (wb, kb, lb)) in &pb {
                    for (w, k, l, g) in generator_bracket(ga, gb) {
                        out.add_term(
                            wa + wb + w,
                            ka + kb + k,
                            la + lb + l,
                            cc.mul(&g).scale(Complex64::new(ma * mb, 0.0)),
                        );
                    }
                }
            }
            // c1 m_B {m_A, c2}
            for &(ga, ma, (wa, ka, la)) in &pa {
                let d = generator_on_coef(ga, c2);
                out.add_term(
                    wa + w2,
                    ka + k2,
                    la + l2,
                    c1.mul(&d).scale(Complex64::new(ma, 0.0)),
                );
            }
            // c2 m_A {c1, m_B} = −c2 m_A {m_B, c1}
            for &(gb, mb, (wb, kb, lb)) in &pb {
                let d = generator_on_coef(gb, c1);
                out.add_term(
                    w1 + wb,
                    k1 + kb,
                    l1 + lb,
                    c2.mul(&d).scale(Complex64::new(-mb, 0.0)),
                );
            }
        }
    }
    out
}

impl fmt::Display for ZSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return writeln!(f, "0");
        }
        for (&(w, k, l), c) in &self.terms {
            writeln!(f, "H1^{w} Z^{k} Zbar^{l} : {c}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z_norm_commutes_with_resonant_monomials() {
        let flat = ConformalChart::Flat;
        let pt = PhasePoint::new(0.2, 0.1, 0.7, 3.0, -1.0, 0.5);
        let zz = ZSymbol::z_norm_sq();
        let b = bracket_z(&zz, &ZSymbol::monomial(0, 2, 2, Coef::one()));
        assert!(b.eval(&flat, &pt).unwrap().norm() < 1e-12);
    }

    #[test]
    fn h1_floor_is_enforced() {
        let flat = ConformalChart::Flat;
        let pt = PhasePoint::new(0.0, 0.0, std::f64::consts::FRAC_PI_2, 1.0, 0.0, 0.0);
        let err = ZSymbol::h1().eval(&flat, &pt).unwrap_err();
        assert!(matches!(err, LabError::DegenerateRegion(_)));
    }
}
