use num_complex::Complex64;
use std::collections::BTreeMap;
use std::fmt;

use super::coef::Coef;
use super::zsym::{bracket_z, ZSymbol};
use crate::error::Result;
use crate::phasespace::{ConformalChart, PhasePoint};

/// Key (w, α₂, α₃) of the term H₁^w (H₂/H₁)^α₂ (H₃/H₁)^α₃.
pub type PolyKey = (i32, u32, u32);

/// Finite sum Σ a_α(x,y,z) H₁^w (H₂/H₁)^α₂ (H₃/H₁)^α₃.
#[derive(Clone, Debug, Default)]
pub struct PolySymbol {
    terms: BTreeMap<PolyKey, Coef>,
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Coefficients of (a·Z + b·Z̄)^n as a map power-of-Z → coefficient.
fn expand_binomial(n: u32, a: Complex64, b: Complex64) -> Vec<(u32, Complex64)> {
    (0..=n)
        .map(|j| (j, binomial(n, j) * a.powu(j) * b.powu(n - j)))
        .collect()
}

impl PolySymbol {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn term(w: i32, a2: u32, a3: u32, coeff: Coef) -> Self {
        let mut s = Self::zero();
        s.add_term(w, a2, a3, coeff);
        s
    }

    pub fn add_term(&mut self, w: i32, a2: u32, a3: u32, coeff: Coef) {
        if coeff.is_zero() {
            return;
        }
        let merged = match self.terms.get(&(w, a2, a3)) {
            Some(old) => old.add(&coeff),
            None => coeff,
        };
        if merged.is_zero() {
            self.terms.remove(&(w, a2, a3));
        } else {
            self.terms.insert((w, a2, a3), merged);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PolyKey, &Coef)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, w: i32, a2: u32, a3: u32) -> Option<&Coef> {
        self.terms.get(&(w, a2, a3))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &PolySymbol) -> PolySymbol {
        let mut out = self.clone();
        for (&(w, a, b), c) in &other.terms {
            out.add_term(w, a, b, c.clone());
        }
        out
    }

    pub fn mul(&self, other: &PolySymbol) -> PolySymbol {
        let mut out = PolySymbol::zero();
        for (&(w1, a1, b1), c1) in &self.terms {
            for (&(w2, a2, b2), c2) in &other.terms {
                out.add_term(w1 + w2, a1 + a2, b1 + b2, c1.mul(c2));
            }
        }
        out
    }

    /// Rewrite in the complex generators: H₂ = (Z + Z̄)/2, H₃ = (Z − Z̄)/(2i).
    pub fn to_z(&self) -> ZSymbol {
        let half = Complex64::new(0.5, 0.0);
        let inv_2i = Complex64::new(0.0, -0.5);
        let mut out = ZSymbol::zero();
        for (&(w, a2, a3), c) in &self.terms {
            let p2 = expand_binomial(a2, half, half);
            let p3 = expand_binomial(a3, inv_2i, -inv_2i);
            for &(j2, c2) in &p2 {
                for &(j3, c3) in &p3 {
                    let k = j2 + j3;
                    let l = (a2 - j2) + (a3 - j3);
                    out.add_term(w - (a2 + a3) as i32, k, l, c.scale(c2 * c3));
                }
            }
        }
        out
    }

    /// Rewrite a Z-symbol with Z/H₁ = u + iv, u = H₂/H₁, v = H₃/H₁.
    pub fn from_z(z: &ZSymbol) -> PolySymbol {
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let mut out = PolySymbol::zero();
        for (&(w, k, l), c) in z.terms() {
            // (u + iv)^k (u − iv)^l
            let pk = expand_binomial(k, one, i);
            let pl = expand_binomial(l, one, -i);
            for &(ju, cu) in &pk {
                for &(lu, cl) in &pl {
                    let a2 = ju + lu;
                    let a3 = (k - ju) + (l - lu);
                    out.add_term(w + (k + l) as i32, a2, a3, c.scale(cu * cl));
                }
            }
        }
        out
    }

    pub fn eval(&self, chart: &ConformalChart, pt: &PhasePoint) -> Result<Complex64> {
        self.to_z().eval(chart, pt)
    }

    pub fn check_orders(&self, extra: usize) -> Result<()> {
        self.terms.values().try_for_each(|c| c.check_orders(extra))
    }
}

/// Poisson bracket of two symbols of the class, computed in the generator algebra.
pub fn bracket_poly(a: &PolySymbol, b: &PolySymbol) -> Result<PolySymbol> {
    let out = PolySymbol::from_z(&bracket_z(&a.to_z(), &b.to_z()));
    out.check_orders(0)?;
    Ok(out)
}

impl fmt::Display for PolySymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return writeln!(f, "0");
        }
        for (&(w, a2, a3), c) in &self.terms {
            let mut factors = Vec::new();
            if w != 0 {
                factors.push(format!("H1^{w}"));
            }
            if a2 != 0 {
                factors.push(format!("(H2/H1)^{a2}"));
            }
            if a3 != 0 {
                factors.push(format!("(H3/H1)^{a3}"));
            }
            if factors.is_empty() {
                factors.push("1".to_string());
            }
            writeln!(f, "{} : {}", factors.join(" "), c)?;
        }
        Ok(())
    }
}
