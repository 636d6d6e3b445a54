use num_complex::Complex64;

use super::coef::{Coef, FrameField, ScalarField};
use super::poly::PolySymbol;
use super::zsym::{bracket_z, ComplexTerm, ZSymbol};
use crate::error::{LabError, Result};
use crate::phasespace::{eval_frame, ConformalChart, PhasePoint};

/// Primitive of the cohomological equation {|Z|², G} = H₁·T for a
/// non-resonant monomial T = c·H₁^w·Z^k·Z̄^l (k ≠ l), up to terms carrying
/// derivatives of c or of H₁^w: G = c·H₁^w·Z^k·Z̄^l / (2i(l − k)).
pub fn solve_cohomological(term: &ComplexTerm) -> Result<ComplexTerm> {
    if term.k == term.l {
        return Err(LabError::ResonantTerm { k: term.k, l: term.l });
    }
    let denom = Complex64::new(0.0, 2.0 * (term.l as f64 - term.k as f64));
    Ok(ComplexTerm::new(
        term.k,
        term.l,
        term.coeff.scale(Complex64::new(1.0, 0.0) / denom),
        term.h1pow,
    ))
}

/// The normal-form deformation 𝐇₁ = H₁(1 + P₂ + P₃).
#[derive(Clone, Debug)]
pub struct H1Deformation {
    pub chart: ConformalChart,
    /// P₂ = (K₋/2)((H₂/H₁)² − (H₃/H₁)²)
    pub p2: PolySymbol,
    /// H₁·P₃, the degree-3 correction in Z-form
    pub h1_p3: ZSymbol,
    /// 𝐇₁ in Z-form
    pub full_z: ZSymbol,
}

impl H1Deformation {
    /// 𝐇₁ in the (H₂/H₁, H₃/H₁) notation.
    pub fn full(&self) -> PolySymbol {
        PolySymbol::from_z(&self.full_z)
    }

    /// {|Z|², 𝐇₁}, whose expansion starts at degree 4 in Z.
    pub fn residual(&self) -> ZSymbol {
        bracket_z(&ZSymbol::z_norm_sq(), &self.full_z)
    }
}

/// Build 𝐇₁ = H₁(1 + P₂ + P₃), P₃ obtained by solving the cohomological
/// equation termwise on the degree-3 part of {|Z|², H₁(1 + P₂)}.
pub fn build_h1_deformation(chart: &ConformalChart) -> Result<H1Deformation> {
    let half_km = Coef::k_minus().scale(Complex64::new(0.5, 0.0));
    let mut p2 = PolySymbol::zero();
    p2.add_term(0, 2, 0, half_km.clone());
    p2.add_term(0, 0, 2, half_km.scale(Complex64::new(-1.0, 0.0)));
    let h1 = PolySymbol::term(1, 0, 0, Coef::one());
    let h1_p2 = h1.mul(&p2);
    let base = h1.add(&h1_p2).to_z();

    let remainder = bracket_z(&ZSymbol::z_norm_sq(), &base);
    let mut h1_p3 = ZSymbol::zero();
    for (&(w, k, l), c) in remainder.terms() {
        if k + l != 3 {
            continue;
        }
        // cancel c·H₁^w Z^k Z̄^l: solve with input −c·H₁^{w−1} Z^k Z̄^l
        let input = ComplexTerm::new(k, l, c.scale(Complex64::new(-1.0, 0.0)), w - 1);
        let g = solve_cohomological(&input)?;
        h1_p3.add_term(g.h1pow, g.k, g.l, g.coeff);
    }
    let full_z = base.add(&h1_p3);
    full_z.check_orders(1)?;
    Ok(H1Deformation {
        chart: *chart,
        p2,
        h1_p3,
        full_z,
    })
}

/// The deformed symbol 𝐚 = Σ_{|α|≤2} a_α (H₂/H₁)^α₂ (H₃/H₁)^α₃ of a base function a.
pub fn build_symbol_deformation(a: &ScalarField, _chart: &ConformalChart) -> Result<PolySymbol> {
    let base = Coef::field(a.clone());
    let v = |c: &Coef| c.deriv(FrameField::V);
    let xp = |c: &Coef| c.deriv(FrameField::XPerp);
    let second_diff = xp(&xp(&base)).sub(&v(&v(&base)));
    let mixed = xp(&v(&base)).add(&v(&xp(&base)));
    let mut out = PolySymbol::zero();
    out.add_term(0, 0, 0, base.clone());
    out.add_term(0, 1, 0, v(&base).scale(Complex64::new(-1.0, 0.0)));
    out.add_term(0, 0, 1, xp(&base));
    out.add_term(0, 2, 0, second_diff.scale(Complex64::new(-0.25, 0.0)));
    out.add_term(0, 0, 2, second_diff.scale(Complex64::new(0.25, 0.0)));
    out.add_term(0, 1, 1, mixed.scale(Complex64::new(-0.5, 0.0)));
    out.check_orders(0)?;
    Ok(out)
}

/// {|Z|², 𝐚} − (|Z|²/H₁)·X(a): the remainder left by the deformed symbol.
pub fn symbol_defect(a: &ScalarField, chart: &ConformalChart) -> Result<ZSymbol> {
    let deformed = build_symbol_deformation(a, chart)?;
    let bracket = bracket_z(&ZSymbol::z_norm_sq(), &deformed.to_z());
    let xa = Coef::field(a.clone()).deriv(FrameField::X);
    Ok(bracket.sub(&ZSymbol::monomial(-1, 1, 1, xa)))
}

/// Phase point above (x, y, z) where (H₁, H₂, H₃) take the requested values.
pub fn point_with_frame_values(chart: &ConformalChart, x: f64, y: f64, z: f64, target: [f64; 3]) -> PhasePoint {
    // the frame values are linear in (ξ, η, ζ): solve the 3×3 system column by column
    let probe = |p: [f64; 3]| eval_frame(chart, &PhasePoint::new(x, y, z, p[0], p[1], p[2])).values();
    let cols = [probe([1.0, 0.0, 0.0]), probe([0.0, 1.0, 0.0]), probe([0.0, 0.0, 1.0])];
    let m = |r: usize, c: usize| cols[c][r];
    let det = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
        + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    let solve_col = |c: usize| {
        let mut mm = [[0.0; 3]; 3];
        for r in 0..3 {
            for cc in 0..3 {
                mm[r][cc] = if cc == c { target[r] } else { m(r, cc) };
            }
        }
        (mm[0][0] * (mm[1][1] * mm[2][2] - mm[1][2] * mm[2][1]) - mm[0][1] * (mm[1][0] * mm[2][2] - mm[1][2] * mm[2][0])
            + mm[0][2] * (mm[1][0] * mm[2][1] - mm[1][1] * mm[2][0]))
            / det
    };
    PhasePoint::new(x, y, z, solve_col(0), solve_col(1), solve_col(2))
}
