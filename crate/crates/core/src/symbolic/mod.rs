//! Term algebra for symbols polynomial in (H₂/H₁, H₃/H₁), bracket rewriting in
//! the generators (H₁, Z, Z̄), the cohomological primitive and the
//! normal-form deformations 𝐇₁ and 𝐚.

mod coef;
mod normal_form;
mod orders;
mod poly;
mod zsym;

pub use coef::{ChartQuantity, Coef, EvalContext, FrameField, ScalarField};
pub use normal_form::{
    build_h1_deformation, build_symbol_deformation, point_with_frame_values, solve_cohomological, symbol_defect,
    H1Deformation,
};
pub use orders::{default_test_symbol, sample_orders, OrderSample};
pub use poly::{bracket_poly, PolyKey, PolySymbol};
pub use zsym::{bracket_z, ComplexTerm, ZKey, ZSymbol, H1_FLOOR};
