//! Circle Weyl quantization, the lifted measure in E = hH₁, level-mass
//! diagnostics and invariance defects on the flat torus.

mod invariance;
mod marginal;
mod weyl;

pub use invariance::{
    flat_setup, invariance_defect, perturbed_setup, Component, DegenerateSetup, TestFunction, DEGENERACY_TOLERANCE,
};
pub use marginal::{
    e_marginal, e_marginal_coefficients, energy_variable, fourth_root_floor, level_mass, lifted_pairing,
    lifted_pairing_coefficients, lifted_symbol, subcritical_mass, subcritical_mass_with_scale, EMarginal,
    LevelReport, LiftedCutoffs, LiftedPairing, SubcriticalReport, E_BINS, E_RANGE_FACTOR, SUBCRITICAL_MIN_N,
};
pub use weyl::{weyl_circle, weyl_pairing, CircleSymbol, WeylMatrix, SYMBOL_TAIL_TOLERANCE};
