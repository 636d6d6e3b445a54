//! Frame Hamiltonians of the isothermal frame, their exact gradients,
//! Poisson brackets, cutoff families and cone membership.

mod chart;
mod cutoff;
mod frame;
mod jet;

pub use chart::{ConformalChart, DerivativeCheck};
pub use cutoff::{chi, chi_derivative, tilde_chi, CutoffFamily, CutoffInput, CutoffKind};
pub use frame::{base_jets, eval_frame, in_cone, poisson_bracket, FrameJets, PhasePoint};
pub use jet::{bracket_jets, PhaseJet, ETA, X, XI, Y, Z, ZETA};
