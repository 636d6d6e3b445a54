//! Numerical and symbolic laboratory for perturbed sub-Riemannian contact
//! Laplacians on the unit tangent bundle of a surface, specialised to the
//! flat torus for spectral experiments.

pub mod circle_spectral;
pub mod error;
pub mod experiment;
pub mod fourier;
pub mod ladder;
pub mod microlocal;
pub mod phasespace;
pub mod plot;
pub mod quasimodes;
pub mod symbolic;
pub mod taylor;
pub mod trend;

pub use error::{LabError, Result};
