use serde::{Deserialize, Serialize};
use std::fmt::Write;

use super::{CircleOperator, SpectralPair};

/// CSV with columns m, re(u_m), im(u_m).
pub fn pair_csv(pair: &SpectralPair) -> String {
    let c = pair.cutoff() as i64;
    let mut out = String::from("m,re,im\n");
    for (i, u) in pair.eigenvector.iter().enumerate() {
        let _ = writeln!(out, "{},{:.15e},{:.15e}", i as i64 - c, u.re, u.im);
    }
    out
}

/// JSON summary of one eigensolve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumManifest {
    pub n: [i64; 2],
    pub h: f64,
    pub cutoff: usize,
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
}

impl SpectrumManifest {
    pub fn new(op: &CircleOperator, pairs: &[SpectralPair]) -> Self {
        Self {
            n: op.mode,
            h: op.h,
            cutoff: op.cutoff,
            eigenvalues: pairs.iter().map(|p| p.eigenvalue).collect(),
            residuals: pairs.iter().map(|p| p.residual).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }
}
