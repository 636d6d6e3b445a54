//! Run manifest: per-job records, fitted trends and evaluated checks.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use super::config::ExperimentKind;
use crate::trend::TrendFit;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum JobStatus {
    Ok,
    Failed { error: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JobRecord {
    pub kind: ExperimentKind,
    pub n: i64,
    pub k: Option<i64>,
    pub h: Option<f64>,
    /// distinguishes jobs sharing (n, k), e.g. parity sector or chart
    pub label: String,
    #[serde(flatten)]
    pub status: JobStatus,
    pub values: BTreeMap<String, f64>,
    pub artifacts: Vec<String>,
}

impl JobRecord {
    pub fn succeeded(&self) -> bool {
        self.status == JobStatus::Ok
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitRecord {
    pub name: String,
    pub fit: TrendFit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl CheckResult {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub kind: ExperimentKind,
    /// sha256 of the canonical config section
    pub config_hash: String,
    pub code_version: String,
    pub seed: u64,
    pub jobs: Vec<JobRecord>,
    pub fits: Vec<FitRecord>,
    /// named ratios derived from the job values
    pub ratios: BTreeMap<String, Vec<f64>>,
    pub checks: Vec<CheckResult>,
    /// summary artifacts written beside the per-job ones
    pub artifacts: Vec<String>,
    pub passed: bool,
}

impl RunManifest {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}
