//! Configuration-driven experiment sweeps: jobs run concurrently, each writes
//! its own CSV/plot artifacts, and a manifest records values, fits and checks.

mod config;
mod jobs;
mod manifest;

pub use config::{
    ExperimentConfig, ExperimentKind, InvarianceSection, LadderSection, LevelsSection, NormalFormSection,
    QuasimodeRateSection, SpectrumSection, SubcriticalSection,
};
pub use manifest::{CheckResult, FitRecord, JobRecord, JobStatus, RunManifest};

use rayon::prelude::*;
use sha2::{Digest, Sha256};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use crate::error::{LabError, Result};
use jobs::{jobs_for, summary_for, JobSpec};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    /// worker threads; `None` uses the rayon default
    pub jobs: Option<usize>,
}

/// Hex sha256 of the canonical text of the section run by `kind`.
pub fn config_hash(config: &ExperimentConfig, kind: ExperimentKind) -> String {
    Sha256::digest(config.canonical_section(kind).as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn write_artifact(dir: &Path, name: &str, content: &str) -> Result<()> {
    std::fs::write(dir.join(name), content)?;
    Ok(())
}

fn panic_message(payload: Box<dyn std::any::Any + Send>) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        s.to_string()
    } else if let Some(s) = payload.downcast_ref::<String>() {
        s.clone()
    } else {
        "job panicked".to_string()
    }
}

/// Run one job, writing its artifacts as soon as it finishes. Errors and
/// panics become a failed record.
fn execute(kind: ExperimentKind, spec: &JobSpec, dir: &Path) -> JobRecord {
    let mut record = JobRecord {
        kind,
        n: spec.n,
        k: spec.k,
        h: None,
        label: spec.label.clone(),
        status: JobStatus::Ok,
        values: Default::default(),
        artifacts: Vec::new(),
    };
    let outcome = catch_unwind(AssertUnwindSafe(|| (spec.task)()))
        .unwrap_or_else(|payload| Err(LabError::InvalidArgument(panic_message(payload))));
    match outcome {
        Ok(output) => {
            record.h = output.h;
            record.values = output.values;
            for (name, content) in &output.artifacts {
                if let Err(e) = write_artifact(dir, name, content) {
                    record.status = JobStatus::Failed { error: e.to_string() };
                    return record;
                }
                record.artifacts.push(name.clone());
            }
        }
        Err(e) => record.status = JobStatus::Failed { error: e.to_string() },
    }
    record
}

/// Run the `kind` section of `config`, writing per-job artifacts, summary
/// tables, plot scripts and `manifest.json` into `options.out_dir`.
pub fn run(config: &ExperimentConfig, kind: ExperimentKind, options: &RunOptions) -> Result<RunManifest> {
    config.validate()?;
    let specs = jobs_for(config, kind)
        .ok_or_else(|| LabError::ConfigInvalid(format!("{kind}: no [{kind}] section in the config")))?;
    if options.jobs == Some(0) {
        return Err(LabError::ConfigInvalid("jobs: must be at least 1".into()));
    }
    let dir = options.out_dir.as_path();
    std::fs::create_dir_all(dir)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(threads) = options.jobs {
        builder = builder.num_threads(threads);
    }
    let pool = builder
        .build()
        .map_err(|e| LabError::InvalidArgument(format!("thread pool: {e}")))?;
    let mut records: Vec<JobRecord> = pool.install(|| specs.par_iter().map(|spec| execute(kind, spec, dir)).collect());
    // single-writer merge keyed by (kind, n, k, h); label breaks remaining ties
    records.sort_by(|a, b| {
        (a.n, a.k, &a.label)
            .cmp(&(b.n, b.k, &b.label))
            .then(a.h.unwrap_or(0.0).total_cmp(&b.h.unwrap_or(0.0)))
    });

    let summary = summary_for(config, kind, &records);
    let mut checks = summary.checks;
    let failed: Vec<String> = records
        .iter()
        .filter_map(|r| match &r.status {
            JobStatus::Failed { error } => Some(format!("n = {}, k = {:?}, {}: {error}", r.n, r.k, r.label)),
            JobStatus::Ok => None,
        })
        .collect();
    checks.insert(
        0,
        CheckResult::new(
            "jobs.succeeded",
            failed.is_empty(),
            if failed.is_empty() {
                format!("{} jobs", records.len())
            } else {
                failed.join("; ")
            },
        ),
    );
    let mut artifacts = Vec::with_capacity(summary.artifacts.len());
    for (name, content) in &summary.artifacts {
        write_artifact(dir, name, content)?;
        artifacts.push(name.clone());
    }
    let manifest = RunManifest {
        kind,
        config_hash: config_hash(config, kind),
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        seed: config.seed,
        passed: checks.iter().all(|c| c.pass),
        jobs: records,
        fits: summary.fits,
        ratios: summary.ratios,
        checks,
        artifacts,
    };
    write_artifact(dir, MANIFEST_FILE, &manifest.to_json())?;
    Ok(manifest)
}
