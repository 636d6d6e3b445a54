use clap::{Parser, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

use sublab_core::experiment::{run, ExperimentConfig, ExperimentKind, RunOptions, MANIFEST_FILE};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Spectrum,
    QuasimodeRate,
    LadderCheck,
    Levels,
    Subcritical,
    Invariance,
    NormalformCheck,
}

impl From<Kind> for ExperimentKind {
    fn from(kind: Kind) -> Self {
        match kind {
            Kind::Spectrum => ExperimentKind::Spectrum,
            Kind::QuasimodeRate => ExperimentKind::QuasimodeRate,
            Kind::LadderCheck => ExperimentKind::LadderCheck,
            Kind::Levels => ExperimentKind::Levels,
            Kind::Subcritical => ExperimentKind::Subcritical,
            Kind::Invariance => ExperimentKind::Invariance,
            Kind::NormalformCheck => ExperimentKind::NormalformCheck,
        }
    }
}

/// Run one experiment sweep from a TOML config and evaluate its checks.
#[derive(Debug, Parser)]
#[command(name = "sublab", version)]
struct Cli {
    /// experiment kind (a section of the config)
    kind: Kind,
    /// TOML configuration file
    #[arg(long)]
    config: PathBuf,
    /// output directory (overrides `output` in the config)
    #[arg(long)]
    out: Option<PathBuf>,
    /// worker threads
    #[arg(long)]
    jobs: Option<usize>,
}

const EXIT_CHECKS_FAILED: u8 = 1;
const EXIT_ERROR: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let kind = ExperimentKind::from(cli.kind);
    let config = match ExperimentConfig::load(&cli.config) {
        Ok(config) => config,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_ERROR);
        }
    };
    let out_dir = cli
        .out
        .or_else(|| config.output.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("runs").join(kind.file_stem()));
    let options = RunOptions { out_dir, jobs: cli.jobs };
    let manifest = match run(&config, kind, &options) {
        Ok(manifest) => manifest,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_ERROR);
        }
    };
    for check in &manifest.checks {
        println!("{} {}: {}", if check.pass { "PASS" } else { "FAIL" }, check.name, check.detail);
    }
    println!("manifest: {}", options.out_dir.join(MANIFEST_FILE).display());
    if manifest.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_CHECKS_FAILED)
    }
}
