//! Job lists and summaries for each experiment kind.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::fmt::Write;

use super::config::{
    ExperimentConfig, InvarianceSection, LadderSection, LevelsSection, NormalFormSection, QuasimodeRateSection,
    SpectrumSection, SubcriticalSection,
};
use super::manifest::{CheckResult, FitRecord, JobRecord};
use crate::circle_spectral::{
    apriori_check, assemble, assemble_mathieu, eigensolve, h_from_eigenvalue, suggested_cutoff,
};
use crate::error::Result;
use crate::ladder::{clear_margin, ladder_on_quasimode, LadderPair};
use crate::microlocal::{
    e_marginal, flat_setup, level_mass, perturbed_setup, subcritical_mass, SUBCRITICAL_MIN_N,
};
use crate::phasespace::ConformalChart;
use crate::plot::{loglog_script, multi_loglog_script, plot_script};
use crate::quasimodes::{build_quasimode, mathieu_factory, residual_against};
use crate::symbolic::sample_orders;
use crate::trend::{fit_trend, successive_ratios, TrendModel};

type Task = Box<dyn Fn() -> Result<JobOutput> + Send + Sync>;

pub(crate) struct JobOutput {
    pub h: Option<f64>,
    pub values: BTreeMap<String, f64>,
    pub artifacts: Vec<(String, String)>,
}

impl JobOutput {
    fn new(h: Option<f64>) -> Self {
        Self {
            h,
            values: BTreeMap::new(),
            artifacts: Vec::new(),
        }
    }

    fn value(&mut self, name: impl Into<String>, value: f64) {
        self.values.insert(name.into(), value);
    }

    fn artifact(&mut self, name: impl Into<String>, content: String) {
        self.artifacts.push((name.into(), content));
    }
}

pub(crate) struct JobSpec {
    pub n: i64,
    pub k: Option<i64>,
    pub label: String,
    pub task: Task,
}

impl JobSpec {
    fn new(n: i64, k: Option<i64>, label: &str, task: impl Fn() -> Result<JobOutput> + Send + Sync + 'static) -> Self {
        Self {
            n,
            k,
            label: label.to_string(),
            task: Box::new(task),
        }
    }
}

#[derive(Default)]
pub(crate) struct Summary {
    pub fits: Vec<FitRecord>,
    pub ratios: BTreeMap<String, Vec<f64>>,
    pub checks: Vec<CheckResult>,
    pub artifacts: Vec<(String, String)>,
}

fn num(x: f64) -> String {
    format!("{x:.15e}")
}

fn flag(pass: bool) -> f64 {
    if pass {
        1.0
    } else {
        0.0
    }
}

fn table(header: &str, rows: &[Vec<String>]) -> String {
    let mut out = format!("{header}\n");
    for row in rows {
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

fn ok_jobs<'a>(records: &'a [JobRecord], label: Option<&'a str>) -> impl Iterator<Item = &'a JobRecord> + 'a {
    records
        .iter()
        .filter(move |r| r.succeeded() && label.is_none_or(|l| r.label == l))
}

fn window_detail(values: &[f64], window: [f64; 2]) -> (bool, String) {
    if values.is_empty() {
        return (false, "no values".into());
    }
    let pass = values.iter().all(|v| (window[0]..=window[1]).contains(v));
    let listed: Vec<String> = values.iter().map(|v| format!("{v:.4}")).collect();
    (pass, format!("[{}] in [{}, {}]", listed.join(", "), window[0], window[1]))
}

/// Successive ratios of `name` over the successful jobs in `series`, if there
/// are at least two and no job in between failed.
fn series_ratios(series: &[&JobRecord], name: &str) -> Vec<f64> {
    let values: Vec<f64> = series.iter().filter_map(|r| r.value(name)).collect();
    successive_ratios(&values)
}

// ---------------------------------------------------------------- spectrum

pub(crate) fn spectrum_jobs(section: &SpectrumSection) -> Vec<JobSpec> {
    section
        .n
        .iter()
        .map(|&n| {
            let s = section.clone();
            JobSpec::new(n, None, "", move || {
                if s.is_perturbed() {
                    perturbed_spectrum_job(&s, n)
                } else {
                    mathieu_spectrum_job(&s, n)
                }
            })
        })
        .collect()
}

fn mathieu_spectrum_job(section: &SpectrumSection, n: i64) -> Result<JobOutput> {
    let mode = [n, 0];
    let op = assemble_mathieu(mode, suggested_cutoff(mode, section.levels))?;
    // each level is a tunneling doublet
    let pairs = eigensolve(&op, 2 * section.levels)?;
    let mut rows = Vec::with_capacity(pairs.len());
    let mut output = JobOutput::new(Some(h_from_eigenvalue(mode, pairs[0].eigenvalue)));
    let mut apriori_passed = 0;
    for (index, pair) in pairs.iter().enumerate() {
        let level = index / 2;
        let h = h_from_eigenvalue(mode, pair.eigenvalue);
        let report = apriori_check(pair, &op.with_h(h)?)?;
        apriori_passed += usize::from(report.pass);
        let scaled = pair.eigenvalue * n as f64 / (2 * level + 1) as f64;
        if index % 2 == 0 {
            output.value(format!("scaled_k{level}"), scaled);
            output.value(format!("error_k{level}"), (scaled - 1.0).abs());
        }
        rows.push(vec![
            index.to_string(),
            level.to_string(),
            num(pair.eigenvalue),
            num(scaled),
            num((scaled - 1.0).abs()),
            num(pair.residual),
            num(h),
            num(report.lhs),
            num(report.rhs),
            report.pass.to_string(),
        ]);
    }
    output.value("apriori_passed", apriori_passed as f64);
    output.value("apriori_total", pairs.len() as f64);
    output.artifact(
        format!("spectrum_n{n}.csv"),
        table(
            "index,level,eigenvalue,scaled,scaled_error,residual,h,apriori_lhs,apriori_rhs,apriori_pass",
            &rows,
        ),
    );
    Ok(output)
}

fn perturbed_spectrum_job(section: &SpectrumSection, n: i64) -> Result<JobOutput> {
    let mode = [n, 0];
    let h = section.h.expect("validated: h is set for perturbed spectra");
    let op = assemble(mode, h, suggested_cutoff(mode, section.levels), &section.q, &section.w, 0.0)?;
    let pairs = eigensolve(&op, section.levels)?;
    let mut output = JobOutput::new(Some(h));
    let mut rows = Vec::with_capacity(pairs.len());
    let mut apriori_passed = 0;
    for (index, pair) in pairs.iter().enumerate() {
        let report = apriori_check(pair, &op)?;
        apriori_passed += usize::from(report.pass);
        output.value(format!("eigenvalue_{index}"), pair.eigenvalue);
        rows.push(vec![
            index.to_string(),
            num(pair.eigenvalue),
            num(pair.residual),
            num(report.lhs),
            num(report.rhs),
            report.pass.to_string(),
        ]);
    }
    output.value("apriori_passed", apriori_passed as f64);
    output.value("apriori_total", pairs.len() as f64);
    output.artifact(
        format!("spectrum_n{n}.csv"),
        table("index,eigenvalue,residual,apriori_lhs,apriori_rhs,apriori_pass", &rows),
    );
    Ok(output)
}

fn apriori_summary(name: &str, records: &[JobRecord]) -> CheckResult {
    let (passed, total) = ok_jobs(records, None).fold((0.0, 0.0), |(p, t), r| {
        (p + r.value("apriori_passed").unwrap_or(0.0), t + r.value("apriori_total").unwrap_or(0.0))
    });
    CheckResult::new(name, total > 0.0 && passed == total, format!("{passed} of {total} eigenpairs"))
}

pub(crate) fn spectrum_summary(section: &SpectrumSection, records: &[JobRecord]) -> Summary {
    let mut summary = Summary::default();
    summary.checks.push(apriori_summary("spectrum.apriori", records));
    if section.is_perturbed() {
        return summary;
    }
    let jobs: Vec<&JobRecord> = ok_jobs(records, None).collect();
    let rows: Vec<Vec<String>> = jobs
        .iter()
        .map(|r| {
            let mut row = vec![r.n.to_string()];
            row.extend((0..section.levels).map(|k| num(r.value(&format!("error_k{k}")).unwrap_or(f64::NAN))));
            row
        })
        .collect();
    let header: Vec<String> = std::iter::once("n".to_string())
        .chain((0..section.levels).map(|k| format!("error_k{k}")))
        .collect();
    summary.artifacts.push(("spectrum_errors.csv".into(), table(&header.join(","), &rows)));
    summary.artifacts.push((
        "spectrum_errors.gp".into(),
        multi_loglog_script("spectrum_errors.csv", "scaled eigenvalue error", "n", "|λ n/(2k+1) − 1|", section.levels),
    ));
    if jobs.len() >= 2 {
        let mut all = Vec::new();
        for k in 0..section.levels {
            let ratios = series_ratios(&jobs, &format!("error_k{k}"));
            all.extend(ratios.iter().copied());
            summary.ratios.insert(format!("error_ratio_k{k}"), ratios);
        }
        let (pass, detail) = window_detail(&all, section.ratio_window);
        summary.checks.push(CheckResult::new("spectrum.ratio_window", pass, detail));
    }
    summary
}

// ---------------------------------------------------------- quasimode-rate

pub(crate) fn quasimode_jobs(section: &QuasimodeRateSection) -> Vec<JobSpec> {
    let mut jobs = Vec::new();
    for &k in &section.k {
        for &n in &section.n {
            let delta = section.delta;
            jobs.push(JobSpec::new(n, Some(k as i64), "", move || {
                let v = build_quasimode(k, n, delta)?;
                v.check_resolved()?;
                let op = mathieu_factory(n, v.cutoff())?;
                let mut output = JobOutput::new(Some(1.0 / (((2 * k + 1) as f64) * n as f64).sqrt()));
                output.value("residual", residual_against(&op, &v.fourier, v.energy()));
                output.value("energy", v.energy());
                output.value("cutoff", v.cutoff() as f64);
                output.value("fourier_tail", v.fourier_tail());
                output.artifact(format!("quasimode_k{k}_n{n}.csv"), v.grid_csv());
                Ok(output)
            }));
        }
    }
    jobs
}

pub(crate) fn quasimode_summary(section: &QuasimodeRateSection, records: &[JobRecord]) -> Summary {
    let mut summary = Summary::default();
    for &k in &section.k {
        let series: Vec<(f64, f64)> = ok_jobs(records, None)
            .filter(|r| r.k == Some(k as i64))
            .filter_map(|r| r.value("residual").map(|v| (r.n as f64, v)))
            .collect();
        let csv = format!("quasimode_rate_k{k}.csv");
        let rows: Vec<Vec<String>> = series.iter().map(|&(n, r)| vec![format!("{n}"), num(r)]).collect();
        summary.artifacts.push((csv.clone(), table("n,residual", &rows)));
        let name = format!("quasimode-rate.slope_k{k}");
        match fit_trend(&series, TrendModel::PowerLaw) {
            Ok(fit) => {
                summary.artifacts.push((
                    format!("quasimode_rate_k{k}.gp"),
                    loglog_script(&csv, &format!("quasimode residual, k = {k}"), "n", "residual", fit.slope, fit.intercept),
                ));
                let (pass, detail) = window_detail(&[fit.slope], section.slope_window);
                summary.checks.push(CheckResult::new(name, pass, format!("slope {detail} ± {:.3}", fit.half_width)));
                summary.fits.push(FitRecord {
                    name: format!("residual_slope_k{k}"),
                    fit,
                });
            }
            Err(e) => summary.checks.push(CheckResult::new(name, false, e.to_string())),
        }
    }
    summary
}

// ------------------------------------------------------------ ladder-check

fn random_band_limited(rng: &mut ChaCha8Rng, cutoff: usize) -> Vec<Complex64> {
    let mut u: Vec<Complex64> = (0..2 * cutoff + 1)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    clear_margin(&mut u);
    u
}

pub(crate) fn ladder_jobs(section: &LadderSection, seed: u64) -> Vec<JobSpec> {
    let mut jobs = Vec::new();
    for &n in &section.n {
        let samples = section.samples;
        jobs.push(JobSpec::new(n, None, "identities", move || {
            let mode = [n, 0];
            let h = 1.0 / (n as f64).sqrt();
            let cutoff = suggested_cutoff(mode, 4);
            let pair = LadderPair::new(mode, h, cutoff);
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(n as u64));
            let mut rows = Vec::with_capacity(samples);
            let mut worst = [0.0f64; 3];
            for sample in 0..samples {
                let u = random_band_limited(&mut rng, cutoff);
                let defects = [
                    pair.factorization_defect(&u)?,
                    pair.reverse_factorization_defect(&u)?,
                    pair.commutator_defect(&u)?,
                ];
                for (w, d) in worst.iter_mut().zip(defects) {
                    *w = w.max(d);
                }
                rows.push(vec![sample.to_string(), num(defects[0]), num(defects[1]), num(defects[2])]);
            }
            let mut output = JobOutput::new(Some(h));
            output.value("factorization", worst[0]);
            output.value("reverse_factorization", worst[1]);
            output.value("commutator", worst[2]);
            output.artifact(
                format!("ladder_identities_n{n}.csv"),
                table("sample,factorization,reverse_factorization,commutator", &rows),
            );
            Ok(output)
        }));
    }
    for &k in &section.k {
        for &n in &section.n {
            let delta = section.delta;
            jobs.push(JobSpec::new(n, Some(k as i64), "quasimode", move || {
                let report = ladder_on_quasimode(k, n, delta)?;
                let mut output = JobOutput::new(Some(report.h));
                output.value("lowering_defect", report.lowering_defect);
                output.value("raising_defect", report.raising_defect);
                output.value("lowering_coefficient", report.lowering_coefficient.norm());
                output.value("raising_coefficient", report.raising_coefficient.norm());
                output.artifact(
                    format!("ladder_k{k}_n{n}.csv"),
                    table(
                        "k,n,h,lowering_defect,raising_defect,lowering_coefficient,raising_coefficient",
                        &[vec![
                            k.to_string(),
                            n.to_string(),
                            num(report.h),
                            num(report.lowering_defect),
                            num(report.raising_defect),
                            num(report.lowering_coefficient.norm()),
                            num(report.raising_coefficient.norm()),
                        ]],
                    ),
                );
                Ok(output)
            }));
        }
    }
    jobs
}

pub(crate) fn ladder_summary(section: &LadderSection, records: &[JobRecord]) -> Summary {
    let mut summary = Summary::default();
    let identities: Vec<&JobRecord> = ok_jobs(records, Some("identities")).collect();
    let worst = identities
        .iter()
        .flat_map(|r| ["factorization", "reverse_factorization", "commutator"].map(|name| r.value(name)))
        .flatten()
        .fold(0.0, f64::max);
    let rows: Vec<Vec<String>> = identities
        .iter()
        .map(|r| {
            let mut row = vec![r.n.to_string()];
            row.extend(["factorization", "reverse_factorization", "commutator"].map(|k| num(r.value(k).unwrap_or(f64::NAN))));
            row
        })
        .collect();
    summary.artifacts.push((
        "ladder_identities.csv".into(),
        table("n,factorization,reverse_factorization,commutator", &rows),
    ));
    summary.checks.push(CheckResult::new(
        "ladder-check.identities",
        !identities.is_empty() && worst <= section.tolerance,
        format!("max relative defect {worst:.3e} ≤ {:e}", section.tolerance),
    ));
    for &k in &section.k {
        let series: Vec<&JobRecord> = ok_jobs(records, Some("quasimode")).filter(|r| r.k == Some(k as i64)).collect();
        let csv = format!("ladder_lowering_k{k}.csv");
        let rows: Vec<Vec<String>> = series
            .iter()
            .map(|r| vec![r.n.to_string(), num(r.value("lowering_defect").unwrap_or(f64::NAN))])
            .collect();
        summary.artifacts.push((csv.clone(), table("n,lowering_defect", &rows)));
        summary.artifacts.push((
            format!("ladder_lowering_k{k}.gp"),
            plot_script(&csv, &format!("lowering defect, k = {k}"), "n", "defect", "linespoints"),
        ));
        if series.len() >= 2 {
            let ratios = series_ratios(&series, "lowering_defect");
            let pass = ratios.iter().all(|&r| r < 1.0);
            summary.checks.push(CheckResult::new(
                format!("ladder-check.lowering_decreasing_k{k}"),
                pass,
                format!("ratios {ratios:.4?}"),
            ));
            summary.ratios.insert(format!("lowering_ratio_k{k}"), ratios);
        }
    }
    summary
}

// ------------------------------------------------------------------ levels

const PARITIES: [&str; 2] = ["even", "odd"];

pub(crate) fn levels_jobs(section: &LevelsSection) -> Vec<JobSpec> {
    let mut jobs = Vec::new();
    for &k in &section.k {
        for &n in &section.n {
            for (parity, label) in PARITIES.iter().enumerate() {
                let s = section.clone();
                jobs.push(JobSpec::new(n, Some(k as i64), label, move || {
                    let mode = [n, 0];
                    let op = assemble_mathieu(mode, suggested_cutoff(mode, k as usize + 2))?;
                    let pairs = eigensolve(&op, 2 * k as usize + 2)?;
                    let pair = &pairs[2 * k as usize + parity];
                    let h = h_from_eigenvalue(mode, pair.eigenvalue);
                    let apriori = apriori_check(pair, &op.with_h(h)?)?;
                    let marginal = e_marginal(pair, h, s.bins)?;
                    let report = level_mass(&marginal, k, 1.0, 0.0, 0.0, s.delta)?;
                    let mut output = JobOutput::new(Some(h));
                    output.value("eigenvalue", pair.eigenvalue);
                    output.value("e_plus", report.e_plus);
                    output.value("e_minus", report.e_minus);
                    output.value("captured_plus", report.captured_mass_plus);
                    output.value("captured_minus", report.captured_mass_minus);
                    output.value("captured_total", report.captured_total());
                    output.value("apriori_passed", flag(apriori.pass));
                    output.value("apriori_total", 1.0);
                    let stem = format!("levels_k{k}_n{n}_{label}");
                    output.artifact(format!("{stem}.csv"), report.to_csv());
                    output.artifact(format!("{stem}_marginal.csv"), marginal.to_csv());
                    output.artifact(format!("{stem}_marginal.gp"), marginal.plot_script(&format!("{stem}_marginal.csv")));
                    Ok(output)
                }));
            }
        }
    }
    jobs
}

pub(crate) fn levels_summary(section: &LevelsSection, records: &[JobRecord]) -> Summary {
    let mut summary = Summary::default();
    let rows: Vec<Vec<String>> = ok_jobs(records, None)
        .map(|r| {
            let mut row = vec![r.n.to_string(), r.k.unwrap_or(0).to_string(), r.label.clone()];
            row.extend(
                ["e_plus", "e_minus", "captured_plus", "captured_minus", "captured_total"]
                    .map(|name| num(r.value(name).unwrap_or(f64::NAN))),
            );
            row
        })
        .collect();
    summary.artifacts.push((
        "levels.csv".into(),
        table("n,k,parity,e_plus,e_minus,captured_plus,captured_minus,captured_total", &rows),
    ));
    let largest = *section.n.last().expect("validated: n list is non-empty");
    for &k in &section.k {
        let of_k: Vec<&JobRecord> = ok_jobs(records, None).filter(|r| r.k == Some(k as i64)).collect();
        let at_largest: Vec<f64> = of_k
            .iter()
            .filter(|r| r.n == largest)
            .filter_map(|r| r.value("captured_total"))
            .collect();
        summary.checks.push(CheckResult::new(
            format!("levels.capture_k{k}"),
            at_largest.len() == PARITIES.len() && at_largest.iter().all(|&m| m >= section.min_capture),
            format!("n = {largest}: {at_largest:.6?} ≥ {}", section.min_capture),
        ));
        let mut monotone = true;
        for label in PARITIES {
            let series: Vec<f64> = of_k
                .iter()
                .filter(|r| r.label == label)
                .filter_map(|r| r.value("captured_total"))
                .collect();
            monotone &= series.windows(2).all(|w| w[1] >= w[0] - section.monotone_slack);
            summary.ratios.insert(format!("capture_ratio_k{k}_{label}"), successive_ratios(&series));
        }
        summary.checks.push(CheckResult::new(
            format!("levels.monotone_k{k}"),
            monotone,
            format!("non-decreasing up to {}", section.monotone_slack),
        ));
        let worst_split = of_k
            .iter()
            .filter_map(|r| Some((r.value("captured_plus")? - r.value("captured_minus")?).abs()))
            .fold(0.0, f64::max);
        summary.checks.push(CheckResult::new(
            format!("levels.parity_k{k}"),
            !of_k.is_empty() && worst_split <= section.parity_tolerance,
            format!("max |m+ − m−| = {worst_split:.3e} ≤ {}", section.parity_tolerance),
        ));
    }
    summary.checks.push(apriori_summary("levels.apriori", records));
    summary
}

// ------------------------------------------------------------- subcritical

pub(crate) fn subcritical_jobs(section: &SubcriticalSection) -> Vec<JobSpec> {
    section
        .n
        .iter()
        .map(|&n| {
            JobSpec::new(n, None, "", move || {
                let report = subcritical_mass(n)?;
                let mut output = JobOutput::new(Some(report.h));
                output.value("scale", report.scale as f64);
                output.value("index", report.index as f64);
                output.value("eigenvalue", report.eigenvalue);
                output.value("window", report.window);
                output.value("mass", report.mass);
                output.artifact(
                    format!("subcritical_n{n}.csv"),
                    table(
                        "n,scale,index,eigenvalue,h,window,mass",
                        &[vec![
                            n.to_string(),
                            report.scale.to_string(),
                            report.index.to_string(),
                            num(report.eigenvalue),
                            num(report.h),
                            num(report.window),
                            num(report.mass),
                        ]],
                    ),
                );
                Ok(output)
            })
        })
        .collect()
}

pub(crate) fn subcritical_summary(section: &SubcriticalSection, records: &[JobRecord]) -> Summary {
    let mut summary = Summary::default();
    let jobs: Vec<&JobRecord> = ok_jobs(records, None).collect();
    let rows: Vec<Vec<String>> = jobs
        .iter()
        .map(|r| vec![r.n.to_string(), num(r.value("mass").unwrap_or(f64::NAN))])
        .collect();
    summary.artifacts.push(("subcritical.csv".into(), table("n,mass", &rows)));
    summary.artifacts.push((
        "subcritical.gp".into(),
        plot_script("subcritical.csv", "mass in |E| ≤ 2/K", "n", "mass", "linespoints"),
    ));
    let largest = *section.n.last().expect("validated: n list is non-empty");
    let at_largest = jobs.iter().find(|r| r.n == largest).and_then(|r| r.value("mass"));
    summary.checks.push(CheckResult::new(
        "subcritical.mass",
        at_largest.is_some_and(|m| m >= section.min_mass),
        match at_largest {
            Some(mass) => format!("n = {largest}: {mass:.6} ≥ {}", section.min_mass),
            None => format!("n = {largest}: job failed"),
        },
    ));
    let guarded: Vec<f64> = jobs
        .iter()
        .filter(|r| r.n >= SUBCRITICAL_MIN_N)
        .filter_map(|r| r.value("mass"))
        .collect();
    summary.checks.push(CheckResult::new(
        "subcritical.increasing",
        guarded.windows(2).all(|w| w[1] >= w[0] - 1e-9),
        format!("masses for n ≥ {SUBCRITICAL_MIN_N}: {guarded:.12?}"),
    ));
    summary
}

// -------------------------------------------------------------- invariance

pub(crate) fn invariance_jobs(section: &InvarianceSection) -> Vec<JobSpec> {
    section
        .n
        .iter()
        .map(|&n| {
            let s = section.clone();
            JobSpec::new(n, None, "", move || {
                let setup = if s.w.is_zero() {
                    flat_setup(n)?
                } else {
                    perturbed_setup(n, &s.w, s.branch, s.bump_radius)?
                };
                let defect = setup.defect()?;
                let mut output = JobOutput::new(Some(setup.h));
                output.value("lambda0", setup.lambda0);
                output.value("defect", defect);
                output.value("abs_defect", defect.abs());
                output.artifact(
                    format!("invariance_n{n}.csv"),
                    table(
                        "n,h,lambda0,defect",
                        &[vec![n.to_string(), num(setup.h), num(setup.lambda0), num(defect)]],
                    ),
                );
                Ok(output)
            })
        })
        .collect()
}

pub(crate) fn invariance_summary(section: &InvarianceSection, records: &[JobRecord]) -> Summary {
    let mut summary = Summary::default();
    let jobs: Vec<&JobRecord> = ok_jobs(records, None).collect();
    let series: Vec<(f64, f64)> = jobs
        .iter()
        .filter_map(|r| r.value("abs_defect").map(|d| (r.n as f64, d)))
        .collect();
    let rows: Vec<Vec<String>> = series.iter().map(|&(n, d)| vec![format!("{n}"), num(d)]).collect();
    summary.artifacts.push(("invariance.csv".into(), table("n,abs_defect", &rows)));
    match fit_trend(&series, TrendModel::PowerLaw) {
        Ok(fit) => {
            summary.artifacts.push((
                "invariance.gp".into(),
                loglog_script("invariance.csv", "|∫ Y_W(a) dν_h|", "n", "defect", fit.slope, fit.intercept),
            ));
            summary.fits.push(FitRecord {
                name: "defect_slope".into(),
                fit,
            });
        }
        Err(_) => summary.artifacts.push((
            "invariance.gp".into(),
            plot_script("invariance.csv", "|∫ Y_W(a) dν_h|", "n", "defect", "linespoints"),
        )),
    }
    if jobs.len() >= 2 {
        let ratios = series_ratios(&jobs, "abs_defect");
        let pass = ratios.iter().all(|&r| r < section.max_ratio);
        summary.checks.push(CheckResult::new(
            "invariance.ratio",
            pass,
            format!("ratios {ratios:.4?} < {}", section.max_ratio),
        ));
        summary.ratios.insert("defect_ratio".into(), ratios);
    }
    summary
}

// -------------------------------------------------------- normalform-check

fn chart_stem(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' { c } else { '_' })
        .collect::<String>()
        .trim_matches('_')
        .to_string()
}

pub(crate) fn normalform_jobs(section: &NormalFormSection, seed: u64) -> Vec<JobSpec> {
    section
        .charts
        .iter()
        .enumerate()
        .map(|(index, name)| {
            let s = section.clone();
            let name = name.clone();
            JobSpec::new(0, Some(index as i64), &name.clone(), move || {
                let chart = ConformalChart::from_name(&name)?;
                let samples = sample_orders(&chart, seed.wrapping_add(index as u64), s.samples, s.t)?;
                let mut output = JobOutput::new(None);
                for (key, pick) in [
                    ("h1_halving", (|o: &crate::symbolic::OrderSample| o.h1_halving) as fn(&_) -> f64),
                    ("symbol_halving", |o| o.symbol_halving),
                    ("symbol_doubling", |o| o.symbol_doubling),
                ] {
                    let values: Vec<f64> = samples.iter().map(pick).collect();
                    output.value(format!("{key}_min"), values.iter().copied().fold(f64::INFINITY, f64::min));
                    output.value(format!("{key}_max"), values.iter().copied().fold(f64::NEG_INFINITY, f64::max));
                }
                let rows: Vec<Vec<String>> = samples
                    .iter()
                    .map(|o| {
                        vec![
                            num(o.point[0]),
                            num(o.point[1]),
                            num(o.point[2]),
                            num(o.h1),
                            num(o.t),
                            num(o.angle),
                            num(o.h1_halving),
                            num(o.symbol_halving),
                            num(o.symbol_doubling),
                        ]
                    })
                    .collect();
                output.artifact(
                    format!("normalform_{}.csv", chart_stem(&name)),
                    table("x,y,z,h1,t,angle,h1_halving,symbol_halving,symbol_doubling", &rows),
                );
                Ok(output)
            })
        })
        .collect()
}

pub(crate) fn normalform_summary(section: &NormalFormSection, records: &[JobRecord]) -> Summary {
    let mut summary = Summary::default();
    let jobs: Vec<&JobRecord> = ok_jobs(records, None).collect();
    for (key, check, window) in [
        ("h1_halving", "normalform-check.h1_ratio", section.h1_window),
        ("symbol_halving", "normalform-check.symbol_halving", section.symbol_halving_window),
        ("symbol_doubling", "normalform-check.symbol_doubling", section.symbol_doubling_window),
    ] {
        let extremes: Vec<f64> = jobs
            .iter()
            .flat_map(|r| [r.value(&format!("{key}_min")), r.value(&format!("{key}_max"))])
            .flatten()
            .collect();
        let (pass, detail) = window_detail(&extremes, window);
        summary.checks.push(CheckResult::new(check, pass, format!("extremes {detail}")));
        summary.ratios.insert(key.to_string(), extremes);
    }
    summary
}

pub(crate) fn jobs_for(config: &ExperimentConfig, kind: super::ExperimentKind) -> Option<Vec<JobSpec>> {
    use super::ExperimentKind::*;
    Some(match kind {
        Spectrum => spectrum_jobs(config.spectrum.as_ref()?),
        QuasimodeRate => quasimode_jobs(config.quasimode_rate.as_ref()?),
        LadderCheck => ladder_jobs(config.ladder_check.as_ref()?, config.seed),
        Levels => levels_jobs(config.levels.as_ref()?),
        Subcritical => subcritical_jobs(config.subcritical.as_ref()?),
        Invariance => invariance_jobs(config.invariance.as_ref()?),
        NormalformCheck => normalform_jobs(config.normalform_check.as_ref()?, config.seed),
    })
}

const SECTION_CHECKED: &str = "section presence checked before running";

pub(crate) fn summary_for(config: &ExperimentConfig, kind: super::ExperimentKind, records: &[JobRecord]) -> Summary {
    use super::ExperimentKind::*;
    match kind {
        Spectrum => spectrum_summary(config.spectrum.as_ref().expect(SECTION_CHECKED), records),
        QuasimodeRate => quasimode_summary(config.quasimode_rate.as_ref().expect(SECTION_CHECKED), records),
        LadderCheck => ladder_summary(config.ladder_check.as_ref().expect(SECTION_CHECKED), records),
        Levels => levels_summary(config.levels.as_ref().expect(SECTION_CHECKED), records),
        Subcritical => subcritical_summary(config.subcritical.as_ref().expect(SECTION_CHECKED), records),
        Invariance => invariance_summary(config.invariance.as_ref().expect(SECTION_CHECKED), records),
        NormalformCheck => normalform_summary(config.normalform_check.as_ref().expect(SECTION_CHECKED), records),
    }
}
