//! Subcommand bodies shared by the binary and the integration tests.

use std::path::{Path, PathBuf};
use std::time::Instant;

use mrflab_core::response::{smooth_estimate, ResponseStudy, StudyOutcome};
use mrflab_core::samplers::draw;
use mrflab_core::{Configuration, RandomSource};
use rayon::prelude::*;

use crate::check::{cases_from_config, report_csv, run_checks, CheckRow};
use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::{response_csv, samples_csv, smoothed_csv, write_file, write_manifest, Counts, Manifest};

pub fn thread_pool(workers: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| CliError::Validation(format!("cannot start {workers} workers: {e}")))
}

/// Evaluates all `(j, b)` cells on `pool`; the reduction is order-fixed.
pub fn evaluate_study(study: &ResponseStudy, rng: &RandomSource, pool: &rayon::ThreadPool) -> StudyOutcome {
    let draws = study.draws;
    let cells = pool.install(|| {
        (0..study.cell_count())
            .into_par_iter()
            .map(|c| study.cell(c / draws, c % draws, rng))
            .collect()
    });
    study.collect(cells, rng)
}

#[derive(Debug)]
pub struct StudyRun {
    pub name: String,
    pub outcome: StudyOutcome,
    pub csv: Vec<u8>,
}

/// Builds and evaluates every run's study without touching the filesystem.
pub fn run_studies(config: &ExperimentConfig, with_prior: bool, workers: usize) -> Result<Vec<StudyRun>, CliError> {
    let study_config = config
        .study
        .as_ref()
        .ok_or_else(|| CliError::Validation("study: block is required for response commands".into()))?;
    let studies = config
        .runs()?
        .iter()
        .enumerate()
        .map(|(i, run)| Ok((run.name.clone(), study_config.build(run, i, with_prior)?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    let pool = thread_pool(workers)?;
    let rng = RandomSource::new(config.seed);
    let mut runs = Vec::new();
    for (name, study) in studies {
        eprintln!(
            "mrflab: run {name}: {} grid points x {} draws ({})",
            study.grid.len(),
            study.draws,
            study.sampler.kind
        );
        let mut outcome = evaluate_study(&study, &rng, &pool);
        if let Some(window) = study_config.smooth_window {
            for est in outcome.estimates.iter_mut() {
                *est =
                    smooth_estimate(est, window).map_err(|e| CliError::from_core(e).context("study.smooth_window"))?;
            }
        }
        let csv = response_csv(&outcome)?;
        runs.push(StudyRun { name, outcome, csv });
    }
    Ok(runs)
}

pub struct Options {
    pub workers: usize,
    pub out: PathBuf,
}

fn finish(
    command: &str,
    config: &ExperimentConfig,
    opts: &Options,
    started: Instant,
    counts: Counts,
    outputs: Vec<PathBuf>,
    failures: Vec<String>,
) -> Result<PathBuf, CliError> {
    let manifest = Manifest {
        tool: "mrflab",
        version: env!("CARGO_PKG_VERSION"),
        command,
        seed: config.seed,
        workers: opts.workers,
        wall_time_seconds: started.elapsed().as_secs_f64(),
        counts,
        outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
        failures,
        config,
    };
    write_manifest(&opts.out, &manifest)
}

pub fn cmd_response(config: &ExperimentConfig, opts: &Options, with_prior: bool) -> Result<(), CliError> {
    let started = Instant::now();
    let command = if with_prior { "prior-response" } else { "response" };
    let runs = run_studies(config, with_prior, opts.workers)?;
    let mut outputs = Vec::new();
    let mut failures = Vec::new();
    let mut counts = Counts {
        runs: runs.len(),
        ..Counts::default()
    };
    for run in &runs {
        outputs.push(write_file(&opts.out, &format!("{}.csv", run.name), &run.csv)?);
        if run.outcome.estimates.iter().any(|e| e.smoothed.is_some()) {
            let bytes = smoothed_csv(&run.outcome.estimates)?;
            outputs.push(write_file(&opts.out, &format!("{}.smoothed.csv", run.name), &bytes)?);
        }
        let points = run.outcome.estimates.first().map_or(0, |e| e.points.len());
        counts.grid_points += points + run.outcome.failures.len();
        counts.draws += points
            * run
                .outcome
                .estimates
                .first()
                .map_or(0, |e| e.points.first().map_or(0, |p| p.draws));
        counts.rows += points * run.outcome.estimates.len();
        counts.failed_grid_points += run.outcome.failures.len();
        failures.extend(run.outcome.failures.iter().map(|e| format!("{}: {e}", run.name)));
    }
    let manifest = finish(command, config, opts, started, counts, outputs, failures.clone())?;
    eprintln!("mrflab: wrote {}", manifest.display());
    if !failures.is_empty() {
        return Err(CliError::Sampler(format!(
            "{} grid point(s) failed; partial results kept:\n  {}",
            failures.len(),
            failures.join("\n  ")
        )));
    }
    Ok(())
}

pub fn sample_draws(config: &ExperimentConfig, workers: usize) -> Result<Vec<(String, Vec<Configuration>)>, CliError> {
    let count = config.sample.as_ref().map_or(1, |s| s.count);
    let pool = thread_pool(workers)?;
    let rng = RandomSource::new(config.seed);
    let mut out = Vec::new();
    for (i, run) in config.runs()?.iter().enumerate() {
        let model = run.model.build(&format!("runs[{i}].model"))?;
        let spec = run.sampler.build(&format!("runs[{i}].sampler"))?;
        spec.validate(&model)
            .map_err(|e| CliError::from_core(e).context(format!("runs[{i}].sampler")))?;
        let draws: Result<Vec<Configuration>, _> = pool.install(|| {
            (0..count)
                .into_par_iter()
                .map(|c| draw(&model, &spec, &mut rng.split(c as u64)))
                .collect()
        });
        let draws = draws.map_err(|e| CliError::from_core(e).context(&run.name))?;
        out.push((run.name.clone(), draws));
    }
    Ok(out)
}

pub fn cmd_sample(config: &ExperimentConfig, opts: &Options) -> Result<(), CliError> {
    let started = Instant::now();
    let sampled = sample_draws(config, opts.workers)?;
    let mut outputs = Vec::new();
    let mut counts = Counts {
        runs: sampled.len(),
        ..Counts::default()
    };
    for (name, draws) in &sampled {
        outputs.push(write_file(
            &opts.out,
            &format!("{name}_samples.csv"),
            &samples_csv(draws)?,
        )?);
        counts.draws += draws.len();
        counts.rows += draws.iter().map(Configuration::len).sum::<usize>();
    }
    finish("sample", config, opts, started, counts, outputs, Vec::new())?;
    Ok(())
}

pub fn cmd_check(config: &ExperimentConfig, opts: &Options) -> Result<Vec<CheckRow>, CliError> {
    let started = Instant::now();
    let settings = config.check.clone().unwrap_or_default();
    let cases = cases_from_config(config)?;
    let rows = run_checks(&cases, &settings, config.seed)?;
    println!(
        "{:<10} {:<22} {:<40} {:>12} {:>10}  result",
        "check", "model", "quantity", "value", "tolerance"
    );
    for r in &rows {
        println!(
            "{:<10} {:<22} {:<40} {:>12.3e} {:>10.1e}  {}",
            r.check,
            r.model,
            r.quantity,
            r.value,
            r.tolerance,
            if r.passed() { "pass" } else { "FAIL" }
        );
    }
    let report = write_file(&opts.out, "check_report.csv", &report_csv(&rows)?)?;
    let failed: Vec<String> = rows
        .iter()
        .filter(|r| !r.passed())
        .map(|r| format!("{} {} {}", r.check, r.model, r.quantity))
        .collect();
    let counts = Counts {
        runs: cases.len(),
        rows: rows.len(),
        ..Counts::default()
    };
    finish("check", config, opts, started, counts, vec![report], failed.clone())?;
    if !failed.is_empty() {
        return Err(CliError::CheckFailed(format!(
            "{} check(s) failed: {}",
            failed.len(),
            failed.join("; ")
        )));
    }
    Ok(rows)
}

/// Output directory: flag, then config, then `mrflab-out`.
pub fn output_dir(flag: Option<&Path>, config: &ExperimentConfig) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| config.output.as_ref().and_then(|o| o.dir.as_ref()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("mrflab-out"))
}
