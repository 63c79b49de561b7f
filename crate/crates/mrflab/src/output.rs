//! CSV tables and run manifests.

use std::fs;
use std::path::{Path, PathBuf};

use mrflab_core::response::{ResponseEstimate, StudyOutcome};
use mrflab_core::samplers::SamplerKind;
use mrflab_core::Configuration;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::CliError;

pub const RESPONSE_HEADER: [&str; 10] = [
    "param_name",
    "param_value",
    "statistic",
    "functional",
    "estimate",
    "mc_se",
    "B",
    "sampler",
    "sweeps",
    "seed",
];

/// Shortest-form rendering of `x` with 17 significant digits, like C's `%.17g`.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "NaN".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exponent) = sci.split_once('e').expect("scientific format");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    if !(-5..17).contains(&exponent) {
        let mantissa = strip_zeros(mantissa);
        let sign = if exponent < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exponent.abs());
    }
    let decimals = (16 - exponent).max(0) as usize;
    strip_zeros(&format!("{x:.decimals$}")).to_string()
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn sampler_columns(est: &ResponseEstimate) -> (String, String) {
    let sweeps = match est.sampler.kind {
        SamplerKind::Cftp => 0,
        _ => est.sampler.sweeps,
    };
    (est.sampler.kind.to_string(), sweeps.to_string())
}

/// Response rows in grid order, then statistic, then functional.
pub fn response_csv(outcome: &StudyOutcome) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(RESPONSE_HEADER).map_err(csv_error)?;
    let points = outcome.estimates.first().map_or(0, |e| e.points.len());
    for j in 0..points {
        for est in &outcome.estimates {
            let p = &est.points[j];
            let (sampler, sweeps) = sampler_columns(est);
            w.write_record([
                est.param_name.clone(),
                format_float(p.value),
                est.statistic.to_string(),
                est.functional.to_string(),
                format_float(p.estimate),
                format_float(p.mc_se),
                p.draws.to_string(),
                sampler,
                sweeps,
                est.seed.to_string(),
            ])
            .map_err(csv_error)?;
        }
    }
    w.into_inner().map_err(|e| CliError::Io(e.into_error()))
}

/// Raw and smoothed estimates side by side.
pub fn smoothed_csv(estimates: &[ResponseEstimate]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "param_name",
        "param_value",
        "statistic",
        "functional",
        "estimate",
        "smoothed",
    ])
    .map_err(csv_error)?;
    for est in estimates {
        let smoothed = est.smoothed.as_deref().unwrap_or(&[]);
        for (p, s) in est.points.iter().zip(smoothed) {
            w.write_record([
                est.param_name.clone(),
                format_float(p.value),
                est.statistic.to_string(),
                est.functional.to_string(),
                format_float(p.estimate),
                format_float(*s),
            ])
            .map_err(csv_error)?;
        }
    }
    w.into_inner().map_err(|e| CliError::Io(e.into_error()))
}

/// One row per site of every draw.
pub fn samples_csv(draws: &[Configuration]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["draw", "index", "state"]).map_err(csv_error)?;
    for (d, config) in draws.iter().enumerate() {
        for (i, s) in config.states().iter().enumerate() {
            w.write_record([d.to_string(), i.to_string(), s.to_string()])
                .map_err(csv_error)?;
        }
    }
    w.into_inner().map_err(|e| CliError::Io(e.into_error()))
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Counts {
    pub runs: usize,
    pub grid_points: usize,
    pub draws: usize,
    pub rows: usize,
    pub failed_grid_points: usize,
}

#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub seed: u64,
    pub workers: usize,
    pub wall_time_seconds: f64,
    pub counts: Counts,
    pub outputs: Vec<String>,
    pub failures: Vec<String>,
    pub config: &'a ExperimentConfig,
}

pub fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, bytes)?;
    Ok(path)
}

pub fn write_manifest(dir: &Path, manifest: &Manifest<'_>) -> Result<PathBuf, CliError> {
    let text = serde_json::to_string_pretty(manifest).map_err(|e| CliError::Io(e.into()))?;
    write_file(dir, "manifest.json", text.as_bytes())
}
