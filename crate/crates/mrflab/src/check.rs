//! Oracle checks: gradient identities, sampler moments and CFTP exactness
//! against exhaustive enumeration.

use std::sync::Arc;

use mrflab_core::exact::{enumerate, gradient_check, total_variation, EmpiricalDistribution};
use mrflab_core::samplers::{sample_batch, SamplerKind, SamplerSpec};
use mrflab_core::{ExternalField, Model, Nug, Order, PairwiseSpec, RandomSource};

use crate::config::{CheckConfig, ExperimentConfig};
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub check: &'static str,
    pub model: String,
    pub quantity: String,
    pub value: f64,
    pub tolerance: f64,
}

impl CheckRow {
    pub fn passed(&self) -> bool {
        self.value < self.tolerance
    }
}

pub struct CheckCase {
    pub name: String,
    pub model: Model,
    pub sampler: Option<SamplerSpec>,
}

fn lattice(rows: usize, cols: usize) -> Arc<Nug> {
    Arc::new(Nug::lattice(rows, cols, Order::First).expect("fixed lattice"))
}

/// Small models covering every formulation, with a sampler for the binary ones.
pub fn default_suite() -> Vec<CheckCase> {
    let binary = |rows, cols, alpha, spec| {
        Model::new(lattice(rows, cols), 2, ExternalField::constant(alpha), spec).expect("fixed model")
    };
    let ternary =
        |spec| Model::new(lattice(2, 3), 3, ExternalField::Constant(vec![0.2, -0.1]), spec).expect("fixed model");
    vec![
        CheckCase {
            name: "ising_3x3".into(),
            model: binary(3, 3, 0.2, PairwiseSpec::Ising(0.4)),
            sampler: Some(SamplerSpec::gibbs(30)),
        },
        CheckCase {
            name: "ising_3x3_sw".into(),
            model: binary(3, 3, 0.2, PairwiseSpec::Ising(0.4)),
            sampler: Some(SamplerSpec::swendsen_wang(10)),
        },
        CheckCase {
            name: "physics_ising_3x3".into(),
            model: binary(3, 3, 0.1, PairwiseSpec::PhysicsIsing(0.3)),
            sampler: None,
        },
        CheckCase {
            name: "autologistic_2x3".into(),
            model: binary(2, 3, -0.1, PairwiseSpec::Autologistic(0.3)),
            sampler: Some(SamplerSpec::gibbs(30)),
        },
        CheckCase {
            name: "ising_2x2_cftp".into(),
            model: binary(2, 2, 0.2, PairwiseSpec::Ising(0.5)),
            sampler: Some(SamplerSpec::cftp(20)),
        },
        CheckCase {
            name: "potts3_2x3".into(),
            model: ternary(PairwiseSpec::Potts(0.5)),
            sampler: None,
        },
        CheckCase {
            name: "flexible_potts3_2x3".into(),
            model: ternary(PairwiseSpec::FlexiblePotts {
                k: 3,
                psi: vec![0.6, 0.1, -0.2, 0.1, 0.3, 0.0, -0.2, 0.0, 0.8],
            }),
            sampler: None,
        },
        CheckCase {
            name: "ordinal_potts3_2x3".into(),
            model: ternary(PairwiseSpec::OrdinalPotts {
                same: 0.7,
                adjacent: 0.2,
                other: -0.4,
            }),
            sampler: None,
        },
    ]
}

pub fn cases_from_config(config: &ExperimentConfig) -> Result<Vec<CheckCase>, CliError> {
    if config.runs.is_empty() {
        return Ok(default_suite());
    }
    config
        .runs
        .iter()
        .enumerate()
        .map(|(i, run)| {
            Ok(CheckCase {
                name: run.name.clone(),
                model: run.model.build(&format!("runs[{i}].model"))?,
                sampler: Some(run.sampler.build(&format!("runs[{i}].sampler"))?),
            })
        })
        .collect()
}

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Runs every applicable check for each case.
pub fn run_checks(cases: &[CheckCase], settings: &CheckConfig, seed: u64) -> Result<Vec<CheckRow>, CliError> {
    let rng = RandomSource::new(seed);
    let mut rows = Vec::new();
    for (c, case) in cases.iter().enumerate() {
        let model = &case.model;
        if model.is_exponential_family() {
            let report = gradient_check(model, settings.step)?;
            rows.push(CheckRow {
                check: "gradient",
                model: case.name.clone(),
                quantity: "max |dA - E[T]|".into(),
                value: report.first_order,
                tolerance: settings.gradient_tolerance,
            });
            rows.push(CheckRow {
                check: "curvature",
                model: case.name.clone(),
                quantity: "max |d2A - var T|".into(),
                value: report.second_order,
                tolerance: settings.curvature_tolerance,
            });
        }
        let Some(spec) = &case.sampler else { continue };
        let stream = rng.split(c as u64);
        if spec.kind == SamplerKind::Cftp {
            let exact = enumerate(model, true)?;
            let draws = sample_batch(model, spec, settings.tv_draws, &stream)?;
            let empirical = EmpiricalDistribution::from_configurations(model.n(), model.k(), &draws)?;
            rows.push(CheckRow {
                check: "cftp_tv",
                model: case.name.clone(),
                quantity: format!("TV over {} draws", settings.tv_draws),
                value: total_variation(&empirical, &exact)?,
                tolerance: settings.tv_tolerance,
            });
        } else {
            let exact = enumerate(model, false)?;
            let draws = sample_batch(model, spec, settings.moment_draws, &stream)?;
            let names = model.statistic_names();
            for (t, name) in names.iter().enumerate() {
                let values: Vec<f64> = draws
                    .iter()
                    .map(|y| model.sufficient_statistics(y).map(|s| s[t]))
                    .collect::<Result<_, _>>()?;
                let (mean, se) = mean_and_se(&values);
                rows.push(CheckRow {
                    check: "moment",
                    model: case.name.clone(),
                    quantity: format!("|E[{name}]| error in SE ({})", spec.kind),
                    value: if se > 0.0 {
                        (mean - exact.statistic_means[t]).abs() / se
                    } else {
                        (mean - exact.statistic_means[t]).abs()
                    },
                    tolerance: settings.se_multiplier,
                });
            }
        }
    }
    Ok(rows)
}

pub fn report_csv(rows: &[CheckRow]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(std::io::Error::other(e));
    w.write_record(["check", "model", "quantity", "value", "tolerance", "pass"])
        .map_err(io)?;
    for r in rows {
        w.write_record([
            r.check.to_string(),
            r.model.clone(),
            r.quantity.clone(),
            crate::output::format_float(r.value),
            crate::output::format_float(r.tolerance),
            r.passed().to_string(),
        ])
        .map_err(io)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.into_error()))
}
