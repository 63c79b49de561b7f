//! Experiment configuration: a versioned JSON document.

use std::path::Path;
use std::sync::Arc;

use mrflab_core::model::{build_gradient_covariate, hmrf_conditional, Covariates, GaussianEmission};
use mrflab_core::response::{Family, FunctionalKind, GridSpec, Parameter, PriorSpec, ResponseStudy};
use mrflab_core::samplers::{Init, SamplerKind, SamplerSpec, DEFAULT_MAX_EPOCH};
use mrflab_core::stats::StatisticKind;
use mrflab_core::{ExternalField, Model, Nug, Order, PairwiseSpec};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub seed: u64,
    #[serde(default)]
    pub runs: Vec<RunConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub study: Option<StudyConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample: Option<SampleConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check: Option<CheckConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub name: String,
    pub model: ModelConfig,
    pub sampler: SamplerConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formulation {
    PhysicsIsing,
    Autologistic,
    CenteredAutologistic,
    Ising,
    Potts,
    FlexiblePotts,
    OrdinalPotts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderConfig {
    #[default]
    First,
    Second,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    pub rows: usize,
    pub cols: usize,
    #[serde(default)]
    pub order: OrderConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CovariateSource {
    /// `[1, x_i]` with the planar gradient over a square lattice.
    Gradient,
    /// Explicit `n x p` rows.
    Matrix(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldConfig {
    Constant {
        alpha: Vec<f64>,
    },
    CovariateLinear {
        covariates: CovariateSource,
        coefficients: Vec<f64>,
    },
    GaussianEmissions {
        means: Vec<f64>,
        sds: Vec<f64>,
        observations: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub formulation: Formulation,
    #[serde(default = "default_k")]
    pub k: usize,
    pub lattice: LatticeConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi_matrix: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ordinal: Option<[f64; 3]>,
}

fn default_k() -> usize {
    2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitConfig {
    AllZero,
    AllOne,
    #[default]
    UniformRandom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerConfig {
    pub kind: String,
    #[serde(default)]
    pub sweeps: usize,
    #[serde(default)]
    pub init: InitConfig,
    #[serde(default = "default_max_epoch")]
    pub max_epoch: u32,
}

fn default_max_epoch() -> u32 {
    DEFAULT_MAX_EPOCH
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridConfig {
    Regular { start: f64, stop: f64, step: f64 },
    Points { points: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorConfig {
    /// `[mean, sd]` per field parameter.
    pub normals: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    #[serde(default = "default_parameter")]
    pub parameter: String,
    pub grid: GridConfig,
    pub draws: usize,
    pub statistics: Vec<String>,
    pub functionals: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior: Option<PriorConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smooth_window: Option<usize>,
}

fn default_parameter() -> String {
    "psi".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleConfig {
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CheckConfig {
    pub step: f64,
    pub gradient_tolerance: f64,
    pub curvature_tolerance: f64,
    pub tv_tolerance: f64,
    pub tv_draws: usize,
    pub moment_draws: usize,
    pub se_multiplier: f64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            step: 1e-4,
            gradient_tolerance: 1e-6,
            curvature_tolerance: 1e-4,
            tv_tolerance: 0.02,
            tv_draws: 10_000,
            moment_draws: 20_000,
            se_multiplier: 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
}

fn field_error(path: impl Into<String>) -> impl FnOnce(mrflab_core::Error) -> CliError {
    let path = path.into();
    move |e| CliError::from_core(e).context(path)
}

impl ExperimentConfig {
    /// Parses a config, or the config echoed inside a run manifest.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| CliError::Validation(format!("config is not valid JSON: {e}")))?;
        let value = match value.get("config") {
            Some(inner) if value.get("tool").is_some() => inner.clone(),
            _ => value,
        };
        let config: ExperimentConfig =
            serde_json::from_value(value).map_err(|e| CliError::Validation(format!("config: {e}")))?;
        if config.version != CONFIG_VERSION {
            return Err(CliError::Validation(format!(
                "version: unsupported config version {}, expected {CONFIG_VERSION}",
                config.version
            )));
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn runs(&self) -> Result<&[RunConfig], CliError> {
        if self.runs.is_empty() {
            return Err(CliError::Validation("runs: at least one run is required".into()));
        }
        Ok(&self.runs)
    }
}

impl ModelConfig {
    pub fn build(&self, path: &str) -> Result<Model, CliError> {
        let lattice = &self.lattice;
        let order = match lattice.order {
            OrderConfig::First => Order::First,
            OrderConfig::Second => Order::Second,
        };
        let nug =
            Arc::new(Nug::lattice(lattice.rows, lattice.cols, order).map_err(field_error(format!("{path}.lattice")))?);
        let n = nug.n_vertices();
        let pairwise = self.pairwise(path)?;

        if let Some(FieldConfig::GaussianEmissions {
            means,
            sds,
            observations,
        }) = &self.field
        {
            if self.formulation != Formulation::Potts {
                return Err(CliError::Validation(format!(
                    "{path}.field: gaussian_emissions pairs with the potts formulation"
                )));
            }
            if means.len() != sds.len() || means.len() != self.k {
                return Err(CliError::Validation(format!(
                    "{path}.field: need k = {} emission means and sds",
                    self.k
                )));
            }
            let emissions: Vec<GaussianEmission> = means
                .iter()
                .zip(sds)
                .map(|(&mean, &sd)| GaussianEmission { mean, sd })
                .collect();
            return hmrf_conditional(nug, &emissions, observations, pairwise.psi().unwrap_or(0.0))
                .map_err(field_error(format!("{path}.field")));
        }

        let field = match &self.field {
            None => ExternalField::Constant(vec![0.0; self.k.saturating_sub(1)]),
            Some(FieldConfig::Constant { alpha }) => ExternalField::Constant(alpha.clone()),
            Some(FieldConfig::CovariateLinear {
                covariates,
                coefficients,
            }) => {
                let covariates = match covariates {
                    CovariateSource::Gradient => {
                        if lattice.rows != lattice.cols {
                            return Err(CliError::Validation(format!(
                                "{path}.field.covariates: gradient needs a square lattice"
                            )));
                        }
                        let x = build_gradient_covariate(lattice.rows).map_err(field_error(format!("{path}.field")))?;
                        Covariates::with_intercept(&x)
                    }
                    CovariateSource::Matrix(rows) => {
                        let p = rows.first().map_or(0, Vec::len);
                        if rows.iter().any(|r| r.len() != p) {
                            return Err(CliError::Validation(format!(
                                "{path}.field.covariates: rows have different lengths"
                            )));
                        }
                        Covariates::new(rows.concat(), rows.len(), p)
                    }
                }
                .map_err(field_error(format!("{path}.field.covariates")))?;
                if covariates.n() != n {
                    return Err(CliError::Validation(format!(
                        "{path}.field.covariates: {} rows for {n} lattice sites",
                        covariates.n()
                    )));
                }
                ExternalField::covariate_linear(covariates, coefficients.clone())
            }
            Some(FieldConfig::GaussianEmissions { .. }) => unreachable!("handled above"),
        };
        Model::new(nug, self.k, field, pairwise).map_err(field_error(path))
    }

    fn pairwise(&self, path: &str) -> Result<PairwiseSpec, CliError> {
        let psi = || {
            self.psi
                .ok_or_else(|| CliError::Validation(format!("{path}.psi: required for {:?}", self.formulation)))
        };
        Ok(match self.formulation {
            Formulation::PhysicsIsing => PairwiseSpec::PhysicsIsing(psi()?),
            Formulation::Autologistic => PairwiseSpec::Autologistic(psi()?),
            Formulation::CenteredAutologistic => PairwiseSpec::CenteredAutologistic(psi()?),
            Formulation::Ising => PairwiseSpec::Ising(psi()?),
            Formulation::Potts => PairwiseSpec::Potts(psi()?),
            Formulation::FlexiblePotts => {
                let rows = self
                    .psi_matrix
                    .as_ref()
                    .ok_or_else(|| CliError::Validation(format!("{path}.psi_matrix: required for flexible_potts")))?;
                if rows.len() != self.k || rows.iter().any(|r| r.len() != self.k) {
                    return Err(CliError::Validation(format!(
                        "{path}.psi_matrix: must be {0}x{0}",
                        self.k
                    )));
                }
                PairwiseSpec::FlexiblePotts {
                    k: self.k,
                    psi: rows.concat(),
                }
            }
            Formulation::OrdinalPotts => {
                let [same, adjacent, other] = self
                    .ordinal
                    .ok_or_else(|| CliError::Validation(format!("{path}.ordinal: required for ordinal_potts")))?;
                PairwiseSpec::OrdinalPotts { same, adjacent, other }
            }
        })
    }
}

impl SamplerConfig {
    pub fn build(&self, path: &str) -> Result<SamplerSpec, CliError> {
        let kind: SamplerKind = self.kind.parse().map_err(field_error(format!("{path}.kind")))?;
        let init = match self.init {
            InitConfig::AllZero => Init::AllZero,
            InitConfig::AllOne => Init::AllOne,
            InitConfig::UniformRandom => Init::UniformRandom,
        };
        let spec = match kind {
            SamplerKind::Gibbs => SamplerSpec::gibbs(self.sweeps),
            SamplerKind::SwendsenWang => SamplerSpec::swendsen_wang(self.sweeps),
            SamplerKind::Cftp => SamplerSpec::cftp(self.max_epoch),
        };
        if kind != SamplerKind::Cftp && self.sweeps == 0 {
            return Err(CliError::Validation(format!(
                "{path}.sweeps: must be at least 1 for {kind}"
            )));
        }
        Ok(SamplerSpec {
            max_epoch: self.max_epoch,
            ..spec.with_init(init)
        })
    }
}

impl StudyConfig {
    pub fn grid(&self) -> Result<GridSpec, CliError> {
        match &self.grid {
            GridConfig::Regular { start, stop, step } => GridSpec::regular(*start, *stop, *step),
            GridConfig::Points { points } => GridSpec::new(points.clone()),
        }
        .map_err(field_error("study.grid"))
    }

    pub fn parameter(&self) -> Result<Parameter, CliError> {
        match self.parameter.as_str() {
            "psi" => Ok(Parameter::Psi),
            "alpha" => Ok(Parameter::Alpha),
            other => other
                .strip_prefix("beta")
                .and_then(|c| c.parse().ok())
                .map(Parameter::Coefficient)
                .ok_or_else(|| {
                    CliError::Validation(format!(
                        "study.parameter: unknown parameter `{other}` (use psi, alpha or betaN)"
                    ))
                }),
        }
    }

    pub fn statistics(&self) -> Result<Vec<StatisticKind>, CliError> {
        if self.statistics.is_empty() {
            return Err(CliError::Validation("study.statistics: list is empty".into()));
        }
        self.statistics
            .iter()
            .map(|s| s.parse().map_err(field_error("study.statistics")))
            .collect()
    }

    pub fn functionals(&self) -> Result<Vec<FunctionalKind>, CliError> {
        if self.functionals.is_empty() {
            return Err(CliError::Validation("study.functionals: list is empty".into()));
        }
        self.functionals
            .iter()
            .map(|s| s.parse().map_err(field_error("study.functionals")))
            .collect()
    }

    pub fn prior(&self) -> Result<Option<PriorSpec>, CliError> {
        self.prior
            .as_ref()
            .map(|p| PriorSpec::new(p.normals.iter().map(|[m, s]| (*m, *s)).collect()))
            .transpose()
            .map_err(field_error("study.prior"))
    }

    /// The response study for one run; `with_prior` selects the prior
    /// predictive variant.
    pub fn build(&self, run: &RunConfig, index: usize, with_prior: bool) -> Result<ResponseStudy, CliError> {
        let path = format!("runs[{index}]");
        let model = run.model.build(&format!("{path}.model"))?;
        let sampler = run.sampler.build(&format!("{path}.sampler"))?;
        let family = Family::new(model, self.parameter()?).map_err(field_error("study.parameter"))?;
        let prior = if with_prior {
            Some(
                self.prior()?
                    .ok_or_else(|| CliError::Validation("study.prior: prior-response needs a prior".into()))?,
            )
        } else {
            None
        };
        if self.draws < 2 {
            return Err(CliError::Validation(format!(
                "study.draws: need at least 2, got {}",
                self.draws
            )));
        }
        let study = ResponseStudy {
            family,
            grid: self.grid()?,
            statistics: self.statistics()?,
            functionals: self.functionals()?,
            draws: self.draws,
            sampler,
            prior,
        };
        study.validate().map_err(field_error(path))?;
        Ok(study)
    }
}
