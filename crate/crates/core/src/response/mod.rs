//! Monte Carlo response and prior predictive response functions.
//!
//! A [`ResponseStudy`] is a grid of `J` parameter values times `B` draws.
//! Cell `(j, b)` owns the stream `rng.split(0).split(j).split(b)`; under a
//! prior, draw `b` takes its field parameters from `rng.split(1).split(b)` at
//! every grid point. Bootstrap resampling for grid point `j` uses
//! `rng.split(2).split(j)`. Cells can therefore be evaluated in any order or
//! in parallel and [`ResponseStudy::collect`] reduces them identically.

mod functional;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use rand_distr::{Distribution, Normal};

pub use functional::{apply_functionals, sample_variance, FunctionalKind, BOOTSTRAP_RESAMPLES};

use crate::error::{Error, Result};
use crate::model::{ExternalField, Model};
use crate::rng::RandomSource;
use crate::samplers::{draw, SamplerSpec};
use crate::stats::{Statistic, StatisticKind};

/// The parameter a response function traces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parameter {
    /// The single dependence parameter.
    Psi,
    /// The constant field of a binary model.
    Alpha,
    /// One entry of a covariate-linear coefficient vector.
    Coefficient(usize),
}

/// Models that differ from `template` only in one parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct Family {
    template: Model,
    parameter: Parameter,
}

impl Family {
    pub fn new(template: Model, parameter: Parameter) -> Result<Self> {
        let family = Family { template, parameter };
        let probe = family.current_value()?;
        family.at(probe)?;
        Ok(family)
    }

    pub fn template(&self) -> &Model {
        &self.template
    }

    pub fn parameter(&self) -> Parameter {
        self.parameter
    }

    pub fn parameter_name(&self) -> String {
        match self.parameter {
            Parameter::Psi => String::from("psi"),
            Parameter::Alpha => String::from("alpha"),
            Parameter::Coefficient(c) => format!("beta{c}"),
        }
    }

    fn current_value(&self) -> Result<f64> {
        let missing = || Error::invalid(format!("model has no parameter {}", self.parameter_name()));
        match (self.parameter, self.template.field()) {
            (Parameter::Psi, _) => self.template.pairwise().psi().ok_or_else(missing),
            (Parameter::Alpha, ExternalField::Constant(a)) if a.len() == 1 => Ok(a[0]),
            (Parameter::Coefficient(c), ExternalField::CovariateLinear { coefficients, .. }) => {
                coefficients.get(c).copied().ok_or_else(missing)
            }
            _ => Err(missing()),
        }
    }

    /// The family member at `value`.
    pub fn at(&self, value: f64) -> Result<Model> {
        Self::set(&self.template, self.parameter, value)
    }

    fn set(model: &Model, parameter: Parameter, value: f64) -> Result<Model> {
        match parameter {
            Parameter::Psi => model.with_psi(value),
            Parameter::Alpha => model.with_field(ExternalField::constant(value)),
            Parameter::Coefficient(c) => {
                let mut coefficients = field_parameters(model.field())?;
                coefficients[c] = value;
                model.with_coefficients(coefficients)
            }
        }
    }

    /// The family member at `value` after replacing the field parameters.
    pub fn at_with_field(&self, value: f64, field_parameters: &[f64]) -> Result<Model> {
        let field = match self.template.field() {
            ExternalField::Constant(_) => ExternalField::Constant(field_parameters.to_vec()),
            ExternalField::CovariateLinear { covariates, .. } => {
                ExternalField::covariate_linear(covariates.clone(), field_parameters.to_vec())
            }
            ExternalField::PerSiteTable { .. } => {
                return Err(Error::unsupported("per-site table fields have no parameters to draw"))
            }
        };
        Self::set(&self.template.with_field(field)?, self.parameter, value)
    }
}

fn field_parameters(field: &ExternalField) -> Result<Vec<f64>> {
    match field {
        ExternalField::Constant(a) => Ok(a.clone()),
        ExternalField::CovariateLinear { coefficients, .. } => Ok(coefficients.clone()),
        ExternalField::PerSiteTable { .. } => Err(Error::unsupported("per-site table fields have no parameters")),
    }
}

/// Strictly increasing parameter values `w_1 < .. < w_J`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    points: Vec<f64>,
}

impl GridSpec {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("grid needs at least one point"));
        }
        if points.iter().any(|w| !w.is_finite()) {
            return Err(Error::invalid("grid points must be finite"));
        }
        if let Some(w) = points.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::invalid(format!(
                "grid must be strictly increasing, got {} then {}",
                w[0], w[1]
            )));
        }
        Ok(GridSpec { points })
    }

    /// `start, start + step, ..` up to `stop`, each rounded to 12 decimals.
    pub fn regular(start: f64, stop: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) || !(stop >= start) {
            return Err(Error::invalid(format!(
                "regular grid needs step > 0 and stop >= start, got {start}..{stop} by {step}"
            )));
        }
        let count = libm::floor((stop - start) / step + 1e-9) as usize + 1;
        let points = (0..count)
            .map(|j| libm::round((start + j as f64 * step) * 1e12) / 1e12)
            .collect();
        Self::new(points)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Independent normal priors on the field parameters.
///
/// `sd = 0` is a point mass at the mean.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorSpec {
    normals: Vec<(f64, f64)>,
}

impl PriorSpec {
    pub fn new(normals: Vec<(f64, f64)>) -> Result<Self> {
        if let Some((m, s)) = normals
            .iter()
            .find(|(m, s)| !m.is_finite() || !(*s >= 0.0) || !s.is_finite())
        {
            return Err(Error::invalid(format!(
                "prior needs finite means and sd >= 0, got N({m}, {s})"
            )));
        }
        Ok(PriorSpec { normals })
    }

    pub fn standard_normal(dim: usize) -> Self {
        PriorSpec {
            normals: alloc::vec![(0.0, 1.0); dim],
        }
    }

    pub fn len(&self) -> usize {
        self.normals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.normals.is_empty()
    }

    pub fn means(&self) -> Vec<f64> {
        self.normals.iter().map(|(m, _)| *m).collect()
    }

    pub fn sample(&self, rng: &mut RandomSource) -> Vec<f64> {
        self.normals
            .iter()
            .map(|&(m, s)| {
                if s == 0.0 {
                    m
                } else {
                    Normal::new(m, s).expect("validated prior").sample(rng)
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponsePoint {
    pub value: f64,
    pub estimate: f64,
    pub mc_se: f64,
    pub draws: usize,
}

/// One statistic-functional track over the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseEstimate {
    pub formulation: &'static str,
    pub param_name: String,
    pub statistic: StatisticKind,
    pub functional: FunctionalKind,
    pub sampler: SamplerSpec,
    pub seed: u64,
    /// Successful grid points in grid order.
    pub points: Vec<ResponsePoint>,
    /// Smoothed estimates aligned with `points`, when requested.
    pub smoothed: Option<Vec<f64>>,
}

/// All tracks of a study plus the grid points that failed.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyOutcome {
    pub estimates: Vec<ResponseEstimate>,
    /// One [`Error::GridPoint`] per failed grid point.
    pub failures: Vec<Error>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResponseStudy {
    pub family: Family,
    pub grid: GridSpec,
    pub statistics: Vec<StatisticKind>,
    pub functionals: Vec<FunctionalKind>,
    /// `B`, draws per grid point.
    pub draws: usize,
    pub sampler: SamplerSpec,
    pub prior: Option<PriorSpec>,
}

impl ResponseStudy {
    pub fn validate(&self) -> Result<()> {
        if self.draws < 2 {
            return Err(Error::invalid(format!("need B >= 2 draws, got {}", self.draws)));
        }
        if self.statistics.is_empty() {
            return Err(Error::invalid("statistics list is empty"));
        }
        if self.functionals.is_empty() {
            return Err(Error::invalid("functionals list is empty"));
        }
        if let Some(prior) = &self.prior {
            let expected = field_parameters(self.family.template.field())?.len();
            if prior.len() != expected {
                return Err(Error::invalid(format!(
                    "prior has {} components but the field has {expected} parameters",
                    prior.len()
                )));
            }
        }
        for &w in self.grid.points() {
            let model = match &self.prior {
                Some(prior) => self.family.at_with_field(w, &prior.means())?,
                None => self.family.at(w)?,
            };
            self.sampler.validate(&model)?;
            for &kind in &self.statistics {
                Statistic::bind(kind, &model)?;
            }
        }
        Ok(())
    }

    pub fn cell_count(&self) -> usize {
        self.grid.len() * self.draws
    }

    /// Statistic values for draw `b` at grid point `j`.
    pub fn cell(&self, j: usize, b: usize, rng: &RandomSource) -> Result<Vec<f64>> {
        let w = self.grid.points()[j];
        let model = match &self.prior {
            Some(prior) => {
                let beta = prior.sample(&mut rng.split(1).split(b as u64));
                self.family.at_with_field(w, &beta)?
            }
            None => self.family.at(w)?,
        };
        let mut stream = rng.split(0).split(j as u64).split(b as u64);
        let config = draw(&model, &self.sampler, &mut stream)?;
        self.statistics
            .iter()
            .map(|&kind| Statistic::bind(kind, &model)?.evaluate(&model, &config))
            .collect()
    }

    /// Reduces cell results, given in `(j, b)` row-major order, into tracks.
    pub fn collect(&self, cells: Vec<Result<Vec<f64>>>, rng: &RandomSource) -> StudyOutcome {
        assert_eq!(cells.len(), self.cell_count(), "one result per cell");
        let mut estimates: Vec<ResponseEstimate> = Vec::new();
        for &statistic in &self.statistics {
            for &functional in &self.functionals {
                estimates.push(ResponseEstimate {
                    formulation: self.family.template.pairwise().name(),
                    param_name: self.family.parameter_name(),
                    statistic,
                    functional,
                    sampler: self.sampler.clone(),
                    seed: rng.key(),
                    points: Vec::with_capacity(self.grid.len()),
                    smoothed: None,
                });
            }
        }
        let mut failures = Vec::new();
        let mut cells = cells.into_iter();
        for (j, &w) in self.grid.points().iter().enumerate() {
            let rows: Result<Vec<Vec<f64>>> = cells.by_ref().take(self.draws).collect();
            let rows = match rows {
                Ok(rows) => rows,
                Err(e) => {
                    failures.push(Error::GridPoint {
                        param: self.family.parameter_name(),
                        value: w,
                        source: alloc::boxed::Box::new(e),
                    });
                    continue;
                }
            };
            let mut boot = rng.split(2).split(j as u64);
            let mut track = estimates.iter_mut();
            for s in 0..self.statistics.len() {
                let column: Vec<f64> = rows.iter().map(|r| r[s]).collect();
                for (estimate, mc_se) in apply_functionals(&column, &self.functionals, &mut boot) {
                    track.next().expect("one track per pair").points.push(ResponsePoint {
                        value: w,
                        estimate,
                        mc_se,
                        draws: self.draws,
                    });
                }
            }
        }
        StudyOutcome { estimates, failures }
    }

    /// Serial evaluation of every cell.
    pub fn run(&self, rng: &RandomSource) -> Result<StudyOutcome> {
        self.validate()?;
        let cells = (0..self.grid.len())
            .flat_map(|j| (0..self.draws).map(move |b| (j, b)))
            .map(|(j, b)| self.cell(j, b, rng))
            .collect();
        Ok(self.collect(cells, rng))
    }
}

fn single_track(study: ResponseStudy, rng: &RandomSource) -> Result<ResponseEstimate> {
    let mut outcome = study.run(rng)?;
    if let Some(e) = outcome.failures.into_iter().next() {
        return Err(e);
    }
    Ok(outcome.estimates.remove(0))
}

/// Response function of `statistic` under `functional` over `grid`.
#[allow(clippy::too_many_arguments)]
pub fn estimate_response(
    family: &Family,
    grid: &GridSpec,
    statistic: StatisticKind,
    functional: FunctionalKind,
    draws: usize,
    sampler: &SamplerSpec,
    rng: &RandomSource,
) -> Result<ResponseEstimate> {
    single_track(
        ResponseStudy {
            family: family.clone(),
            grid: grid.clone(),
            statistics: alloc::vec![statistic],
            functionals: alloc::vec![functional],
            draws,
            sampler: sampler.clone(),
            prior: None,
        },
        rng,
    )
}

/// Prior predictive response function: the field parameters of each draw
/// come from `prior`, and the functional is applied to the pooled draws.
#[allow(clippy::too_many_arguments)]
pub fn estimate_prior_predictive_response(
    family: &Family,
    grid: &GridSpec,
    prior: &PriorSpec,
    statistic: StatisticKind,
    functional: FunctionalKind,
    draws: usize,
    sampler: &SamplerSpec,
    rng: &RandomSource,
) -> Result<ResponseEstimate> {
    single_track(
        ResponseStudy {
            family: family.clone(),
            grid: grid.clone(),
            statistics: alloc::vec![statistic],
            functionals: alloc::vec![functional],
            draws,
            sampler: sampler.clone(),
            prior: Some(prior.clone()),
        },
        rng,
    )
}

/// Centered moving average of the estimates. Near the ends the window
/// shrinks symmetrically; the raw points are kept.
pub fn smooth_estimate(est: &ResponseEstimate, window: usize) -> Result<ResponseEstimate> {
    if window.is_multiple_of(2) {
        return Err(Error::invalid(format!("smoothing window must be odd, got {window}")));
    }
    let raw: Vec<f64> = est.points.iter().map(|p| p.estimate).collect();
    if window > raw.len() {
        return Err(Error::invalid(format!(
            "smoothing window {window} exceeds the {} grid points",
            raw.len()
        )));
    }
    let half = window / 2;
    let smoothed = (0..raw.len())
        .map(|j| {
            let h = half.min(j).min(raw.len() - 1 - j);
            let slice = &raw[j - h..=j + h];
            slice.iter().sum::<f64>() / slice.len() as f64
        })
        .collect();
    Ok(ResponseEstimate {
        smoothed: Some(smoothed),
        ..est.clone()
    })
}

#[cfg(test)]
mod tests;
