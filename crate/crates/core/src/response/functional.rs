use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::math::sqrt;
use crate::rng::RandomSource;

pub const BOOTSTRAP_RESAMPLES: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FunctionalKind {
    Mean,
    Variance,
    Sd,
}

impl fmt::Display for FunctionalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FunctionalKind::Mean => "mean",
            FunctionalKind::Variance => "variance",
            FunctionalKind::Sd => "sd",
        })
    }
}

impl FromStr for FunctionalKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" => Ok(FunctionalKind::Mean),
            "variance" | "var" => Ok(FunctionalKind::Variance),
            "sd" => Ok(FunctionalKind::Sd),
            other => Err(Error::invalid(format!("unknown functional `{other}`"))),
        }
    }
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample variance with divisor `B - 1`.
pub fn sample_variance(values: &[f64]) -> f64 {
    let m = mean(values);
    values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (values.len() as f64 - 1.0)
}

/// Estimates and standard errors of every functional for one set of draws.
///
/// The mean's standard error is `sd / sqrt(B)`; variance and sd use the
/// spread of [`BOOTSTRAP_RESAMPLES`] bootstrap replicates drawn from `rng`.
pub fn apply_functionals(values: &[f64], functionals: &[FunctionalKind], rng: &mut RandomSource) -> Vec<(f64, f64)> {
    let b = values.len();
    let variance = sample_variance(values);
    let replicates: Option<Vec<f64>> = functionals.iter().any(|f| *f != FunctionalKind::Mean).then(|| {
        let mut resample = alloc::vec![0.0; b];
        (0..BOOTSTRAP_RESAMPLES)
            .map(|_| {
                for r in resample.iter_mut() {
                    *r = values[rng.index(b)];
                }
                sample_variance(&resample)
            })
            .collect()
    });
    let spread = |xs: &mut dyn Iterator<Item = f64>| {
        let xs: Vec<f64> = xs.collect();
        sqrt(sample_variance(&xs))
    };
    functionals
        .iter()
        .map(|f| match f {
            FunctionalKind::Mean => (mean(values), sqrt(variance / b as f64)),
            FunctionalKind::Variance => {
                let reps = replicates.as_ref().expect("computed above");
                (variance, spread(&mut reps.iter().copied()))
            }
            FunctionalKind::Sd => {
                let reps = replicates.as_ref().expect("computed above");
                (sqrt(variance), spread(&mut reps.iter().map(|v| sqrt(*v))))
            }
        })
        .collect()
}
