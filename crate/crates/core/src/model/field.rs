use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::logistic;

/// Row-major `n x p` covariate matrix shared between models.
#[derive(Debug, Clone, PartialEq)]
pub struct Covariates {
    values: Arc<[f64]>,
    n: usize,
    p: usize,
}

impl Covariates {
    pub fn new(values: Vec<f64>, n: usize, p: usize) -> Result<Self> {
        if values.len() != n * p {
            return Err(Error::invalid(format!(
                "covariate matrix has {} entries, expected {n}x{p}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("covariates must be finite"));
        }
        Ok(Covariates {
            values: values.into(),
            n,
            p,
        })
    }

    /// Builds `[1, x_i]` rows from a single covariate column.
    pub fn with_intercept(column: &[f64]) -> Result<Self> {
        let mut values = Vec::with_capacity(2 * column.len());
        for &x in column {
            values.push(1.0);
            values.push(x);
        }
        Self::new(values, column.len(), 2)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.p..(i + 1) * self.p]
    }
}

/// Source of singleton potentials.
///
/// Class 0 is the reference class: `Constant` and `CovariateLinear` fields
/// only carry values for classes `1..k`, and class 0 has potential 0.
#[derive(Debug, Clone, PartialEq)]
pub enum ExternalField {
    /// `alpha_l` for each non-reference class `l = 1..k`.
    Constant(Vec<f64>),
    /// `alpha_{i,l} = x_i' beta_l`; `coefficients` is `(k-1) x p`, class-major.
    CovariateLinear {
        covariates: Covariates,
        coefficients: Vec<f64>,
    },
    /// Full `n x k` table of singleton potentials, row-major by site.
    PerSiteTable { table: Vec<f64>, k: usize },
}

impl ExternalField {
    /// Binary constant field.
    pub fn constant(alpha: f64) -> Self {
        ExternalField::Constant(alloc::vec![alpha])
    }

    pub fn covariate_linear(covariates: Covariates, coefficients: Vec<f64>) -> Self {
        ExternalField::CovariateLinear {
            covariates,
            coefficients,
        }
    }

    pub(crate) fn validate(&self, n: usize, k: usize) -> Result<()> {
        match self {
            ExternalField::Constant(alpha) => {
                if alpha.len() != k - 1 {
                    return Err(Error::invalid(format!(
                        "constant field needs {} values (one per non-reference class), got {}",
                        k - 1,
                        alpha.len()
                    )));
                }
                if alpha.iter().any(|a| !a.is_finite()) {
                    return Err(Error::invalid("field values must be finite"));
                }
            }
            ExternalField::CovariateLinear {
                covariates,
                coefficients,
            } => {
                if covariates.n() != n {
                    return Err(Error::invalid(format!(
                        "covariates have {} rows but the graph has {n} vertices",
                        covariates.n()
                    )));
                }
                if coefficients.len() != (k - 1) * covariates.p() {
                    return Err(Error::invalid(format!(
                        "expected {} coefficients ({} classes x {} covariates), got {}",
                        (k - 1) * covariates.p(),
                        k - 1,
                        covariates.p(),
                        coefficients.len()
                    )));
                }
                if coefficients.iter().any(|b| !b.is_finite()) {
                    return Err(Error::invalid("coefficients must be finite"));
                }
            }
            ExternalField::PerSiteTable { table, k: tk } => {
                if *tk != k || table.len() != n * k {
                    return Err(Error::invalid(format!(
                        "per-site table must be {n}x{k}, got {} entries with k = {tk}",
                        table.len()
                    )));
                }
                if table.iter().any(|v| !v.is_finite()) {
                    return Err(Error::invalid("per-site potentials must be finite"));
                }
            }
        }
        Ok(())
    }

    /// `alpha_{i,class}` for `class >= 1`; `None` for per-site tables.
    pub fn alpha(&self, i: usize, class: usize) -> Option<f64> {
        debug_assert!(class >= 1);
        match self {
            ExternalField::Constant(alpha) => alpha.get(class - 1).copied(),
            ExternalField::CovariateLinear {
                covariates,
                coefficients,
            } => {
                let p = covariates.p();
                let beta = coefficients.get((class - 1) * p..class * p)?;
                Some(covariates.row(i).iter().zip(beta).map(|(x, b)| x * b).sum())
            }
            ExternalField::PerSiteTable { .. } => None,
        }
    }

    /// Number of non-reference classes the field describes.
    fn classes(&self) -> usize {
        match self {
            ExternalField::Constant(alpha) => alpha.len(),
            ExternalField::CovariateLinear {
                covariates,
                coefficients,
            } => coefficients.len() / covariates.p().max(1),
            ExternalField::PerSiteTable { k, .. } => k - 1,
        }
    }

    fn binary_alpha(&self, i: usize) -> Result<f64> {
        if self.classes() != 1 {
            return Err(Error::unsupported("only defined for binary fields"));
        }
        self.alpha(i, 1)
            .ok_or_else(|| Error::unsupported("per-site table fields have no independence-model expectation"))
    }
}

/// Expected value of `y_i` under the independence model, `logistic(alpha_i)`.
pub fn independence_probability(field: &ExternalField, i: usize) -> Result<f64> {
    Ok(logistic(field.binary_alpha(i)?))
}

/// External-field classification `a_i = I(logistic(alpha_i) > 0.5)`.
///
/// The inequality is strict, so a site with `alpha_i = 0` is class 0.
pub fn field_classification(field: &ExternalField, i: usize) -> Result<u8> {
    Ok(u8::from(independence_probability(field, i)? > 0.5))
}
