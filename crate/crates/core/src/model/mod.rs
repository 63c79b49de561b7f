//! MRF formulations as pure functions of a configuration.
//!
//! A [`Model`] pairs a neighborhood graph with an [`ExternalField`] and a
//! [`PairwiseSpec`]. On construction it tabulates every singleton potential
//! (`n x k`, including the centered-autologistic adjustment) and the `k x k`
//! pairwise potential, so densities, full conditionals and samplers all read
//! the same numbers. Models are immutable; the `with_*` methods build new ones.

mod builders;
mod config;
mod field;
mod pairwise;

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

pub use builders::{build_gradient_covariate, hmrf_conditional, GaussianEmission};
pub use config::Configuration;
pub use field::{field_classification, independence_probability, Covariates, ExternalField};
pub use pairwise::{pairwise_g, PairwiseSpec};

use crate::error::{Error, Result};
use crate::graph::Nug;
use crate::math::{logistic, softmax_in_place};
use pairwise::spin;

#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    nug: Arc<Nug>,
    k: usize,
    field: ExternalField,
    pairwise: PairwiseSpec,
    site_potentials: Vec<f64>,
    pair_potentials: Vec<f64>,
    centered_means: Option<Vec<f64>>,
}

impl Model {
    pub fn new(nug: Arc<Nug>, k: usize, field: ExternalField, pairwise: PairwiseSpec) -> Result<Self> {
        Self::build(nug, k, field, pairwise, true)
    }

    fn build(
        nug: Arc<Nug>,
        k: usize,
        field: ExternalField,
        pairwise: PairwiseSpec,
        strict_order: bool,
    ) -> Result<Self> {
        if !(2..=255).contains(&k) {
            return Err(Error::invalid(format!("number of states must be in 2..=255, got {k}")));
        }
        pairwise.validate(k, strict_order)?;
        let n = nug.n_vertices();
        field.validate(n, k)?;

        let centered_means = match (&pairwise, &field) {
            (PairwiseSpec::CenteredAutologistic(_), ExternalField::PerSiteTable { .. }) => {
                return Err(Error::invalid(
                    "centered autologistic needs a constant or covariate-linear field",
                ))
            }
            (PairwiseSpec::CenteredAutologistic(_), _) => Some(
                (0..n)
                    .map(|j| independence_probability(&field, j))
                    .collect::<Result<Vec<_>>>()?,
            ),
            _ => None,
        };

        let mut site_potentials = alloc::vec![0.0; n * k];
        for i in 0..n {
            let row = &mut site_potentials[i * k..(i + 1) * k];
            if let ExternalField::PerSiteTable { table, .. } = &field {
                row.copy_from_slice(&table[i * k..(i + 1) * k]);
                continue;
            }
            match &pairwise {
                PairwiseSpec::PhysicsIsing(_) => {
                    let alpha = field.alpha(i, 1).unwrap_or(0.0);
                    row[0] = -alpha;
                    row[1] = alpha;
                }
                PairwiseSpec::CenteredAutologistic(psi) => {
                    let means = centered_means.as_ref().unwrap();
                    let mean_sum: f64 = nug.neighbors_of(i).iter().map(|&j| means[j]).sum();
                    row[1] = field.alpha(i, 1).unwrap_or(0.0) - psi * mean_sum;
                }
                _ => {
                    for (l, v) in row.iter_mut().enumerate().skip(1) {
                        *v = field.alpha(i, l).unwrap_or(0.0);
                    }
                }
            }
        }

        let mut pair_potentials = alloc::vec![0.0; k * k];
        for a in 0..k {
            for b in 0..k {
                pair_potentials[a * k + b] = pairwise.potential(a as u8, b as u8);
            }
        }

        Ok(Model {
            nug,
            k,
            field,
            pairwise,
            site_potentials,
            pair_potentials,
            centered_means,
        })
    }

    pub fn nug(&self) -> &Nug {
        &self.nug
    }

    pub fn shared_nug(&self) -> Arc<Nug> {
        Arc::clone(&self.nug)
    }

    pub fn n(&self) -> usize {
        self.nug.n_vertices()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn field(&self) -> &ExternalField {
        &self.field
    }

    pub fn pairwise(&self) -> &PairwiseSpec {
        &self.pairwise
    }

    /// Independence-model means `mu_j` cached for the centered autologistic.
    pub fn centered_means(&self) -> Option<&[f64]> {
        self.centered_means.as_deref()
    }

    pub fn with_psi(&self, psi: f64) -> Result<Self> {
        Self::new(
            self.shared_nug(),
            self.k,
            self.field.clone(),
            self.pairwise.with_psi(psi)?,
        )
    }

    pub fn with_field(&self, field: ExternalField) -> Result<Self> {
        Self::new(self.shared_nug(), self.k, field, self.pairwise.clone())
    }

    /// Replaces the coefficients of a covariate-linear field.
    pub fn with_coefficients(&self, coefficients: Vec<f64>) -> Result<Self> {
        match &self.field {
            ExternalField::CovariateLinear { covariates, .. } => {
                self.with_field(ExternalField::covariate_linear(covariates.clone(), coefficients))
            }
            _ => Err(Error::unsupported("model field is not covariate-linear")),
        }
    }

    pub fn pairwise_g(&self, yi: u8, yj: u8) -> Result<f64> {
        pairwise_g(&self.pairwise, self.k, yi, yj)
    }

    /// Singleton potential `f(y_i = state)`, including any centering adjustment.
    #[inline]
    pub fn site_potential(&self, i: usize, state: u8) -> f64 {
        self.site_potentials[i * self.k + state as usize]
    }

    /// Pairwise potential `f(a, b)`.
    #[inline]
    pub fn pair_potential(&self, a: u8, b: u8) -> f64 {
        self.pair_potentials[a as usize * self.k + b as usize]
    }

    pub(crate) fn site_row(&self, i: usize) -> &[f64] {
        &self.site_potentials[i * self.k..(i + 1) * self.k]
    }

    pub(crate) fn check(&self, config: &Configuration) -> Result<()> {
        if config.len() != self.n() || config.k() != self.k {
            return Err(Error::invalid(format!(
                "configuration (n = {}, k = {}) does not match model (n = {}, k = {})",
                config.len(),
                config.k(),
                self.n(),
                self.k
            )));
        }
        Ok(())
    }

    fn check_vertex(&self, i: usize) -> Result<()> {
        if i >= self.n() {
            return Err(Error::invalid(format!("vertex {i} out of range 0..{}", self.n())));
        }
        Ok(())
    }

    /// Sum of all clique potentials; the log partition function is omitted.
    pub fn unnormalized_log_density(&self, config: &Configuration) -> Result<f64> {
        self.check(config)?;
        Ok(self.log_density_unchecked(config.states()))
    }

    pub(crate) fn log_density_unchecked(&self, y: &[u8]) -> f64 {
        let singles: f64 = y.iter().enumerate().map(|(i, &s)| self.site_potential(i, s)).sum();
        let pairs: f64 = self
            .nug
            .edges()
            .iter()
            .map(|&(i, j)| self.pair_potential(y[i], y[j]))
            .sum();
        singles + pairs
    }

    /// `log q(a) - log q(b)`.
    pub fn log_odds(&self, a: &Configuration, b: &Configuration) -> Result<f64> {
        Ok(self.unnormalized_log_density(a)? - self.unnormalized_log_density(b)?)
    }

    /// Unnormalized log-weight of `y_i = state` given the neighbors in `y`.
    #[inline]
    pub(crate) fn local_log_weight(&self, y: &[u8], i: usize, state: u8) -> f64 {
        let row = &self.pair_potentials[state as usize * self.k..(state as usize + 1) * self.k];
        self.site_potential(i, state)
            + self
                .nug
                .neighbors_of(i)
                .iter()
                .map(|&j| row[y[j] as usize])
                .sum::<f64>()
    }

    /// `P(y_i = 1 | neighbors)` for binary models from the tabulated potentials.
    #[inline]
    pub(crate) fn prob_one(&self, y: &[u8], i: usize) -> f64 {
        let mut eta = self.site_potential(i, 1) - self.site_potential(i, 0);
        for &j in self.nug.neighbors_of(i) {
            let b = y[j];
            eta += self.pair_potential(1, b) - self.pair_potential(0, b);
        }
        logistic(eta)
    }

    /// Full conditional distribution of `y_i` given its neighbors.
    ///
    /// Binary formulations with constant or covariate fields use their closed
    /// forms; everything else normalizes the local clique potentials.
    pub fn full_conditional(&self, config: &Configuration, i: usize) -> Result<Vec<f64>> {
        self.check(config)?;
        self.check_vertex(i)?;
        let y = config.states();
        let neighbors = self.nug.neighbors_of(i);
        let alpha = self.field.alpha(i, 1);
        let p1 = match (&self.pairwise, alpha) {
            (PairwiseSpec::PhysicsIsing(psi), Some(alpha)) => {
                let eta = alpha + psi * neighbors.iter().map(|&j| spin(y[j])).sum::<f64>();
                // exp(eta) / (exp(-eta) + exp(eta))
                Some(logistic(2.0 * eta))
            }
            (PairwiseSpec::Autologistic(psi), Some(alpha)) => {
                let ones = neighbors.iter().filter(|&&j| y[j] == 1).count() as f64;
                Some(logistic(alpha + psi * ones))
            }
            (PairwiseSpec::CenteredAutologistic(psi), Some(alpha)) => {
                let means = self.centered_means.as_ref().unwrap();
                let auto: f64 = neighbors.iter().map(|&j| f64::from(y[j]) - means[j]).sum();
                Some(logistic(alpha + psi * auto))
            }
            (PairwiseSpec::Ising(psi), Some(alpha)) => {
                let ones = neighbors.iter().filter(|&&j| y[j] == 1).count() as f64;
                let zeros = neighbors.len() as f64 - ones;
                // exp(alpha + psi n1) / (exp(psi n0) + exp(alpha + psi n1))
                Some(logistic(alpha + psi * (ones - zeros)))
            }
            _ => None,
        };
        if let Some(p1) = p1 {
            return Ok(alloc::vec![1.0 - p1, p1]);
        }
        let mut weights: Vec<f64> = (0..self.k).map(|s| self.local_log_weight(y, i, s as u8)).collect();
        softmax_in_place(&mut weights);
        Ok(weights)
    }

    /// Whether `P(y_i = 1 | neighbors)` is nondecreasing in every neighbor,
    /// i.e. a binary model with a non-negative pairwise interaction. This is
    /// the ordering monotone coupling from the past needs.
    pub fn is_monotone(&self) -> bool {
        self.k == 2
            && self.pair_potential(1, 1) - self.pair_potential(0, 1) - self.pair_potential(1, 0)
                + self.pair_potential(0, 0)
                >= 0.0
    }

    /// True when the log-density is `base(y) + xi' T(y)` with `xi` given by
    /// [`Model::natural_parameters`]. The centered autologistic is not, since
    /// its centering depends nonlinearly on the coefficients.
    pub fn is_exponential_family(&self) -> bool {
        !matches!(self.pairwise, PairwiseSpec::CenteredAutologistic(_))
    }

    /// Names for the entries of [`Model::sufficient_statistics`].
    pub fn statistic_names(&self) -> Vec<String> {
        let mut names = Vec::new();
        match &self.field {
            ExternalField::Constant(alpha) => {
                if alpha.len() == 1 {
                    names.push("T1".to_string());
                } else {
                    names.extend((1..self.k).map(|l| format!("T1_{l}")));
                }
            }
            ExternalField::CovariateLinear { covariates, .. } => {
                for l in 1..self.k {
                    for c in 0..covariates.p() {
                        names.push(format!("T1_{l}_x{c}"));
                    }
                }
            }
            ExternalField::PerSiteTable { .. } => {}
        }
        match &self.pairwise {
            PairwiseSpec::FlexiblePotts { k, .. } => {
                for r in 0..*k {
                    for s in r..*k {
                        names.push(format!("T2_{r}{s}"));
                    }
                }
            }
            PairwiseSpec::OrdinalPotts { .. } => {
                names.extend(["T2_same", "T2_adjacent", "T2_other"].map(String::from));
            }
            _ => names.push("T2".to_string()),
        }
        names
    }

    /// Sufficient statistics, field terms first then pairwise terms.
    ///
    /// * constant field: `T_1l = sum_i g_l(y_i)` per non-reference class, where
    ///   `g` is the spin for physics-Ising and `I(y_i = l)` otherwise;
    /// * covariate field: `sum_i g_l(y_i) x_ic` per class and covariate;
    /// * per-site table: no field statistics (the table is a fixed base measure);
    /// * pairwise: `T_2 = sum_{i~j} g(y_i, y_j)`; flexible Potts gives one count
    ///   per unordered class pair `r <= s`, ordinal Potts counts per case.
    pub fn sufficient_statistics(&self, config: &Configuration) -> Result<Vec<f64>> {
        self.check(config)?;
        let mut stats = Vec::new();
        self.statistics_into(config.states(), &mut stats);
        Ok(stats)
    }

    /// Clears `stats` and fills it with the sufficient statistics of `y`.
    pub(crate) fn statistics_into(&self, y: &[u8], stats: &mut Vec<f64>) {
        stats.clear();
        let physics = matches!(self.pairwise, PairwiseSpec::PhysicsIsing(_));
        let g1 = |s: u8, l: usize| -> f64 {
            if physics {
                spin(s)
            } else {
                f64::from(u8::from(s as usize == l))
            }
        };
        match &self.field {
            ExternalField::Constant(_) => {
                for l in 1..self.k {
                    stats.push(y.iter().map(|&s| g1(s, l)).sum());
                }
            }
            ExternalField::CovariateLinear { covariates, .. } => {
                for l in 1..self.k {
                    for c in 0..covariates.p() {
                        stats.push(
                            y.iter()
                                .enumerate()
                                .map(|(i, &s)| g1(s, l) * covariates.row(i)[c])
                                .sum(),
                        );
                    }
                }
            }
            ExternalField::PerSiteTable { .. } => {}
        }
        let edges = self.nug.edges();
        match &self.pairwise {
            PairwiseSpec::FlexiblePotts { k, .. } => {
                let mut counts = alloc::vec![0.0; k * k];
                for &(i, j) in edges {
                    let (r, s) = (y[i].min(y[j]) as usize, y[i].max(y[j]) as usize);
                    counts[r * k + s] += 1.0;
                }
                for r in 0..*k {
                    for s in r..*k {
                        stats.push(counts[r * k + s]);
                    }
                }
            }
            PairwiseSpec::OrdinalPotts { .. } => {
                let mut counts = [0.0; 3];
                for &(i, j) in edges {
                    counts[(y[i].abs_diff(y[j]) as usize).min(2)] += 1.0;
                }
                stats.extend(counts);
            }
            spec => stats.push(edges.iter().map(|&(i, j)| spec.g_unchecked(y[i], y[j])).sum()),
        }
    }

    /// Natural parameters matching [`Model::sufficient_statistics`].
    pub fn natural_parameters(&self) -> Result<Vec<f64>> {
        if !self.is_exponential_family() {
            return Err(Error::unsupported(
                "centered autologistic is not an exponential family in its coefficients",
            ));
        }
        let mut xi = match &self.field {
            ExternalField::Constant(alpha) => alpha.clone(),
            ExternalField::CovariateLinear { coefficients, .. } => coefficients.clone(),
            ExternalField::PerSiteTable { .. } => Vec::new(),
        };
        match &self.pairwise {
            PairwiseSpec::FlexiblePotts { k, psi } => {
                for r in 0..*k {
                    for s in r..*k {
                        xi.push(psi[r * k + s]);
                    }
                }
            }
            PairwiseSpec::OrdinalPotts { same, adjacent, other } => xi.extend([*same, *adjacent, *other]),
            spec => xi.push(spec.psi().unwrap()),
        }
        Ok(xi)
    }

    /// Inverse of [`Model::natural_parameters`]. Ordinal Potts skips its
    /// ordering constraint here so finite differences can step across it.
    pub fn with_natural_parameters(&self, xi: &[f64]) -> Result<Self> {
        let current = self.natural_parameters()?;
        if xi.len() != current.len() {
            return Err(Error::invalid(format!(
                "expected {} natural parameters, got {}",
                current.len(),
                xi.len()
            )));
        }
        let n_field = current.len() - self.pairwise_parameter_count();
        let (field_xi, pair_xi) = xi.split_at(n_field);
        let field = match &self.field {
            ExternalField::Constant(_) => ExternalField::Constant(field_xi.to_vec()),
            ExternalField::CovariateLinear { covariates, .. } => {
                ExternalField::covariate_linear(covariates.clone(), field_xi.to_vec())
            }
            table => table.clone(),
        };
        let pairwise = match &self.pairwise {
            PairwiseSpec::FlexiblePotts { k, .. } => {
                let mut psi = alloc::vec![0.0; k * k];
                let mut it = pair_xi.iter();
                for r in 0..*k {
                    for s in r..*k {
                        let v = *it.next().unwrap();
                        psi[r * k + s] = v;
                        psi[s * k + r] = v;
                    }
                }
                PairwiseSpec::FlexiblePotts { k: *k, psi }
            }
            PairwiseSpec::OrdinalPotts { .. } => PairwiseSpec::OrdinalPotts {
                same: pair_xi[0],
                adjacent: pair_xi[1],
                other: pair_xi[2],
            },
            spec => spec.with_psi(pair_xi[0])?,
        };
        Self::build(self.shared_nug(), self.k, field, pairwise, false)
    }

    fn pairwise_parameter_count(&self) -> usize {
        match &self.pairwise {
            PairwiseSpec::FlexiblePotts { k, .. } => k * (k + 1) / 2,
            PairwiseSpec::OrdinalPotts { .. } => 3,
            _ => 1,
        }
    }
}
