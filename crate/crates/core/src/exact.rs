//! Brute-force enumeration over all `k^n` configurations of small models.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{exp, ln, CompensatedSum};
use crate::model::{Configuration, Model};

/// Default cap on the number of enumerated configurations.
pub const DEFAULT_CAP: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq)]
pub struct ExactSummary {
    pub n: usize,
    pub k: usize,
    /// `A(xi) = log Z`.
    pub log_partition: f64,
    /// Exact `E[T]` for the model's sufficient statistics.
    pub statistic_means: Vec<f64>,
    pub statistic_variances: Vec<f64>,
    /// Probabilities indexed by configuration code (see [`Configuration::code`]).
    pub distribution: Option<Vec<f64>>,
}

impl ExactSummary {
    pub fn probability(&self, config: &Configuration) -> Option<f64> {
        if config.len() != self.n || config.k() != self.k {
            return None;
        }
        self.distribution.as_ref().map(|d| d[config.code() as usize])
    }
}

fn state_count(model: &Model, cap: u64) -> Result<u64> {
    let (n, k) = (model.n(), model.k());
    let limit = Error::ResourceLimit {
        states: k,
        sites: n,
        cap,
    };
    let mut total: u64 = 1;
    for _ in 0..n {
        total = total.checked_mul(k as u64).ok_or(limit.clone())?;
        if total > cap {
            return Err(limit);
        }
    }
    Ok(total)
}

/// Visits every configuration in mixed-radix order, vertex 0 fastest.
fn for_each_config(n: usize, k: usize, total: u64, mut visit: impl FnMut(&[u8])) {
    let mut y = alloc::vec![0u8; n];
    for code in 0..total {
        visit(&y);
        if code + 1 == total {
            break;
        }
        for s in y.iter_mut() {
            if (*s as usize) + 1 < k {
                *s += 1;
                break;
            }
            *s = 0;
        }
    }
}

/// Enumeration with the default cap.
pub fn enumerate(model: &Model, with_distribution: bool) -> Result<ExactSummary> {
    enumerate_capped(model, with_distribution, DEFAULT_CAP)
}

pub fn enumerate_capped(model: &Model, with_distribution: bool, cap: u64) -> Result<ExactSummary> {
    let total = state_count(model, cap)?;
    let (n, k) = (model.n(), model.k());

    let mut max = f64::NEG_INFINITY;
    for_each_config(n, k, total, |y| max = max.max(model.log_density_unchecked(y)));

    let mut stats = Vec::new();
    model.statistics_into(&alloc::vec![0u8; n], &mut stats);
    let d = stats.len();

    let mut z = CompensatedSum::default();
    let mut first = alloc::vec![CompensatedSum::default(); d];
    let mut weights = with_distribution.then(|| Vec::with_capacity(total as usize));
    for_each_config(n, k, total, |y| {
        let w = exp(model.log_density_unchecked(y) - max);
        z.add(w);
        model.statistics_into(y, &mut stats);
        for (acc, t) in first.iter_mut().zip(&stats) {
            acc.add(w * t);
        }
        if let Some(ws) = weights.as_mut() {
            ws.push(w);
        }
    });
    let z = z.value();
    let means: Vec<f64> = first.iter().map(|s| s.value() / z).collect();

    let mut second = alloc::vec![CompensatedSum::default(); d];
    for_each_config(n, k, total, |y| {
        let w = exp(model.log_density_unchecked(y) - max);
        model.statistics_into(y, &mut stats);
        for ((acc, t), m) in second.iter_mut().zip(&stats).zip(&means) {
            acc.add(w * (t - m) * (t - m));
        }
    });

    let distribution = weights.map(|mut ws| {
        for w in ws.iter_mut() {
            *w /= z;
        }
        ws
    });
    Ok(ExactSummary {
        n,
        k,
        log_partition: max + ln(z),
        statistic_means: means,
        statistic_variances: second.iter().map(|s| s.value() / z).collect(),
        distribution,
    })
}

/// Exact mean and variance of an arbitrary statistic.
pub fn exact_statistic_moments(model: &Model, statistic: impl Fn(&Configuration) -> f64) -> Result<(f64, f64)> {
    let total = state_count(model, DEFAULT_CAP)?;
    let (n, k) = (model.n(), model.k());
    let mut max = f64::NEG_INFINITY;
    for_each_config(n, k, total, |y| max = max.max(model.log_density_unchecked(y)));

    let mut weights = Vec::with_capacity(total as usize);
    let mut values = Vec::with_capacity(total as usize);
    let mut z = CompensatedSum::default();
    let mut first = CompensatedSum::default();
    for_each_config(n, k, total, |y| {
        let w = exp(model.log_density_unchecked(y) - max);
        let config = Configuration::new(y.to_vec(), k).expect("enumerated states are valid");
        let t = statistic(&config);
        z.add(w);
        first.add(w * t);
        weights.push(w);
        values.push(t);
    });
    let z = z.value();
    let mean = first.value() / z;
    let mut second = CompensatedSum::default();
    for (w, t) in weights.iter().zip(&values) {
        second.add(w * (t - mean) * (t - mean));
    }
    Ok((mean, second.value() / z))
}

/// Residuals of the cumulant identities `dA/dxi = E[T]`, `d2A/dxi2 = var T`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientReport {
    pub finite_difference_gradient: Vec<f64>,
    pub finite_difference_curvature: Vec<f64>,
    pub exact_means: Vec<f64>,
    pub exact_variances: Vec<f64>,
    /// `max_j |dA/dxi_j - E[T_j]|`.
    pub first_order: f64,
    /// `max_j |d2A/dxi_j^2 - var T_j|`.
    pub second_order: f64,
}

/// Central differences of the enumerated `A(xi)` against exact moments.
pub fn gradient_check(model: &Model, step: f64) -> Result<GradientReport> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::invalid(format!("step must be positive, got {step}")));
    }
    let xi = model.natural_parameters()?;
    let center = enumerate(model, false)?;
    let log_partition_at = |j: usize, delta: f64| -> Result<f64> {
        let mut moved = xi.clone();
        moved[j] += delta;
        Ok(enumerate(&model.with_natural_parameters(&moved)?, false)?.log_partition)
    };
    let mut gradient = Vec::with_capacity(xi.len());
    let mut curvature = Vec::with_capacity(xi.len());
    for j in 0..xi.len() {
        let up = log_partition_at(j, step)?;
        let down = log_partition_at(j, -step)?;
        gradient.push((up - down) / (2.0 * step));
        curvature.push((up - 2.0 * center.log_partition + down) / (step * step));
    }
    let max_abs_diff = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    Ok(GradientReport {
        first_order: max_abs_diff(&gradient, &center.statistic_means),
        second_order: max_abs_diff(&curvature, &center.statistic_variances),
        finite_difference_gradient: gradient,
        finite_difference_curvature: curvature,
        exact_means: center.statistic_means,
        exact_variances: center.statistic_variances,
    })
}

/// Relative frequencies of sampled configurations, keyed by code.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    n: usize,
    k: usize,
    counts: BTreeMap<u64, u64>,
    total: u64,
}

impl EmpiricalDistribution {
    pub fn new(n: usize, k: usize) -> Self {
        EmpiricalDistribution {
            n,
            k,
            counts: BTreeMap::new(),
            total: 0,
        }
    }

    pub fn from_configurations<'a>(
        n: usize,
        k: usize,
        configs: impl IntoIterator<Item = &'a Configuration>,
    ) -> Result<Self> {
        let mut e = Self::new(n, k);
        for c in configs {
            e.add(c)?;
        }
        Ok(e)
    }

    pub fn add(&mut self, config: &Configuration) -> Result<()> {
        if config.len() != self.n || config.k() != self.k {
            return Err(Error::invalid("configuration does not match the empirical state space"));
        }
        *self.counts.entry(config.code()).or_insert(0) += 1;
        self.total += 1;
        Ok(())
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn frequency(&self, code: u64) -> f64 {
        match self.counts.get(&code) {
            Some(&c) => c as f64 / self.total as f64,
            None => 0.0,
        }
    }
}

/// `1/2 sum |p_hat - p|` over the whole configuration space.
pub fn total_variation(empirical: &EmpiricalDistribution, exact: &ExactSummary) -> Result<f64> {
    let dist = exact
        .distribution
        .as_ref()
        .ok_or_else(|| Error::invalid("exact summary was enumerated without its distribution"))?;
    if empirical.n != exact.n || empirical.k != exact.k {
        return Err(Error::invalid(format!(
            "state spaces differ: empirical {}^{}, exact {}^{}",
            empirical.k, empirical.n, exact.k, exact.n
        )));
    }
    if empirical.total == 0 {
        return Err(Error::invalid("empirical distribution is empty"));
    }
    let mut sum = CompensatedSum::default();
    for (code, p) in dist.iter().enumerate() {
        sum.add((empirical.frequency(code as u64) - p).abs());
    }
    Ok(0.5 * sum.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Nug, Order};
    use crate::model::{ExternalField, PairwiseSpec};
    use alloc::sync::Arc;
    use proptest::prelude::*;

    fn ising(rows: usize, cols: usize, alpha: f64, psi: f64) -> Model {
        Model::new(
            Arc::new(Nug::lattice(rows, cols, Order::First).unwrap()),
            2,
            ExternalField::constant(alpha),
            PairwiseSpec::Ising(psi),
        )
        .unwrap()
    }

    #[test]
    fn partition_function_examples() {
        let one = enumerate(&ising(1, 1, 0.0, 0.3), false).unwrap();
        assert!((one.log_partition - 2f64.ln()).abs() < 1e-15);

        let psi = 0.7;
        let two = enumerate(&ising(1, 2, 0.0, psi), false).unwrap();
        assert!((two.log_partition - (2.0 + 2.0 * psi.exp()).ln()).abs() < 1e-14);

        let four = enumerate(&ising(2, 2, 0.0, 0.0), true).unwrap();
        assert!((four.statistic_means[0] - 2.0).abs() < 1e-14);
        assert!((four.statistic_variances[0] - 1.0).abs() < 1e-14);
        let total: f64 = four.distribution.unwrap().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cap_is_enforced() {
        let m = ising(5, 5, 0.0, 0.1);
        assert_eq!(
            enumerate_capped(&m, false, 1 << 20),
            Err(Error::ResourceLimit {
                states: 2,
                sites: 25,
                cap: 1 << 20
            })
        );
        assert!(enumerate(&ising(10, 10, 0.0, 0.1), false).is_err());
    }

    #[test]
    fn statistic_moment_examples() {
        let prop_black = |c: &Configuration| c.count_of(1) as f64 / c.len() as f64;
        let (mean, _) = exact_statistic_moments(&ising(2, 3, 0.0, 0.9), prop_black).unwrap();
        assert!((mean - 0.5).abs() < 1e-14);

        let m = ising(2, 2, 0.0, 0.0);
        let matches = |c: &Configuration| {
            let y = c.states();
            m.nug().edges().iter().filter(|&&(i, j)| y[i] == y[j]).count() as f64 / 4.0
        };
        let (mean, _) = exact_statistic_moments(&m, matches).unwrap();
        assert!((mean - 0.5).abs() < 1e-14);
    }

    #[test]
    fn gradient_identities_hold() {
        let report = gradient_check(&ising(3, 3, 0.2, 0.4), 1e-4).unwrap();
        assert!(report.first_order < 1e-6, "{report:?}");
        assert!(report.second_order < 1e-4, "{report:?}");

        let independent = enumerate(&ising(3, 3, 0.0, 0.0), false).unwrap();
        assert!((independent.statistic_means[0] - 4.5).abs() < 1e-13);

        let auto = Model::new(
            Arc::new(Nug::lattice(2, 3, Order::First).unwrap()),
            2,
            ExternalField::constant(-0.1),
            PairwiseSpec::Autologistic(0.3),
        )
        .unwrap();
        assert!(gradient_check(&auto, 1e-4).unwrap().first_order < 1e-6);
        assert!(gradient_check(&auto, 0.0).is_err());
    }

    #[test]
    fn total_variation_examples() {
        let exact = enumerate(&ising(1, 2, 0.0, 0.0), true).unwrap();
        let point = Configuration::new(alloc::vec![1, 0], 2).unwrap();
        let e = EmpiricalDistribution::from_configurations(2, 2, [&point, &point]).unwrap();
        assert!((total_variation(&e, &exact).unwrap() - 0.75).abs() < 1e-15);

        let all: Vec<Configuration> = (0..4).map(|c| Configuration::from_code(c, 2, 2).unwrap()).collect();
        let e = EmpiricalDistribution::from_configurations(2, 2, &all).unwrap();
        assert!(total_variation(&e, &exact).unwrap().abs() < 1e-15);

        let other = enumerate(&ising(1, 3, 0.0, 0.0), true).unwrap();
        assert!(total_variation(&e, &other).is_err());
        let no_dist = enumerate(&ising(1, 2, 0.0, 0.0), false).unwrap();
        assert!(total_variation(&e, &no_dist).is_err());
    }

    #[test]
    fn zero_field_ising_distribution_is_complement_symmetric() {
        let s = enumerate(&ising(2, 3, 0.0, 0.8), true).unwrap();
        for code in 0..64 {
            let y = Configuration::from_code(code, 6, 2).unwrap();
            let p = s.probability(&y).unwrap();
            let q = s.probability(&y.complement().unwrap()).unwrap();
            assert!((p - q).abs() < 1e-15);
        }
    }

    proptest! {
        #[test]
        fn constant_singleton_shift(c in -2.0f64..2.0, psi in -1.0f64..1.0) {
            let base = Model::new(
                Arc::new(Nug::lattice(2, 3, Order::First).unwrap()),
                3,
                ExternalField::Constant(alloc::vec![0.3, -0.2]),
                PairwiseSpec::Potts(psi),
            ).unwrap();
            let mut table = Vec::new();
            for i in 0..6 {
                for l in 0..3u8 {
                    table.push(base.site_potential(i, l) + c);
                }
            }
            let shifted = base.with_field(ExternalField::PerSiteTable { table, k: 3 }).unwrap();
            let a = enumerate(&base, true).unwrap();
            let b = enumerate(&shifted, true).unwrap();
            prop_assert!((b.log_partition - a.log_partition - 6.0 * c).abs() < 1e-12);
            for (p, q) in a.distribution.unwrap().iter().zip(b.distribution.unwrap().iter()) {
                prop_assert!((p - q).abs() < 1e-14);
            }
        }

        #[test]
        fn log_partition_matches_reverse_order_sum(alpha in -1.0f64..1.0, psi in -1.0f64..1.5) {
            let m = ising(2, 3, alpha, psi);
            let s = enumerate(&m, false).unwrap();
            let mut logs: Vec<f64> = (0..64)
                .map(|c| m.unnormalized_log_density(&Configuration::from_code(c, 6, 2).unwrap()).unwrap())
                .collect();
            logs.reverse();
            let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let direct = max + logs.iter().map(|l| (l - max).exp()).sum::<f64>().ln();
            prop_assert!((s.log_partition - direct).abs() < 1e-12);
        }
    }
}
