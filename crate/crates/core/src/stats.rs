//! Configuration summaries used by response functions.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::Nug;
use crate::model::{field_classification, Configuration, ExternalField, Model, PairwiseSpec};

fn require_binary(config: &Configuration) -> Result<()> {
    if config.k() != 2 {
        return Err(Error::unsupported(format!(
            "statistic needs binary data, got k = {}",
            config.k()
        )));
    }
    Ok(())
}

/// `T_1(y) / n`, the proportion of ones.
pub fn prop_black(config: &Configuration) -> Result<f64> {
    require_binary(config)?;
    Ok(config.count_of(1) as f64 / config.len() as f64)
}

/// Proportion of edges whose endpoints share a state.
pub fn prop_matches(nug: &Nug, config: &Configuration) -> Result<f64> {
    if nug.n_edges() == 0 {
        return Err(Error::invalid("proportion of matches is undefined without edges"));
    }
    if config.len() != nug.n_vertices() {
        return Err(Error::invalid("configuration length does not match the graph"));
    }
    let y = config.states();
    let matches = nug.edges().iter().filter(|&&(i, j)| y[i] == y[j]).count();
    Ok(matches as f64 / nug.n_edges() as f64)
}

/// `max(#zeros, #ones) / n`.
pub fn dominant_color(config: &Configuration) -> Result<f64> {
    require_binary(config)?;
    let ones = config.count_of(1);
    Ok(ones.max(config.len() - ones) as f64 / config.len() as f64)
}

/// One minus the agreement rate with the external-field classification.
pub fn misclassification_rate(config: &Configuration, field: &ExternalField) -> Result<f64> {
    let classes = field_classes(field, config.len())?;
    misclassification_against(config, &classes)
}

fn field_classes(field: &ExternalField, n: usize) -> Result<Vec<u8>> {
    (0..n).map(|i| field_classification(field, i)).collect()
}

fn misclassification_against(config: &Configuration, classes: &[u8]) -> Result<f64> {
    require_binary(config)?;
    let agree = config.states().iter().zip(classes).filter(|(y, a)| y == a).count();
    Ok(1.0 - agree as f64 / config.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StatisticKind {
    PropBlack,
    PropMatches,
    DominantColor,
    Misclassification,
    CategoryCount(u8),
    RawT1,
    RawT2,
}

impl fmt::Display for StatisticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatisticKind::PropBlack => f.write_str("prop_black"),
            StatisticKind::PropMatches => f.write_str("prop_matches"),
            StatisticKind::DominantColor => f.write_str("dominant_color"),
            StatisticKind::Misclassification => f.write_str("misclassification"),
            StatisticKind::CategoryCount(l) => write!(f, "category_count({l})"),
            StatisticKind::RawT1 => f.write_str("raw_T1"),
            StatisticKind::RawT2 => f.write_str("raw_T2"),
        }
    }
}

impl FromStr for StatisticKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "prop_black" => StatisticKind::PropBlack,
            "prop_matches" => StatisticKind::PropMatches,
            "dominant_color" => StatisticKind::DominantColor,
            "misclassification" => StatisticKind::Misclassification,
            "raw_T1" => StatisticKind::RawT1,
            "raw_T2" => StatisticKind::RawT2,
            other => {
                let inner = other
                    .strip_prefix("category_count(")
                    .and_then(|r| r.strip_suffix(')'))
                    .and_then(|l| l.parse::<u8>().ok());
                match inner {
                    Some(l) => StatisticKind::CategoryCount(l),
                    None => return Err(Error::invalid(format!("unknown statistic `{other}`"))),
                }
            }
        })
    }
}

/// A statistic bound to a model, with anything it needs precomputed.
#[derive(Debug, Clone)]
pub struct Statistic {
    kind: StatisticKind,
    classes: Option<Vec<u8>>,
}

impl Statistic {
    /// Checks `kind` against `model` and caches the field classification
    /// when needed.
    pub fn bind(kind: StatisticKind, model: &Model) -> Result<Self> {
        let binary_only = matches!(
            kind,
            StatisticKind::PropBlack
                | StatisticKind::DominantColor
                | StatisticKind::Misclassification
                | StatisticKind::RawT1
        );
        if binary_only && model.k() != 2 {
            return Err(Error::unsupported(format!("{kind} needs a binary model")));
        }
        match kind {
            StatisticKind::PropMatches if model.nug().n_edges() == 0 => {
                return Err(Error::invalid("proportion of matches is undefined without edges"))
            }
            StatisticKind::CategoryCount(l) if l as usize >= model.k() => {
                return Err(Error::invalid(format!("category {l} is not below k = {}", model.k())))
            }
            _ => {}
        }
        let classes = match kind {
            StatisticKind::Misclassification => Some(field_classes(model.field(), model.n())?),
            _ => None,
        };
        Ok(Statistic { kind, classes })
    }

    pub fn kind(&self) -> StatisticKind {
        self.kind
    }

    pub fn evaluate(&self, model: &Model, config: &Configuration) -> Result<f64> {
        match self.kind {
            StatisticKind::PropBlack => prop_black(config),
            StatisticKind::PropMatches => prop_matches(model.nug(), config),
            StatisticKind::DominantColor => dominant_color(config),
            StatisticKind::Misclassification => {
                misclassification_against(config, self.classes.as_deref().unwrap_or(&[]))
            }
            StatisticKind::CategoryCount(l) => Ok(config.count_of(l) as f64),
            StatisticKind::RawT1 => raw_t1(model, config),
            StatisticKind::RawT2 => raw_t2(model, config),
        }
    }
}

/// `sum_i g(y_i)`: spins for physics-Ising, the count of ones otherwise.
pub fn raw_t1(model: &Model, config: &Configuration) -> Result<f64> {
    require_binary(config)?;
    let ones = config.count_of(1) as f64;
    Ok(match model.pairwise() {
        PairwiseSpec::PhysicsIsing(_) => 2.0 * ones - config.len() as f64,
        _ => ones,
    })
}

/// `sum_{i~j} g(y_i, y_j)`; flexible and ordinal Potts sum their potentials.
pub fn raw_t2(model: &Model, config: &Configuration) -> Result<f64> {
    if config.len() != model.n() || config.k() != model.k() {
        return Err(Error::invalid("configuration does not match the model"));
    }
    let y = config.states();
    let spec = model.pairwise();
    Ok(model
        .nug()
        .edges()
        .iter()
        .map(|&(i, j)| spec.g_unchecked(y[i], y[j]))
        .sum())
}

/// Parses a comma-separated statistic list.
pub fn parse_statistics(list: &str) -> Result<Vec<StatisticKind>> {
    list.split(',').map(|s| s.trim().parse()).collect()
}
