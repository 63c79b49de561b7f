use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Pairwise clique potential, which also names the formulation.
#[derive(Debug, Clone, PartialEq)]
pub enum PairwiseSpec {
    /// `psi * s_i * s_j` on spins `{-1, +1}`.
    PhysicsIsing(f64),
    /// `psi * y_i * y_j` on `{0, 1}`.
    Autologistic(f64),
    /// Autologistic pairwise term with the singleton potential shifted by
    /// `-psi * sum_{j in N(i)} mu_j`, `mu_j` the independence-model mean.
    CenteredAutologistic(f64),
    /// `psi * I(y_i = y_j)` on `{0, 1}`.
    Ising(f64),
    /// `psi * I(y_i = y_j)` on `{0, .., k-1}`.
    Potts(f64),
    /// `psi_{y_i y_j}` from a symmetric `k x k` matrix (row-major).
    FlexiblePotts { k: usize, psi: Vec<f64> },
    /// `same` if equal, `adjacent` if one category apart, `other` otherwise.
    OrdinalPotts { same: f64, adjacent: f64, other: f64 },
}

impl PairwiseSpec {
    pub fn name(&self) -> &'static str {
        match self {
            PairwiseSpec::PhysicsIsing(_) => "physics_ising",
            PairwiseSpec::Autologistic(_) => "autologistic",
            PairwiseSpec::CenteredAutologistic(_) => "centered_autologistic",
            PairwiseSpec::Ising(_) => "ising",
            PairwiseSpec::Potts(_) => "potts",
            PairwiseSpec::FlexiblePotts { .. } => "flexible_potts",
            PairwiseSpec::OrdinalPotts { .. } => "ordinal_potts",
        }
    }

    /// The single dependence parameter, when the formulation has one.
    pub fn psi(&self) -> Option<f64> {
        match *self {
            PairwiseSpec::PhysicsIsing(psi)
            | PairwiseSpec::Autologistic(psi)
            | PairwiseSpec::CenteredAutologistic(psi)
            | PairwiseSpec::Ising(psi)
            | PairwiseSpec::Potts(psi) => Some(psi),
            _ => None,
        }
    }

    pub fn with_psi(&self, psi: f64) -> Result<Self> {
        Ok(match self {
            PairwiseSpec::PhysicsIsing(_) => PairwiseSpec::PhysicsIsing(psi),
            PairwiseSpec::Autologistic(_) => PairwiseSpec::Autologistic(psi),
            PairwiseSpec::CenteredAutologistic(_) => PairwiseSpec::CenteredAutologistic(psi),
            PairwiseSpec::Ising(_) => PairwiseSpec::Ising(psi),
            PairwiseSpec::Potts(_) => PairwiseSpec::Potts(psi),
            other => {
                return Err(Error::unsupported(format!(
                    "{} has no single dependence parameter",
                    other.name()
                )))
            }
        })
    }

    pub fn is_binary(&self) -> bool {
        matches!(
            self,
            PairwiseSpec::PhysicsIsing(_)
                | PairwiseSpec::Autologistic(_)
                | PairwiseSpec::CenteredAutologistic(_)
                | PairwiseSpec::Ising(_)
        )
    }

    pub(crate) fn validate(&self, k: usize, strict_order: bool) -> Result<()> {
        if self.is_binary() && k != 2 {
            return Err(Error::invalid(format!("{} requires k = 2, got {k}", self.name())));
        }
        match self {
            PairwiseSpec::FlexiblePotts { k: mk, psi } => {
                if *mk != k || psi.len() != k * k {
                    return Err(Error::invalid(format!("flexible Potts matrix must be {k}x{k}")));
                }
                for r in 0..k {
                    for s in 0..r {
                        if psi[r * k + s] != psi[s * k + r] {
                            return Err(Error::invalid(format!(
                                "flexible Potts matrix is not symmetric at ({r}, {s})"
                            )));
                        }
                    }
                }
                if psi.iter().any(|v| !v.is_finite()) {
                    return Err(Error::invalid("flexible Potts entries must be finite"));
                }
            }
            PairwiseSpec::OrdinalPotts { same, adjacent, other } => {
                if ![same, adjacent, other].iter().all(|v| v.is_finite()) {
                    return Err(Error::invalid("ordinal Potts parameters must be finite"));
                }
                if strict_order && !(same >= adjacent && adjacent >= other) {
                    return Err(Error::invalid(format!(
                        "ordinal Potts requires psi1 >= psi2 >= psi3, got {same}, {adjacent}, {other}"
                    )));
                }
            }
            _ => {
                if !self.psi().is_some_and(f64::is_finite) {
                    return Err(Error::invalid("psi must be finite"));
                }
            }
        }
        Ok(())
    }

    /// `g(a, b)` for single-parameter formulations, or the pairwise potential
    /// itself for flexible and ordinal Potts. States must already be valid.
    pub(crate) fn g_unchecked(&self, a: u8, b: u8) -> f64 {
        match self {
            PairwiseSpec::PhysicsIsing(_) => spin(a) * spin(b),
            PairwiseSpec::Autologistic(_) | PairwiseSpec::CenteredAutologistic(_) => f64::from(a * b),
            PairwiseSpec::Ising(_) | PairwiseSpec::Potts(_) => f64::from(u8::from(a == b)),
            PairwiseSpec::FlexiblePotts { k, psi } => psi[a as usize * k + b as usize],
            PairwiseSpec::OrdinalPotts { same, adjacent, other } => match a.abs_diff(b) {
                0 => *same,
                1 => *adjacent,
                _ => *other,
            },
        }
    }

    /// The clique potential `f(a, b)`.
    pub(crate) fn potential(&self, a: u8, b: u8) -> f64 {
        match self.psi() {
            Some(psi) => psi * self.g_unchecked(a, b),
            None => self.g_unchecked(a, b),
        }
    }
}

#[inline]
pub(crate) fn spin(state: u8) -> f64 {
    if state == 0 {
        -1.0
    } else {
        1.0
    }
}

/// Pairwise `g(y_i, y_j)` with state checking against `k`.
///
/// Physics-Ising states are given in the 0/1 storage coding (0 is spin -1).
pub fn pairwise_g(spec: &PairwiseSpec, k: usize, yi: u8, yj: u8) -> Result<f64> {
    spec.validate(k, true)?;
    if yi as usize >= k || yj as usize >= k {
        return Err(Error::invalid(format!("states ({yi}, {yj}) must be below k = {k}")));
    }
    Ok(spec.g_unchecked(yi, yj))
}
