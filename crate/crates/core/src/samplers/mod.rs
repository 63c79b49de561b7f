//! Gibbs, Swendsen-Wang and monotone coupling-from-the-past samplers.
//!
//! Every sampler takes a [`RandomSource`]; a batch gives chain `c` the
//! stream `rng.split(c)`, so draws never depend on how chains are scheduled.

mod cftp;
mod gibbs;
mod swendsen_wang;

use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

pub use cftp::cftp_sample;
pub use gibbs::gibbs_sweep;
pub use swendsen_wang::{swendsen_wang_step, SwendsenWang};

use crate::error::{Error, Result};
use crate::model::{Configuration, Model, PairwiseSpec};
use crate::rng::RandomSource;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SamplerKind {
    Gibbs,
    SwendsenWang,
    Cftp,
}

impl fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SamplerKind::Gibbs => "gibbs",
            SamplerKind::SwendsenWang => "swendsen_wang",
            SamplerKind::Cftp => "cftp",
        })
    }
}

impl FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gibbs" => Ok(SamplerKind::Gibbs),
            "swendsen_wang" | "sw" => Ok(SamplerKind::SwendsenWang),
            "cftp" => Ok(SamplerKind::Cftp),
            other => Err(Error::invalid(format!("unknown sampler `{other}`"))),
        }
    }
}

/// Starting state of an approximate chain.
#[derive(Debug, Clone, PartialEq)]
pub enum Init {
    AllZero,
    AllOne,
    /// Each site drawn independently from the field-only distribution.
    UniformRandom,
    Given(Configuration),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerSpec {
    pub kind: SamplerKind,
    /// Sweeps (Gibbs) or steps (Swendsen-Wang) per draw; unused by CFTP.
    pub sweeps: usize,
    pub init: Init,
    /// CFTP doubles its horizon at most this many times.
    pub max_epoch: u32,
}

pub const DEFAULT_MAX_EPOCH: u32 = 20;

impl SamplerSpec {
    pub fn gibbs(sweeps: usize) -> Self {
        SamplerSpec {
            kind: SamplerKind::Gibbs,
            sweeps,
            init: Init::UniformRandom,
            max_epoch: DEFAULT_MAX_EPOCH,
        }
    }

    pub fn swendsen_wang(sweeps: usize) -> Self {
        SamplerSpec {
            kind: SamplerKind::SwendsenWang,
            ..Self::gibbs(sweeps)
        }
    }

    pub fn cftp(max_epoch: u32) -> Self {
        SamplerSpec {
            kind: SamplerKind::Cftp,
            sweeps: 0,
            init: Init::UniformRandom,
            max_epoch,
        }
    }

    pub fn with_init(mut self, init: Init) -> Self {
        self.init = init;
        self
    }

    /// Checks that this sampler can draw from `model`.
    pub fn validate(&self, model: &Model) -> Result<()> {
        match self.kind {
            SamplerKind::Gibbs | SamplerKind::SwendsenWang => {
                if self.sweeps == 0 {
                    return Err(Error::invalid("approximate samplers need sweeps >= 1"));
                }
                if let Init::Given(c) = &self.init {
                    model.check(c)?;
                }
                if self.kind == SamplerKind::SwendsenWang {
                    swendsen_wang::check_supported(model)?;
                }
            }
            SamplerKind::Cftp => {
                cftp::check_supported(model)?;
                if self.max_epoch == 0 {
                    return Err(Error::invalid("cftp needs max_epoch >= 1"));
                }
            }
        }
        Ok(())
    }
}

/// One independent draw: CFTP, or a fresh chain run for `spec.sweeps` steps.
pub fn draw(model: &Model, spec: &SamplerSpec, rng: &mut RandomSource) -> Result<Configuration> {
    spec.validate(model)?;
    if spec.kind == SamplerKind::Cftp {
        return cftp_sample(model, rng, spec.max_epoch);
    }
    let mut config = initial(model, &spec.init, rng);
    match spec.kind {
        SamplerKind::Gibbs => {
            for _ in 0..spec.sweeps {
                gibbs::sweep_in_place(model, config.states_mut(), rng);
            }
        }
        _ => {
            let mut sw = SwendsenWang::new(model)?;
            for _ in 0..spec.sweeps {
                sw.step_in_place(model, config.states_mut(), rng);
            }
        }
    }
    Ok(config)
}

/// `count` independent draws, chain `c` using `rng.split(c)`.
pub fn sample_batch(model: &Model, spec: &SamplerSpec, count: usize, rng: &RandomSource) -> Result<Vec<Configuration>> {
    spec.validate(model)?;
    (0..count)
        .map(|c| draw(model, spec, &mut rng.split(c as u64)))
        .collect()
}

fn initial(model: &Model, init: &Init, rng: &mut RandomSource) -> Configuration {
    let (n, k) = (model.n(), model.k());
    let constant = |s: u8| Configuration::constant(n, k, s).expect("state below k");
    match init {
        Init::AllZero => constant(0),
        Init::AllOne => constant(1),
        Init::Given(c) => c.clone(),
        Init::UniformRandom => {
            let mut config = constant(0);
            let mut weights = alloc::vec![0.0; k];
            for i in 0..n {
                weights.copy_from_slice(model.site_row(i));
                crate::math::softmax_in_place(&mut weights);
                config.states_mut()[i] = rng.categorical(&weights) as u8;
            }
            config
        }
    }
}

pub(crate) fn is_match_formulation(spec: &PairwiseSpec) -> bool {
    matches!(
        spec,
        PairwiseSpec::Ising(_) | PairwiseSpec::Potts(_) | PairwiseSpec::PhysicsIsing(_)
    )
}
