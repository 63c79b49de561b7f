use alloc::format;
use alloc::vec::Vec;

use super::is_match_formulation;
use crate::error::{Error, Result};
use crate::math::{exp, logistic, softmax_in_place};
use crate::model::{Configuration, Model};
use crate::rng::RandomSource;

pub(crate) fn check_supported(model: &Model) -> Result<()> {
    let spec = model.pairwise();
    if !is_match_formulation(spec) {
        return Err(Error::unsupported(format!(
            "Swendsen-Wang needs a symmetric match potential, not {}",
            spec.name()
        )));
    }
    if spec.psi().unwrap_or(0.0) < 0.0 {
        return Err(Error::unsupported("Swendsen-Wang needs psi >= 0"));
    }
    Ok(())
}

/// Reusable Swendsen-Wang workspace for one model.
#[derive(Debug, Clone)]
pub struct SwendsenWang {
    bond_probability: f64,
    parent: Vec<u32>,
    size: Vec<u32>,
    cluster_weights: Vec<f64>,
    roots: Vec<u32>,
    labels: Vec<u8>,
    labelled: Vec<bool>,
}

impl SwendsenWang {
    pub fn new(model: &Model) -> Result<Self> {
        check_supported(model)?;
        let n = model.n();
        // Match bonus f(a, a) - f(a, b): psi, or 2 psi on spins.
        let bonus = model.pair_potential(0, 0) - model.pair_potential(0, 1);
        Ok(SwendsenWang {
            bond_probability: 1.0 - exp(-bonus),
            parent: alloc::vec![0; n],
            size: alloc::vec![1; n],
            cluster_weights: alloc::vec![0.0; n * model.k()],
            roots: alloc::vec![0; n],
            labels: alloc::vec![0; n],
            labelled: alloc::vec![false; n],
        })
    }

    fn find(&mut self, mut i: u32) -> u32 {
        while self.parent[i as usize] != i {
            let grand = self.parent[self.parent[i as usize] as usize];
            self.parent[i as usize] = grand;
            i = grand;
        }
        i
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        let (big, small) = if self.size[ra as usize] >= self.size[rb as usize] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[small as usize] = big;
        self.size[big as usize] += self.size[small as usize];
    }

    pub fn step(&mut self, model: &Model, config: &Configuration, rng: &mut RandomSource) -> Result<Configuration> {
        model.check(config)?;
        let mut next = config.clone();
        self.step_in_place(model, next.states_mut(), rng);
        Ok(next)
    }

    pub(crate) fn step_in_place(&mut self, model: &Model, y: &mut [u8], rng: &mut RandomSource) {
        let n = y.len();
        let k = model.k();
        for i in 0..n {
            self.parent[i] = i as u32;
            self.size[i] = 1;
            self.labelled[i] = false;
        }
        if self.bond_probability > 0.0 {
            for &(i, j) in model.nug().edges() {
                if y[i] == y[j] && rng.uniform() < self.bond_probability {
                    self.union(i as u32, j as u32);
                }
            }
        }
        self.cluster_weights[..n * k].fill(0.0);
        for i in 0..n {
            let r = self.find(i as u32);
            self.roots[i] = r;
            let r = r as usize;
            for (l, w) in self.cluster_weights[r * k..(r + 1) * k].iter_mut().enumerate() {
                *w += model.site_potential(i, l as u8);
            }
        }
        // Clusters are relabelled in order of their lowest vertex.
        for (yi, &r) in y.iter_mut().zip(&self.roots) {
            let r = r as usize;
            if !self.labelled[r] {
                let weights = &mut self.cluster_weights[r * k..(r + 1) * k];
                self.labels[r] = if k == 2 {
                    u8::from(rng.uniform() < logistic(weights[1] - weights[0]))
                } else {
                    softmax_in_place(weights);
                    rng.categorical(weights) as u8
                };
                self.labelled[r] = true;
            }
            *yi = self.labels[r];
        }
    }
}

/// One Swendsen-Wang update.
pub fn swendsen_wang_step(model: &Model, config: &Configuration, rng: &mut RandomSource) -> Result<Configuration> {
    SwendsenWang::new(model)?.step(model, config, rng)
}
