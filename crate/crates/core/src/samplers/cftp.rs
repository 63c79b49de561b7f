use alloc::format;

use crate::error::{Error, Result};
use crate::model::{Configuration, Model};
use crate::rng::RandomSource;

pub(crate) fn check_supported(model: &Model) -> Result<()> {
    if model.k() != 2 {
        return Err(Error::unsupported(format!(
            "coupling from the past needs a binary model, got k = {}",
            model.k()
        )));
    }
    if !model.is_monotone() {
        return Err(Error::unsupported(format!(
            "{} model is not monotone (repulsive interaction); coupling from the past does not apply",
            model.pairwise().name()
        )));
    }
    Ok(())
}

/// Exact draw by monotone coupling from the past.
///
/// Bottom (all zeros) and top (all ones) chains start at time `-T` and run
/// heat-bath sweeps to time 0 with shared uniforms. The sweep ending at time
/// `-t + 1` uses stream `rng.split(t)`, so longer horizons replay the same
/// randomness near time 0. `T` doubles from 1 up to `2^(max_epoch - 1)`.
pub fn cftp_sample(model: &Model, rng: &RandomSource, max_epoch: u32) -> Result<Configuration> {
    check_supported(model)?;
    if max_epoch == 0 {
        return Err(Error::invalid("cftp needs max_epoch >= 1"));
    }
    let n = model.n();
    let mut bottom = alloc::vec![0u8; n];
    let mut top = alloc::vec![1u8; n];
    let mut horizon: u64 = 1;
    for epoch in 0..max_epoch {
        bottom.fill(0);
        top.fill(1);
        for t in (1..=horizon).rev() {
            let mut stream = rng.split(t);
            for i in 0..n {
                let u = stream.uniform();
                bottom[i] = u8::from(u < model.prob_one(&bottom, i));
                top[i] = u8::from(u < model.prob_one(&top, i));
                debug_assert!(bottom[i] <= top[i], "sandwich violated at site {i}");
            }
        }
        if bottom == top {
            return Configuration::new(bottom, 2);
        }
        if epoch + 1 < max_epoch {
            horizon *= 2;
        }
    }
    Err(Error::NoCoalescence { last_horizon: horizon })
}
