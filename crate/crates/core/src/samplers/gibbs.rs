use alloc::vec::Vec;

use crate::error::Result;
use crate::math::softmax_in_place;
use crate::model::{Configuration, Model};
use crate::rng::RandomSource;

/// One systematic raster-order Gibbs sweep.
pub fn gibbs_sweep(model: &Model, config: &Configuration, rng: &mut RandomSource) -> Result<Configuration> {
    model.check(config)?;
    let mut next = config.clone();
    sweep_in_place(model, next.states_mut(), rng);
    Ok(next)
}

pub(crate) fn sweep_in_place(model: &Model, y: &mut [u8], rng: &mut RandomSource) {
    if model.k() == 2 {
        for i in 0..y.len() {
            let p1 = model.prob_one(y, i);
            y[i] = u8::from(rng.uniform() < p1);
        }
        return;
    }
    let mut weights: Vec<f64> = alloc::vec![0.0; model.k()];
    for i in 0..y.len() {
        for (s, w) in weights.iter_mut().enumerate() {
            *w = model.local_log_weight(y, i, s as u8);
        }
        softmax_in_place(&mut weights);
        y[i] = rng.categorical(&weights) as u8;
    }
}
