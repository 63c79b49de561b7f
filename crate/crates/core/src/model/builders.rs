use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::{ExternalField, Model, PairwiseSpec};
use crate::error::{Error, Result};
use crate::graph::Nug;
use crate::math::ln;

/// Gaussian emission distribution of one latent class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianEmission {
    pub mean: f64,
    pub sd: f64,
}

/// Conditional MRF of latent classes given Gaussian observations.
///
/// Site `i`, class `l` gets singleton potential
/// `-(y_i - mu_l)^2 / (2 sigma_l^2) - log sigma_l`; classes interact through a
/// standard Potts term with parameter `psi`.
pub fn hmrf_conditional(
    nug: Arc<Nug>,
    emissions: &[GaussianEmission],
    observations: &[f64],
    psi: f64,
) -> Result<Model> {
    let k = emissions.len();
    if k < 2 {
        return Err(Error::invalid("need at least two emission classes"));
    }
    if let Some(e) = emissions.iter().find(|e| !(e.sd > 0.0) || !e.mean.is_finite()) {
        return Err(Error::invalid(format!(
            "emission sd must be positive and mean finite, got mean {} sd {}",
            e.mean, e.sd
        )));
    }
    if observations.len() != nug.n_vertices() {
        return Err(Error::invalid(format!(
            "{} observations for {} vertices",
            observations.len(),
            nug.n_vertices()
        )));
    }
    let mut table = Vec::with_capacity(observations.len() * k);
    for &y in observations {
        for e in emissions {
            let z = y - e.mean;
            table.push(-(z * z) / (2.0 * e.sd * e.sd) - ln(e.sd));
        }
    }
    Model::new(
        nug,
        k,
        ExternalField::PerSiteTable { table, k },
        PairwiseSpec::Potts(psi),
    )
}

/// Planar gradient `x_i = (r(i) + c(i) - n_r - 1) / (n_r - 1)` over an
/// `n_r x n_r` lattice, row-major with 1-based row and column.
pub fn build_gradient_covariate(n_r: usize) -> Result<Vec<f64>> {
    if n_r < 2 {
        return Err(Error::invalid(format!("gradient covariate needs n_r >= 2, got {n_r}")));
    }
    let denom = (n_r - 1) as f64;
    let mut x = Vec::with_capacity(n_r * n_r);
    for r in 1..=n_r {
        for c in 1..=n_r {
            x.push(((r + c) as f64 - n_r as f64 - 1.0) / denom);
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Order;
    use crate::model::Configuration;

    fn emissions() -> [GaussianEmission; 2] {
        [
            GaussianEmission { mean: 0.0, sd: 1.0 },
            GaussianEmission { mean: 1.0, sd: 1.0 },
        ]
    }

    #[test]
    fn gradient_corners_and_center() {
        let x = build_gradient_covariate(64).unwrap();
        assert_eq!(x.len(), 4096);
        assert_eq!(x[0], -1.0);
        assert_eq!(x[4095], 1.0);
        // r = 32, c = 33 (1-based)
        assert_eq!(x[31 * 64 + 32], 0.0);
        assert!(build_gradient_covariate(1).is_err());
    }

    #[test]
    fn gaussian_singleton_potentials() {
        let nug = Arc::new(Nug::lattice(1, 2, Order::First).unwrap());
        let m = hmrf_conditional(nug, &emissions(), &[0.5, 0.0], 0.7).unwrap();
        assert_eq!(m.site_potential(0, 0), m.site_potential(0, 1));
        assert_eq!(m.site_potential(1, 0), 0.0);
        assert_eq!(m.site_potential(1, 1), -0.5);
    }

    #[test]
    fn zero_psi_gives_softmax_of_emissions() {
        let nug = Arc::new(Nug::lattice(2, 2, Order::First).unwrap());
        let obs = [0.2, -1.3, 0.9, 2.4];
        let m = hmrf_conditional(nug, &emissions(), &obs, 0.0).unwrap();
        let y = Configuration::new(alloc::vec![1, 0, 1, 1], 2).unwrap();
        for (i, &o) in obs.iter().enumerate() {
            let w0: f64 = -(o * o) / 2.0;
            let w1: f64 = -((o - 1.0) * (o - 1.0)) / 2.0;
            let p1 = w1.exp() / (w0.exp() + w1.exp());
            let fc = m.full_conditional(&y, i).unwrap();
            assert!((fc[1] - p1).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_non_positive_sd() {
        let nug = Arc::new(Nug::lattice(1, 2, Order::First).unwrap());
        let bad = [
            GaussianEmission { mean: 0.0, sd: 1.0 },
            GaussianEmission { mean: 1.0, sd: 0.0 },
        ];
        assert!(matches!(
            hmrf_conditional(nug.clone(), &bad, &[0.0, 0.0], 0.5),
            Err(Error::InvalidArgument(_))
        ));
        assert!(hmrf_conditional(nug, &emissions(), &[0.0], 0.5).is_err());
    }
}
