use super::*;
use crate::exact::enumerate;
use crate::graph::{Nug, Order};
use crate::math::logistic;
use crate::model::{build_gradient_covariate, Covariates, PairwiseSpec};
use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec;

fn ising(rows: usize, cols: usize, alpha: f64, psi: f64) -> Model {
    Model::new(
        Arc::new(Nug::lattice(rows, cols, Order::First).unwrap()),
        2,
        ExternalField::constant(alpha),
        PairwiseSpec::Ising(psi),
    )
    .unwrap()
}

fn gradient_model(n_r: usize, spec: PairwiseSpec) -> Model {
    let x = build_gradient_covariate(n_r).unwrap();
    let field = ExternalField::covariate_linear(Covariates::with_intercept(&x).unwrap(), vec![0.0, 0.0]);
    Model::new(Arc::new(Nug::lattice(n_r, n_r, Order::First).unwrap()), 2, field, spec).unwrap()
}

fn study(
    family: Family,
    points: Vec<f64>,
    statistic: StatisticKind,
    draws: usize,
    sampler: SamplerSpec,
) -> ResponseStudy {
    ResponseStudy {
        family,
        grid: GridSpec::new(points).unwrap(),
        statistics: vec![statistic],
        functionals: vec![FunctionalKind::Mean, FunctionalKind::Sd],
        draws,
        sampler,
        prior: None,
    }
}

#[test]
fn grid_validation() {
    assert!(GridSpec::new(vec![]).is_err());
    assert!(GridSpec::new(vec![0.0, 0.2, 0.1]).is_err());
    assert!(GridSpec::new(vec![0.1, 0.1]).is_err());
    let g = GridSpec::regular(0.0, 1.2, 0.02).unwrap();
    assert_eq!(g.len(), 61);
    assert_eq!(g.points()[60], 1.2);
    assert_eq!(g.points()[7], 0.14);
    assert_eq!(GridSpec::regular(0.0, 1.7, 0.06).unwrap().len(), 29);
    assert!(GridSpec::regular(0.0, 1.0, 0.0).is_err());
}

#[test]
fn functional_values() {
    let values = [1.0, 2.0, 3.0, 4.0];
    let mut rng = RandomSource::new(1);
    let out = apply_functionals(
        &values,
        &[FunctionalKind::Mean, FunctionalKind::Variance, FunctionalKind::Sd],
        &mut rng,
    );
    assert_eq!(out[0].0, 2.5);
    assert!((out[0].1 - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
    assert!((out[1].0 - 5.0 / 3.0).abs() < 1e-15);
    assert!((out[2].0 - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
    assert!(out[1].1 > 0.0 && out[2].1 > 0.0);
    assert_eq!("sd".parse::<FunctionalKind>().unwrap(), FunctionalKind::Sd);
    assert_eq!(FunctionalKind::Variance.to_string(), "variance");
    assert!("median".parse::<FunctionalKind>().is_err());
}

#[test]
fn symmetric_ising_has_half_black() {
    let family = Family::new(ising(4, 4, 0.0, 0.0), Parameter::Psi).unwrap();
    let est = estimate_response(
        &family,
        &GridSpec::new(vec![0.0]).unwrap(),
        StatisticKind::PropBlack,
        FunctionalKind::Mean,
        2000,
        &SamplerSpec::gibbs(5),
        &RandomSource::new(3),
    )
    .unwrap();
    let p = est.points[0];
    assert_eq!(p.draws, 2000);
    assert!((p.estimate - 0.5).abs() < 3.0 * p.mc_se, "{p:?}");
    assert_eq!(est.param_name, "psi");
    assert_eq!(est.formulation, "ising");
}

#[test]
fn mean_track_matches_exact_moments() {
    let template = ising(3, 3, 0.2, 0.0);
    let family = Family::new(template.clone(), Parameter::Psi).unwrap();
    let s = study(
        family,
        vec![0.0, 0.4, 0.8],
        StatisticKind::RawT2,
        3000,
        SamplerSpec::gibbs(30),
    );
    let outcome = s.run(&RandomSource::new(10)).unwrap();
    assert!(outcome.failures.is_empty());
    let mean = &outcome.estimates[0];
    assert_eq!(mean.functional, FunctionalKind::Mean);
    for p in &mean.points {
        let exact = enumerate(&template.with_psi(p.value).unwrap(), false).unwrap();
        assert!((p.estimate - exact.statistic_means[1]).abs() < 3.0 * p.mc_se, "{p:?}");
    }
}

#[test]
fn independence_point_matches_closed_form() {
    let x = [-1.0, -0.2, 0.3, 0.9, 0.0, 0.5];
    let field = ExternalField::covariate_linear(Covariates::with_intercept(&x).unwrap(), vec![0.1, 1.2]);
    let template = Model::new(
        Arc::new(Nug::lattice(2, 3, Order::First).unwrap()),
        2,
        field.clone(),
        PairwiseSpec::Autologistic(0.0),
    )
    .unwrap();
    let family = Family::new(template, Parameter::Psi).unwrap();
    let est = estimate_response(
        &family,
        &GridSpec::new(vec![0.0]).unwrap(),
        StatisticKind::PropBlack,
        FunctionalKind::Mean,
        4000,
        &SamplerSpec::cftp(10),
        &RandomSource::new(4),
    )
    .unwrap();
    let expected = (0..6).map(|i| logistic(0.1 + 1.2 * x[i])).sum::<f64>() / 6.0;
    let p = est.points[0];
    assert!((p.estimate - expected).abs() < 3.0 * p.mc_se);
}

#[test]
fn results_do_not_depend_on_cell_order() {
    let family = Family::new(ising(5, 5, 0.1, 0.0), Parameter::Psi).unwrap();
    let s = study(
        family,
        vec![0.0, 0.5, 1.0],
        StatisticKind::PropMatches,
        50,
        SamplerSpec::swendsen_wang(10),
    );
    let rng = RandomSource::new(21);
    let forward = s.run(&rng).unwrap();
    let mut indices: Vec<(usize, usize)> = (0..3).flat_map(|j| (0..50).map(move |b| (j, b))).collect();
    indices.reverse();
    let mut cells: Vec<(usize, Result<Vec<f64>>)> =
        indices.iter().map(|&(j, b)| (j * 50 + b, s.cell(j, b, &rng))).collect();
    cells.sort_by_key(|(i, _)| *i);
    let backward = s.collect(cells.into_iter().map(|(_, c)| c).collect(), &rng);
    assert_eq!(forward, backward);
    assert_eq!(forward, s.run(&rng).unwrap());
}

#[test]
fn point_mass_prior_reduces_to_response() {
    let template = gradient_model(3, PairwiseSpec::Autologistic(0.0));
    let family = Family::new(template.clone(), Parameter::Psi).unwrap();
    let beta = [0.4, -0.7];
    let fixed = Family::new(template.with_coefficients(beta.to_vec()).unwrap(), Parameter::Psi).unwrap();
    let grid = GridSpec::new(vec![0.0, 0.3]).unwrap();
    let prior = PriorSpec::new(vec![(beta[0], 0.0), (beta[1], 0.0)]).unwrap();
    let rng = RandomSource::new(6);
    for functional in [FunctionalKind::Mean, FunctionalKind::Variance] {
        let a = estimate_prior_predictive_response(
            &family,
            &grid,
            &prior,
            StatisticKind::Misclassification,
            functional,
            40,
            &SamplerSpec::cftp(12),
            &rng,
        )
        .unwrap();
        let b = estimate_response(
            &fixed,
            &grid,
            StatisticKind::Misclassification,
            functional,
            40,
            &SamplerSpec::cftp(12),
            &rng,
        )
        .unwrap();
        assert_eq!(a.points, b.points);
    }
}

#[test]
fn symmetric_prior_gives_half_black_at_independence() {
    let family = Family::new(gradient_model(4, PairwiseSpec::Autologistic(0.0)), Parameter::Psi).unwrap();
    let est = estimate_prior_predictive_response(
        &family,
        &GridSpec::new(vec![0.0]).unwrap(),
        &PriorSpec::standard_normal(2),
        StatisticKind::PropBlack,
        FunctionalKind::Mean,
        3000,
        &SamplerSpec::cftp(10),
        &RandomSource::new(12),
    )
    .unwrap();
    let p = est.points[0];
    assert!((p.estimate - 0.5).abs() < 3.0 * p.mc_se, "{p:?}");
}

#[test]
fn failed_grid_points_are_reported_and_others_kept() {
    let family = Family::new(ising(8, 8, 0.0, 0.0), Parameter::Psi).unwrap();
    let s = study(
        family,
        vec![0.0, 3.0],
        StatisticKind::PropBlack,
        5,
        SamplerSpec::cftp(2),
    );
    let outcome = s.run(&RandomSource::new(1)).unwrap();
    assert_eq!(outcome.estimates[0].points.len(), 1);
    assert_eq!(outcome.failures.len(), 1);
    match &outcome.failures[0] {
        Error::GridPoint { value, source, .. } => {
            assert_eq!(*value, 3.0);
            assert!(matches!(**source, Error::NoCoalescence { .. }));
        }
        other => panic!("unexpected {other:?}"),
    }
    let single = estimate_response(
        &s.family,
        &s.grid,
        StatisticKind::PropBlack,
        FunctionalKind::Mean,
        5,
        &s.sampler,
        &RandomSource::new(1),
    );
    assert!(matches!(single.unwrap_err().root(), Error::NoCoalescence { .. }));
}

#[test]
fn study_validation() {
    let family = Family::new(ising(3, 3, 0.0, 0.0), Parameter::Psi).unwrap();
    let mut s = study(
        family.clone(),
        vec![0.0],
        StatisticKind::PropBlack,
        1,
        SamplerSpec::gibbs(1),
    );
    assert!(s.validate().is_err());
    s.draws = 2;
    s.statistics.clear();
    assert!(s.validate().is_err());
    let repulsive = study(
        family,
        vec![-0.5, 0.0],
        StatisticKind::PropBlack,
        2,
        SamplerSpec::cftp(4),
    );
    assert!(repulsive.validate().is_err());
    assert!(Family::new(ising(3, 3, 0.0, 0.0), Parameter::Coefficient(0)).is_err());
    assert!(PriorSpec::new(vec![(0.0, -1.0)]).is_err());
}

fn track(values: &[f64]) -> ResponseEstimate {
    ResponseEstimate {
        formulation: "ising",
        param_name: "psi".to_string(),
        statistic: StatisticKind::PropBlack,
        functional: FunctionalKind::Mean,
        sampler: SamplerSpec::gibbs(1),
        seed: 0,
        points: values
            .iter()
            .enumerate()
            .map(|(j, &v)| ResponsePoint {
                value: j as f64,
                estimate: v,
                mc_se: 0.0,
                draws: 2,
            })
            .collect(),
        smoothed: None,
    }
}

#[test]
fn smoothing_examples() {
    let noisy = track(&[0.3, 0.9, 0.1, 0.5, 0.7]);
    let same = smooth_estimate(&noisy, 1).unwrap();
    assert_eq!(same.smoothed.unwrap(), vec![0.3, 0.9, 0.1, 0.5, 0.7]);
    assert_eq!(same.points, noisy.points);

    let flat = smooth_estimate(&track(&[0.4; 6]), 3).unwrap();
    assert!(flat.smoothed.unwrap().iter().all(|v| (v - 0.4).abs() < 1e-15));

    let line: Vec<f64> = (0..7).map(|j| 0.1 + 0.25 * j as f64).collect();
    let smoothed = smooth_estimate(&track(&line), 5).unwrap().smoothed.unwrap();
    for (s, l) in smoothed.iter().zip(&line) {
        assert!((s - l).abs() < 1e-14);
    }

    assert!(smooth_estimate(&noisy, 2).is_err());
    assert!(smooth_estimate(&noisy, 7).is_err());
}
