//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs the desk-scale presets, so expect several minutes.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use mrflab::commands::{run_studies, StudyRun};
use mrflab::presets::preset;
use mrflab_core::exact::{enumerate, gradient_check, total_variation, EmpiricalDistribution};
use mrflab_core::response::{FunctionalKind, ResponseEstimate};
use mrflab_core::samplers::{sample_batch, SamplerSpec};
use mrflab_core::stats::StatisticKind;
use mrflab_core::{Configuration, ExternalField, Model, Nug, Order, PairwiseSpec, RandomSource};

struct Verdict {
    passed: bool,
    detail: String,
}

impl Verdict {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Verdict {
            passed,
            detail: detail.into(),
        }
    }
}

fn lattice(rows: usize, cols: usize) -> Arc<Nug> {
    Arc::new(Nug::lattice(rows, cols, Order::First).unwrap())
}

fn model(rows: usize, cols: usize, k: usize, field: ExternalField, spec: PairwiseSpec) -> Model {
    Model::new(lattice(rows, cols), k, field, spec).unwrap()
}

fn timed(limit: Duration, f: impl FnOnce() -> Verdict) -> Verdict {
    let started = Instant::now();
    let v = f();
    let elapsed = started.elapsed();
    Verdict::new(
        v.passed && elapsed < limit,
        format!(
            "{}; {:.1}s (limit {}s)",
            v.detail,
            elapsed.as_secs_f64(),
            limit.as_secs()
        ),
    )
}

fn gradient_identities() -> Verdict {
    let mut rng = RandomSource::new(101);
    let mut draw = |lo: f64, hi: f64| lo + (hi - lo) * rng.uniform();
    let mut worst = (0.0f64, 0.0f64);
    for _ in 0..5 {
        let models = [
            model(
                3,
                3,
                2,
                ExternalField::constant(draw(-1.0, 1.0)),
                PairwiseSpec::Ising(draw(-1.0, 1.0)),
            ),
            model(
                3,
                3,
                2,
                ExternalField::constant(draw(-1.0, 1.0)),
                PairwiseSpec::PhysicsIsing(draw(-0.5, 0.5)),
            ),
            model(
                3,
                3,
                2,
                ExternalField::constant(draw(-1.0, 1.0)),
                PairwiseSpec::Autologistic(draw(-1.0, 1.0)),
            ),
            model(
                3,
                3,
                3,
                ExternalField::Constant(vec![draw(-1.0, 1.0), draw(-1.0, 1.0)]),
                PairwiseSpec::Potts(draw(-1.0, 1.0)),
            ),
        ];
        for m in &models {
            let r = gradient_check(m, 1e-4).unwrap();
            worst = (worst.0.max(r.first_order), worst.1.max(r.second_order));
        }
    }
    Verdict::new(
        worst.0 < 1e-6 && worst.1 < 1e-4,
        format!(
            "max |dA - E[T]| = {:.2e} (< 1e-6), max |d2A - var T| = {:.2e} (< 1e-4)",
            worst.0, worst.1
        ),
    )
}

fn sampler_moments() -> Verdict {
    let draws = 50_000;
    let cases = [
        (
            "ising",
            model(3, 3, 2, ExternalField::constant(0.2), PairwiseSpec::Ising(0.4)),
            vec![SamplerSpec::gibbs(20), SamplerSpec::swendsen_wang(10)],
        ),
        (
            "autologistic",
            model(3, 3, 2, ExternalField::constant(-0.1), PairwiseSpec::Autologistic(0.6)),
            vec![SamplerSpec::gibbs(20)],
        ),
    ];
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for (c, (name, m, specs)) in cases.iter().enumerate() {
        let exact = enumerate(m, false).unwrap();
        for (s, spec) in specs.iter().enumerate() {
            let sample = sample_batch(m, spec, draws, &RandomSource::new(202).split(c as u64).split(s as u64)).unwrap();
            for t in 0..2 {
                let values: Vec<f64> = sample.iter().map(|y| m.sufficient_statistics(y).unwrap()[t]).collect();
                let n = values.len() as f64;
                let mean = values.iter().sum::<f64>() / n;
                let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
                let z = (mean - exact.statistic_means[t]).abs() / (var / n).sqrt();
                worst = worst.max(z);
                parts.push(format!("{name}/{}/T{}: {z:.2}", spec.kind, t + 1));
            }
        }
    }
    Verdict::new(
        worst < 3.0,
        format!(
            "{draws} independent draws each; |error| in SE: {} (< 3)",
            parts.join(", ")
        ),
    )
}

fn cftp_exactness() -> Verdict {
    let cases = [
        (
            "ising",
            model(2, 2, 2, ExternalField::constant(0.2), PairwiseSpec::Ising(0.5)),
        ),
        (
            "autologistic",
            model(2, 2, 2, ExternalField::constant(0.0), PairwiseSpec::Autologistic(0.8)),
        ),
    ];
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for (c, (name, m)) in cases.iter().enumerate() {
        let exact = enumerate(m, true).unwrap();
        let draws = sample_batch(
            m,
            &SamplerSpec::cftp(20),
            10_000,
            &RandomSource::new(303).split(c as u64),
        )
        .unwrap();
        let empirical = EmpiricalDistribution::from_configurations(4, 2, &draws).unwrap();
        let tv = total_variation(&empirical, &exact).unwrap();
        worst = worst.max(tv);
        parts.push(format!("{name}: {tv:.4}"));
    }
    Verdict::new(
        worst < 0.02,
        format!("TV over 10000 draws: {} (< 0.02)", parts.join(", ")),
    )
}

fn coding_correspondence() -> Verdict {
    let (alpha, psi) = (0.35, -0.6);
    let physics = model(4, 4, 2, ExternalField::constant(alpha), PairwiseSpec::PhysicsIsing(psi));
    let ising = model(
        4,
        4,
        2,
        ExternalField::constant(2.0 * alpha),
        PairwiseSpec::Ising(2.0 * psi),
    );
    let edges = physics.nug().n_edges() as f64;
    let mut rng = RandomSource::new(404);
    let mut exact_relation = true;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..1000 {
        let states = (0..16).map(|_| rng.index(2) as u8).collect();
        let y = Configuration::new(states, 2).unwrap();
        let t_pi = physics.sufficient_statistics(&y).unwrap()[1];
        let t_i = ising.sufficient_statistics(&y).unwrap()[1];
        exact_relation &= t_pi == 2.0 * t_i - edges;
        let gap = physics.unnormalized_log_density(&y).unwrap() - ising.unnormalized_log_density(&y).unwrap();
        lo = lo.min(gap);
        hi = hi.max(gap);
    }
    Verdict::new(
        exact_relation && hi - lo < 1e-10,
        format!(
            "T2 relation exact on 1000 configurations: {exact_relation}; log-density gap spread {:.1e} (< 1e-10)",
            hi - lo
        ),
    )
}

fn track(run: &StudyRun, statistic: StatisticKind, functional: FunctionalKind) -> &ResponseEstimate {
    run.outcome
        .estimates
        .iter()
        .find(|e| e.statistic == statistic && e.functional == functional)
        .expect("track present")
}

/// Linear interpolation of a response track at `w`.
fn at(est: &ResponseEstimate, w: f64) -> f64 {
    let p = &est.points;
    let j = p.iter().position(|q| q.value >= w - 1e-9).expect("w inside grid");
    if (p[j].value - w).abs() < 1e-9 || j == 0 {
        return p[j].estimate;
    }
    let (a, b) = (&p[j - 1], &p[j]);
    a.estimate + (b.estimate - a.estimate) * (w - a.value) / (b.value - a.value)
}

fn phase_transition(runs: &[StudyRun]) -> Verdict {
    let run = &runs[0];
    let mean_black = track(run, StatisticKind::PropBlack, FunctionalKind::Mean);
    let sd_black = track(run, StatisticKind::PropBlack, FunctionalKind::Sd);
    let sd_matches = track(run, StatisticKind::PropMatches, FunctionalKind::Sd);
    let a = mean_black.points.iter().all(|p| {
        let tol = if p.value <= 0.8 + 1e-9 { 0.05 } else { 0.10 };
        (p.estimate - 0.5).abs() <= tol
    });
    let worst = mean_black
        .points
        .iter()
        .map(|p| (p.estimate - 0.5).abs())
        .fold(0.0, f64::max);
    let peak = sd_matches
        .points
        .iter()
        .max_by(|x, y| x.estimate.total_cmp(&y.estimate))
        .unwrap()
        .value;
    let b = (0.76 - 1e-9..=0.96 + 1e-9).contains(&peak);
    let ratio = at(sd_black, 1.2) / at(sd_black, 0.2);
    let c = ratio >= 5.0;
    Verdict::new(
        a && b && c,
        format!(
            "(a) {a}: max |mean prop_black - 0.5| = {worst:.4}; (b) {b}: sd prop_matches peaks at psi = {peak}; \
             (c) {c}: sd prop_black ratio 1.2/0.2 = {ratio:.2}"
        ),
    )
}

fn covariate_trends(runs: &[StudyRun]) -> Verdict {
    let by_name = |name: &str| runs.iter().find(|r| r.name == name).expect("run present");
    let (auto, centered, ising) = (
        by_name("autologistic"),
        by_name("centered_autologistic"),
        by_name("ising"),
    );
    let mean = FunctionalKind::Mean;
    let t = track(auto, StatisticKind::PropBlack, mean);
    let rise = at(t, 1.0) - at(t, 0.0);
    let a = rise > 0.2;
    let flat = |run: &StudyRun| {
        track(run, StatisticKind::PropBlack, mean)
            .points
            .iter()
            .map(|p| (p.estimate - 0.5).abs())
            .fold(0.0, f64::max)
    };
    let (dev_ising, dev_centered) = (flat(ising), flat(centered));
    let b = dev_ising <= 0.05 && dev_centered <= 0.05;
    let t = track(centered, StatisticKind::Misclassification, mean);
    let (c0, c15) = (at(t, 0.0), at(t, 1.5));
    let c = c15 > c0;
    let t = track(ising, StatisticKind::Misclassification, mean);
    let (d0, d08) = (at(t, 0.0), at(t, 0.8));
    let d = d08 < d0;
    let t = track(centered, StatisticKind::DominantColor, mean);
    let shift = (at(t, 0.5) - at(t, 0.0)).abs();
    let e = shift <= 0.05;
    Verdict::new(
        a && b && c && d && e,
        format!(
            "(a) {a}: autologistic prop_black rise to psi=1.0 = {rise:.3}; \
             (b) {b}: max |prop_black - 0.5| ising {dev_ising:.3}, centered {dev_centered:.3}; \
             (c) {c}: centered misclassification {c0:.3} -> {c15:.3} at 1.5; \
             (d) {d}: ising misclassification {d0:.3} -> {d08:.3} at 0.8; \
             (e) {e}: centered dominant_color shift to 0.5 = {shift:.3}"
        ),
    )
}

fn run_preset(name: &str, with_prior: bool, workers: usize) -> Vec<StudyRun> {
    run_studies(&preset(name).unwrap(), with_prior, workers).unwrap()
}

fn same_csv(a: &[StudyRun], b: &[StudyRun]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.name == y.name && x.csv == y.csv)
}

fn main() -> ExitCode {
    let mut verdicts: Vec<(&str, Verdict)> = Vec::new();
    let mut report = |label: &'static str, v: Verdict| {
        println!(
            "{} criterion {label}: {}",
            if v.passed { "PASS" } else { "FAIL" },
            v.detail
        );
        verdicts.push((label, v));
    };
    report(
        "1 gradient identities",
        timed(Duration::from_secs(10), gradient_identities),
    );
    report("2 sampler moments", timed(Duration::from_secs(120), sampler_moments));
    report("3 cftp exactness", timed(Duration::from_secs(60), cftp_exactness));
    report(
        "4 coding correspondence",
        timed(Duration::from_secs(10), coding_correspondence),
    );

    let mut fig2 = Vec::new();
    report(
        "5 phase transition (fig2-desk)",
        timed(Duration::from_secs(30 * 60), || {
            fig2 = run_preset("fig2-desk", false, 1);
            phase_transition(&fig2)
        }),
    );
    let mut fig4 = Vec::new();
    report(
        "6 covariate trends (fig4-desk)",
        timed(Duration::from_secs(45 * 60), || {
            fig4 = run_preset("fig4-desk", true, 4);
            covariate_trends(&fig4)
        }),
    );
    report("7 determinism", {
        let fig2_four = run_preset("fig2-desk", false, 4);
        let fig4_one = run_preset("fig4-desk", true, 1);
        let (two, four) = (same_csv(&fig2, &fig2_four), same_csv(&fig4, &fig4_one));
        Verdict::new(
            two && four,
            format!("fig2-desk 1 vs 4 workers identical: {two}; fig4-desk 4 vs 1 workers identical: {four}"),
        )
    });

    let failed = verdicts.iter().filter(|(_, v)| !v.passed).count();
    println!("acceptance: {} passed, {failed} failed", verdicts.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
