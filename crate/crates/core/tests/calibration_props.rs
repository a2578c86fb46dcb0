//! Calibration checked against independent simulations and closed forms.

use proptest::prelude::*;
use rpod::calibration::*;
use rpod::exec::Execution;
use rpod::rng;
use rpod::simulation::{CovarianceKind, CovarianceSpec};
use rpod::stats::threshold_cnd;

fn ks_statistic(mut x: Vec<f64>, mut y: Vec<f64>) -> f64 {
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (mut i, mut j, mut best) = (0, 0, 0.0f64);
    while i < x.len() && j < y.len() {
        if x[i] <= y[j] {
            i += 1;
        } else {
            j += 1;
        }
        best = best.max((i as f64 / x.len() as f64 - j as f64 / y.len() as f64).abs());
    }
    best
}

#[test]
fn reduced_score_matches_full_simulation() {
    let (n, d, t, m) = (20, 10, 4.0, 20_000);
    let mut r = rng::from_seed(1);
    let fast: Vec<f64> = (0..m).map(|_| simulate_score(n, d, t, &mut r).unwrap()).collect();
    let full: Vec<f64> = (0..m).map(|_| simulate_score_full(n, d, t, &mut r).unwrap()).collect();
    let ks = ks_statistic(fast, full);
    // 0.1% critical value of the two-sample statistic
    assert!(ks < 1.95 * (2.0 / m as f64).sqrt(), "{ks}");
}

#[test]
fn lazy_sequence_matches_full_sequential_test() {
    let (n, d) = (20, 15);
    let t = threshold_cnd(n, d, 0.05).unwrap().c_nd;
    let (a, b) = (0.1, 3.0);
    let reps = 20_000;
    let lazy = estimate_level_with(a, b, n, d, t, reps, &LevelOptions::default(), 3).unwrap();
    let full_opts = LevelOptions { model: LevelModel::Covariance { spec: CovarianceSpec::identity(d) }, ..Default::default() };
    let full = estimate_level_with(a, b, n, d, t, reps, &full_opts, 4).unwrap();
    let se = (lazy.standard_error().powi(2) + full.standard_error().powi(2)).sqrt();
    assert!((lazy.level - full.level).abs() < 4.0 * se, "{lazy:?} {full:?}");
    let se_mean = ((lazy.projection_variance + full.projection_variance) / reps as f64).sqrt();
    assert!((lazy.mean_projections - full.mean_projections).abs() < 4.0 * se_mean, "{lazy:?} {full:?}");
}

fn empirical_cdf(sorted: &[f64], x: f64) -> f64 {
    sorted.partition_point(|&s| s <= x) as f64 / sorted.len() as f64
}

#[test]
fn projection_count_moments_match_geometric_law() {
    let (n, d, a, b) = (50, 50, 0.0325, 4.9714);
    let t = threshold_cnd(n, d, 0.05).unwrap().c_nd;
    let mut scores = simulate_scores(n, d, t, 400_000, Execution::default(), 21).unwrap();
    scores.sort_by(f64::total_cmp);
    let (mean, var) = expected_projections_identity(empirical_cdf(&scores, a), empirical_cdf(&scores, b)).unwrap();
    let est = estimate_level_with(a, b, n, d, t, 10_000, &LevelOptions::default(), 22).unwrap();
    assert!((est.mean_projections / mean - 1.0).abs() < 0.10, "{} vs {mean}", est.mean_projections);
    assert!((est.projection_variance / var - 1.0).abs() < 0.25, "{} vs {var}", est.projection_variance);
}

#[test]
fn projection_count_tail_is_geometric() {
    let (n, d, a) = (30, 20, 0.2);
    let t = threshold_cnd(n, d, 0.05).unwrap().c_nd;
    let runs = max_scores_before_regular(a, n, d, t, 40_000, Execution::default(), 5).unwrap();
    let survival = |k: usize| runs.iter().filter(|(_, used)| *used > k).count() as f64;
    let mut ratios = Vec::new();
    for k in 1..8 {
        let (s0, s1) = (survival(k), survival(k + 1));
        ratios.push((s1 / s0, (s1 / s0 * (1.0 - s1 / s0) / s0).sqrt()));
    }
    let pooled = ratios.iter().map(|r| r.0).sum::<f64>() / ratios.len() as f64;
    for (r, se) in &ratios {
        assert!((r - pooled).abs() < 4.0 * se + 1e-3, "{ratios:?}");
    }
}

#[test]
fn bisection_agrees_with_maximum_statistic() {
    let mut target = CalibrationTarget::new(30, 10, 0.1, 0.05, 10.0);
    target.mc_size = 20_000;
    target.level_reps = 5_000;
    target.tol_level = 0.005;
    let res = calibrate_with(&target, Execution::default(), 77).unwrap();
    let maxima = max_scores_before_regular(res.constants.a, 30, 10, res.radius, 50_000, Execution::default(), 78).unwrap();
    let level = maxima.iter().filter(|(m, _)| *m > res.constants.b).count() as f64 / maxima.len() as f64;
    let se = (0.1 * 0.9 / 5_000.0f64).sqrt();
    assert!((level - 0.1).abs() < target.tol_level + 3.0 * se, "{level} at b={}", res.constants.b);

    // the (1 - alpha) quantile of the maximum is the level-alpha choice of b
    let mut m: Vec<f64> = maxima.iter().map(|x| x.0).collect();
    m.sort_by(f64::total_cmp);
    let b_star = empirical_quantile(&m, 0.9).unwrap();
    let at_star = estimate_level_with(res.constants.a, b_star, 30, 10, res.radius, 20_000, &LevelOptions::default(), 79).unwrap();
    assert!((at_star.level - 0.1).abs() < 4.0 * at_star.standard_error(), "{at_star:?}");
}

#[test]
fn score_quantiles_for_the_fifty_by_fifty_design() {
    let t = threshold_cnd(50, 50, 0.05).unwrap().c_nd;
    let mut s = simulate_scores(50, 50, t, 1_000_000, Execution::default(), 6).unwrap();
    s.sort_by(f64::total_cmp);
    let (a, b) = initial_ab(&s, 0.05, 100.0).unwrap();
    assert!((b - 5.3212).abs() < 0.2, "{b}");
    assert!((a - 0.0163).abs() < 0.002, "{a}");
}

fn check_calibration(n: usize, d: usize, seed: u64) -> CalibrationResult {
    let target = CalibrationTarget::new(n, d, 0.05, 0.05, 50.0);
    let res = calibrate_with(&target, Execution::default(), seed).unwrap();
    let c = &res.constants;
    assert!((res.estimated_mean_projections / 50.0 - 1.0).abs() < 0.10, "{}", res.estimated_mean_projections);
    assert_eq!(c.provenance.seed, Some(seed));

    // an independent level estimate at the result
    let check = estimate_level_with(c.a, c.b, n, d, res.radius, 10_000, &LevelOptions::default(), seed + 1).unwrap();
    let bound = target.tol_level.max(3.0 * check.standard_error()) + 3.0 * check.standard_error();
    assert!((check.level - 0.05).abs() < bound, "{check:?}");
    res
}

#[test]
fn calibration_fifty_by_fifty() {
    let res = check_calibration(50, 50, 2024);
    let c = &res.constants;
    assert!((c.a - 0.033).abs() <= 0.002, "a={}", c.a);
    // published values: 4.9714 (N = 1e6) and 4.9870 (N = 1e5)
    assert!((c.b - 4.9714).abs() <= 0.08 || (c.b - 4.9870).abs() <= 0.08, "b={}", c.b);

    // exact level-alpha solution for this a, from the maximum statistic
    let maxima = max_scores_before_regular(c.a, 50, 50, res.radius, 100_000, Execution::default(), 31).unwrap();
    let mut m: Vec<f64> = maxima.iter().map(|x| x.0).collect();
    m.sort_by(f64::total_cmp);
    let b_star = empirical_quantile(&m, 0.95).unwrap();
    assert!((c.b - b_star).abs() < 0.06, "b={} vs {b_star}", c.b);
}

#[test]
fn calibration_hundred_by_five_hundred() {
    let res = check_calibration(100, 500, 2025);
    assert!((res.constants.a - 0.027).abs() <= 0.002, "a={}", res.constants.a);
    assert!((res.constants.b - 3.95).abs() <= 0.07, "b={}", res.constants.b);
}

#[test]
fn recalibration_under_covariance_keeps_a() {
    let mut target = CalibrationTarget::new(30, 8, 0.1, 0.05, 5.0);
    target.level_reps = 3_000;
    target.tol_level = 0.01;
    let spec = CovarianceSpec::new(CovarianceKind::Sigma2, 8);
    let res = recalibrate_for_covariance(&target, 0.15, 2.5, &spec, Execution::default(), 4).unwrap();
    assert_eq!(res.constants.a, 0.15);
    assert!(res.constants.b > res.constants.a);
    assert!((res.estimated_level - 0.1).abs() <= 0.01 || res.bisection_iterations >= 10);
}

proptest! {
    #[test]
    fn initial_band_is_ordered_and_inside_sample(
        mut v in proptest::collection::vec(0f64..20.0, 1..300),
        alpha in 0.001f64..0.5,
        h in 1f64..500.0,
    ) {
        v.sort_by(f64::total_cmp);
        let (a, b) = initial_ab(&v, alpha, h).unwrap();
        prop_assert!(a <= b);
        prop_assert!(a >= v[0] && b <= v[v.len() - 1]);
    }

    #[test]
    fn moments_are_geometric(fa in 0.0f64..1.0, gap in 0.0f64..0.999) {
        let fb = (fa + gap).min(1.0);
        prop_assume!(fb - fa < 1.0);
        let (m, v) = expected_projections_identity(fa, fb).unwrap();
        let p = fb - fa;
        // sum over the geometric pmf
        let (mut em, mut em2, mut prob) = (0.0, 0.0, 1.0 - p);
        for k in 1..20_000 {
            let kf = k as f64;
            em += kf * prob;
            em2 += kf * kf * prob;
            prob *= p;
        }
        prop_assert!((m - em).abs() < 1e-6 * m.max(1.0));
        prop_assert!((v - (em2 - em * em)).abs() < 1e-5 * v.max(1.0));
    }
}
