//! Invariances and termination of the projection test and the sample scan.

use proptest::prelude::*;
use rand::Rng;
use rpod::detector::sample::{analyse_sample_with, ScanOptions};
use rpod::detector::{classify_point, declare, vote_analyse, vote_threshold, DetectorConstants, VoteMode};
use rpod::exec::Execution;
use rpod::rng;
use rpod::simulation::linalg::random_orthogonal;
use rpod::simulation::{reference_constants, run_experiment, CovarianceSpec, ExperimentConfig, ExperimentKind, ReferenceSet};
use rpod::stats::{project_scores, sample_unit_direction, DataMatrix};

fn random_data(seed: u64, n: usize, d: usize) -> (DataMatrix, Vec<f64>) {
    let mut r = rng::from_seed(seed);
    let m = rpod::simulation::standard_normal_matrix(&mut r, n, d);
    let x = (0..d).map(|_| r.random_range(-3.0..3.0)).collect();
    (m, x)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn scores_are_shift_and_scale_invariant(
        seed in any::<u64>(),
        n in 5usize..40,
        d in 2usize..12,
        scale in 0.01f64..100.0,
        shift_seed in any::<u64>(),
    ) {
        let (sample, point) = random_data(seed, n, d);
        let mut r = rng::from_seed(shift_seed);
        let shift: Vec<f64> = (0..d).map(|_| r.random_range(-100.0..100.0)).collect();
        let moved = sample.affine(scale, &shift).unwrap();
        let moved_point: Vec<f64> = point.iter().zip(&shift).map(|(x, s)| scale * x + s).collect();
        let v = sample_unit_direction(&mut r, d).unwrap();
        let (s0, _) = project_scores(&sample, &point, &v).unwrap();
        let (s1, _) = project_scores(&moved, &moved_point, &v).unwrap();
        prop_assert!((s0 - s1).abs() < 1e-9, "{} vs {}", s0, s1);

        // the whole sequential decision is unchanged under identical streams
        let c = DetectorConstants::new(0.05, 3.0, n, d, 0.05, 0.05, 10.0).unwrap();
        let d0 = classify_point(&point, &sample, &c, &mut rng::from_seed(seed ^ 1), 100_000).unwrap();
        let d1 = classify_point(&moved_point, &moved, &c, &mut rng::from_seed(seed ^ 1), 100_000).unwrap();
        prop_assert_eq!(d0.verdict, d1.verdict);
        prop_assert_eq!(d0.projections_used, d1.projections_used);
        prop_assert!((d0.final_score - d1.final_score).abs() < 1e-9);
    }

    #[test]
    fn scores_are_rotation_invariant(seed in any::<u64>(), n in 5usize..30, d in 2usize..10) {
        let (sample, point) = random_data(seed, n, d);
        let mut r = rng::from_seed(seed.wrapping_add(7));
        let q = random_orthogonal(&mut r, d);
        let rotate = |x: &[f64]| {
            let mut out = vec![0.0; d];
            q.apply(x, &mut out);
            out
        };
        let rows: Vec<Vec<f64>> = sample.row_iter().map(rotate).collect();
        let rotated = DataMatrix::from_rows(&rows).unwrap();
        let v = sample_unit_direction(&mut r, d).unwrap();
        let qv = rpod::stats::Direction::from_vec(rotate(v.components())).unwrap();
        let (s0, _) = project_scores(&sample, &point, &v).unwrap();
        let (s1, _) = project_scores(&rotated, &rotate(&point), &qv).unwrap();
        prop_assert!((s0 - s1).abs() < 1e-9);
    }

    #[test]
    fn decision_respects_band(seed in any::<u64>(), a in 0.01f64..1.0, width in 0.0f64..4.0) {
        let (sample, point) = random_data(seed, 20, 4);
        let c = DetectorConstants::new(a, a + width, 20, 4, 0.05, 0.05, 5.0).unwrap();
        let dec = classify_point(&point, &sample, &c, &mut rng::from_seed(seed), 1_000_000).unwrap();
        if dec.is_outlier() {
            prop_assert!(dec.final_score.abs() > c.b);
        } else {
            prop_assert!(dec.final_score.abs() < c.a);
        }
        prop_assert!(dec.projections_used >= 1);
    }

    #[test]
    fn scan_terminates_and_reports_sorted_subset(seed in any::<u64>(), n in 3usize..30, d in 2usize..6) {
        let (sample, _) = random_data(seed, n, d);
        let c = DetectorConstants::new(0.1, 3.0, n, d, 0.05, 0.05, 10.0).unwrap();
        let out = analyse_sample_with(&sample, &c, &ScanOptions::default(), &mut rng::from_seed(seed)).unwrap();
        prop_assert!(out.outliers.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(out.outliers.iter().all(|&i| i < n));
    }

    #[test]
    fn declarations_follow_flags(flags in proptest::collection::vec(0u32..100, 0..50), t in 0u32..100) {
        let declared = declare(&flags, t);
        for (i, &f) in flags.iter().enumerate() {
            prop_assert_eq!(declared.contains(&i), f > t);
        }
    }
}

#[test]
fn vote_is_mode_independent_and_flags_gross_outlier() {
    let (sample, _) = random_data(3, 40, 20);
    let mut values = sample.as_slice().to_vec();
    values[..20].iter_mut().for_each(|v| *v += 25.0);
    let sample = DataMatrix::new(40, 20, values).unwrap();
    let c = DetectorConstants::new(0.0326, 4.6374, 40, 20, 0.05, 0.05, 50.0).unwrap();
    let seq = vote_analyse(&sample, &c, 30, VoteMode::Proportional, Execution::Sequential, &mut rng::from_seed(1)).unwrap();
    let par = vote_analyse(&sample, &c, 30, VoteMode::Proportional, Execution::Parallel, &mut rng::from_seed(1)).unwrap();
    assert_eq!(seq, par);
    assert_eq!(seq.flags[0], 30);
    assert!(seq.declared.contains(&0));
    assert_eq!(seq.threshold, vote_threshold(30, 0.05, VoteMode::Proportional).unwrap());
}

#[test]
fn median_point_is_regular() {
    let c = reference_constants(ReferenceSet::Large, 100, 50, 50).unwrap();
    let mut r = rng::from_seed(11);
    let mut regular = 0;
    for _ in 0..500 {
        let sample = rpod::simulation::standard_normal_matrix(&mut r, 100, 50);
        let point = sample.column_medians();
        let dec = classify_point(&point, &sample, &c, &mut r, c.default_cap()).unwrap();
        regular += (!dec.is_outlier()) as usize;
    }
    assert!(regular as f64 / 500.0 >= 0.99);
}

#[test]
fn rejection_increases_with_radius() {
    let c = reference_constants(ReferenceSet::Large, 50, 50, 50).unwrap();
    let props: Vec<(f64, f64)> = [1.0, 1.2, 2.0]
        .iter()
        .map(|&r| {
            let cfg = ExperimentConfig {
                kind: ExperimentKind::Level { multiplier: r },
                n: 50,
                d: 50,
                covariance: CovarianceSpec::identity(50),
                constants: c.clone(),
                reps: 4000,
                seed: 2718,
                cap: None,
            };
            let rep = run_experiment(&cfg, Execution::default()).unwrap();
            (rep.rejection_proportion, rep.standard_error())
        })
        .collect();
    for w in props.windows(2) {
        let ((p0, s0), (p1, s1)) = (w[0], w[1]);
        assert!(p1 - p0 >= 3.0 * (s0 * s0 + s1 * s1).sqrt(), "{props:?}");
    }
}
