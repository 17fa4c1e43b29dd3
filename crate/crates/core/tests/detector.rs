mod common;

use std::collections::VecDeque;

use pht_core::{
    detect_stream, generate_circles, generate_sine1, CirclesConfig, DetectorConfig, DriftDetector, FeatureRange,
    HoeffdingWindowDetector, Monitor, Sample, Sine1Config, SplitGrid,
};
use proptest::prelude::*;

fn per_class() -> DetectorConfig {
    DetectorConfig {
        monitor: Monitor::PerClass,
        ..DetectorConfig::default()
    }
}

#[test]
fn false_positives_stay_within_budget() {
    let fired = (0..30)
        .filter(|&seed| {
            let (schema, samples) = common::stationary(50_000, 2, 2, 1_000 + seed);
            !detect_stream(&samples, &schema, DetectorConfig::default())
                .unwrap()
                .drift_points
                .is_empty()
        })
        .count();
    assert!(fired <= 2, "{fired} of 30 stationary runs fired");
}

#[test]
fn a_mean_step_is_found_close_to_where_it_happens() {
    for (seed, step) in [(1, 12_345), (2, 30_000), (3, 7_777)] {
        let (schema, samples) = common::step_stream(40_000, step, 0.25, seed);
        let report = detect_stream(&samples, &schema, DetectorConfig::default()).unwrap();
        assert_eq!(report.drift_points.len(), 1, "{:?}", report.drift_points);
        let p = report.drift_points[0] as i64;
        assert!((p - step as i64).abs() <= 200, "step {step}, detected {p}");
    }
}

#[test]
fn sine1_per_class_finds_each_reversal_and_shrinks_the_window() {
    let data = generate_sine1(&Sine1Config::default()).unwrap();
    let report = detect_stream(&data.samples, &data.schema, per_class()).unwrap();
    assert_eq!(report.drift_points.len(), 4, "{:?}", report.drift_points);
    for (p, truth) in report.drift_points.iter().zip([20_000u64, 40_000, 60_000, 80_000]) {
        assert!(p.abs_diff(truth) <= 300, "{p} vs {truth}");
    }
    // The window collapses when a drift is confirmed, shortly after the cut point.
    let profile = report.window_size_profile();
    let drops: Vec<u64> = profile
        .windows(2)
        .filter(|w| (w[1].1 as f64) < 0.5 * w[0].1 as f64)
        .map(|w| w[1].0)
        .collect();
    assert_eq!(drops.len(), 4, "{drops:?}");
    for (d, p) in drops.iter().zip(&report.drift_points) {
        assert!(*d >= *p && d - p < 2_000, "drop at {d} for drift at {p}");
    }
    assert!(!report.evidence.is_empty());
    for e in &report.evidence {
        assert!(e.features.iter().any(|f| f.mean_gap > f.threshold));
    }
}

#[test]
fn marginal_mode_is_blind_to_label_swaps() {
    let data = generate_sine1(&Sine1Config::default()).unwrap();
    let report = detect_stream(&data.samples, &data.schema, DetectorConfig::default()).unwrap();
    assert!(report.drift_points.is_empty(), "{:?}", report.drift_points);
}

#[test]
fn the_window_only_ever_loses_its_oldest_samples() {
    let data = generate_circles(&CirclesConfig {
        n_samples: 60_000,
        ..CirclesConfig::default()
    })
    .unwrap();
    let config = DetectorConfig {
        max_window: 3_000,
        ..per_class()
    };
    let mut detector = HoeffdingWindowDetector::new(&data.schema, config).unwrap();
    let mut shadow: VecDeque<u64> = VecDeque::new();
    for s in &data.samples {
        detector.update(s).unwrap();
        shadow.push_back(s.index);
        let now: Vec<u64> = detector.window_indices().collect();
        // The current window must be a suffix of the shadow buffer.
        while shadow.len() > now.len() {
            shadow.pop_front();
        }
        assert!(shadow.iter().eq(now.iter()), "window at {} is not a suffix", s.index);
        assert_eq!(detector.window_len(), now.len());
    }
    let points = detector.drift_points();
    assert!(points.windows(2).all(|w| w[0] < w[1]));
    assert!(points.iter().all(|&p| p < 60_000));
}

#[test]
fn vanishing_delta_never_fires() {
    let tiny = DetectorConfig {
        delta: 1e-12,
        ..DetectorConfig::default()
    };
    let sine = generate_sine1(&Sine1Config::default()).unwrap();
    let circles = generate_circles(&CirclesConfig::default()).unwrap();
    for data in [&sine, &circles] {
        assert!(detect_stream(&data.samples, &data.schema, tiny)
            .unwrap()
            .drift_points
            .is_empty());
    }
    for seed in 0..5 {
        let (schema, samples) = common::stationary(50_000, 2, 2, seed);
        for monitor in [Monitor::Marginal, Monitor::PerClass] {
            let c = DetectorConfig { monitor, ..tiny };
            assert!(detect_stream(&samples, &schema, c).unwrap().drift_points.is_empty());
        }
    }
}

fn rescale(
    schema: &pht_core::StreamSchema,
    samples: &[Sample],
    a: f64,
    b: f64,
) -> (pht_core::StreamSchema, Vec<Sample>) {
    let mut schema = schema.clone();
    for r in &mut schema.feature_ranges {
        let (lo, hi) = (a * r.min + b, a * r.max + b);
        *r = FeatureRange {
            min: lo.min(hi),
            max: lo.max(hi),
        };
    }
    let samples = samples
        .iter()
        .map(|s| Sample {
            features: s.features.iter().map(|v| a * v + b).collect(),
            ..s.clone()
        })
        .collect();
    (schema, samples)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn drift_points_survive_affine_rescaling(
        seed in 0u64..1_000,
        step in 3_000usize..9_000,
        // Powers of two keep the rescaled arithmetic exact.
        k in -3i32..6,
        shift in -4i32..4,
        grid in prop_oneof![Just(SplitGrid::Geometric), Just(SplitGrid::Exhaustive)],
    ) {
        let (schema, samples) = common::step_stream(12_000, step, 0.3, seed);
        let config = DetectorConfig { split_grid: grid, max_window: 4_000, ..DetectorConfig::default() };
        let base = detect_stream(&samples, &schema, config).unwrap().drift_points;
        let (s2, x2) = rescale(&schema, &samples, 2f64.powi(k), shift as f64);
        let scaled = detect_stream(&x2, &s2, config).unwrap().drift_points;
        prop_assert_eq!(base, scaled);
    }

    #[test]
    fn drift_points_are_increasing_and_inside_the_stream(seed in 0u64..10_000, step in 100usize..5_900) {
        let (schema, samples) = common::step_stream(6_000, step, 0.45, seed);
        let report = detect_stream(&samples, &schema, DetectorConfig::default()).unwrap();
        prop_assert!(report.drift_points.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(report.drift_points.iter().all(|&p| p > 0 && p < 6_000));
        prop_assert_eq!(report.profile.len(), 6_000);
    }
}
