mod common;

use pht_core::{
    filter_features, generate_circles, generate_sine1, mean_series, slice_windows, summarize_stream, tv_distance,
    CirclesConfig, ClassFilter, FeatureStatus, FilterConfig, Histogram, Sine1Config, WindowSpec,
};

#[test]
fn figure_window_counts_are_exact() {
    let sine = generate_sine1(&Sine1Config::default()).unwrap();
    let circles = generate_circles(&CirclesConfig::default()).unwrap();
    let s = summarize_stream(&sine.samples, &WindowSpec::disjoint(5_200).unwrap(), &sine.schema, 40);
    assert_eq!(s.len(), 19);
    let c = summarize_stream(
        &circles.samples,
        &WindowSpec::disjoint(5_000).unwrap(),
        &circles.schema,
        40,
    );
    assert_eq!(c.len(), 20);
    let spec = WindowSpec::new(500, 500, 17_550).unwrap();
    let zoom = summarize_stream(&sine.samples[..22_550], &spec, &sine.schema, 40);
    assert_eq!(zoom.len(), 10);
    assert_eq!(zoom[0].start, 17_550);
    assert_eq!(zoom[9].end(), 22_550);
}

#[test]
fn stationary_window_means_stay_inside_the_hoeffding_band() {
    let delta = 0.01;
    for seed in 0..5 {
        let (schema, samples) = common::stationary(50_000, 3, 2, seed);
        let size = 2_500;
        let summaries = summarize_stream(&samples, &WindowSpec::disjoint(size).unwrap(), &schema, 20);
        // Union bound over every window and feature.
        let tests = (summaries.len() * schema.feature_count()) as f64;
        let bound = ((2.0 * tests / delta).ln() / (2.0 * size as f64)).sqrt();
        for f in 0..3 {
            let series = mean_series(&summaries, f, ClassFilter::All).unwrap();
            for m in series.means() {
                assert!((m - 0.5).abs() < bound, "seed {seed} feature {f}: {m}");
            }
        }
    }
}

#[test]
fn stationary_features_score_below_the_drift_threshold() {
    for seed in 0..10 {
        let (schema, samples) = common::stationary(100_000, 2, 2, 100 + seed);
        let summaries = summarize_stream(&samples, &WindowSpec::disjoint(5_000).unwrap(), &schema, 1);
        assert_eq!(summaries.len(), 20);
        let reports = filter_features(&schema, &summaries, &FilterConfig::default()).unwrap();
        for r in reports {
            assert!(r.drift_score < 0.05, "seed {seed}: {r:?}");
            assert_eq!(r.status, FeatureStatus::DroppedNoDrift);
        }
    }
}

/// Brute-force oracle: recount every window directly from the samples.
#[test]
fn summaries_agree_with_direct_recounting() {
    let data = generate_circles(&CirclesConfig {
        n_samples: 5_000,
        ..CirclesConfig::default()
    })
    .unwrap();
    let spec = WindowSpec::new(700, 300, 123).unwrap();
    let summaries = summarize_stream(&data.samples, &spec, &data.schema, 10);
    let windows = slice_windows(&data.samples, &spec);
    assert_eq!(summaries.len(), windows.len());
    for (s, w) in summaries.iter().zip(&windows) {
        assert_eq!(s.start, w.start);
        for f in 0..2 {
            let mut counts = [0u64; 10];
            for sample in w.samples {
                let v = sample.features[f];
                // Right-closed bins on [0, 1]; zero joins the first bin.
                let b = ((v * 10.0).ceil() as usize).clamp(1, 10) - 1;
                counts[b] += 1;
            }
            assert_eq!(s.per_feature[f].histogram.counts, counts);
            let mean = w.samples.iter().map(|x| x.features[f]).sum::<f64>() / w.samples.len() as f64;
            assert!((s.per_feature[f].mean - mean).abs() < 1e-12);
        }
    }
}

/// TV distance between SINE1 per-class histograms jumps across every true
/// drift boundary, above anything seen between consecutive windows inside
/// a segment.
#[test]
fn tv_across_boundaries_dominates_within_segments() {
    let data = generate_sine1(&Sine1Config::default()).unwrap();
    let summaries = summarize_stream(&data.samples, &WindowSpec::disjoint(5_000).unwrap(), &data.schema, 40);
    let tv = |a: usize, f: usize, c: u32| -> f64 {
        let p: Histogram = summaries[a].per_feature[f].class_histogram(c).unwrap();
        let q: Histogram = summaries[a + 1].per_feature[f].class_histogram(c).unwrap();
        tv_distance(&p, &q).unwrap()
    };
    for f in 0..2 {
        for c in [0, 1] {
            let mut within = 0.0f64;
            let mut across = f64::INFINITY;
            for i in 0..summaries.len() - 1 {
                let d = tv(i, f, c);
                if summaries[i + 1].start.is_multiple_of(20_000) {
                    across = across.min(d);
                } else {
                    within = within.max(d);
                }
            }
            assert!(across > within, "feature {f} class {c}: {across} <= {within}");
        }
    }
}
