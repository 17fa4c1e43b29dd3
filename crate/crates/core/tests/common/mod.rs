#![allow(dead_code)]

use pht_core::{FeatureRange, Sample, StreamSchema};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Independent uniform source, deliberately a different generator from the
/// one the crate uses.
pub struct Uniform(ChaCha8Rng);

impl Uniform {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn next(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}

pub fn schema(features: usize, classes: u32) -> StreamSchema {
    StreamSchema::new(
        (0..features).map(|i| format!("f{i}")).collect(),
        vec![FeatureRange { min: 0.0, max: 1.0 }; features],
        (0..classes).collect(),
        (0..classes).map(|c| c.to_string()).collect(),
    )
    .unwrap()
}

/// Stationary stream: i.i.d. uniform features, labels cycling over classes.
pub fn stationary(n: usize, features: usize, classes: u32, seed: u64) -> (StreamSchema, Vec<Sample>) {
    let mut u = Uniform::new(seed);
    let samples = (0..n)
        .map(|i| Sample {
            index: i as u64,
            features: (0..features).map(|_| u.next()).collect(),
            label: (u.next() * classes as f64) as u32,
        })
        .collect();
    (schema(features, classes), samples)
}

/// Uniform noise of half-width `spread` around 0.3 before `step` and 0.7 after.
pub fn step_stream(n: usize, step: usize, spread: f64, seed: u64) -> (StreamSchema, Vec<Sample>) {
    let mut u = Uniform::new(seed);
    let samples = (0..n)
        .map(|i| {
            let center = if i < step { 0.3 } else { 0.7 };
            Sample {
                index: i as u64,
                features: vec![center + spread * (2.0 * u.next() - 1.0)],
                label: 0,
            }
        })
        .collect();
    (schema(1, 1), samples)
}

/// Gradual drift: several feature means move linearly over the whole
/// stream, one feature is stationary and one is constant.
pub fn steady_drift(n: usize, seed: u64) -> (StreamSchema, Vec<Sample>) {
    let mut u = Uniform::new(seed);
    let samples: Vec<Sample> = (0..n)
        .map(|i| {
            let t = i as f64 / n as f64;
            let mut noise = |w: f64| w * (2.0 * u.next() - 1.0);
            let f0 = 0.3 + 0.4 * t + noise(0.08);
            let f1 = 0.7 - 0.3 * t + noise(0.10);
            let f2 = 0.5 + noise(0.5);
            let f3 = 0.2 + 0.3 * t * t + noise(0.05);
            // Class prevalence drifts too, independently of the stationary feature.
            let label = (u.next() < 0.35 + 0.3 * t) as u32;
            Sample {
                index: i as u64,
                features: vec![f0, f1, f2, f3, 3.0],
                label,
            }
        })
        .collect();
    let ranges = (0..5)
        .map(|f| {
            let (lo, hi) = samples
                .iter()
                .map(|s| s.features[f])
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
            FeatureRange { min: lo, max: hi }
        })
        .collect();
    let schema = StreamSchema::new(
        (0..5).map(|i| format!("f{i}")).collect(),
        ranges,
        vec![0, 1],
        vec!["0".into(), "1".into()],
    )
    .unwrap();
    (schema, samples)
}
