//! SINE1 and CIRCLES benchmark streams with abrupt drift.
//!
//! Both generators draw features i.i.d. uniform on `[0, 1]` and change only
//! the labeling rule at exact multiples of `drift_period`, so their marginal
//! feature distributions never drift.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

use crate::math;
use crate::stream::{Dataset, FeatureRange, Sample, StreamSchema};

/// Recorded in generator metadata so streams can be reproduced elsewhere.
pub const RNG_ALGORITHM: &str = "chacha20; key = seed as u64 little-endian zero-padded to 32 bytes, \
zero nonce; uniform f64 = (next_u64 >> 11) * 2^-53";

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct Sine1Config {
    pub n_samples: usize,
    /// Samples between label reversals.
    pub drift_period: usize,
    /// Probability of flipping each emitted label.
    pub noise_rate: f64,
    pub seed: u64,
}

impl Default for Sine1Config {
    fn default() -> Self {
        Self {
            n_samples: 100_000,
            drift_period: 20_000,
            noise_rate: 0.10,
            seed: 42,
        }
    }
}

impl Sine1Config {
    pub fn validate(&self) -> Result<(), GeneratorError> {
        if self.n_samples == 0 {
            return Err(GeneratorError::Invalid("n_samples must be positive"));
        }
        if self.drift_period == 0 {
            return Err(GeneratorError::Invalid("drift_period must be positive"));
        }
        if !(0.0..=1.0).contains(&self.noise_rate) {
            return Err(GeneratorError::Invalid("noise_rate must lie in [0, 1]"));
        }
        Ok(())
    }

    /// Noise-free SINE1 label of `(x_a, x_b)` in drift segment `segment`.
    /// Odd segments carry the reversed labeling.
    pub fn clean_label(x_a: f64, x_b: f64, segment: usize) -> u32 {
        let below = x_b < math::sin(x_a);
        u32::from(below != (segment % 2 == 1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Circle {
    pub center_x: f64,
    pub center_y: f64,
    pub radius: f64,
}

impl Circle {
    pub const fn new(center_x: f64, center_y: f64, radius: f64) -> Self {
        Self {
            center_x,
            center_y,
            radius,
        }
    }

    /// Strict interior test.
    #[inline]
    pub fn contains(&self, x: f64, y: f64) -> bool {
        let dx = x - self.center_x;
        let dy = y - self.center_y;
        dx * dx + dy * dy < self.radius * self.radius
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct CirclesConfig {
    pub n_samples: usize,
    pub drift_period: usize,
    /// Segment `k` uses `circle_schedule[k % len]`.
    pub circle_schedule: Vec<Circle>,
    pub seed: u64,
}

impl Default for CirclesConfig {
    fn default() -> Self {
        Self {
            n_samples: 100_000,
            drift_period: 25_000,
            circle_schedule: vec![
                Circle::new(0.2, 0.5, 0.15),
                Circle::new(0.4, 0.5, 0.2),
                Circle::new(0.6, 0.5, 0.25),
                Circle::new(0.8, 0.5, 0.3),
            ],
            seed: 42,
        }
    }
}

impl CirclesConfig {
    pub fn validate(&self) -> Result<(), GeneratorError> {
        if self.n_samples == 0 {
            return Err(GeneratorError::Invalid("n_samples must be positive"));
        }
        if self.drift_period == 0 {
            return Err(GeneratorError::Invalid("drift_period must be positive"));
        }
        if self.circle_schedule.is_empty() {
            return Err(GeneratorError::Invalid("circle_schedule must not be empty"));
        }
        let unit = 0.0..=1.0;
        for c in &self.circle_schedule {
            if !unit.contains(&c.center_x) || !unit.contains(&c.center_y) || !(c.radius > 0.0 && c.radius <= 1.0) {
                return Err(GeneratorError::Invalid(
                    "circle centers must lie in [0,1]^2 with radius in (0, 1]",
                ));
            }
        }
        Ok(())
    }
}

/// Either benchmark configuration.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "dataset", rename_all = "lowercase"))]
pub enum GeneratorConfig {
    Sine1(Sine1Config),
    Circles(CirclesConfig),
}

impl GeneratorConfig {
    pub fn generate(&self) -> Result<Dataset, GeneratorError> {
        match self {
            Self::Sine1(c) => generate_sine1(c),
            Self::Circles(c) => generate_circles(c),
        }
    }

    pub fn true_drift_points(&self) -> Vec<u64> {
        match self {
            Self::Sine1(c) => true_drift_points(c.n_samples, c.drift_period),
            Self::Circles(c) => true_drift_points(c.n_samples, c.drift_period),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Sine1(_) => "sine1",
            Self::Circles(_) => "circles",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeneratorError {
    #[error("invalid generator config: {0}")]
    Invalid(&'static str),
}

struct UnitSource(ChaCha20Rng);

impl UnitSource {
    fn new(seed: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        Self(ChaCha20Rng::from_seed(key))
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    #[inline]
    fn next_unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

fn binary_schema(names: [&str; 2]) -> StreamSchema {
    let unit = FeatureRange { min: 0.0, max: 1.0 };
    StreamSchema {
        feature_names: names.iter().map(|s| s.to_string()).collect(),
        feature_ranges: vec![unit, unit],
        class_ids: vec![0, 1],
        class_labels: vec!["0".to_string(), "1".to_string()],
    }
}

/// SINE1: label 1 when `x_b < sin(x_a)` (radians), reversed every
/// `drift_period` samples, then each label flipped with `noise_rate`.
pub fn generate_sine1(config: &Sine1Config) -> Result<Dataset, GeneratorError> {
    config.validate()?;
    let mut rng = UnitSource::new(config.seed);
    let samples = (0..config.n_samples)
        .map(|i| {
            let x_a = rng.next_unit();
            let x_b = rng.next_unit();
            let flip = rng.next_unit() < config.noise_rate;
            let clean = Sine1Config::clean_label(x_a, x_b, i / config.drift_period);
            Sample {
                index: i as u64,
                features: vec![x_a, x_b],
                label: if flip { 1 - clean } else { clean },
            }
        })
        .collect();
    Ok(Dataset {
        schema: binary_schema(["x_a", "x_b"]),
        samples,
    })
}

/// CIRCLES: label 1 strictly inside the segment's circle.
pub fn generate_circles(config: &CirclesConfig) -> Result<Dataset, GeneratorError> {
    config.validate()?;
    let mut rng = UnitSource::new(config.seed);
    let schedule = &config.circle_schedule;
    let samples = (0..config.n_samples)
        .map(|i| {
            let x = rng.next_unit();
            let y = rng.next_unit();
            let circle = &schedule[(i / config.drift_period) % schedule.len()];
            Sample {
                index: i as u64,
                features: vec![x, y],
                label: u32::from(circle.contains(x, y)),
            }
        })
        .collect();
    Ok(Dataset {
        schema: binary_schema(["x", "y"]),
        samples,
    })
}

/// Multiples of `drift_period` strictly inside `(0, n_samples)`.
pub fn true_drift_points(n_samples: usize, drift_period: usize) -> Vec<u64> {
    if drift_period == 0 {
        return Vec::new();
    }
    (1..)
        .map(|k| k * drift_period)
        .take_while(|&p| p < n_samples)
        .map(|p| p as u64)
        .collect()
}
