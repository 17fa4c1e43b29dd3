//! Adaptive-window drift detection.
//!
//! [`HoeffdingWindowDetector`] keeps the most recent samples in a window that
//! grows by one per update. After each update it compares, for every
//! admissible split of the window into an older prefix and a newer suffix,
//! the per-feature means of both halves. When a gap exceeds its Hoeffding
//! threshold the prefix is discarded, oldest samples first, and the test is
//! repeated on what remains until every split passes. The reported drift
//! point is refined with a CUSUM scan of the offending statistic, so it
//! tracks the change itself rather than the first grid split that failed.
//!
//! In [`Monitor::PerClass`] mode each class-conditional feature mean is a
//! separate statistic, which catches label-swap drift that leaves the
//! marginal feature distributions untouched.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use crate::math;
use crate::stream::{ClassId, Sample, StreamSchema};

/// Which statistics the detector tracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Monitor {
    /// One mean per feature over all samples.
    #[default]
    Marginal,
    /// One mean per (class, feature) pair.
    PerClass,
}

/// Which split points are tested.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SplitGrid {
    /// Newest segment lengths `n_min * 2^k`; O(log window) splits per update.
    #[default]
    Geometric,
    /// Every split leaving at least `n_min` samples on each side.
    Exhaustive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct DetectorConfig {
    /// Overall confidence budget per update, shared by all tests.
    pub delta: f64,
    /// Minimum contributing samples per segment and statistic.
    pub n_min: usize,
    /// The window never grows beyond this many samples.
    pub max_window: usize,
    pub monitor: Monitor,
    pub split_grid: SplitGrid,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            delta: 0.002,
            n_min: 30,
            max_window: 10_000,
            monitor: Monitor::Marginal,
            split_grid: SplitGrid::Geometric,
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<(), DetectorError> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(DetectorError::InvalidConfig("delta must lie in (0, 1)"));
        }
        if self.n_min == 0 {
            return Err(DetectorError::InvalidConfig("n_min must be >= 1"));
        }
        if self.max_window < 2 * self.n_min {
            return Err(DetectorError::InvalidConfig("max_window must be >= 2 * n_min"));
        }
        Ok(())
    }
}

/// Mean gap of one feature at the split that triggered a drift.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FeatureEvidence {
    pub feature: usize,
    /// Class of the most significant statistic for this feature, in
    /// per-class mode.
    pub class: Option<ClassId>,
    pub mean_gap: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DriftEvidence {
    pub point: u64,
    pub features: Vec<FeatureEvidence>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DriftReport {
    pub config: DetectorConfig,
    /// Stream index of the first sample after each drift, increasing.
    pub drift_points: Vec<u64>,
    pub evidence: Vec<DriftEvidence>,
    /// `(index, window length)` after every update.
    pub profile: Vec<(u64, usize)>,
}

impl DriftReport {
    pub fn window_size_profile(&self) -> &[(u64, usize)] {
        &self.profile
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DetectorError {
    #[error("invalid detector config: {0}")]
    InvalidConfig(&'static str),
    #[error("sample index {found} out of order, expected {expected}")]
    OutOfOrder { expected: u64, found: u64 },
    #[error("sample {index} has {found} features, detector expects {expected}")]
    Arity { index: u64, expected: usize, found: usize },
    #[error("sample {index} has unknown class {label}")]
    UnknownClass { index: u64, label: ClassId },
}

/// Streaming drift detector.
pub trait DriftDetector {
    /// Consumes the next sample; returns the stream index at which a drift
    /// was located, if any.
    fn update(&mut self, sample: &Sample) -> Result<Option<u64>, DetectorError>;

    /// Current adaptive window length.
    fn window_len(&self) -> usize;

    /// `(index, window length)` after each update so far.
    fn window_size_profile(&self) -> &[(u64, usize)];
}

struct Candidate {
    split: usize,
    stat: usize,
    gap: f64,
    n0: u64,
    n1: u64,
}

/// Hoeffding mean-shift detector over an adaptive window.
#[derive(Debug, Clone)]
pub struct HoeffdingWindowDetector {
    config: DetectorConfig,
    n_features: usize,
    classes: Vec<ClassId>,
    mins: Vec<f64>,
    /// Range width per monitored statistic.
    widths: Vec<f64>,
    indices: VecDeque<u64>,
    /// `(len + 1) * stats` running sums; entry `i` covers window positions `< i`.
    cum_sums: VecDeque<f64>,
    cum_counts: VecDeque<u64>,
    last_index: Option<u64>,
    profile: Vec<(u64, usize)>,
    drift_points: Vec<u64>,
    evidence: Vec<DriftEvidence>,
}

impl HoeffdingWindowDetector {
    pub fn new(schema: &StreamSchema, config: DetectorConfig) -> Result<Self, DetectorError> {
        config.validate()?;
        let n_features = schema.feature_count();
        let classes = match config.monitor {
            Monitor::Marginal => Vec::new(),
            Monitor::PerClass => schema.class_ids.clone(),
        };
        let groups = classes.len().max(1);
        let widths: Vec<f64> = (0..groups)
            .flat_map(|_| schema.feature_ranges.iter().map(|r| r.width()))
            .collect();
        let stats = widths.len();
        let mut cum_sums = VecDeque::new();
        cum_sums.extend(core::iter::repeat_n(0.0, stats));
        let mut cum_counts = VecDeque::new();
        cum_counts.extend(core::iter::repeat_n(0, stats));
        Ok(Self {
            config,
            n_features,
            classes,
            mins: schema.feature_ranges.iter().map(|r| r.min).collect(),
            widths,
            indices: VecDeque::new(),
            cum_sums,
            cum_counts,
            last_index: None,
            profile: Vec::new(),
            drift_points: Vec::new(),
            evidence: Vec::new(),
        })
    }

    pub fn config(&self) -> &DetectorConfig {
        &self.config
    }

    /// Stream indices currently inside the adaptive window, oldest first.
    pub fn window_indices(&self) -> impl Iterator<Item = u64> + '_ {
        self.indices.iter().copied()
    }

    pub fn drift_points(&self) -> &[u64] {
        &self.drift_points
    }

    pub fn into_report(self) -> DriftReport {
        DriftReport {
            config: self.config,
            drift_points: self.drift_points,
            evidence: self.evidence,
            profile: self.profile,
        }
    }

    #[inline]
    fn stats(&self) -> usize {
        self.widths.len()
    }

    fn push(&mut self, sample: &Sample) -> Result<(), DetectorError> {
        let k = self.stats();
        let base = self.cum_sums.len() - k;
        let group = if self.classes.is_empty() {
            0
        } else {
            self.classes
                .binary_search(&sample.label)
                .map_err(|_| DetectorError::UnknownClass {
                    index: sample.index,
                    label: sample.label,
                })?
        };
        for s in 0..k {
            let hit = s / self.n_features == group;
            let (sum, count) = (self.cum_sums[base + s], self.cum_counts[base + s]);
            if hit {
                let f = s % self.n_features;
                self.cum_sums.push_back(sum + (sample.features[f] - self.mins[f]));
                self.cum_counts.push_back(count + 1);
            } else {
                self.cum_sums.push_back(sum);
                self.cum_counts.push_back(count);
            }
        }
        self.indices.push_back(sample.index);
        Ok(())
    }

    fn drop_oldest(&mut self, n: usize) {
        let k = self.stats();
        self.indices.drain(..n);
        self.cum_sums.drain(..n * k);
        self.cum_counts.drain(..n * k);
    }

    #[inline]
    fn segment(&self, stat: usize, from: usize, to: usize) -> (f64, u64) {
        let k = self.stats();
        (
            self.cum_sums[to * k + stat] - self.cum_sums[from * k + stat],
            self.cum_counts[to * k + stat] - self.cum_counts[from * k + stat],
        )
    }

    fn split_points(&self) -> Vec<usize> {
        let len = self.indices.len();
        let n_min = self.config.n_min;
        if len < 2 * n_min {
            return Vec::new();
        }
        match self.config.split_grid {
            SplitGrid::Exhaustive => (n_min..=len - n_min).collect(),
            SplitGrid::Geometric => {
                let mut splits = Vec::new();
                let mut suffix = n_min;
                while suffix <= len - n_min {
                    splits.push(len - suffix);
                    suffix *= 2;
                }
                splits
            }
        }
    }

    /// Most significant failing split, with its evidence, if any test fails.
    fn worst_split(&self) -> Option<(usize, Vec<FeatureEvidence>)> {
        let len = self.indices.len();
        let n_min = self.config.n_min as u64;
        let mut candidates = Vec::new();
        for split in self.split_points() {
            for stat in 0..self.stats() {
                let (s0, n0) = self.segment(stat, 0, split);
                let (s1, n1) = self.segment(stat, split, len);
                if n0 < n_min || n1 < n_min {
                    continue;
                }
                let gap = (s0 / n0 as f64 - s1 / n1 as f64).abs();
                candidates.push(Candidate {
                    split,
                    stat,
                    gap,
                    n0,
                    n1,
                });
            }
        }
        if candidates.is_empty() {
            return None;
        }
        let delta_per_test = self.config.delta / candidates.len() as f64;
        let threshold =
            |c: &Candidate| math::hoeffding_threshold(self.widths[c.stat], c.n0 as f64, c.n1 as f64, delta_per_test);
        let mut worst: Option<(usize, f64)> = None;
        for c in &candidates {
            let eps = threshold(c);
            if c.gap > eps {
                let ratio = if eps > 0.0 { c.gap / eps } else { f64::INFINITY };
                if worst.is_none_or(|(_, r)| ratio > r) {
                    worst = Some((c.split, ratio));
                }
            }
        }
        let (split, _) = worst?;

        let mut per_feature: Vec<Option<(FeatureEvidence, f64)>> = alloc::vec![None; self.n_features];
        for c in candidates.iter().filter(|c| c.split == split) {
            let eps = threshold(c);
            let ratio = if eps > 0.0 {
                c.gap / eps
            } else if c.gap > 0.0 {
                f64::INFINITY
            } else {
                0.0
            };
            let feature = c.stat % self.n_features;
            let class = (!self.classes.is_empty()).then(|| self.classes[c.stat / self.n_features]);
            let slot = &mut per_feature[feature];
            if slot.as_ref().is_none_or(|(_, r)| ratio > *r) {
                *slot = Some((
                    FeatureEvidence {
                        feature,
                        class,
                        mean_gap: c.gap,
                        threshold: eps,
                    },
                    ratio,
                ));
            }
        }
        Some((split, per_feature.into_iter().flatten().map(|(e, _)| e).collect()))
    }
}

impl HoeffdingWindowDetector {
    /// Most likely change position near a failing split.
    ///
    /// Scans `[split - suffix, len)` for the position maximizing the
    /// two-segment mean-shift statistic `sum n0 n1 / (n0 + n1) * gap^2 / width^2`
    /// over all monitored statistics. A failing split can lie before the
    /// change because segments shorter than `n_min` are never tested.
    fn refine_split(&self, split: usize) -> usize {
        let len = self.indices.len();
        let lo = split.saturating_sub(len - split).max(1);
        let mut best = (split, f64::NEG_INFINITY);
        for cut in lo..len {
            let mut score = 0.0;
            for stat in 0..self.stats() {
                let width = self.widths[stat];
                if width <= 0.0 {
                    continue;
                }
                let (s0, n0) = self.segment(stat, 0, cut);
                let (s1, n1) = self.segment(stat, cut, len);
                if n0 == 0 || n1 == 0 {
                    continue;
                }
                let (n0, n1) = (n0 as f64, n1 as f64);
                let gap = (s0 / n0 - s1 / n1) / width;
                score += n0 * n1 / (n0 + n1) * gap * gap;
            }
            if score > best.1 {
                best = (cut, score);
            }
        }
        best.0
    }
}

impl DriftDetector for HoeffdingWindowDetector {
    fn update(&mut self, sample: &Sample) -> Result<Option<u64>, DetectorError> {
        if let Some(last) = self.last_index {
            if sample.index != last + 1 {
                return Err(DetectorError::OutOfOrder {
                    expected: last + 1,
                    found: sample.index,
                });
            }
        }
        if sample.features.len() != self.n_features {
            return Err(DetectorError::Arity {
                index: sample.index,
                expected: self.n_features,
                found: sample.features.len(),
            });
        }
        self.push(sample)?;
        self.last_index = Some(sample.index);
        if self.indices.len() > self.config.max_window {
            self.drop_oldest(self.indices.len() - self.config.max_window);
        }

        let mut drift = None;
        while let Some((split, features)) = self.worst_split() {
            let cut = self.refine_split(split);
            let point = self.indices[cut];
            self.drop_oldest(cut);
            drift = Some((point, features));
        }
        self.profile.push((sample.index, self.indices.len()));
        Ok(drift.map(|(point, features)| {
            self.drift_points.push(point);
            self.evidence.push(DriftEvidence { point, features });
            point
        }))
    }

    fn window_len(&self) -> usize {
        self.indices.len()
    }

    fn window_size_profile(&self) -> &[(u64, usize)] {
        &self.profile
    }
}

/// Runs a fresh detector over the whole stream.
pub fn detect_stream(
    stream: &[Sample],
    schema: &StreamSchema,
    config: DetectorConfig,
) -> Result<DriftReport, DetectorError> {
    let mut detector = HoeffdingWindowDetector::new(schema, config)?;
    for sample in stream {
        detector.update(sample)?;
    }
    Ok(detector.into_report())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::FeatureRange;
    use alloc::string::ToString;
    use alloc::vec;

    fn schema(features: usize, width: f64) -> StreamSchema {
        StreamSchema {
            feature_names: (0..features).map(|i| alloc::format!("f{i}")).collect(),
            feature_ranges: vec![FeatureRange { min: 0.0, max: width }; features],
            class_ids: vec![0, 1],
            class_labels: vec!["0".to_string(), "1".to_string()],
        }
    }

    fn sample(index: u64, v: f64) -> Sample {
        Sample {
            index,
            features: vec![v],
            label: (index % 2) as u32,
        }
    }

    #[test]
    fn constant_stream_grows_to_cap() {
        let cfg = DetectorConfig {
            max_window: 100,
            ..Default::default()
        };
        let stream: Vec<Sample> = (0..250).map(|i| sample(i, 0.3)).collect();
        let report = detect_stream(&stream, &schema(1, 1.0), cfg).unwrap();
        assert!(report.drift_points.is_empty());
        for (i, &(index, len)) in report.profile.iter().enumerate() {
            assert_eq!(index, i as u64);
            assert_eq!(len, (i + 1).min(100));
        }
    }

    #[test]
    fn out_of_order_is_rejected() {
        let mut d = HoeffdingWindowDetector::new(&schema(1, 1.0), DetectorConfig::default()).unwrap();
        d.update(&sample(5, 0.1)).unwrap();
        assert_eq!(
            d.update(&sample(7, 0.1)),
            Err(DetectorError::OutOfOrder { expected: 6, found: 7 })
        );
    }

    #[test]
    fn unknown_class_in_per_class_mode() {
        let cfg = DetectorConfig {
            monitor: Monitor::PerClass,
            ..Default::default()
        };
        let mut d = HoeffdingWindowDetector::new(&schema(1, 1.0), cfg).unwrap();
        let mut s = sample(0, 0.1);
        s.label = 9;
        assert!(matches!(d.update(&s), Err(DetectorError::UnknownClass { .. })));
    }

    #[test]
    fn invalid_configs() {
        for cfg in [
            DetectorConfig {
                delta: 0.0,
                ..Default::default()
            },
            DetectorConfig {
                delta: 1.0,
                ..Default::default()
            },
            DetectorConfig {
                n_min: 0,
                ..Default::default()
            },
            DetectorConfig {
                max_window: 10,
                ..Default::default()
            },
        ] {
            assert!(HoeffdingWindowDetector::new(&schema(1, 1.0), cfg).is_err());
        }
    }

    #[test]
    fn deterministic_step_is_located_exactly() {
        // Noise-free step: the exhaustive grid pins the split on the step.
        let stream: Vec<Sample> = (0..600).map(|i| sample(i, if i < 400 { 0.0 } else { 1.0 })).collect();
        let cfg = DetectorConfig {
            split_grid: SplitGrid::Exhaustive,
            ..Default::default()
        };
        let report = detect_stream(&stream, &schema(1, 1.0), cfg).unwrap();
        assert_eq!(report.drift_points, vec![400]);
        // evidence comes from the split that failed, before refinement
        let ev = &report.evidence[0].features[0];
        assert!(ev.mean_gap > ev.threshold);
        // the window restarts at the step
        let drop = report.profile.windows(2).find(|w| w[1].1 < w[0].1).unwrap()[1];
        assert_eq!(drop.0 + 1 - drop.1 as u64, 400);
    }
}
