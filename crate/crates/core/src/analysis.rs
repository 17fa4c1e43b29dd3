//! Automated drift localization on PHT summaries.
//!
//! The workflow has three stages:
//!
//! 1. drop features whose range or within-window spread is negligible,
//! 2. rank the rest by how far their per-window mean lines move
//!    ([`filter_features`]),
//! 3. shrink the window around each significant jump until the change sits on
//!    a window boundary with no transition window ([`localize`],
//!    [`align_drift`]).
//!
//! Regions where shrinking never produces a sharp boundary are reported as
//! continuous drift instead of a point alignment.

use alloc::vec;
use alloc::vec::Vec;

use crate::histogram::{mean_series, summarize_stream, ClassFilter, WindowSummary};
use crate::math;
use crate::stream::{Sample, StreamSchema, WindowSpec};

/// Rule used to call a region continuous; reported with analysis output
/// because no principled stopping rule exists for it.
pub const CONTINUOUS_RULE: &str =
    "continuous when neither the final window nor two successive halvings of it give a statistically significant \
     boundary jump with sharpness above the threshold that persists at twice the window size";

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct FilterConfig {
    /// Features whose range width is below this are constant.
    pub range_epsilon: f64,
    /// Features whose largest within-window std, relative to the range
    /// width, stays below this have negligible variability.
    pub variability_epsilon: f64,
    /// Minimum drift score for a feature to be kept.
    pub drift_epsilon: f64,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            range_epsilon: 1e-9,
            variability_epsilon: 1e-3,
            drift_epsilon: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum FeatureStatus {
    Kept,
    DroppedConstant,
    DroppedLowVariability,
    DroppedNoDrift,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FeatureReport {
    pub feature: usize,
    pub status: FeatureStatus,
    /// Spread (`max - min`) of the mean line divided by the range width,
    /// maximized over the overall and per-class lines.
    pub drift_score: f64,
    /// Mean line that produced `drift_score`.
    pub class_filter: ClassFilter,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalysisError {
    #[error("need at least 2 windows, got {0}")]
    TooFewWindows(usize),
    #[error("drift point {point} leaves no room for a window of {window_size} on each side (stream length {len})")]
    TooCloseToEdge {
        point: usize,
        window_size: usize,
        len: usize,
    },
    #[error("no feature with a non-zero range")]
    NoFeatures,
    #[error("invalid analysis config: {0}")]
    InvalidConfig(&'static str),
}

fn class_filters(schema: &StreamSchema) -> Vec<ClassFilter> {
    core::iter::once(ClassFilter::All)
        .chain(schema.class_ids.iter().map(|&c| ClassFilter::Class(c)))
        .collect()
}

/// Scores every feature; kept features come first in descending score
/// order, dropped ones follow in feature order.
pub fn filter_features(
    schema: &StreamSchema,
    summaries: &[WindowSummary],
    config: &FilterConfig,
) -> Result<Vec<FeatureReport>, AnalysisError> {
    if summaries.len() < 2 {
        return Err(AnalysisError::TooFewWindows(summaries.len()));
    }
    let filters = class_filters(schema);
    let mut reports: Vec<FeatureReport> = schema
        .feature_ranges
        .iter()
        .enumerate()
        .map(|(feature, range)| {
            let width = range.width();
            if width < config.range_epsilon {
                return FeatureReport {
                    feature,
                    status: FeatureStatus::DroppedConstant,
                    drift_score: 0.0,
                    class_filter: ClassFilter::All,
                };
            }
            let (class_filter, spread) = filters
                .iter()
                .map(|&filter| {
                    let spread = mean_series(summaries, feature, filter)
                        .map(|s| s.spread())
                        .unwrap_or(0.0);
                    (filter, spread)
                })
                .fold((ClassFilter::All, f64::NEG_INFINITY), |best, cur| {
                    if cur.1 > best.1 {
                        cur
                    } else {
                        best
                    }
                });
            let drift_score = spread / width;
            let max_std = summaries.iter().map(|s| s.per_feature[feature].std).fold(0.0, f64::max);
            let status = if max_std / width < config.variability_epsilon {
                FeatureStatus::DroppedLowVariability
            } else if drift_score < config.drift_epsilon {
                FeatureStatus::DroppedNoDrift
            } else {
                FeatureStatus::Kept
            };
            FeatureReport {
                feature,
                status,
                drift_score,
                class_filter,
            }
        })
        .collect();
    reports.sort_by(|a, b| {
        let a_kept = a.status == FeatureStatus::Kept;
        let b_kept = b.status == FeatureStatus::Kept;
        b_kept.cmp(&a_kept).then_with(|| {
            if a_kept {
                b.drift_score.total_cmp(&a.drift_score).then(a.feature.cmp(&b.feature))
            } else {
                a.feature.cmp(&b.feature)
            }
        })
    });
    Ok(reports)
}

/// Kept features in rank order, at most `cap` of them.
pub fn ranked_features(reports: &[FeatureReport], cap: usize) -> Vec<usize> {
    reports
        .iter()
        .filter(|r| r.status == FeatureStatus::Kept)
        .take(cap)
        .map(|r| r.feature)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct AlignConfig {
    /// Windows summarized on each side of the boundary, at most.
    pub context_windows: usize,
    pub filter: FilterConfig,
}

impl Default for AlignConfig {
    fn default() -> Self {
        Self {
            context_windows: 5,
            filter: FilterConfig::default(),
        }
    }
}

/// A window grid with a boundary placed exactly on a drift point.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AlignmentResult {
    pub window_size: usize,
    /// `boundary_index mod window_size`: grid offset from the stream start.
    pub offset: usize,
    pub boundary_index: usize,
    /// First sample of the displayed grid, `windows_before` windows ahead
    /// of the boundary.
    pub view_start: usize,
    pub windows_before: usize,
    pub windows_after: usize,
    /// Cross-boundary mean jump over the median absolute successive
    /// difference within the two segments.
    pub sharpness: f64,
    /// Cross-boundary jump of the chosen line in standard errors, from the
    /// two windows touching the boundary.
    pub jump_z: f64,
    pub feature: usize,
    pub class_filter: ClassFilter,
}

impl AlignmentResult {
    /// Disjoint windows of the displayed grid.
    pub fn view_spec(&self) -> WindowSpec {
        WindowSpec {
            size: self.window_size,
            stride: self.window_size,
            offset: self.view_start,
        }
    }

    /// Stream length covered by the displayed grid.
    pub fn view_end(&self) -> usize {
        self.boundary_index + self.windows_after * self.window_size
    }
}

fn sharpness_of(
    summaries: &[WindowSummary],
    feature: usize,
    filter: ClassFilter,
    windows_before: usize,
    width: f64,
) -> f64 {
    let Ok(series) = mean_series(summaries, feature, filter) else {
        return 0.0;
    };
    let (left, right): (Vec<_>, Vec<_>) = series.values.iter().partition(|&&(w, _)| w < windows_before);
    let (Some(&&(_, last_left)), Some(&&(_, first_right))) = (left.last(), right.first()) else {
        return 0.0;
    };
    let jump = (first_right - last_left).abs();
    let diffs: Vec<f64> = [&left, &right]
        .iter()
        .flat_map(|side| side.windows(2).map(|p| (p[1].1 - p[0].1).abs()))
        .collect();
    let floor = 1e-12 * width.max(f64::MIN_POSITIVE);
    let within = math::median(&diffs).unwrap_or(0.0).max(floor);
    jump / within
}

/// Welch-style z statistic of the mean difference between two sample sets
/// restricted to `filter`; 0 when either side has fewer than two samples.
fn jump_z(before: &[Sample], after: &[Sample], feature: usize, filter: ClassFilter, width: f64) -> f64 {
    let moments = |side: &[Sample]| {
        let (mut n, mut mean, mut m2) = (0.0f64, 0.0f64, 0.0f64);
        for s in side {
            if let ClassFilter::Class(c) = filter {
                if s.label != c {
                    continue;
                }
            }
            n += 1.0;
            let d = s.features[feature] - mean;
            mean += d / n;
            m2 += d * (s.features[feature] - mean);
        }
        (n, mean, if n > 1.0 { m2 / (n - 1.0) } else { 0.0 })
    };
    let (n0, m0, v0) = moments(before);
    let (n1, m1, v1) = moments(after);
    if n0 < 2.0 || n1 < 2.0 {
        return 0.0;
    }
    let floor = 1e-12 * width.max(f64::MIN_POSITIVE);
    let se = math::sqrt(v0 / n0 + v1 / n1).max(floor);
    (m1 - m0).abs() / se
}

/// Two-sided Gaussian tail bound: `P(|Z| > t) <= 2 exp(-t^2 / 2) = delta`.
fn z_critical(delta: f64) -> f64 {
    math::sqrt(2.0 * math::ln(2.0 / delta))
}

/// Re-grids the stream so a window boundary falls exactly on
/// `approximate_drift` and measures how sharp the change is there.
pub fn align_drift(
    stream: &[Sample],
    schema: &StreamSchema,
    approximate_drift: usize,
    window_size: usize,
    config: &AlignConfig,
) -> Result<AlignmentResult, AnalysisError> {
    let len = stream.len();
    if window_size == 0 || approximate_drift < window_size || approximate_drift + window_size > len {
        return Err(AnalysisError::TooCloseToEdge {
            point: approximate_drift,
            window_size,
            len,
        });
    }
    let context = config.context_windows.max(1);
    let windows_before = context.min(approximate_drift / window_size);
    let windows_after = context.min((len - approximate_drift) / window_size);
    let view_start = approximate_drift - windows_before * window_size;
    let view_end = approximate_drift + windows_after * window_size;
    let spec = WindowSpec {
        size: window_size,
        stride: window_size,
        offset: view_start,
    };
    let summaries = summarize_stream(&stream[..view_end], &spec, schema, 1);

    // Measure the line whose jump across the boundary is most significant.
    let before = &stream[approximate_drift - window_size..approximate_drift];
    let after = &stream[approximate_drift..approximate_drift + window_size];
    let mut top: Option<(usize, ClassFilter, f64)> = None;
    for feature in 0..schema.feature_count() {
        let width = schema.feature_ranges[feature].width();
        if width < config.filter.range_epsilon {
            continue;
        }
        for filter in class_filters(schema) {
            let z = jump_z(before, after, feature, filter, width);
            if top.is_none_or(|(_, _, best)| z > best) {
                top = Some((feature, filter, z));
            }
        }
    }
    let (feature, class_filter, z) = top.ok_or(AnalysisError::NoFeatures)?;
    let width = schema.feature_ranges[feature].width();
    let sharpness = sharpness_of(&summaries, feature, class_filter, windows_before, width);

    Ok(AlignmentResult {
        window_size,
        offset: approximate_drift % window_size,
        boundary_index: approximate_drift,
        view_start,
        windows_before,
        windows_after,
        sharpness,
        jump_z: z,
        feature,
        class_filter,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct LocalizeConfig {
    pub initial_window: usize,
    /// Window multiplier per refinement step, in `(0, 1)`.
    pub shrink_factor: f64,
    pub min_window: usize,
    /// Minimum samples per class and segment in any comparison.
    pub n_min: usize,
    /// Confidence budget for the window-pair jump tests.
    pub delta: f64,
    /// An alignment counts as abrupt when its sharpness exceeds this.
    pub sharpness_threshold: f64,
    pub align: AlignConfig,
}

impl Default for LocalizeConfig {
    fn default() -> Self {
        Self {
            initial_window: 5_200,
            shrink_factor: 0.5,
            min_window: 250,
            n_min: 30,
            delta: 0.002,
            sharpness_threshold: 2.0,
            align: AlignConfig::default(),
        }
    }
}

impl LocalizeConfig {
    pub fn validate(&self) -> Result<(), AnalysisError> {
        if self.min_window == 0 || self.initial_window < self.min_window {
            return Err(AnalysisError::InvalidConfig("need 1 <= min_window <= initial_window"));
        }
        if !(self.shrink_factor > 0.0 && self.shrink_factor < 1.0) {
            return Err(AnalysisError::InvalidConfig("shrink_factor must lie in (0, 1)"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(AnalysisError::InvalidConfig("delta must lie in (0, 1)"));
        }
        if self.n_min == 0 {
            return Err(AnalysisError::InvalidConfig("n_min must be >= 1"));
        }
        Ok(())
    }
}

/// A drift region that never resolved into a sharp boundary.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ContinuousRegion {
    pub start: usize,
    pub end: usize,
    /// Best sharpness seen while trying to align inside the region.
    pub best_sharpness: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Localization {
    /// Abrupt drifts, ordered by boundary.
    pub alignments: Vec<AlignmentResult>,
    pub continuous: Vec<ContinuousRegion>,
}

/// Monitored mean lines: every candidate feature under every class filter.
struct Lines {
    stats: Vec<(usize, ClassFilter)>,
}

impl Lines {
    /// Significance ratio of each consecutive window pair: the largest
    /// `gap / threshold` over all lines, with the confidence budget split
    /// across every test performed. Values above 1 are significant.
    fn pair_ratios(&self, summaries: &[WindowSummary], schema: &StreamSchema, n_min: u64, delta: f64) -> Vec<f64> {
        let mut tests: Vec<(usize, f64, f64, f64, f64)> = Vec::new();
        for (pair, w) in summaries.windows(2).enumerate() {
            for &(feature, filter) in &self.stats {
                let (n0, n1) = (w[0].count_for(filter), w[1].count_for(filter));
                if n0 < n_min || n1 < n_min {
                    continue;
                }
                let (Some(m0), Some(m1)) = (
                    w[0].per_feature[feature].mean_for(filter),
                    w[1].per_feature[feature].mean_for(filter),
                ) else {
                    continue;
                };
                let width = schema.feature_ranges[feature].width();
                tests.push((pair, (m1 - m0).abs(), width, n0 as f64, n1 as f64));
            }
        }
        let mut ratios = vec![0.0; summaries.len().saturating_sub(1)];
        if tests.is_empty() {
            return ratios;
        }
        let delta_per_test = delta / tests.len() as f64;
        for (pair, gap, width, n0, n1) in tests {
            let eps = math::hoeffding_threshold(width, n0, n1, delta_per_test);
            if eps > 0.0 {
                ratios[pair] = f64::max(ratios[pair], gap / eps);
            }
        }
        ratios
    }

    /// Whether any line differs significantly between two windows that are
    /// not necessarily adjacent, testing every pair.
    fn drifts_overall(&self, summaries: &[WindowSummary], schema: &StreamSchema, n_min: u64, delta: f64) -> bool {
        let mut tests: Vec<(f64, f64, f64, f64)> = Vec::new();
        for i in 0..summaries.len() {
            for j in i + 1..summaries.len() {
                let (a, b) = (&summaries[i], &summaries[j]);
                for &(feature, filter) in &self.stats {
                    let (n0, n1) = (a.count_for(filter), b.count_for(filter));
                    if n0 < n_min || n1 < n_min {
                        continue;
                    }
                    let (Some(m0), Some(m1)) = (
                        a.per_feature[feature].mean_for(filter),
                        b.per_feature[feature].mean_for(filter),
                    ) else {
                        continue;
                    };
                    let width = schema.feature_ranges[feature].width();
                    tests.push(((m1 - m0).abs(), width, n0 as f64, n1 as f64));
                }
            }
        }
        let delta_per_test = delta / tests.len().max(1) as f64;
        tests
            .iter()
            .any(|&(gap, width, n0, n1)| gap > math::hoeffding_threshold(width, n0, n1, delta_per_test))
    }

    /// Position in `[lo, hi)` maximizing the summed two-segment mean-shift
    /// statistic, with at least `n_min` samples on each side.
    fn best_split(
        &self,
        stream: &[Sample],
        schema: &StreamSchema,
        lo: usize,
        hi: usize,
        n_min: usize,
    ) -> Option<usize> {
        if hi < lo + 2 * n_min {
            return None;
        }
        let k = self.stats.len();
        let n = hi - lo;
        let mut sums = vec![0.0; (n + 1) * k];
        let mut counts = vec![0u64; (n + 1) * k];
        for (i, s) in stream[lo..hi].iter().enumerate() {
            for (j, &(feature, filter)) in self.stats.iter().enumerate() {
                let hit = match filter {
                    ClassFilter::All => true,
                    ClassFilter::Class(c) => s.label == c,
                };
                let (ps, pc) = (sums[i * k + j], counts[i * k + j]);
                let r = &schema.feature_ranges[feature];
                sums[(i + 1) * k + j] = ps + if hit { s.features[feature] - r.min } else { 0.0 };
                counts[(i + 1) * k + j] = pc + u64::from(hit);
            }
        }
        let mut best: Option<(usize, f64)> = None;
        for cut in n_min..=n - n_min {
            let mut score = 0.0;
            for (j, &(feature, _)) in self.stats.iter().enumerate() {
                let width = schema.feature_ranges[feature].width();
                let (s0, c0) = (sums[cut * k + j], counts[cut * k + j]);
                let (s1, c1) = (sums[n * k + j] - s0, counts[n * k + j] - c0);
                if c0 == 0 || c1 == 0 || width <= 0.0 {
                    continue;
                }
                let (c0, c1) = (c0 as f64, c1 as f64);
                let gap = (s0 / c0 - s1 / c1) / width;
                score += c0 * c1 / (c0 + c1) * gap * gap;
            }
            if best.is_none_or(|(_, b)| score > b) {
                best = Some((cut, score));
            }
        }
        best.map(|(cut, _)| lo + cut)
    }
}

fn summaries_over(stream: &[Sample], schema: &StreamSchema, lo: usize, hi: usize, w: usize) -> Vec<WindowSummary> {
    let spec = WindowSpec {
        size: w,
        stride: w,
        offset: lo,
    };
    summarize_stream(&stream[..hi], &spec, schema, 1)
}

/// Finds abrupt drift points and aligns a window boundary on each; regions
/// that never sharpen are reported as continuous drift.
pub fn localize(
    stream: &[Sample],
    schema: &StreamSchema,
    config: &LocalizeConfig,
) -> Result<Localization, AnalysisError> {
    config.validate()?;
    let len = stream.len();
    let coarse = summaries_over(stream, schema, 0, len, config.initial_window);
    if coarse.len() < 2 {
        return Ok(Localization::default());
    }
    let reports = filter_features(schema, &coarse, &config.align.filter)?;
    let kept = ranked_features(&reports, usize::MAX);
    if kept.is_empty() {
        return Ok(Localization::default());
    }
    let filters = class_filters(schema);
    let lines = Lines {
        stats: kept
            .iter()
            .flat_map(|&f| filters.iter().map(move |&c| (f, c)))
            .collect(),
    };
    let n_min = config.n_min as u64;

    // contiguous runs of significant pairs form drift regions
    let ratios = lines.pair_ratios(&coarse, schema, n_min, config.delta);
    let mut regions: Vec<(usize, usize)> = Vec::new();
    let mut run: Option<(usize, usize)> = None;
    for (pair, &r) in ratios.iter().enumerate() {
        if r > 1.0 {
            run = Some(match run {
                Some((first, _)) => (first, pair),
                None => (pair, pair),
            });
        } else if let Some(done) = run.take() {
            regions.push(done);
        }
    }
    regions.extend(run);
    // A mean line can wander far while no single step between neighbouring
    // windows is significant: steady drift spread over the whole stream.
    if regions.is_empty() && lines.drifts_overall(&coarse, schema, n_min, config.delta) {
        regions.push((0, coarse.len() - 2));
    }

    let mut result = Localization::default();
    for (first_pair, last_pair) in regions {
        let region = (coarse[first_pair].start, coarse[last_pair + 1].end());
        let (mut lo, mut hi) = region;
        let mut w = config.initial_window;
        while w > config.min_window {
            w = config
                .min_window
                .max(libm::floor(w as f64 * config.shrink_factor) as usize);
            if hi - lo < 2 * w {
                let grow = (2 * w - (hi - lo)).div_ceil(2);
                lo = lo.saturating_sub(grow);
                hi = (hi + grow).min(len);
            }
            let fine = summaries_over(stream, schema, lo, hi, w);
            if fine.len() < 2 {
                break;
            }
            let ratios = lines.pair_ratios(&fine, schema, 1, config.delta);
            let pair = ratios
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .map(|(i, _)| i)
                .unwrap_or(0);
            lo = fine[pair.saturating_sub(1)].start;
            hi = fine[(pair + 2).min(fine.len() - 1)].end();
        }
        let Some(estimate) = lines.best_split(stream, schema, lo, hi, config.n_min) else {
            continue;
        };

        // The aligned line is the best of every feature and class filter.
        let z_crit = z_critical(config.delta / (schema.feature_count() * (schema.class_ids.len() + 1)) as f64);
        let mut best: Option<AlignmentResult> = None;
        let mut best_sharpness = 0.0f64;
        for halvings in 0..=2u32 {
            let size = w >> halvings;
            if size < config.n_min {
                break;
            }
            let Ok(aligned) = align_drift(stream, schema, estimate, size, &config.align) else {
                continue;
            };
            best_sharpness = best_sharpness.max(aligned.sharpness);
            if aligned.sharpness <= config.sharpness_threshold || aligned.jump_z <= z_crit {
                continue;
            }
            // The estimate sits where the local gap is largest, which inflates
            // the jump at this size. A real cut stays sharp on a coarser grid
            // where that selection effect is diluted.
            let persists = align_drift(stream, schema, estimate, 2 * size, &config.align)
                .map_or(true, |coarser| coarser.sharpness > config.sharpness_threshold);
            if persists {
                best = Some(aligned);
                break;
            }
        }
        match best {
            Some(a) => result.alignments.push(a),
            None => result.continuous.push(ContinuousRegion {
                start: region.0,
                end: region.1,
                best_sharpness,
            }),
        }
    }
    result.alignments.sort_by_key(|a| a.boundary_index);
    result
        .alignments
        .dedup_by(|b, a| b.boundary_index.abs_diff(a.boundary_index) <= config.n_min);
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::FeatureRange;
    use alloc::string::ToString;

    fn schema(ranges: &[(f64, f64)]) -> StreamSchema {
        StreamSchema {
            feature_names: (0..ranges.len()).map(|i| alloc::format!("f{i}")).collect(),
            feature_ranges: ranges.iter().map(|&(min, max)| FeatureRange { min, max }).collect(),
            class_ids: vec![0, 1],
            class_labels: vec!["0".to_string(), "1".to_string()],
        }
    }

    /// Deterministic pseudo-noise in [0, 1).
    fn noise(i: usize) -> f64 {
        let x = (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 11;
        x as f64 / (1u64 << 53) as f64
    }

    fn step_stream(n: usize, step_at: usize) -> Vec<Sample> {
        (0..n)
            .map(|i| Sample {
                index: i as u64,
                features: vec![if i < step_at { 0.0 } else { 1.0 } + 0.5 * noise(i), 3.7],
                label: (i % 2) as u32,
            })
            .collect()
    }

    #[test]
    fn constant_feature_dropped() {
        let s = step_stream(4_000, 2_000);
        let sc = schema(&[(0.0, 1.5), (3.7, 3.7)]);
        let summaries = summarize_stream(&s, &WindowSpec::disjoint(500).unwrap(), &sc, 10);
        let reports = filter_features(&sc, &summaries, &FilterConfig::default()).unwrap();
        assert_eq!(reports[0].feature, 0);
        assert_eq!(reports[0].status, FeatureStatus::Kept);
        assert_eq!(reports[1].status, FeatureStatus::DroppedConstant);
        assert_eq!(ranked_features(&reports, 12), vec![0]);
    }

    #[test]
    fn too_few_windows() {
        let s = step_stream(600, 300);
        let sc = schema(&[(0.0, 1.5), (3.7, 3.7)]);
        let summaries = summarize_stream(&s, &WindowSpec::disjoint(500).unwrap(), &sc, 10);
        assert_eq!(
            filter_features(&sc, &summaries, &FilterConfig::default()),
            Err(AnalysisError::TooFewWindows(1))
        );
    }

    #[test]
    fn alignment_grid_lands_on_the_drift() {
        let s = step_stream(30_000, 12_345);
        let sc = schema(&[(0.0, 1.5), (3.7, 3.7)]);
        let a = align_drift(&s, &sc, 20_050, 500, &AlignConfig::default()).unwrap();
        assert_eq!(a.offset, 50);
        assert_eq!(a.view_start, 17_550);
        assert_eq!(a.view_start + a.windows_before * a.window_size, 20_050);

        let exact = align_drift(&s, &sc, 12_500, 500, &AlignConfig::default()).unwrap();
        assert_eq!(exact.offset, 0);
    }

    #[test]
    fn step_is_sharp() {
        let s = step_stream(30_000, 12_345);
        let sc = schema(&[(0.0, 1.5), (3.7, 3.7)]);
        let a = align_drift(&s, &sc, 12_345, 500, &AlignConfig::default()).unwrap();
        assert_eq!(a.boundary_index, 12_345);
        assert_eq!(a.feature, 0);
        assert!(a.sharpness > 3.0, "sharpness {}", a.sharpness);
    }

    #[test]
    fn edge_drift_rejected() {
        let s = step_stream(2_000, 1_000);
        let sc = schema(&[(0.0, 1.5), (3.7, 3.7)]);
        for p in [100, 1_900] {
            assert!(matches!(
                align_drift(&s, &sc, p, 500, &AlignConfig::default()),
                Err(AnalysisError::TooCloseToEdge { .. })
            ));
        }
    }

    #[test]
    fn localize_finds_the_step() {
        let s = step_stream(30_000, 12_345);
        let sc = schema(&[(0.0, 1.5), (3.7, 3.7)]);
        let cfg = LocalizeConfig {
            initial_window: 2_000,
            ..Default::default()
        };
        let out = localize(&s, &sc, &cfg).unwrap();
        assert_eq!(out.alignments.len(), 1, "{out:?}");
        assert!(out.alignments[0].boundary_index.abs_diff(12_345) <= cfg.n_min);
        assert!(out.continuous.is_empty());
    }

    #[test]
    fn invalid_localize_configs() {
        let s = step_stream(100, 50);
        let sc = schema(&[(0.0, 1.5), (3.7, 3.7)]);
        for cfg in [
            LocalizeConfig {
                shrink_factor: 1.0,
                ..Default::default()
            },
            LocalizeConfig {
                min_window: 10_000,
                ..Default::default()
            },
        ] {
            assert!(localize(&s, &sc, &cfg).is_err());
        }
    }
}
