//! Per-window histograms, means and the total variation distance.
//!
//! Every feature is binned on fixed edges spanning its global schema range,
//! so histograms of different windows share a domain and can be compared.
//! Bins are right-closed, `(e[i], e[i+1]]`, except the first which also
//! includes `e[0]`; a value equal to the range maximum lands in the last bin.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::stream::{slice_windows, ClassId, FeatureRange, Sample, StreamSchema, Window, WindowSpec};

/// Bin count used by the diagrams unless overridden.
pub const DEFAULT_BINS: usize = 40;

/// Binned counts over fixed edges.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Histogram {
    /// `bins + 1` strictly increasing edges.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    /// Empty histogram with `bins` equal-width bins over `range`.
    ///
    /// A zero-width range is widened to `[min - 0.5, min + 0.5]` so the
    /// edges stay strictly increasing.
    pub fn empty(range: FeatureRange, bins: usize) -> Self {
        assert!(bins >= 1, "histogram needs at least one bin");
        let (lo, hi) = if range.width() > 0.0 {
            (range.min, range.max)
        } else {
            (range.min - 0.5, range.min + 0.5)
        };
        let width = hi - lo;
        let mut edges: Vec<f64> = (0..=bins).map(|i| lo + width * (i as f64) / (bins as f64)).collect();
        edges[bins] = hi;
        Self {
            edges,
            counts: vec![0; bins],
        }
    }

    pub fn from_values(range: FeatureRange, bins: usize, values: impl IntoIterator<Item = f64>) -> Self {
        let mut h = Self::empty(range, bins);
        for v in values {
            h.push(v);
        }
        h
    }

    #[inline]
    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    /// Bin receiving `value`; out-of-range values clamp to the end bins.
    #[inline]
    pub fn bin_of(&self, value: f64) -> usize {
        let inner = &self.edges[1..];
        inner.partition_point(|&e| e < value).min(self.bins() - 1)
    }

    #[inline]
    pub fn push(&mut self, value: f64) {
        let b = self.bin_of(value);
        self.counts[b] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Counts normalized to sum 1; all zeros when empty.
    pub fn pmf(&self) -> Vec<f64> {
        let total = self.total();
        if total == 0 {
            return vec![0.0; self.bins()];
        }
        self.counts.iter().map(|&c| c as f64 / total as f64).collect()
    }

    /// Merges every `factor` adjacent bins; `bins` must be divisible by `factor`.
    pub fn coarsen(&self, factor: usize) -> Result<Self, HistogramError> {
        if factor == 0 || !self.bins().is_multiple_of(factor) {
            return Err(HistogramError::Coarsen {
                bins: self.bins(),
                factor,
            });
        }
        Ok(Self {
            edges: self.edges.iter().step_by(factor).copied().collect(),
            counts: self.counts.chunks(factor).map(|c| c.iter().sum()).collect(),
        })
    }
}

/// Selects either all samples or those of one class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ClassFilter {
    All,
    Class(ClassId),
}

/// Value range on one feature; matching samples are counted separately.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Brush {
    pub feature: usize,
    pub lo: f64,
    pub hi: f64,
}

impl Brush {
    /// `None` when the range is empty, which clears the brush.
    pub fn new(feature: usize, lo: f64, hi: f64) -> Option<Self> {
        (lo <= hi).then_some(Self { feature, lo, hi })
    }

    #[inline]
    pub fn matches(&self, sample: &Sample) -> bool {
        let v = sample.features[self.feature];
        v >= self.lo && v <= self.hi
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClassFeatureSummary {
    pub counts: Vec<u64>,
    /// `None` when the class has no samples in the window.
    pub mean: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FeatureSummary {
    pub feature: usize,
    #[cfg_attr(feature = "serde", serde(flatten))]
    pub histogram: Histogram,
    /// Arithmetic mean of the raw values.
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    pub per_class: BTreeMap<ClassId, ClassFeatureSummary>,
    /// Counts of samples matching the brush, if one was applied.
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub brushed: Option<Vec<u64>>,
}

impl FeatureSummary {
    /// Histogram of one class on the shared edges.
    pub fn class_histogram(&self, class: ClassId) -> Option<Histogram> {
        self.per_class.get(&class).map(|c| Histogram {
            edges: self.histogram.edges.clone(),
            counts: c.counts.clone(),
        })
    }

    pub fn histogram_for(&self, filter: ClassFilter) -> Option<Histogram> {
        match filter {
            ClassFilter::All => Some(self.histogram.clone()),
            ClassFilter::Class(c) => self.class_histogram(c),
        }
    }

    pub fn mean_for(&self, filter: ClassFilter) -> Option<f64> {
        match filter {
            ClassFilter::All => Some(self.mean),
            ClassFilter::Class(c) => self.per_class.get(&c).and_then(|s| s.mean),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WindowSummary {
    pub window_index: usize,
    pub start: usize,
    pub len: usize,
    pub per_feature: Vec<FeatureSummary>,
    pub count_per_class: BTreeMap<ClassId, u64>,
}

impl WindowSummary {
    /// Samples contributing under `filter`.
    pub fn count_for(&self, filter: ClassFilter) -> u64 {
        match filter {
            ClassFilter::All => self.len as u64,
            ClassFilter::Class(c) => self.count_per_class.get(&c).copied().unwrap_or(0),
        }
    }

    /// One past the last sample position.
    #[inline]
    pub fn end(&self) -> usize {
        self.start + self.len
    }
}

/// Histograms, means and per-class breakdown of one window.
pub fn summarize_window(window: &Window<'_>, schema: &StreamSchema, bins: usize) -> WindowSummary {
    summarize_window_brushed(window, schema, bins, None)
}

/// [`summarize_window`], additionally counting samples selected by `brush`
/// on every feature.
pub fn summarize_window_brushed(
    window: &Window<'_>,
    schema: &StreamSchema,
    bins: usize,
    brush: Option<&Brush>,
) -> WindowSummary {
    let n_classes = schema.class_ids.len();
    let mut count_per_class: BTreeMap<ClassId, u64> = schema.class_ids.iter().map(|&c| (c, 0)).collect();
    let class_pos: Vec<usize> = window
        .samples
        .iter()
        .map(|s| {
            *count_per_class.entry(s.label).or_insert(0) += 1;
            schema
                .class_position(s.label)
                .expect("sample label outside schema classes")
        })
        .collect();
    let class_counts: Vec<u64> = schema.class_ids.iter().map(|c| count_per_class[c]).collect();
    let n = window.samples.len();

    let per_feature = schema
        .feature_ranges
        .iter()
        .enumerate()
        .map(|(f, &range)| {
            let mut histogram = Histogram::empty(range, bins);
            let mut class_bins = vec![vec![0u64; bins]; n_classes];
            let mut class_sums = vec![0.0f64; n_classes];
            let mut brushed = brush.map(|_| vec![0u64; bins]);
            let mut sum = 0.0;
            for (s, &cp) in window.samples.iter().zip(&class_pos) {
                let v = s.features[f];
                let b = histogram.bin_of(v);
                histogram.counts[b] += 1;
                class_bins[cp][b] += 1;
                class_sums[cp] += v;
                sum += v;
                if let (Some(br), Some(counts)) = (brush, brushed.as_mut()) {
                    if br.matches(s) {
                        counts[b] += 1;
                    }
                }
            }
            let raw_mean = if n > 0 { sum / n as f64 } else { 0.0 };
            let var = if n > 0 {
                window
                    .samples
                    .iter()
                    .map(|s| {
                        let d = s.features[f] - raw_mean;
                        d * d
                    })
                    .sum::<f64>()
                    / n as f64
            } else {
                0.0
            };
            let clamp = |m: f64| m.clamp(range.min, range.max);
            let per_class = schema
                .class_ids
                .iter()
                .enumerate()
                .map(|(cp, &c)| {
                    let cnt = class_counts[cp];
                    let mean = (cnt > 0).then(|| clamp(class_sums[cp] / cnt as f64));
                    (
                        c,
                        ClassFeatureSummary {
                            counts: core::mem::take(&mut class_bins[cp]),
                            mean,
                        },
                    )
                })
                .collect();
            FeatureSummary {
                feature: f,
                histogram,
                mean: clamp(raw_mean),
                std: math::sqrt(var),
                per_class,
                brushed,
            }
        })
        .collect();

    WindowSummary {
        window_index: window.window_index,
        start: window.start,
        len: n,
        per_feature,
        count_per_class,
    }
}

/// One summary per full window, in window order.
pub fn summarize_stream(
    stream: &[Sample],
    spec: &WindowSpec,
    schema: &StreamSchema,
    bins: usize,
) -> Vec<WindowSummary> {
    slice_windows(stream, spec)
        .iter()
        .map(|w| summarize_window(w, schema, bins))
        .collect()
}

/// Total variation distance between the normalized counts of `p` and `q`:
/// half the L1 distance between their probability mass functions.
///
/// Computed in exact integer arithmetic before the final division, so the
/// result is exactly symmetric and never leaves `[0, 1]`.
pub fn tv_distance(p: &Histogram, q: &Histogram) -> Result<f64, HistogramError> {
    if p.edges != q.edges || p.counts.len() != q.counts.len() {
        return Err(HistogramError::MismatchedEdges);
    }
    let tp = u128::from(p.total());
    let tq = u128::from(q.total());
    if tp == 0 || tq == 0 {
        return Err(HistogramError::Empty);
    }
    let numerator: u128 = p
        .counts
        .iter()
        .zip(&q.counts)
        .map(|(&a, &b)| (u128::from(a) * tq).abs_diff(u128::from(b) * tp))
        .sum();
    Ok(numerator as f64 / (2 * tp * tq) as f64)
}

/// Total variation distance between two probability vectors.
pub fn tv_distance_pmf(p: &[f64], q: &[f64]) -> Result<f64, HistogramError> {
    if p.len() != q.len() {
        return Err(HistogramError::MismatchedEdges);
    }
    let d: f64 = p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum();
    Ok((0.5 * d).clamp(0.0, 1.0))
}

/// Per-window means of one feature, optionally restricted to one class.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MeanSeries {
    pub feature: usize,
    pub class_filter: ClassFilter,
    /// `(window_index, mean)` in window order.
    pub values: Vec<(usize, f64)>,
    /// Windows in which the filtered class had no samples.
    pub omitted: Vec<usize>,
}

impl MeanSeries {
    pub fn means(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().map(|&(_, m)| m)
    }

    /// `max - min` of the means; 0 for fewer than two points.
    pub fn spread(&self) -> f64 {
        let mut it = self.means();
        let Some(first) = it.next() else { return 0.0 };
        let (lo, hi) = it.fold((first, first), |(lo, hi), m| (lo.min(m), hi.max(m)));
        hi - lo
    }
}

pub fn mean_series(
    summaries: &[WindowSummary],
    feature: usize,
    class_filter: ClassFilter,
) -> Result<MeanSeries, HistogramError> {
    let mut values = Vec::with_capacity(summaries.len());
    let mut omitted = Vec::new();
    for s in summaries {
        let fs = s
            .per_feature
            .get(feature)
            .ok_or(HistogramError::UnknownFeature(feature))?;
        if let ClassFilter::Class(c) = class_filter {
            if !fs.per_class.contains_key(&c) {
                return Err(HistogramError::UnknownClass(c));
            }
        }
        match fs.mean_for(class_filter) {
            Some(m) => values.push((s.window_index, m)),
            None => omitted.push(s.window_index),
        }
    }
    Ok(MeanSeries {
        feature,
        class_filter,
        values,
        omitted,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HistogramError {
    #[error("histograms do not share identical edges")]
    MismatchedEdges,
    #[error("histogram has no samples")]
    Empty,
    #[error("cannot merge {bins} bins by a factor of {factor}")]
    Coarsen { bins: usize, factor: usize },
    #[error("feature index {0} out of range")]
    UnknownFeature(usize),
    #[error("class {0} not present in summaries")]
    UnknownClass(ClassId),
}
