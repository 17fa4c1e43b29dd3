//! Labeled streams and deterministic window slicing.

use alloc::string::String;
use alloc::vec::Vec;

/// Dense class identifier assigned at load time.
pub type ClassId = u32;

/// One observation of the stream.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Sample {
    /// 0-based position in the stream.
    pub index: u64,
    pub features: Vec<f64>,
    pub label: ClassId,
}

/// Closed interval `[min, max]` of one feature.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FeatureRange {
    pub min: f64,
    pub max: f64,
}

impl FeatureRange {
    pub fn new(min: f64, max: f64) -> Result<Self, StreamError> {
        if !(min.is_finite() && max.is_finite()) || min > max {
            return Err(StreamError::InvalidRange { min, max });
        }
        Ok(Self { min, max })
    }

    #[inline]
    pub fn width(&self) -> f64 {
        self.max - self.min
    }

    #[inline]
    pub fn contains(&self, value: f64) -> bool {
        value >= self.min && value <= self.max
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StreamSchema {
    pub feature_names: Vec<String>,
    pub feature_ranges: Vec<FeatureRange>,
    /// Sorted, dense class ids.
    pub class_ids: Vec<ClassId>,
    /// Original label text, parallel to `class_ids`.
    pub class_labels: Vec<String>,
}

impl StreamSchema {
    pub fn new(
        feature_names: Vec<String>,
        feature_ranges: Vec<FeatureRange>,
        class_ids: Vec<ClassId>,
        class_labels: Vec<String>,
    ) -> Result<Self, StreamError> {
        if feature_names.len() != feature_ranges.len() {
            return Err(StreamError::SchemaMismatch {
                names: feature_names.len(),
                ranges: feature_ranges.len(),
            });
        }
        if class_ids.len() != class_labels.len() {
            return Err(StreamError::ClassLabelMismatch);
        }
        if class_ids.windows(2).any(|w| w[0] >= w[1]) {
            return Err(StreamError::ClassLabelMismatch);
        }
        for r in &feature_ranges {
            FeatureRange::new(r.min, r.max)?;
        }
        Ok(Self {
            feature_names,
            feature_ranges,
            class_ids,
            class_labels,
        })
    }

    #[inline]
    pub fn feature_count(&self) -> usize {
        self.feature_names.len()
    }

    /// Position of `class` in `class_ids`.
    pub fn class_position(&self, class: ClassId) -> Option<usize> {
        self.class_ids.binary_search(&class).ok()
    }

    /// Checks the per-sample invariants: arity, known label and strictly
    /// increasing index.
    pub fn validate_samples(&self, samples: &[Sample]) -> Result<(), StreamError> {
        let mut last: Option<u64> = None;
        for s in samples {
            if s.features.len() != self.feature_count() {
                return Err(StreamError::Arity {
                    index: s.index,
                    expected: self.feature_count(),
                    found: s.features.len(),
                });
            }
            if self.class_position(s.label).is_none() {
                return Err(StreamError::UnknownClass {
                    index: s.index,
                    label: s.label,
                });
            }
            if let Some(prev) = last {
                if s.index <= prev {
                    return Err(StreamError::NonIncreasingIndex { index: s.index });
                }
            }
            last = Some(s.index);
        }
        Ok(())
    }
}

/// A schema together with the samples it describes.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Dataset {
    pub schema: StreamSchema,
    pub samples: Vec<Sample>,
}

/// How a stream is cut into windows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WindowSpec {
    pub size: usize,
    pub stride: usize,
    pub offset: usize,
}

impl WindowSpec {
    pub fn new(size: usize, stride: usize, offset: usize) -> Result<Self, StreamError> {
        if size == 0 {
            return Err(StreamError::InvalidWindow("size must be >= 1"));
        }
        if stride == 0 {
            return Err(StreamError::InvalidWindow("stride must be >= 1"));
        }
        Ok(Self { size, stride, offset })
    }

    /// Consecutive, non-overlapping windows starting at sample 0.
    pub fn disjoint(size: usize) -> Result<Self, StreamError> {
        Self::new(size, size, 0)
    }

    #[inline]
    pub fn is_disjoint(&self) -> bool {
        self.stride == self.size
    }

    /// First sample position of window `window_index`.
    #[inline]
    pub fn start_of(&self, window_index: usize) -> usize {
        self.offset + window_index * self.stride
    }
}

/// A full window borrowed from the stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window<'a> {
    pub window_index: usize,
    /// Stream position of the first sample.
    pub start: usize,
    pub samples: &'a [Sample],
}

/// Number of full windows `spec` yields over a stream of `n` samples.
pub fn window_count(n: usize, spec: &WindowSpec) -> usize {
    match n.checked_sub(spec.offset).and_then(|r| r.checked_sub(spec.size)) {
        Some(rest) => rest / spec.stride + 1,
        None => 0,
    }
}

/// Cuts `stream` into full windows; a trailing partial window is dropped.
pub fn slice_windows<'a>(stream: &'a [Sample], spec: &WindowSpec) -> Vec<Window<'a>> {
    (0..window_count(stream.len(), spec))
        .map(|window_index| {
            let start = spec.start_of(window_index);
            Window {
                window_index,
                start,
                samples: &stream[start..start + spec.size],
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StreamError {
    #[error("invalid feature range [{min}, {max}]")]
    InvalidRange { min: f64, max: f64 },
    #[error("schema has {names} feature names but {ranges} ranges")]
    SchemaMismatch { names: usize, ranges: usize },
    #[error("class ids must be sorted, unique and match class labels")]
    ClassLabelMismatch,
    #[error("invalid window spec: {0}")]
    InvalidWindow(&'static str),
    #[error("sample {index} has {found} features, schema expects {expected}")]
    Arity { index: u64, expected: usize, found: usize },
    #[error("sample {index} has label {label} outside the schema's classes")]
    UnknownClass { index: u64, label: ClassId },
    #[error("sample index {index} is not strictly increasing")]
    NonIncreasingIndex { index: u64 },
}
