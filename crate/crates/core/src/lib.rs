//! Parallel histograms through time (PHT) for labeled data streams.
//!
//! This crate is the allocation-only core: it never touches the filesystem,
//! the network or the clock. It provides
//!
//! - [`stream`]: samples, schemas and deterministic window slicing,
//! - [`generators`]: the SINE1 and CIRCLES abrupt-drift benchmark streams,
//! - [`histogram`]: per-window, per-feature, per-class histograms, means and
//!   the total variation distance,
//! - [`detector`]: an adaptive-window Hoeffding mean-shift drift detector,
//! - [`analysis`]: feature filtering, drift ranking and window alignment that
//!   isolates abrupt drift at a window boundary,
//! - [`render`]: deterministic SVG output for PHT grids and classic parallel
//!   histograms.
//!
//! CSV ingestion, JSON formats, the CLI and the HTTP service live in the `pht`
//! companion crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod detector;
pub mod generators;
pub mod histogram;
mod math;
pub mod render;
pub mod stream;

pub use analysis::{
    align_drift, filter_features, localize, ranked_features, AlignConfig, AlignmentResult, AnalysisError,
    ContinuousRegion, FeatureReport, FeatureStatus, FilterConfig, Localization, LocalizeConfig, CONTINUOUS_RULE,
};
pub use detector::{
    detect_stream, DetectorConfig, DetectorError, DriftDetector, DriftEvidence, DriftReport, FeatureEvidence,
    HoeffdingWindowDetector, Monitor, SplitGrid,
};
pub use generators::{
    generate_circles, generate_sine1, true_drift_points, Circle, CirclesConfig, GeneratorConfig, GeneratorError,
    Sine1Config, RNG_ALGORITHM,
};
pub use histogram::{
    mean_series, summarize_stream, summarize_window, summarize_window_brushed, tv_distance, tv_distance_pmf, Brush,
    ClassFeatureSummary, ClassFilter, FeatureSummary, Histogram, HistogramError, MeanSeries, WindowSummary,
    DEFAULT_BINS,
};
pub use render::{render_parallel_histograms, render_pht, Layout, RenderError, RenderSpec};
pub use stream::{
    slice_windows, window_count, ClassId, Dataset, FeatureRange, Sample, StreamError, StreamSchema, Window, WindowSpec,
};
