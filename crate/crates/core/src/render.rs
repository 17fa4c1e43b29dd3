//! Deterministic SVG rendering.
//!
//! [`render_pht`] draws one horizontal band per feature with the window
//! histograms side by side, per-class overlays, mean lines and drift
//! markers. [`render_parallel_histograms`] draws the classic view of a single
//! window: one vertical axis per feature with its histogram along it.
//!
//! Bar lengths are normalized per feature so the tallest bar of a band (or
//! axis) has exactly [`Layout::bar_extent`]. Coordinates are printed with two
//! decimals, so equal inputs always produce byte-identical documents.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;

use crate::histogram::{ClassFilter, Histogram, WindowSummary};
use crate::stream::{ClassId, Sample, StreamSchema};

/// Okabe-Ito palette, assigned by class id order.
const PALETTE: [&str; 8] = [
    "#0072B2", "#E69F00", "#009E73", "#CC79A7", "#56B4E9", "#D55E00", "#F0E442", "#000000",
];
const OVERALL_FILL: &str = "#9A9A9A";
const BRUSH_FILL: &str = "#D62728";

pub const DEFAULT_FEATURE_CAP: usize = 12;
pub const DEFAULT_WINDOW_CAP: usize = 40;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct RenderSpec {
    pub width: f64,
    pub height: f64,
    /// Merge bins down to this count; must divide the summaries' bin count.
    pub bins: Option<usize>,
    /// Features to draw, in order; empty means the first `feature_cap`.
    pub features: Vec<usize>,
    /// Classes to overlay; `None` means every class in the schema.
    pub classes: Option<Vec<ClassId>>,
    /// Overrides for the default palette.
    pub class_colors: BTreeMap<ClassId, String>,
    pub show_overall: bool,
    pub show_class_layers: bool,
    pub show_means: bool,
    /// Sample indices marked with vertical rules.
    pub drift_markers: Vec<u64>,
    pub feature_cap: usize,
    pub window_cap: usize,
    /// Draw sample polylines behind the classic view.
    pub draw_samples: bool,
}

impl Default for RenderSpec {
    fn default() -> Self {
        Self {
            width: 1200.0,
            height: 720.0,
            bins: None,
            features: Vec::new(),
            classes: None,
            class_colors: BTreeMap::new(),
            show_overall: true,
            show_class_layers: true,
            show_means: true,
            drift_markers: Vec::new(),
            feature_cap: DEFAULT_FEATURE_CAP,
            window_cap: DEFAULT_WINDOW_CAP,
            draw_samples: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RenderError {
    #[error("nothing to render: no window summaries")]
    Empty,
    #[error("unknown feature {0}")]
    UnknownFeature(usize),
    #[error("unknown class {0}")]
    UnknownClass(ClassId),
    #[error("{requested} features exceed the cap of {cap}")]
    TooManyFeatures { requested: usize, cap: usize },
    #[error("{requested} windows exceed the cap of {cap}")]
    TooManyWindows { requested: usize, cap: usize },
    #[error("cannot merge {have} bins into {want}")]
    Bins { have: usize, want: usize },
    #[error("invalid canvas size")]
    Canvas,
    #[error("non-finite coordinate in {0}")]
    NonFinite(&'static str),
}

/// Geometry shared by both views.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Layout {
    pub left: f64,
    pub right: f64,
    pub top: f64,
    pub bottom: f64,
    /// Length of the tallest bar in every band or axis.
    pub bar_extent: f64,
}

impl Layout {
    const LEFT: f64 = 120.0;
    const RIGHT: f64 = 20.0;
    const TOP: f64 = 40.0;
    const BOTTOM: f64 = 50.0;

    fn new(spec: &RenderSpec, columns: usize, extent_ratio: f64) -> Result<Self, RenderError> {
        let plot_w = spec.width - Self::LEFT - Self::RIGHT;
        let plot_h = spec.height - Self::TOP - Self::BOTTOM;
        if !(plot_w > 0.0 && plot_h > 0.0) {
            return Err(RenderError::Canvas);
        }
        Ok(Self {
            left: Self::LEFT,
            right: spec.width - Self::RIGHT,
            top: Self::TOP,
            bottom: spec.height - Self::BOTTOM,
            bar_extent: round2(plot_w / columns as f64 * extent_ratio),
        })
    }

    /// Geometry of a PHT grid with `windows` cells per band.
    pub fn for_pht(spec: &RenderSpec, windows: usize) -> Result<Self, RenderError> {
        Self::new(spec, windows.max(1), 0.84)
    }

    /// Geometry of the classic view with `features` axes.
    pub fn for_parallel(spec: &RenderSpec, features: usize) -> Result<Self, RenderError> {
        Self::new(spec, features.max(1), 0.7)
    }

    fn column_width(&self, columns: usize) -> f64 {
        (self.right - self.left) / columns as f64
    }
}

/// Rounds to the printed precision so the formatted maximum bar equals the
/// layout constant exactly.
fn round2(x: f64) -> f64 {
    libm::round(x * 100.0) / 100.0
}

struct Svg {
    out: String,
}

impl Svg {
    fn new(width: f64, height: f64) -> Result<Self, RenderError> {
        let mut svg = Self { out: String::new() };
        let (w, h) = (num(width, "canvas")?, num(height, "canvas")?);
        let _ = writeln!(
            svg.out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="11">"#
        );
        let _ = writeln!(
            svg.out,
            r##"<rect class="background" x="0.00" y="0.00" width="{w}" height="{h}" fill="#FFFFFF"/>"##
        );
        Ok(svg)
    }

    fn line(&mut self, s: &str) {
        self.out.push_str(s);
        self.out.push('\n');
    }

    fn finish(mut self) -> String {
        self.out.push_str("</svg>\n");
        self.out
    }
}

fn num(x: f64, what: &'static str) -> Result<String, RenderError> {
    if !x.is_finite() {
        return Err(RenderError::NonFinite(what));
    }
    let s = format!("{x:.2}");
    Ok(if s == "-0.00" { "0.00".to_string() } else { s })
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn class_color(spec: &RenderSpec, schema: &StreamSchema, class: ClassId) -> String {
    if let Some(c) = spec.class_colors.get(&class) {
        return escape(c);
    }
    let pos = schema.class_position(class).unwrap_or(0);
    PALETTE[pos % PALETTE.len()].to_string()
}

fn filter_key(filter: ClassFilter) -> String {
    match filter {
        ClassFilter::All => "all".to_string(),
        ClassFilter::Class(c) => c.to_string(),
    }
}

/// Features and classes selected by `spec`, validated against the schema.
fn selection(spec: &RenderSpec, schema: &StreamSchema) -> Result<(Vec<usize>, Vec<ClassId>), RenderError> {
    let features: Vec<usize> = if spec.features.is_empty() {
        (0..schema.feature_count().min(spec.feature_cap)).collect()
    } else {
        spec.features.clone()
    };
    if features.len() > spec.feature_cap {
        return Err(RenderError::TooManyFeatures {
            requested: features.len(),
            cap: spec.feature_cap,
        });
    }
    if let Some(&bad) = features.iter().find(|&&f| f >= schema.feature_count()) {
        return Err(RenderError::UnknownFeature(bad));
    }
    let classes = match &spec.classes {
        None => schema.class_ids.clone(),
        Some(cs) => {
            if let Some(&bad) = cs.iter().find(|&&c| schema.class_position(c).is_none()) {
                return Err(RenderError::UnknownClass(bad));
            }
            cs.clone()
        }
    };
    Ok((features, classes))
}

/// Histogram layers of one feature in one window, after optional rebinning.
struct Layers {
    overall: Histogram,
    classes: Vec<(ClassId, Histogram)>,
    brushed: Option<Histogram>,
}

fn layers(
    summary: &WindowSummary,
    feature: usize,
    classes: &[ClassId],
    bins: Option<usize>,
) -> Result<Layers, RenderError> {
    let fs = summary
        .per_feature
        .get(feature)
        .ok_or(RenderError::UnknownFeature(feature))?;
    let rebin = |h: Histogram| -> Result<Histogram, RenderError> {
        match bins {
            None => Ok(h),
            Some(want) => {
                let have = h.bins();
                if want == 0 || !have.is_multiple_of(want) {
                    return Err(RenderError::Bins { have, want });
                }
                h.coarsen(have / want).map_err(|_| RenderError::Bins { have, want })
            }
        }
    };
    let classes = classes
        .iter()
        .map(|&c| {
            let h = fs.class_histogram(c).ok_or(RenderError::UnknownClass(c))?;
            Ok((c, rebin(h)?))
        })
        .collect::<Result<Vec<_>, RenderError>>()?;
    let brushed = match &fs.brushed {
        Some(counts) => Some(rebin(Histogram {
            edges: fs.histogram.edges.clone(),
            counts: counts.clone(),
        })?),
        None => None,
    };
    Ok(Layers {
        overall: rebin(fs.histogram.clone())?,
        classes,
        brushed,
    })
}

/// Maps a feature value onto a vertical axis spanning `[y_top, y_bottom]`.
#[derive(Clone, Copy)]
struct ValueAxis {
    min: f64,
    max: f64,
    y_top: f64,
    y_bottom: f64,
}

impl ValueAxis {
    fn y(&self, v: f64) -> f64 {
        let span = self.max - self.min;
        let t = if span > 0.0 { (v - self.min) / span } else { 0.5 };
        self.y_bottom - t.clamp(0.0, 1.0) * (self.y_bottom - self.y_top)
    }
}

#[allow(clippy::too_many_arguments)]
fn bars(
    svg: &mut Svg,
    hist: &Histogram,
    axis: &ValueAxis,
    x0: f64,
    extent: f64,
    max_count: u64,
    layer: &str,
    fill: &str,
    opacity: &str,
) -> Result<(), RenderError> {
    svg.line(&format!(
        r#"<g class="layer" data-layer="{layer}" fill="{fill}" fill-opacity="{opacity}">"#
    ));
    let x = num(x0, "bar")?;
    for (b, &count) in hist.counts.iter().enumerate() {
        let y_top = axis.y(hist.edges[b + 1]);
        let y_bottom = axis.y(hist.edges[b]);
        let len = if max_count == 0 {
            0.0
        } else if count == max_count {
            extent
        } else {
            extent * count as f64 / max_count as f64
        };
        svg.line(&format!(
            r#"<rect class="bar" data-bin="{b}" x="{x}" y="{}" width="{}" height="{}"/>"#,
            num(y_top, "bar")?,
            num(len, "bar")?,
            num(y_bottom - y_top, "bar")?
        ));
    }
    svg.line("</g>");
    Ok(())
}

/// Renders a PHT grid: one band per feature, one histogram per window.
pub fn render_pht(
    schema: &StreamSchema,
    summaries: &[WindowSummary],
    spec: &RenderSpec,
) -> Result<String, RenderError> {
    if summaries.is_empty() {
        return Err(RenderError::Empty);
    }
    if summaries.len() > spec.window_cap {
        return Err(RenderError::TooManyWindows {
            requested: summaries.len(),
            cap: spec.window_cap,
        });
    }
    let (features, classes) = selection(spec, schema)?;
    let n_windows = summaries.len();
    let layout = Layout::for_pht(spec, n_windows)?;
    let cell_w = layout.column_width(n_windows);
    let band_h = (layout.bottom - layout.top) / features.len().max(1) as f64;

    let mut svg = Svg::new(spec.width, spec.height)?;
    let first = &summaries[0];
    let last = &summaries[n_windows - 1];
    svg.line(&format!(
        r#"<text class="title" x="{}" y="20.00" font-size="14">Parallel histograms through time: {} windows of {} samples, {}..{}</text>"#,
        num(layout.left, "title")?,
        n_windows,
        first.len,
        first.start,
        last.end()
    ));

    let mut filters: Vec<ClassFilter> = Vec::new();
    if spec.show_overall {
        filters.push(ClassFilter::All);
    }
    if spec.show_class_layers {
        filters.extend(classes.iter().map(|&c| ClassFilter::Class(c)));
    }

    for (band, &feature) in features.iter().enumerate() {
        let band_top = layout.top + band as f64 * band_h;
        let range = schema.feature_ranges[feature];
        let cells = summaries
            .iter()
            .map(|s| layers(s, feature, &classes, spec.bins))
            .collect::<Result<Vec<_>, _>>()?;
        let axis = ValueAxis {
            min: cells[0].overall.edges[0],
            max: *cells[0].overall.edges.last().unwrap_or(&range.max),
            y_top: band_top + 14.0,
            y_bottom: band_top + band_h - 8.0,
        };
        let max_count = cells
            .iter()
            .flat_map(|c| c.overall.counts.iter())
            .copied()
            .max()
            .unwrap_or(0);

        svg.line(&format!(r#"<g class="band" data-feature="{feature}">"#));
        svg.line(&format!(
            r#"<text class="band-label" x="10.00" y="{}">{}</text>"#,
            num(band_top + band_h / 2.0, "label")?,
            escape(&schema.feature_names[feature])
        ));
        svg.line(&format!(
            r#"<text class="tick" x="{}" y="{}" text-anchor="end">{}</text>"#,
            num(layout.left - 6.0, "tick")?,
            num(axis.y_top + 4.0, "tick")?,
            escape(&format!("{:.3}", axis.max))
        ));
        svg.line(&format!(
            r#"<text class="tick" x="{}" y="{}" text-anchor="end">{}</text>"#,
            num(layout.left - 6.0, "tick")?,
            num(axis.y_bottom, "tick")?,
            escape(&format!("{:.3}", axis.min))
        ));

        for (i, (summary, cell)) in summaries.iter().zip(&cells).enumerate() {
            let cell_x = layout.left + i as f64 * cell_w;
            let axis_x = cell_x + 0.08 * cell_w;
            svg.line(&format!(
                r#"<g class="cell" data-window="{}" data-start="{}">"#,
                summary.window_index, summary.start
            ));
            svg.line(&format!(
                r##"<line class="axis" x1="{x}" y1="{}" x2="{x}" y2="{}" stroke="#444444" stroke-width="0.6"/>"##,
                num(axis.y_top, "axis")?,
                num(axis.y_bottom, "axis")?,
                x = num(axis_x, "axis")?
            ));
            if spec.show_overall {
                bars(
                    &mut svg,
                    &cell.overall,
                    &axis,
                    axis_x,
                    layout.bar_extent,
                    max_count,
                    "all",
                    OVERALL_FILL,
                    "0.55",
                )?;
            }
            if spec.show_class_layers {
                for (c, h) in &cell.classes {
                    let color = class_color(spec, schema, *c);
                    bars(
                        &mut svg,
                        h,
                        &axis,
                        axis_x,
                        layout.bar_extent,
                        max_count,
                        &c.to_string(),
                        &color,
                        "0.45",
                    )?;
                }
            }
            svg.line("</g>");
        }

        if spec.show_means {
            for &filter in &filters {
                let color = match filter {
                    ClassFilter::All => "#222222".to_string(),
                    ClassFilter::Class(c) => class_color(spec, schema, c),
                };
                let mut points = Vec::new();
                for (i, s) in summaries.iter().enumerate() {
                    if let Some(m) = s.per_feature[feature].mean_for(filter) {
                        let x = layout.left + i as f64 * cell_w + 0.08 * cell_w;
                        points.push((num(x, "mean")?, num(axis.y(m), "mean")?));
                    }
                }
                let joined: Vec<String> = points.iter().map(|(x, y)| format!("{x},{y}")).collect();
                svg.line(&format!(
                    r#"<polyline class="mean-line" data-class="{}" points="{}" fill="none" stroke="{color}" stroke-width="1.4"/>"#,
                    filter_key(filter),
                    joined.join(" ")
                ));
                for (x, y) in &points {
                    svg.line(&format!(
                        r#"<circle class="mean-marker" data-class="{}" cx="{x}" cy="{y}" r="2.20" fill="{color}"/>"#,
                        filter_key(filter)
                    ));
                }
            }
        }
        svg.line("</g>");
    }

    for &marker in &spec.drift_markers {
        let m = marker as usize;
        let Some((i, s)) = summaries.iter().enumerate().find(|(_, s)| s.start <= m && m <= s.end()) else {
            continue;
        };
        let x = layout.left + (i as f64 + (m - s.start) as f64 / s.len.max(1) as f64) * cell_w;
        svg.line(&format!(
            r##"<line class="drift-marker" data-index="{marker}" x1="{x}" y1="{}" x2="{x}" y2="{}" stroke="#C00000" stroke-width="1.2" stroke-dasharray="4 3"/>"##,
            num(layout.top, "marker")?,
            num(layout.bottom, "marker")?,
            x = num(x, "marker")?
        ));
    }

    legend(&mut svg, spec, schema, &classes, &layout)?;
    Ok(svg.finish())
}

fn legend(
    svg: &mut Svg,
    spec: &RenderSpec,
    schema: &StreamSchema,
    classes: &[ClassId],
    layout: &Layout,
) -> Result<(), RenderError> {
    let y = num(spec.height - 18.0, "legend")?;
    svg.line(&format!(
        r#"<g class="legend"><text class="legend-note" x="{}" y="{y}">Bar lengths are normalized per feature; histograms are not comparable across features.</text>"#,
        num(layout.left, "legend")?
    ));
    if spec.show_class_layers {
        for (k, &c) in classes.iter().enumerate() {
            let x = layout.right - 90.0 * (classes.len() - k) as f64;
            let label = schema
                .class_position(c)
                .and_then(|p| schema.class_labels.get(p))
                .map(String::as_str)
                .unwrap_or("");
            svg.line(&format!(
                r#"<rect class="legend-swatch" data-class="{c}" x="{}" y="{}" width="10.00" height="10.00" fill="{}"/><text x="{}" y="{y}">class {}</text>"#,
                num(x, "legend")?,
                num(spec.height - 27.0, "legend")?,
                class_color(spec, schema, c),
                num(x + 14.0, "legend")?,
                escape(label)
            ));
        }
    }
    svg.line("</g>");
    Ok(())
}

/// Renders the classic parallel-histogram view of one window.
///
/// `samples` are only drawn, as polylines behind the histograms, when
/// `spec.draw_samples` is set.
pub fn render_parallel_histograms(
    schema: &StreamSchema,
    summary: &WindowSummary,
    spec: &RenderSpec,
    samples: Option<&[Sample]>,
) -> Result<String, RenderError> {
    let (features, classes) = selection(spec, schema)?;
    let n = features.len().max(1);
    let layout = Layout::for_parallel(spec, n)?;
    let spacing = layout.column_width(n);
    let axis_for = |feature: usize| -> Result<(ValueAxis, Layers), RenderError> {
        let l = layers(summary, feature, &classes, spec.bins)?;
        let axis = ValueAxis {
            min: l.overall.edges[0],
            max: *l.overall.edges.last().unwrap_or(&0.0),
            y_top: layout.top + 10.0,
            y_bottom: layout.bottom - 20.0,
        };
        Ok((axis, l))
    };

    let mut svg = Svg::new(spec.width, spec.height)?;
    svg.line(&format!(
        r#"<g class="parallel" data-window="{}" data-start="{}">"#,
        summary.window_index, summary.start
    ));
    svg.line(&format!(
        r#"<text class="title" x="{}" y="20.00" font-size="14">Parallel histograms: {} samples per window</text>"#,
        num(layout.left, "title")?,
        summary.len
    ));

    let columns: Vec<(usize, f64, ValueAxis, Layers)> = features
        .iter()
        .enumerate()
        .map(|(i, &f)| {
            let x = layout.left + i as f64 * spacing;
            let (axis, l) = axis_for(f)?;
            Ok((f, x, axis, l))
        })
        .collect::<Result<_, RenderError>>()?;

    if spec.draw_samples {
        if let Some(samples) = samples {
            svg.line(r#"<g class="samples" fill="none" stroke-opacity="0.15" stroke-width="0.5">"#);
            for s in samples {
                let pts = columns
                    .iter()
                    .map(|(f, x, axis, _)| {
                        Ok(format!(
                            "{},{}",
                            num(*x, "sample")?,
                            num(axis.y(s.features[*f]), "sample")?
                        ))
                    })
                    .collect::<Result<Vec<_>, RenderError>>()?;
                svg.line(&format!(
                    r#"<polyline class="sample" points="{}" stroke="{}"/>"#,
                    pts.join(" "),
                    class_color(spec, schema, s.label)
                ));
            }
            svg.line("</g>");
        }
    }

    for (feature, x, axis, l) in &columns {
        let max_count = l.overall.counts.iter().copied().max().unwrap_or(0);
        svg.line(&format!(r#"<g class="axis-group" data-feature="{feature}">"#));
        svg.line(&format!(
            r##"<line class="axis" x1="{x}" y1="{}" x2="{x}" y2="{}" stroke="#444444" stroke-width="0.8"/>"##,
            num(axis.y_top, "axis")?,
            num(axis.y_bottom, "axis")?,
            x = num(*x, "axis")?
        ));
        svg.line(&format!(
            r#"<text class="axis-label" x="{}" y="{}" text-anchor="middle">{}</text>"#,
            num(*x, "label")?,
            num(axis.y_bottom + 16.0, "label")?,
            escape(&schema.feature_names[*feature])
        ));
        for (v, y) in [(axis.max, axis.y_top - 3.0), (axis.min, axis.y_bottom + 30.0)] {
            svg.line(&format!(
                r#"<text class="tick" x="{}" y="{}" text-anchor="middle">{}</text>"#,
                num(*x, "tick")?,
                num(y, "tick")?,
                escape(&format!("{v:.3}"))
            ));
        }
        if spec.show_overall {
            bars(
                &mut svg,
                &l.overall,
                axis,
                *x,
                layout.bar_extent,
                max_count,
                "all",
                OVERALL_FILL,
                "0.55",
            )?;
        }
        if spec.show_class_layers {
            for (c, h) in &l.classes {
                let color = class_color(spec, schema, *c);
                bars(
                    &mut svg,
                    h,
                    axis,
                    *x,
                    layout.bar_extent,
                    max_count,
                    &c.to_string(),
                    &color,
                    "0.45",
                )?;
            }
        }
        if let Some(b) = &l.brushed {
            bars(
                &mut svg,
                b,
                axis,
                *x,
                layout.bar_extent,
                max_count,
                "brushed",
                BRUSH_FILL,
                "0.75",
            )?;
        }
        if spec.show_means {
            let m = summary.per_feature[*feature].mean;
            svg.line(&format!(
                r##"<circle class="mean-marker" data-class="all" cx="{}" cy="{}" r="2.60" fill="#222222"/>"##,
                num(*x, "mean")?,
                num(axis.y(m), "mean")?
            ));
        }
        svg.line("</g>");
    }
    svg.line("</g>");
    legend(&mut svg, spec, schema, &classes, &layout)?;
    Ok(svg.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::histogram::summarize_stream;
    use crate::stream::{FeatureRange, WindowSpec};
    use alloc::vec;

    fn fixture(n: usize) -> (StreamSchema, Vec<Sample>) {
        let schema = StreamSchema {
            feature_names: vec!["a<b".into(), "c".into()],
            feature_ranges: vec![FeatureRange { min: 0.0, max: 1.0 }; 2],
            class_ids: vec![0, 1],
            class_labels: vec!["neg".into(), "pos".into()],
        };
        let samples = (0..n)
            .map(|i| Sample {
                index: i as u64,
                features: vec![(i % 97) as f64 / 96.0, (i % 13) as f64 / 12.0],
                label: (i % 3 == 0) as u32,
            })
            .collect();
        (schema, samples)
    }

    #[test]
    fn single_window_without_means_has_no_polyline() {
        let (schema, samples) = fixture(100);
        let summaries = summarize_stream(&samples, &WindowSpec::disjoint(100).unwrap(), &schema, 8);
        let spec = RenderSpec {
            features: vec![0],
            show_means: false,
            ..Default::default()
        };
        let svg = render_pht(&schema, &summaries, &spec).unwrap();
        assert!(!svg.contains("<polyline"));
        assert_eq!(svg.matches(r#"class="cell""#).count(), 1);
        assert!(svg.contains("a&lt;b"));
    }

    #[test]
    fn errors() {
        let (schema, samples) = fixture(100);
        let summaries = summarize_stream(&samples, &WindowSpec::disjoint(10).unwrap(), &schema, 8);
        let spec = RenderSpec::default();
        assert_eq!(render_pht(&schema, &[], &spec), Err(RenderError::Empty));
        let bad = RenderSpec {
            features: vec![5],
            ..Default::default()
        };
        assert_eq!(
            render_pht(&schema, &summaries, &bad),
            Err(RenderError::UnknownFeature(5))
        );
        let bad = RenderSpec {
            classes: Some(vec![4]),
            ..Default::default()
        };
        assert_eq!(render_pht(&schema, &summaries, &bad), Err(RenderError::UnknownClass(4)));
        let many = summarize_stream(&samples, &WindowSpec::disjoint(2).unwrap(), &schema, 8);
        assert!(matches!(
            render_pht(&schema, &many, &spec),
            Err(RenderError::TooManyWindows { requested: 50, cap: 40 })
        ));
        let bad = RenderSpec {
            bins: Some(3),
            ..Default::default()
        };
        assert!(matches!(
            render_pht(&schema, &summaries, &bad),
            Err(RenderError::Bins { .. })
        ));
    }

    #[test]
    fn single_bin_is_a_full_height_bar() {
        let (schema, samples) = fixture(60);
        let summaries = summarize_stream(&samples, &WindowSpec::disjoint(60).unwrap(), &schema, 1);
        let spec = RenderSpec {
            show_class_layers: false,
            ..Default::default()
        };
        let svg = render_parallel_histograms(&schema, &summaries[0], &spec, None).unwrap();
        let layout = Layout::new(&spec, 2, 0.7).unwrap();
        let bar_height = num(layout.bottom - 20.0 - (layout.top + 10.0), "t").unwrap();
        let width = num(layout.bar_extent, "t").unwrap();
        assert_eq!(svg.matches(r#"class="bar""#).count(), 2);
        assert_eq!(
            svg.matches(&format!(r#"width="{width}" height="{bar_height}""#))
                .count(),
            2
        );
    }
}
