//! A loaded dataset and the parameterized computations over it.
//!
//! The CLI and the HTTP service both go through [`Session`], so a document
//! requested over HTTP is byte-identical to the one the CLI writes for the
//! same parameters.

use std::collections::{BTreeMap, HashMap};
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use pht_core::{
    detect_stream, filter_features, localize, render_parallel_histograms, render_pht, slice_windows, summarize_stream,
    summarize_window_brushed, AnalysisError, Brush, ClassId, Dataset, DetectorConfig, GeneratorConfig, LocalizeConfig,
    Monitor, RenderSpec, SplitGrid, WindowSpec, CONTINUOUS_RULE, DEFAULT_BINS, RNG_ALGORITHM,
};

use crate::formats::{
    sha256_hex, to_json_bytes, AnalysisDoc, DriftDoc, GeneratorSidecar, SummariesDoc, BOUNDARY_RULE, FORMAT_VERSION,
};
use crate::io::{load_csv, CsvOptions, LabelColumn, LoadError};

/// Upper bound on histogram resolution accepted from callers.
pub const MAX_BINS: usize = 4096;

/// Where a session's samples come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DataSource {
    Csv {
        path: PathBuf,
        #[serde(default = "default_label_column")]
        label_column: String,
        #[serde(default = "default_true")]
        header: bool,
        #[serde(default)]
        features: Option<Vec<String>>,
    },
    Generator {
        config: GeneratorConfig,
    },
}

fn default_label_column() -> String {
    "label".to_string()
}

fn default_true() -> bool {
    true
}

impl DataSource {
    pub fn csv(path: impl Into<PathBuf>) -> Self {
        Self::Csv {
            path: path.into(),
            label_column: default_label_column(),
            header: true,
            features: None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SessionError {
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("generator: {0}")]
    Generator(#[from] pht_core::GeneratorError),
}

/// One offending request parameter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{}", render_fields(.0))]
pub struct ParamErrors(pub Vec<FieldError>);

fn render_fields(fields: &[FieldError]) -> String {
    fields
        .iter()
        .map(|f| format!("{}: {}", f.field, f.message))
        .collect::<Vec<_>>()
        .join("; ")
}

impl ParamErrors {
    pub fn one(field: &str, message: impl Into<String>) -> Self {
        Self(vec![FieldError {
            field: field.to_string(),
            message: message.into(),
        }])
    }
}

/// Parameters for per-window summaries.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryParams {
    pub size: usize,
    /// Defaults to `size` (disjoint windows).
    pub stride: Option<usize>,
    pub offset: usize,
    /// Keeps at most this many windows, starting from `offset`.
    pub count: Option<usize>,
    pub bins: usize,
    /// Original feature indices to keep; `None` keeps all.
    pub features: Option<Vec<usize>>,
    /// Classes to keep in per-class breakdowns; `None` keeps all.
    pub classes: Option<Vec<ClassId>>,
    pub brush: Option<Brush>,
}

impl SummaryParams {
    pub fn disjoint(size: usize) -> Self {
        Self {
            size,
            stride: None,
            offset: 0,
            count: None,
            bins: DEFAULT_BINS,
            features: None,
            classes: None,
            brush: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum View {
    Pht,
    Parallel,
}

/// Parameters for an SVG figure.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureParams {
    pub summary: SummaryParams,
    pub view: View,
    /// Window drawn by the parallel view.
    pub window: usize,
    pub width: f64,
    pub height: f64,
    pub show_means: bool,
    pub drift_markers: Vec<u64>,
}

impl FigureParams {
    pub fn new(summary: SummaryParams) -> Self {
        let spec = RenderSpec::default();
        Self {
            summary,
            view: View::Pht,
            window: 0,
            width: spec.width,
            height: spec.height,
            show_means: spec.show_means,
            drift_markers: Vec::new(),
        }
    }
}

/// A dataset together with the content hash of everything that produced it.
#[derive(Debug, Clone)]
pub struct Session {
    pub source: DataSource,
    pub dataset: Dataset,
    pub input_hash: String,
}

impl Session {
    pub fn load(source: DataSource) -> Result<Self, SessionError> {
        let (dataset, input_hash) = match &source {
            DataSource::Csv {
                path,
                label_column,
                header,
                features,
            } => {
                let options = CsvOptions {
                    label_column: LabelColumn::parse(label_column),
                    has_header: *header,
                    features: features.clone(),
                };
                let dataset = load_csv(path, &options)?;
                let bytes = std::fs::read(path).map_err(|source| LoadError::Io {
                    path: path.display().to_string(),
                    source,
                })?;
                let opts = serde_json::json!({
                    "label_column": label_column,
                    "header": header,
                    "features": features,
                });
                let hash = sha256_hex(&[b"csv", opts.to_string().as_bytes(), &bytes]);
                (dataset, hash)
            }
            DataSource::Generator { config } => {
                let dataset = config.generate()?;
                (dataset, generator_hash(config))
            }
        };
        Ok(Self {
            source,
            dataset,
            input_hash,
        })
    }

    pub fn from_generator(config: GeneratorConfig) -> Result<Self, SessionError> {
        Self::load(DataSource::Generator { config })
    }

    /// Ground truth, when the session holds a synthetic stream.
    pub fn true_drift_points(&self) -> Option<Vec<u64>> {
        match &self.source {
            DataSource::Generator { config } => Some(config.true_drift_points()),
            DataSource::Csv { .. } => None,
        }
    }

    pub fn schema_doc(&self) -> serde_json::Value {
        serde_json::json!({
            "format_version": FORMAT_VERSION,
            "input_hash": self.input_hash,
            "source": self.source,
            "n_samples": self.dataset.samples.len(),
            "schema": self.dataset.schema,
            "true_drift_points": self.true_drift_points(),
        })
    }

    pub fn summaries(&self, p: &SummaryParams) -> Result<SummariesDoc, ParamErrors> {
        let schema = &self.dataset.schema;
        let mut errors = Vec::new();
        let mut err = |field: &str, message: String| {
            errors.push(FieldError {
                field: field.to_string(),
                message,
            })
        };
        let stride = p.stride.unwrap_or(p.size);
        if p.size == 0 {
            err("size", "must be >= 1".into());
        }
        if p.stride == Some(0) {
            err("stride", "must be >= 1".into());
        }
        if p.count == Some(0) {
            err("count", "must be >= 1".into());
        }
        if p.bins == 0 || p.bins > MAX_BINS {
            err("bins", format!("must lie in 1..={MAX_BINS}"));
        }
        let features = p
            .features
            .clone()
            .unwrap_or_else(|| (0..schema.feature_count()).collect());
        if features.is_empty() {
            err("features", "must name at least one feature".into());
        }
        for (i, &f) in features.iter().enumerate() {
            if f >= schema.feature_count() {
                err(
                    "features",
                    format!("feature {f} out of range (stream has {})", schema.feature_count()),
                );
            } else if features[..i].contains(&f) {
                err("features", format!("feature {f} listed twice"));
            }
        }
        let classes = p.classes.clone().unwrap_or_else(|| schema.class_ids.clone());
        let mut sorted = classes.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != classes.len() {
            err("classes", "class listed twice".into());
        }
        for &c in &classes {
            if schema.class_position(c).is_none() {
                err("classes", format!("unknown class {c}"));
            }
        }
        if let Some(b) = &p.brush {
            if b.feature >= schema.feature_count() {
                err("brush", format!("feature {} out of range", b.feature));
            }
            if b.lo.is_nan() || b.hi.is_nan() || b.lo > b.hi {
                err("brush", "lower bound exceeds upper bound".into());
            }
        }
        if !errors.is_empty() {
            return Err(ParamErrors(errors));
        }
        let window = WindowSpec::new(p.size, stride, p.offset).map_err(|e| ParamErrors::one("size", e.to_string()))?;

        let summaries = slice_windows(&self.dataset.samples, &window)
            .iter()
            .take(p.count.unwrap_or(usize::MAX))
            .map(|w| {
                let mut s = summarize_window_brushed(w, schema, p.bins, p.brush.as_ref());
                s.per_feature = features.iter().map(|&f| s.per_feature[f].clone()).collect();
                for fs in &mut s.per_feature {
                    fs.per_class.retain(|c, _| sorted.contains(c));
                }
                s.count_per_class.retain(|c, _| sorted.contains(c));
                s
            })
            .collect();
        Ok(SummariesDoc {
            format_version: FORMAT_VERSION,
            input_hash: self.input_hash.clone(),
            schema: schema.clone(),
            window,
            bins: p.bins,
            features,
            classes: sorted,
            brush: p.brush,
            summaries,
        })
    }

    pub fn drift(&self, config: DetectorConfig) -> Result<DriftDoc, ParamErrors> {
        check_detector(&config)?;
        let report = detect_stream(&self.dataset.samples, &self.dataset.schema, config)
            .map_err(|e| ParamErrors::one("input", e.to_string()))?;
        Ok(DriftDoc {
            format_version: FORMAT_VERSION,
            input_hash: self.input_hash.clone(),
            config: report.config,
            drift_points: report.drift_points,
            profile: report.profile,
            evidence: report.evidence,
        })
    }

    pub fn analysis(&self, config: &LocalizeConfig) -> Result<AnalysisDoc, ParamErrors> {
        check_localize(config)?;
        let data = &self.dataset;
        let coarse = summarize_stream(
            &data.samples,
            &WindowSpec::disjoint(config.initial_window).expect("validated above"),
            &data.schema,
            1,
        );
        let features = filter_features(&data.schema, &coarse, &config.align.filter).map_err(|e| match e {
            AnalysisError::TooFewWindows(n) => ParamErrors::one(
                "initial_window",
                format!(
                    "yields {n} window(s) over {} samples; need at least 2",
                    data.samples.len()
                ),
            ),
            other => ParamErrors::one("input", other.to_string()),
        })?;
        let found =
            localize(&data.samples, &data.schema, config).map_err(|e| ParamErrors::one("input", e.to_string()))?;
        Ok(AnalysisDoc {
            format_version: FORMAT_VERSION,
            input_hash: self.input_hash.clone(),
            config: *config,
            features,
            alignments: found.alignments,
            continuous_regions: found.continuous,
            continuous_rule: CONTINUOUS_RULE.to_string(),
        })
    }

    pub fn figure(&self, p: &FigureParams) -> Result<String, ParamErrors> {
        let doc = self.summaries(&p.summary)?;
        let (schema, summaries) = doc.projected();
        let spec = RenderSpec {
            width: p.width,
            height: p.height,
            show_means: p.show_means,
            drift_markers: p.drift_markers.clone(),
            ..RenderSpec::default()
        };
        let rendered = match p.view {
            View::Pht => render_pht(&schema, &summaries, &spec),
            View::Parallel => {
                let Some(summary) = summaries.get(p.window) else {
                    return Err(ParamErrors::one(
                        "window",
                        format!("window {} out of range ({} windows)", p.window, summaries.len()),
                    ));
                };
                render_parallel_histograms(&schema, summary, &spec, None)
            }
        };
        rendered.map_err(|e| ParamErrors::one("figure", e.to_string()))
    }
}

/// Hash identifying a synthetic stream by its full configuration.
pub fn generator_hash(config: &GeneratorConfig) -> String {
    let json = serde_json::to_vec(config).expect("configs serialize");
    sha256_hex(&[b"generator", &json])
}

pub fn generator_sidecar(config: &GeneratorConfig) -> GeneratorSidecar {
    GeneratorSidecar {
        format_version: FORMAT_VERSION,
        input_hash: generator_hash(config),
        config: config.clone(),
        rng: RNG_ALGORITHM.to_string(),
        true_drift_points: config.true_drift_points(),
        boundary_rule: BOUNDARY_RULE.to_string(),
    }
}

fn check_detector(c: &DetectorConfig) -> Result<(), ParamErrors> {
    let mut errors = Vec::new();
    if !(c.delta > 0.0 && c.delta < 1.0) {
        errors.push(("delta", "must lie in (0, 1)".to_string()));
    }
    if c.n_min == 0 {
        errors.push(("n_min", "must be >= 1".to_string()));
    }
    if c.max_window < 2 * c.n_min.max(1) {
        errors.push(("max_window", "must be >= 2 * n_min".to_string()));
    }
    into_errors(errors)
}

fn check_localize(c: &LocalizeConfig) -> Result<(), ParamErrors> {
    let mut errors = Vec::new();
    if c.initial_window == 0 {
        errors.push(("initial_window", "must be >= 1".to_string()));
    }
    if c.min_window == 0 || c.min_window > c.initial_window {
        errors.push(("min_window", "must lie in 1..=initial_window".to_string()));
    }
    if !(c.shrink_factor > 0.0 && c.shrink_factor < 1.0) {
        errors.push(("shrink", "must lie in (0, 1)".to_string()));
    }
    if !(c.delta > 0.0 && c.delta < 1.0) {
        errors.push(("delta", "must lie in (0, 1)".to_string()));
    }
    if c.n_min == 0 {
        errors.push(("n_min", "must be >= 1".to_string()));
    }
    if c.align.filter.drift_epsilon.is_nan() || c.align.filter.drift_epsilon < 0.0 {
        errors.push(("drift_epsilon", "must be >= 0".to_string()));
    }
    into_errors(errors)?;
    c.validate().map_err(|e| ParamErrors::one("config", e.to_string()))
}

fn into_errors(errors: Vec<(&str, String)>) -> Result<(), ParamErrors> {
    if errors.is_empty() {
        return Ok(());
    }
    Err(ParamErrors(
        errors
            .into_iter()
            .map(|(field, message)| FieldError {
                field: field.to_string(),
                message,
            })
            .collect(),
    ))
}

/// Typed access to query-string parameters, collecting every problem
/// instead of stopping at the first.
pub struct QueryParams<'a> {
    raw: &'a HashMap<String, String>,
    errors: Vec<FieldError>,
    seen: Vec<&'static str>,
}

impl<'a> QueryParams<'a> {
    pub fn new(raw: &'a HashMap<String, String>) -> Self {
        Self {
            raw,
            errors: Vec::new(),
            seen: Vec::new(),
        }
    }

    fn fail(&mut self, field: &str, message: impl Into<String>) {
        self.errors.push(FieldError {
            field: field.to_string(),
            message: message.into(),
        });
    }

    fn get(&mut self, name: &'static str) -> Option<&'a str> {
        self.seen.push(name);
        self.raw.get(name).map(String::as_str)
    }

    pub fn parsed<T: std::str::FromStr>(&mut self, name: &'static str, what: &str) -> Option<T> {
        let text = self.get(name)?;
        match text.trim().parse() {
            Ok(v) => Some(v),
            Err(_) => {
                self.fail(name, format!("expected {what}, got {text:?}"));
                None
            }
        }
    }

    pub fn list<T: std::str::FromStr>(&mut self, name: &'static str, what: &str) -> Option<Vec<T>> {
        let text = self.get(name)?;
        let mut out = Vec::new();
        for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match part.parse() {
                Ok(v) => out.push(v),
                Err(_) => {
                    self.fail(name, format!("expected a comma-separated list of {what}, got {part:?}"));
                    return None;
                }
            }
        }
        Some(out)
    }

    pub fn choice<T: Copy>(&mut self, name: &'static str, options: &[(&str, T)]) -> Option<T> {
        let text = self.get(name)?;
        match options.iter().find(|(k, _)| *k == text) {
            Some(&(_, v)) => Some(v),
            None => {
                let names: Vec<&str> = options.iter().map(|(k, _)| *k).collect();
                self.fail(name, format!("expected one of {}", names.join(", ")));
                None
            }
        }
    }

    pub fn brush(&mut self) -> Option<Brush> {
        let text = self.get("brush")?;
        let parts: Vec<&str> = text.split(':').collect();
        let parsed = match parts.as_slice() {
            [f, lo, hi] => match (f.parse::<usize>(), lo.parse::<f64>(), hi.parse::<f64>()) {
                (Ok(f), Ok(lo), Ok(hi)) if lo.is_finite() && hi.is_finite() => Brush::new(f, lo, hi),
                _ => None,
            },
            _ => None,
        };
        if parsed.is_none() {
            self.fail("brush", "expected feature:lo:hi with lo <= hi");
        }
        parsed
    }

    /// Reports unrecognized parameters and returns every collected error.
    pub fn finish(mut self) -> Result<(), ParamErrors> {
        let mut unknown: Vec<&String> = self.raw.keys().filter(|k| !self.seen.contains(&k.as_str())).collect();
        unknown.sort();
        for k in unknown {
            self.errors.push(FieldError {
                field: k.clone(),
                message: "unknown parameter".to_string(),
            });
        }
        if self.errors.is_empty() {
            Ok(())
        } else {
            Err(ParamErrors(self.errors))
        }
    }
}

fn summary_from(q: &mut QueryParams<'_>) -> SummaryParams {
    let size = q.parsed("size", "a positive integer");
    if size.is_none() && !q.raw.contains_key("size") {
        q.fail("size", "required");
    }
    SummaryParams {
        size: size.unwrap_or(1),
        stride: q.parsed("stride", "a positive integer"),
        offset: q.parsed("offset", "a non-negative integer").unwrap_or(0),
        count: q.parsed("count", "a positive integer"),
        bins: q.parsed("bins", "a positive integer").unwrap_or(DEFAULT_BINS),
        features: q.list("features", "feature indices"),
        classes: q.list("classes", "class ids"),
        brush: q.brush(),
    }
}

pub fn parse_summary_query(raw: &HashMap<String, String>) -> Result<SummaryParams, ParamErrors> {
    let mut q = QueryParams::new(raw);
    let p = summary_from(&mut q);
    q.finish().map(|_| p)
}

pub fn parse_figure_query(raw: &HashMap<String, String>) -> Result<FigureParams, ParamErrors> {
    let mut q = QueryParams::new(raw);
    let mut p = FigureParams::new(summary_from(&mut q));
    if let Some(v) = q.choice("view", &[("pht", View::Pht), ("parallel", View::Parallel)]) {
        p.view = v;
    }
    if let Some(w) = q.parsed("window", "a window index") {
        p.window = w;
    }
    if let Some(w) = q.parsed::<f64>("width", "a number") {
        p.width = w;
    }
    if let Some(h) = q.parsed::<f64>("height", "a number") {
        p.height = h;
    }
    if let Some(m) = q.parsed("means", "true or false") {
        p.show_means = m;
    }
    if let Some(m) = q.list("markers", "sample indices") {
        p.drift_markers = m;
    }
    q.finish().map(|_| p)
}

pub fn parse_drift_query(raw: &HashMap<String, String>) -> Result<DetectorConfig, ParamErrors> {
    let mut q = QueryParams::new(raw);
    let mut c = DetectorConfig::default();
    if let Some(d) = q.parsed("delta", "a probability") {
        c.delta = d;
    }
    if let Some(m) = q.choice(
        "monitor",
        &[("marginal", Monitor::Marginal), ("per_class", Monitor::PerClass)],
    ) {
        c.monitor = m;
    }
    if let Some(n) = q.parsed("n_min", "a positive integer") {
        c.n_min = n;
    }
    if let Some(n) = q.parsed("max_window", "a positive integer") {
        c.max_window = n;
    }
    if let Some(g) = q.choice(
        "grid",
        &[
            ("geometric", SplitGrid::Geometric),
            ("exhaustive", SplitGrid::Exhaustive),
        ],
    ) {
        c.split_grid = g;
    }
    q.finish()?;
    check_detector(&c)?;
    Ok(c)
}

pub fn parse_analysis_query(raw: &HashMap<String, String>) -> Result<LocalizeConfig, ParamErrors> {
    let mut q = QueryParams::new(raw);
    let mut c = LocalizeConfig::default();
    if let Some(v) = q.parsed("initial_window", "a positive integer") {
        c.initial_window = v;
    }
    if let Some(v) = q.parsed("min_window", "a positive integer") {
        c.min_window = v;
    }
    if let Some(v) = q.parsed("shrink", "a number in (0, 1)") {
        c.shrink_factor = v;
    }
    if let Some(v) = q.parsed("n_min", "a positive integer") {
        c.n_min = v;
    }
    if let Some(v) = q.parsed("delta", "a probability") {
        c.delta = v;
    }
    if let Some(v) = q.parsed("drift_epsilon", "a non-negative number") {
        c.align.filter.drift_epsilon = v;
    }
    if let Some(v) = q.parsed("sharpness", "a positive number") {
        c.sharpness_threshold = v;
    }
    q.finish()?;
    check_localize(&c)?;
    Ok(c)
}

/// Stable cache key for an endpoint and its raw parameters.
pub fn cache_key(endpoint: &str, input_hash: &str, raw: &HashMap<String, String>) -> String {
    let sorted: BTreeMap<&String, &String> = raw.iter().collect();
    let params = serde_json::to_string(&sorted).expect("strings serialize");
    format!("{input_hash} {endpoint} {params}")
}

/// Serialized summaries exactly as the CLI writes them.
pub fn summaries_bytes(session: &Session, p: &SummaryParams) -> Result<Vec<u8>, ParamErrors> {
    session.summaries(p).map(|d| to_json_bytes(&d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use pht_core::Sine1Config;

    fn small() -> Session {
        Session::from_generator(GeneratorConfig::Sine1(Sine1Config {
            n_samples: 2_000,
            drift_period: 1_000,
            ..Sine1Config::default()
        }))
        .unwrap()
    }

    fn query(pairs: &[(&str, &str)]) -> HashMap<String, String> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn query_errors_are_collected_per_field() {
        let err = parse_summary_query(&query(&[("size", "x"), ("bins", "-1"), ("bogus", "1")])).unwrap_err();
        let fields: Vec<&str> = err.0.iter().map(|f| f.field.as_str()).collect();
        assert_eq!(fields, ["size", "bins", "bogus"]);
        let err = parse_summary_query(&query(&[])).unwrap_err();
        assert_eq!(err.0[0].field, "size");
    }

    #[test]
    fn selection_is_validated_against_the_schema() {
        let s = small();
        let mut p = SummaryParams::disjoint(500);
        p.features = Some(vec![5]);
        p.classes = Some(vec![9]);
        let err = s.summaries(&p).unwrap_err();
        let fields: Vec<&str> = err.0.iter().map(|f| f.field.as_str()).collect();
        assert_eq!(fields, ["features", "classes"]);
    }

    #[test]
    fn selection_restricts_the_document() {
        let s = small();
        let mut p = SummaryParams::disjoint(500);
        p.features = Some(vec![1]);
        p.classes = Some(vec![1]);
        let doc = s.summaries(&p).unwrap();
        assert_eq!(doc.summaries.len(), 4);
        for w in &doc.summaries {
            assert_eq!(w.per_feature.len(), 1);
            assert_eq!(w.per_feature[0].feature, 1);
            assert_eq!(w.count_per_class.keys().copied().collect::<Vec<_>>(), [1]);
        }
        let (schema, projected) = doc.projected();
        assert_eq!(schema.feature_names, ["x_b"]);
        assert_eq!(projected[0].per_feature[0].feature, 0);
    }

    #[test]
    fn generator_hash_tracks_every_parameter() {
        let a = GeneratorConfig::Sine1(Sine1Config::default());
        let b = GeneratorConfig::Sine1(Sine1Config {
            seed: 43,
            ..Sine1Config::default()
        });
        assert_ne!(generator_hash(&a), generator_hash(&b));
        assert_eq!(generator_hash(&a), generator_hash(&a.clone()));
    }

    #[test]
    fn analysis_rejects_a_single_coarse_window() {
        let err = small().analysis(&LocalizeConfig::default()).unwrap_err();
        assert_eq!(err.0[0].field, "initial_window");
    }
}
