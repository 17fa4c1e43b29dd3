//! The `pht` command line.

use std::ffi::OsString;
use std::io::Write;
use std::net::IpAddr;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use pht_core::{
    CirclesConfig, DetectorConfig, GeneratorConfig, LocalizeConfig, Monitor, RenderSpec, Sine1Config, SplitGrid,
    DEFAULT_BINS,
};

use crate::artifact::{artifact_detector, write_artifact};
use crate::formats::{to_json_bytes, SummariesDoc};
use crate::io::write_csv;
use crate::session::{generator_sidecar, DataSource, Session, SummaryParams};

#[derive(Debug, Parser)]
#[command(
    name = "pht",
    version,
    about = "Parallel histograms through time for labeled data streams"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic benchmark stream as CSV plus a JSON sidecar.
    Generate(GenerateArgs),
    /// Summarize a stream into per-window histograms.
    Summarize(SummarizeArgs),
    /// Run the adaptive-window drift detector.
    Detect(DetectArgs),
    /// Filter features and localize abrupt drift.
    Analyze(AnalyzeArgs),
    /// Render an SVG from a summaries document.
    Render(RenderArgs),
    /// Serve the HTTP API.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DatasetName {
    Sine1,
    Circles,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub dataset: DatasetName,
    #[arg(long)]
    pub out: PathBuf,
    /// Sidecar path; defaults to the output with a `.json` extension.
    #[arg(long)]
    pub meta: Option<PathBuf>,
    #[arg(long)]
    pub n_samples: Option<usize>,
    #[arg(long)]
    pub drift_period: Option<usize>,
    /// SINE1 label noise rate.
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Labeled CSV input.
    #[arg(long = "in", value_name = "CSV")]
    pub input: PathBuf,
    /// Label column, by header name or zero-based index.
    #[arg(long, default_value = "label")]
    pub label_column: String,
    #[arg(long)]
    pub no_header: bool,
    /// Feature columns to load, by name or index; default is every other column.
    #[arg(long, value_delimiter = ',')]
    pub columns: Option<Vec<String>>,
}

impl InputArgs {
    pub fn source(&self) -> DataSource {
        DataSource::Csv {
            path: self.input.clone(),
            label_column: self.label_column.clone(),
            header: !self.no_header,
            features: self.columns.clone(),
        }
    }

    fn load(&self) -> Result<Session> {
        Session::load(self.source()).with_context(|| format!("loading {}", self.input.display()))
    }
}

#[derive(Debug, Args)]
pub struct SummarizeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub window_size: usize,
    /// Defaults to the window size (disjoint windows).
    #[arg(long)]
    pub stride: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub offset: usize,
    /// Keeps at most this many windows.
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_BINS)]
    pub bins: usize,
    /// Feature indices to keep.
    #[arg(long, value_delimiter = ',')]
    pub features: Option<Vec<usize>>,
    /// Class ids to keep in per-class breakdowns.
    #[arg(long, value_delimiter = ',')]
    pub classes: Option<Vec<u32>>,
    /// Output path; `-` for stdout.
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Monitor each class's feature means instead of the marginal means.
    #[arg(long)]
    pub per_class: bool,
    #[arg(long, default_value_t = DetectorConfig::default().delta)]
    pub delta: f64,
    #[arg(long, default_value_t = DetectorConfig::default().n_min)]
    pub n_min: usize,
    #[arg(long, default_value_t = DetectorConfig::default().max_window)]
    pub max_window: usize,
    /// Test every split instead of the geometric grid.
    #[arg(long)]
    pub exhaustive: bool,
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = LocalizeConfig::default().initial_window)]
    pub window_size: usize,
    #[arg(long, default_value_t = LocalizeConfig::default().min_window)]
    pub min_window: usize,
    #[arg(long, default_value_t = LocalizeConfig::default().shrink_factor)]
    pub shrink: f64,
    #[arg(long, default_value_t = LocalizeConfig::default().n_min)]
    pub n_min: usize,
    #[arg(long, default_value_t = LocalizeConfig::default().delta)]
    pub delta: f64,
    #[arg(long, default_value_t = LocalizeConfig::default().align.filter.drift_epsilon)]
    pub drift_epsilon: f64,
    #[arg(long, default_value_t = LocalizeConfig::default().align.filter.range_epsilon)]
    pub range_epsilon: f64,
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
    /// Also write a full artifact directory (documents, figures, manifest).
    #[arg(long)]
    pub artifact_dir: Option<PathBuf>,
}

impl AnalyzeArgs {
    fn config(&self) -> LocalizeConfig {
        let mut c = LocalizeConfig {
            initial_window: self.window_size,
            min_window: self.min_window,
            shrink_factor: self.shrink,
            n_min: self.n_min,
            delta: self.delta,
            ..LocalizeConfig::default()
        };
        c.align.filter.drift_epsilon = self.drift_epsilon;
        c.align.filter.range_epsilon = self.range_epsilon;
        c
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ViewArg {
    Pht,
    Parallel,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// Summaries document written by `pht summarize`.
    #[arg(long)]
    pub summaries: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "pht")]
    pub view: ViewArg,
    /// Merge histogram bins down to this count.
    #[arg(long)]
    pub bins: Option<usize>,
    /// Feature indices (as in the source stream) to draw.
    #[arg(long, value_delimiter = ',')]
    pub features: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub classes: Option<Vec<u32>>,
    /// Fail unless the document was summarized with this window size.
    #[arg(long)]
    pub window_size: Option<usize>,
    /// Drop windows starting before this sample index.
    #[arg(long)]
    pub offset: Option<usize>,
    /// Draw at most this many windows.
    #[arg(long)]
    pub max_windows: Option<usize>,
    /// Window drawn by the parallel view, counted after filtering.
    #[arg(long, default_value_t = 0)]
    pub window: usize,
    #[arg(long, value_delimiter = ',')]
    pub drift_markers: Vec<u64>,
    #[arg(long)]
    pub no_means: bool,
    #[arg(long, default_value_t = RenderSpec::default().width)]
    pub width: f64,
    #[arg(long, default_value_t = RenderSpec::default().height)]
    pub height: f64,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// Serve this CSV instead of a generated stream.
    #[arg(long = "in", value_name = "CSV")]
    pub input: Option<PathBuf>,
    #[arg(long, default_value = "label")]
    pub label_column: String,
    #[arg(long)]
    pub no_header: bool,
    /// Generated stream served when no CSV is given.
    #[arg(long, value_enum, default_value = "sine1")]
    pub dataset: DatasetName,
    #[arg(long, env = "PHT_PORT", default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub bind: IpAddr,
}

/// Parses arguments and runs one command. Usage errors exit the process
/// through clap.
pub fn run(args: impl IntoIterator<Item = impl Into<OsString> + Clone>) -> Result<()> {
    let cli = Cli::try_parse_from(args).unwrap_or_else(|e| e.exit());
    match cli.command {
        Command::Generate(a) => generate(a),
        Command::Summarize(a) => summarize(a),
        Command::Detect(a) => detect(a),
        Command::Analyze(a) => analyze(a),
        Command::Render(a) => render(a),
        Command::Serve(a) => serve(a),
    }
}

fn write_output(path: &Path, bytes: &[u8]) -> Result<()> {
    if path == Path::new("-") {
        let mut out = std::io::stdout().lock();
        out.write_all(bytes)?;
        return Ok(out.flush()?);
    }
    std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn generator_config(a: &GenerateArgs) -> Result<GeneratorConfig> {
    Ok(match a.dataset {
        DatasetName::Sine1 => {
            let d = Sine1Config::default();
            GeneratorConfig::Sine1(Sine1Config {
                n_samples: a.n_samples.unwrap_or(d.n_samples),
                drift_period: a.drift_period.unwrap_or(d.drift_period),
                noise_rate: a.noise.unwrap_or(d.noise_rate),
                seed: a.seed.unwrap_or(d.seed),
            })
        }
        DatasetName::Circles => {
            if a.noise.is_some() {
                bail!("--noise applies to sine1 only");
            }
            let d = CirclesConfig::default();
            GeneratorConfig::Circles(CirclesConfig {
                n_samples: a.n_samples.unwrap_or(d.n_samples),
                drift_period: a.drift_period.unwrap_or(d.drift_period),
                seed: a.seed.unwrap_or(d.seed),
                ..d
            })
        }
    })
}

fn default_config(name: DatasetName) -> GeneratorConfig {
    match name {
        DatasetName::Sine1 => GeneratorConfig::Sine1(Sine1Config::default()),
        DatasetName::Circles => GeneratorConfig::Circles(CirclesConfig::default()),
    }
}

fn generate(a: GenerateArgs) -> Result<()> {
    let config = generator_config(&a)?;
    let data = config.generate()?;
    let file = std::fs::File::create(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    write_csv(&data, std::io::BufWriter::new(file))?;
    let meta = a.meta.clone().unwrap_or_else(|| a.out.with_extension("json"));
    write_output(&meta, &to_json_bytes(&generator_sidecar(&config)))?;
    eprintln!(
        "wrote {} samples to {} (metadata in {})",
        data.samples.len(),
        a.out.display(),
        meta.display()
    );
    Ok(())
}

fn summarize(a: SummarizeArgs) -> Result<()> {
    let session = a.input.load()?;
    let params = SummaryParams {
        size: a.window_size,
        stride: a.stride,
        offset: a.offset,
        count: a.count,
        bins: a.bins,
        features: a.features,
        classes: a.classes,
        brush: None,
    };
    let doc = session.summaries(&params)?;
    if doc.summaries.is_empty() {
        eprintln!(
            "warning: {} samples hold no complete window of {}",
            session.dataset.samples.len(),
            a.window_size
        );
    }
    write_output(&a.out, &to_json_bytes(&doc))
}

fn detect(a: DetectArgs) -> Result<()> {
    let session = a.input.load()?;
    let config = DetectorConfig {
        delta: a.delta,
        n_min: a.n_min,
        max_window: a.max_window,
        monitor: if a.per_class {
            Monitor::PerClass
        } else {
            Monitor::Marginal
        },
        split_grid: if a.exhaustive {
            SplitGrid::Exhaustive
        } else {
            SplitGrid::Geometric
        },
    };
    let doc = session.drift(config)?;
    eprintln!("drift points: {:?}", doc.drift_points);
    write_output(&a.out, &to_json_bytes(&doc))
}

fn analyze(a: AnalyzeArgs) -> Result<()> {
    let session = a.input.load()?;
    let config = a.config();
    let doc = session.analysis(&config)?;
    for al in &doc.alignments {
        eprintln!(
            "abrupt drift at {} (window {}, sharpness {:.2}, feature {})",
            al.boundary_index, al.window_size, al.sharpness, al.feature
        );
    }
    for r in &doc.continuous_regions {
        eprintln!("continuous drift over [{}, {})", r.start, r.end);
    }
    if let Some(dir) = &a.artifact_dir {
        let manifest = write_artifact(&session, &config, artifact_detector(&session), dir)?;
        eprintln!("artifact {} written to {}", manifest.artifact_hash, dir.display());
    }
    write_output(&a.out, &to_json_bytes(&doc))
}

fn render(a: RenderArgs) -> Result<()> {
    let text = std::fs::read(&a.summaries).with_context(|| format!("reading {}", a.summaries.display()))?;
    let doc: SummariesDoc =
        serde_json::from_slice(&text).with_context(|| format!("parsing {}", a.summaries.display()))?;
    if let Some(size) = a.window_size {
        if size != doc.window.size {
            bail!(
                "{} was summarized with window size {}, not {size}",
                a.summaries.display(),
                doc.window.size
            );
        }
    }
    let (schema, mut summaries) = doc.projected();
    if let Some(offset) = a.offset {
        summaries.retain(|s| s.start >= offset);
    }
    if let Some(max) = a.max_windows {
        summaries.truncate(max);
    }
    if summaries.is_empty() {
        bail!("{} contains no windows to render", a.summaries.display());
    }
    let features = match &a.features {
        None => Vec::new(),
        Some(list) => list
            .iter()
            .map(|f| {
                doc.features
                    .iter()
                    .position(|g| g == f)
                    .with_context(|| format!("feature {f} is not in {}", a.summaries.display()))
            })
            .collect::<Result<_>>()?,
    };
    let spec = RenderSpec {
        width: a.width,
        height: a.height,
        bins: a.bins,
        features,
        classes: a.classes.clone(),
        show_means: !a.no_means,
        drift_markers: a.drift_markers.clone(),
        ..RenderSpec::default()
    };
    let svg = match a.view {
        ViewArg::Pht => pht_core::render_pht(&schema, &summaries, &spec)?,
        ViewArg::Parallel => {
            let summary = summaries
                .get(a.window)
                .with_context(|| format!("window {} out of range ({} windows)", a.window, summaries.len()))?;
            pht_core::render_parallel_histograms(&schema, summary, &spec, None)?
        }
    };
    write_output(&a.out, svg.as_bytes())
}

fn serve(a: ServeArgs) -> Result<()> {
    let source = match &a.input {
        Some(path) => DataSource::Csv {
            path: path.clone(),
            label_column: a.label_column.clone(),
            header: !a.no_header,
            features: None,
        },
        None => DataSource::Generator {
            config: default_config(a.dataset),
        },
    };
    let session = Session::load(source).context("loading the initial dataset")?;
    let runtime = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind((a.bind, a.port))
            .await
            .with_context(|| format!("cannot listen on {}:{} (is the port in use?)", a.bind, a.port))?;
        eprintln!("listening on http://{}", listener.local_addr()?);
        let app = crate::service::router(crate::service::AppState::new(session));
        axum::serve(listener, app).await?;
        Ok(())
    })
}
