//! A directory bundling every output of one analysis run.
//!
//! The manifest's `artifact_hash` covers the input hash and every
//! parameter, so it changes exactly when something that feeds the analysis
//! changes. Per-file hashes let consumers verify the contents.

use std::path::Path;

use serde::{Deserialize, Serialize};

use pht_core::{DetectorConfig, LocalizeConfig, Monitor, RenderSpec, DEFAULT_BINS};

use crate::formats::{sha256_hex, to_json_bytes, FORMAT_VERSION};
use crate::session::{FigureParams, ParamErrors, Session, SummaryParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArtifactFile {
    pub name: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub input_hash: String,
    pub artifact_hash: String,
    pub localize: LocalizeConfig,
    pub detector: DetectorConfig,
    pub files: Vec<ArtifactFile>,
    /// Outputs that could not be produced, with the reason.
    pub skipped: Vec<(String, String)>,
}

#[derive(Debug, thiserror::Error)]
pub enum ArtifactError {
    #[error(transparent)]
    Params(#[from] ParamErrors),
    #[error("writing {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Default detector for artifacts: per-class monitoring whenever the stream
/// has more than one class.
pub fn artifact_detector(session: &Session) -> DetectorConfig {
    let monitor = if session.dataset.schema.class_ids.len() > 1 {
        Monitor::PerClass
    } else {
        Monitor::Marginal
    };
    DetectorConfig {
        monitor,
        ..DetectorConfig::default()
    }
}

pub fn artifact_hash(input_hash: &str, localize: &LocalizeConfig, detector: &DetectorConfig) -> String {
    let params = serde_json::json!({ "localize": localize, "detector": detector, "bins": DEFAULT_BINS });
    sha256_hex(&[input_hash.as_bytes(), params.to_string().as_bytes()])
}

/// Runs detection and localization and writes all outputs into `dir`.
pub fn write_artifact(
    session: &Session,
    localize: &LocalizeConfig,
    detector: DetectorConfig,
    dir: &Path,
) -> Result<Manifest, ArtifactError> {
    let io_err = |path: &Path| {
        let path = path.display().to_string();
        move |source| ArtifactError::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut files = Vec::new();
    let mut skipped = Vec::new();
    let mut put = |name: String, bytes: &[u8]| -> Result<(), ArtifactError> {
        let path = dir.join(&name);
        std::fs::write(&path, bytes).map_err(io_err(&path))?;
        files.push(ArtifactFile {
            name,
            sha256: sha256_hex(&[bytes]),
        });
        Ok(())
    };

    put("schema.json".into(), &to_json_bytes(&session.schema_doc()))?;
    let analysis = session.analysis(localize)?;
    put("analysis.json".into(), &to_json_bytes(&analysis))?;
    let drift = session.drift(detector)?;
    put("drift.json".into(), &to_json_bytes(&drift))?;

    let overview = SummaryParams::disjoint(localize.initial_window);
    put("summaries.json".into(), &to_json_bytes(&session.summaries(&overview)?))?;
    let mut figure = FigureParams::new(overview);
    figure.drift_markers = drift.drift_points.clone();
    match session.figure(&figure) {
        Ok(svg) => put("pht.svg".into(), svg.as_bytes())?,
        Err(e) => skipped.push(("pht.svg".to_string(), e.to_string())),
    }

    let cap = RenderSpec::default().window_cap;
    for (k, a) in analysis.alignments.iter().enumerate() {
        let view = a.view_spec();
        let mut doc = session.summaries(&SummaryParams {
            offset: view.offset,
            ..SummaryParams::disjoint(view.size)
        })?;
        doc.summaries.retain(|s| s.end() <= a.view_end());
        doc.summaries.truncate(cap);
        let (schema, summaries) = doc.projected();
        let spec = RenderSpec {
            features: vec![a.feature],
            drift_markers: vec![a.boundary_index as u64],
            ..RenderSpec::default()
        };
        let name = format!("aligned-{k}.svg");
        match pht_core::render_pht(&schema, &summaries, &spec) {
            Ok(svg) => put(name, svg.as_bytes())?,
            Err(e) => skipped.push((name, e.to_string())),
        }
    }

    let manifest = Manifest {
        format_version: FORMAT_VERSION,
        input_hash: session.input_hash.clone(),
        artifact_hash: artifact_hash(&session.input_hash, localize, &detector),
        localize: *localize,
        detector,
        files,
        skipped,
    };
    let path = dir.join("manifest.json");
    std::fs::write(&path, to_json_bytes(&manifest)).map_err(io_err(&path))?;
    Ok(manifest)
}
