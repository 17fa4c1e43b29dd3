//! Versioned JSON documents written by the CLI and served over HTTP.
//!
//! Every document carries `format_version` and the `input_hash` of the data
//! it was computed from. Serialization is deterministic: the same inputs
//! always produce the same bytes.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use pht_core::{
    AlignmentResult, Brush, ClassId, ContinuousRegion, DetectorConfig, DriftEvidence, FeatureReport, GeneratorConfig,
    LocalizeConfig, StreamSchema, WindowSpec, WindowSummary,
};

pub const FORMAT_VERSION: u32 = 1;

/// Rule used to place the generator's ground-truth drift points.
pub const BOUNDARY_RULE: &str =
    "the concept switches at every sample index that is a positive multiple of drift_period";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummariesDoc {
    pub format_version: u32,
    pub input_hash: String,
    pub schema: StreamSchema,
    pub window: WindowSpec,
    pub bins: usize,
    /// Original feature indices present in each window's `per_feature`, in order.
    pub features: Vec<usize>,
    /// Classes retained in the per-class breakdowns.
    pub classes: Vec<ClassId>,
    pub brush: Option<Brush>,
    pub summaries: Vec<WindowSummary>,
}

impl SummariesDoc {
    /// A schema and summaries restricted to the document's feature and
    /// class selection, with features renumbered from zero.
    pub fn projected(&self) -> (StreamSchema, Vec<WindowSummary>) {
        let schema = StreamSchema {
            feature_names: self
                .features
                .iter()
                .map(|&f| self.schema.feature_names[f].clone())
                .collect(),
            feature_ranges: self.features.iter().map(|&f| self.schema.feature_ranges[f]).collect(),
            class_ids: self.classes.clone(),
            class_labels: self
                .classes
                .iter()
                .map(|&c| {
                    let pos = self
                        .schema
                        .class_position(c)
                        .expect("selected classes come from the schema");
                    self.schema.class_labels[pos].clone()
                })
                .collect(),
        };
        let summaries = self
            .summaries
            .iter()
            .map(|s| {
                let mut s = s.clone();
                for (i, fs) in s.per_feature.iter_mut().enumerate() {
                    fs.feature = i;
                }
                s
            })
            .collect();
        (schema, summaries)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftDoc {
    pub format_version: u32,
    pub input_hash: String,
    pub config: DetectorConfig,
    pub drift_points: Vec<u64>,
    /// `(sample index, window length after processing it)` for every sample.
    pub profile: Vec<(u64, usize)>,
    pub evidence: Vec<DriftEvidence>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisDoc {
    pub format_version: u32,
    pub input_hash: String,
    pub config: LocalizeConfig,
    /// Feature scores over disjoint windows of `config.initial_window`.
    pub features: Vec<FeatureReport>,
    pub alignments: Vec<AlignmentResult>,
    pub continuous_regions: Vec<ContinuousRegion>,
    pub continuous_rule: String,
}

/// Metadata written next to a generated stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSidecar {
    pub format_version: u32,
    pub input_hash: String,
    pub config: GeneratorConfig,
    pub rng: String,
    pub true_drift_points: Vec<u64>,
    pub boundary_rule: String,
}

/// Pretty JSON with a trailing newline.
pub fn to_json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("documents serialize infallibly");
    out.push(b'\n');
    out
}

/// Lowercase hex SHA-256.
pub fn sha256_hex(parts: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    hex::encode(h.finalize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use pht_core::{summarize_stream, GeneratorConfig, Sine1Config};

    #[test]
    fn summaries_round_trip_through_json() {
        let config = GeneratorConfig::Sine1(Sine1Config {
            n_samples: 600,
            ..Sine1Config::default()
        });
        let data = config.generate().unwrap();
        let window = WindowSpec::disjoint(200).unwrap();
        let doc = SummariesDoc {
            format_version: FORMAT_VERSION,
            input_hash: "x".into(),
            schema: data.schema.clone(),
            window,
            bins: 8,
            features: vec![0, 1],
            classes: vec![0, 1],
            brush: None,
            summaries: summarize_stream(&data.samples, &window, &data.schema, 8),
        };
        let bytes = to_json_bytes(&doc);
        let back: SummariesDoc = serde_json::from_slice(&bytes).unwrap();
        assert_eq!(back, doc);
        assert_eq!(to_json_bytes(&back), bytes);
    }

    #[test]
    fn hash_separates_parts() {
        assert_ne!(sha256_hex(&[b"ab", b"c"]), sha256_hex(&[b"a", b"bc"]));
        assert_eq!(sha256_hex(&[b"a"]).len(), 64);
    }
}
