//! JSON persistence for [`ClusterModelSet`].
//!
//! Floats are written in their shortest exact form, so loading a saved model
//! gives back an equal model and saving it again gives identical bytes.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::clustering::{BitrateGrid, ClusterModelSet, TierCurve};
use crate::error::{Error, Result};
use crate::rd_model::{CubicRD, ResolutionTier};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    schema_version: u32,
    k: usize,
    grid: Vec<f64>,
    tiers: Vec<ResolutionTier>,
    clusters: Vec<ClusterEntry>,
    seed: u64,
    provenance: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClusterEntry {
    index: usize,
    tiers: Vec<CurveEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CurveEntry {
    tier: ResolutionTier,
    /// `[c0, c1, c2, c3]`.
    coeffs: [f64; 4],
    valid_range: [f64; 2],
    centroid: Vec<f64>,
}

/// Serializes a model as pretty-printed JSON.
pub fn save_model(model: &ClusterModelSet) -> String {
    let file = ModelFile {
        schema_version: SCHEMA_VERSION,
        k: model.k(),
        grid: model.grid().points().to_vec(),
        tiers: model.tiers().to_vec(),
        clusters: model
            .cluster_indices()
            .map(|index| ClusterEntry {
                index,
                tiers: model
                    .cluster(index)
                    .expect("index from cluster_indices")
                    .iter()
                    .map(|c| {
                        let (lo, hi) = c.cubic.valid_range();
                        CurveEntry {
                            tier: c.tier,
                            coeffs: c.cubic.coeffs(),
                            valid_range: [lo, hi],
                            centroid: c.centroid.clone(),
                        }
                    })
                    .collect(),
            })
            .collect(),
        seed: model.seed(),
        provenance: model.provenance().to_string(),
    };
    let mut out = serde_json::to_string_pretty(&file).expect("model file is always serializable");
    out.push('\n');
    out
}

fn parse_error(e: serde_json::Error) -> Error {
    Error::Parse {
        location: format!("line {} column {}", e.line(), e.column()),
        message: e.to_string(),
    }
}

/// Parses and validates a model file written by [`save_model`].
pub fn load_model(text: &str) -> Result<ClusterModelSet> {
    let value: Value = serde_json::from_str(text).map_err(parse_error)?;
    match value.get("schema_version") {
        None => {
            return Err(Error::Parse {
                location: "schema_version".into(),
                message: "missing schema_version".into(),
            })
        }
        Some(Value::Number(n)) if n.as_u64() == Some(SCHEMA_VERSION as u64) => {}
        Some(other) => {
            let found = match other {
                Value::String(s) => s.clone(),
                v => v.to_string(),
            };
            return Err(Error::SchemaVersion { found, expected: SCHEMA_VERSION });
        }
    }
    // Re-parse from the text so that field errors keep their line numbers.
    let file: ModelFile = serde_json::from_str(text).map_err(parse_error)?;

    if file.clusters.len() != file.k {
        return Err(Error::Model(format!(
            "k = {} but {} clusters listed",
            file.k,
            file.clusters.len()
        )));
    }
    let grid = BitrateGrid::new(file.grid)?;
    let mut clusters = Vec::with_capacity(file.k);
    for (i, entry) in file.clusters.into_iter().enumerate() {
        if entry.index != i + 1 {
            return Err(Error::Model(format!(
                "cluster entries must be numbered 1..={} in order, found {} at position {}",
                file.k,
                entry.index,
                i + 1
            )));
        }
        let curves = entry
            .tiers
            .into_iter()
            .map(|c| {
                let cubic = CubicRD::new(c.coeffs, (c.valid_range[0], c.valid_range[1]))
                    .map_err(|e| Error::Model(format!("cluster {} {}: {e}", entry.index, c.tier)))?;
                Ok(TierCurve { tier: c.tier, cubic, centroid: c.centroid })
            })
            .collect::<Result<Vec<_>>>()?;
        clusters.push(curves);
    }
    ClusterModelSet::new(grid, file.tiers, clusters, file.seed, file.provenance)
}

/// 64-bit FNV-1a over the canonical serialization.
pub fn model_checksum(model: &ClusterModelSet) -> u64 {
    save_model(model)
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::builtin_paper_model;

    #[test]
    fn round_trip_is_byte_identical() {
        let text = save_model(&builtin_paper_model());
        let loaded = load_model(&text).unwrap();
        assert_eq!(save_model(&loaded), text);
        assert_eq!(loaded, builtin_paper_model());
        assert_eq!(loaded.cubic(6, ResolutionTier::P1080).unwrap().coeffs()[0], 33.335);
    }

    #[test]
    fn unsupported_schema_version() {
        let text = save_model(&builtin_paper_model());
        let v99 = text.replacen("\"schema_version\": 1", "\"schema_version\": \"99\"", 1);
        match load_model(&v99).unwrap_err() {
            Error::SchemaVersion { found, expected } => {
                assert_eq!(found, "99");
                assert_eq!(expected, 1);
            }
            other => panic!("unexpected {other:?}"),
        }
        let n99 = text.replacen("\"schema_version\": 1", "\"schema_version\": 99", 1);
        assert!(matches!(load_model(&n99), Err(Error::SchemaVersion { .. })));
    }

    #[test]
    fn malformed_json_reports_position() {
        match load_model("{\n  \"schema_version\": 1,\n  oops\n}").unwrap_err() {
            Error::Parse { location, .. } => assert!(location.starts_with("line 3"), "{location}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn semantic_errors() {
        let text = save_model(&builtin_paper_model());
        let wrong_k = text.replacen("\"k\": 6", "\"k\": 5", 1);
        assert!(matches!(load_model(&wrong_k), Err(Error::Model(_))));
        let value: Value = serde_json::from_str(&text).unwrap();
        let mut bad = value.clone();
        bad["clusters"][0]["tiers"][0]["valid_range"] = serde_json::json!([3.0, 1.0]);
        assert!(load_model(&bad.to_string()).is_err());
        let mut dropped = value.clone();
        dropped["clusters"][2]["tiers"].as_array_mut().unwrap().pop();
        assert!(matches!(load_model(&dropped.to_string()), Err(Error::Model(_))));
        let mut extra = value;
        extra["surprise"] = Value::Bool(true);
        assert!(matches!(load_model(&extra.to_string()), Err(Error::Parse { .. })));
    }
}
