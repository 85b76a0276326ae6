//! Measurement tables: `gop_id,resolution,bitrate_mbps,psnr_db`.
//!
//! UTF-8, comma-delimited, one header row, `#` comment lines ignored. Row
//! numbers in errors are 1-based physical line numbers.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::clustering::{resample_to_grid, BitrateGrid, RDVector};
use crate::decision::GopObservation;
use crate::error::{Error, Result};
use crate::rd_model::ResolutionTier;

pub const HEADER: [&str; 4] = ["gop_id", "resolution", "bitrate_mbps", "psnr_db"];

/// Measured PSNRs above this are treated as unit errors.
pub const MAX_PSNR_DB: f64 = 100.0;

/// One measured `(GOP, tier, bitrate, PSNR)` observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RDSample {
    pub gop_id: String,
    pub tier: ResolutionTier,
    pub bitrate: f64,
    pub psnr: f64,
}

impl RDSample {
    pub fn new(gop_id: impl Into<String>, tier: ResolutionTier, bitrate: f64, psnr: f64) -> Result<Self> {
        let gop_id = gop_id.into();
        if gop_id.is_empty() {
            return Err(Error::input("gop_id must not be empty"));
        }
        if !(bitrate.is_finite() && bitrate > 0.0) {
            return Err(Error::input(format!("bitrate_mbps must be finite and > 0, got {bitrate}")));
        }
        if !(psnr.is_finite() && psnr > 0.0 && psnr <= MAX_PSNR_DB) {
            return Err(Error::input(format!("psnr_db must be in (0, {MAX_PSNR_DB}], got {psnr}")));
        }
        Ok(Self { gop_id, tier, bitrate, psnr })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SourceInfo {
    pub name: Option<String>,
    /// Data rows read, including exact duplicates that were merged.
    pub rows: usize,
}

/// Samples grouped per (GOP, tier) in first-appearance order, each group
/// sorted by strictly increasing bitrate.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MeasurementSet {
    groups: IndexMap<(String, ResolutionTier), Vec<RDSample>>,
    pub source: SourceInfo,
}

impl MeasurementSet {
    /// Builds a set from already-validated samples. Errors name the 1-based
    /// position of the offending sample as the row.
    pub fn from_samples(samples: impl IntoIterator<Item = RDSample>) -> Result<Self> {
        let mut groups = Pending::new();
        let mut rows = 0;
        for (i, s) in samples.into_iter().enumerate() {
            rows += 1;
            groups.entry((s.gop_id.clone(), s.tier)).or_default().push((s, i as u64 + 1));
        }
        if rows == 0 {
            return Err(Error::input("no samples"));
        }
        Ok(Self { groups: group_samples(groups)?, source: SourceInfo { name: None, rows } })
    }

    pub fn groups(&self) -> impl Iterator<Item = (&str, ResolutionTier, &[RDSample])> {
        self.groups.iter().map(|((g, t), s)| (g.as_str(), *t, s.as_slice()))
    }

    pub fn group(&self, gop_id: &str, tier: ResolutionTier) -> Option<&[RDSample]> {
        self.groups.get(&(gop_id.to_string(), tier)).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.groups.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// GOP ids in first-appearance order.
    pub fn gop_ids(&self) -> Vec<&str> {
        let mut ids: IndexMap<&str, ()> = IndexMap::new();
        for (g, _) in self.groups.keys() {
            ids.insert(g.as_str(), ());
        }
        ids.into_keys().collect()
    }

    /// One observation per GOP at its native tier, taken to be the highest
    /// tier the GOP was measured at.
    pub fn gop_observations(&self) -> Vec<GopObservation> {
        let mut native: IndexMap<&str, ResolutionTier> = IndexMap::new();
        for (g, t) in self.groups.keys() {
            let e = native.entry(g.as_str()).or_insert(*t);
            *e = (*e).max(*t);
        }
        native
            .into_iter()
            .map(|(g, tier)| GopObservation {
                gop_id: g.to_string(),
                tier,
                points: self.groups[&(g.to_string(), tier)]
                    .iter()
                    .map(|s| (s.bitrate, s.psnr))
                    .collect(),
            })
            .collect()
    }

    /// Resamples every (GOP, tier) group onto `grid`, grouped by tier.
    pub fn rd_vectors(&self, grid: &BitrateGrid) -> Result<BTreeMap<ResolutionTier, Vec<RDVector>>> {
        let mut out: BTreeMap<ResolutionTier, Vec<RDVector>> = BTreeMap::new();
        for ((_, tier), samples) in &self.groups {
            out.entry(*tier).or_default().push(resample_to_grid(samples, grid)?);
        }
        Ok(out)
    }

    /// Canonical text form; parsing it reproduces this set.
    pub fn to_csv(&self) -> String {
        let mut out = HEADER.join(",");
        out.push('\n');
        for s in self.groups.values().flatten() {
            let _ = writeln!(out, "{},{},{},{}", s.gop_id, s.tier, s.bitrate, s.psnr);
        }
        out
    }
}

pub fn parse_measurements(text: &str) -> Result<MeasurementSet> {
    parse_measurements_named(text, None)
}

pub fn parse_measurements_named(text: &str, name: Option<&str>) -> Result<MeasurementSet> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let header = reader.headers().map_err(|e| Error::Parse {
        location: "header".into(),
        message: e.to_string(),
    })?;
    if header.is_empty() {
        return Err(Error::input("measurement file is empty"));
    }
    if header.iter().collect::<Vec<_>>() != HEADER {
        return Err(Error::Parse {
            location: "header".into(),
            message: format!("expected `{}`, got `{}`", HEADER.join(","), header.iter().collect::<Vec<_>>().join(",")),
        });
    }

    let mut groups = Pending::new();
    let mut rows = 0;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let row = e.position().map_or(0, |p| p.line());
            Error::Row { row, message: e.to_string() }
        })?;
        let row = record.position().map_or(0, |p| p.line());
        let row_err = |message: String| Error::Row { row, message };
        rows += 1;

        let gop = &record[0];
        let tier: ResolutionTier = record[1]
            .parse()
            .map_err(|_| row_err(format!("resolution: unknown value {:?}", &record[1])))?;
        let bitrate: f64 = record[2]
            .parse()
            .map_err(|_| row_err(format!("bitrate_mbps: not a number: {:?}", &record[2])))?;
        let psnr: f64 = record[3]
            .parse()
            .map_err(|_| row_err(format!("psnr_db: not a number: {:?}", &record[3])))?;
        let sample = RDSample::new(gop, tier, bitrate, psnr).map_err(|e| match e {
            Error::Input(m) => row_err(m),
            other => row_err(other.to_string()),
        })?;
        groups.entry((sample.gop_id.clone(), tier)).or_default().push((sample, row));
    }
    if rows == 0 {
        return Err(Error::input("measurement file has no data rows"));
    }

    Ok(MeasurementSet {
        groups: group_samples(groups)?,
        source: SourceInfo { name: name.map(str::to_string), rows },
    })
}

type Pending = IndexMap<(String, ResolutionTier), Vec<(RDSample, u64)>>;

/// Sorts each group by bitrate, merges exact duplicates and rejects
/// conflicting ones. The `u64` is the row reported in errors.
fn group_samples(groups: Pending) -> Result<IndexMap<(String, ResolutionTier), Vec<RDSample>>> {
    let mut out = IndexMap::with_capacity(groups.len());
    for (key, mut samples) in groups {
        samples.sort_by(|a, b| a.0.bitrate.total_cmp(&b.0.bitrate));
        let mut kept: Vec<(RDSample, u64)> = Vec::with_capacity(samples.len());
        for (s, row) in samples {
            match kept.last() {
                Some((prev, prev_row)) if prev.bitrate == s.bitrate => {
                    if prev.psnr != s.psnr {
                        return Err(Error::Row {
                            row,
                            message: format!(
                                "gop {} {} at {} Mbps: PSNR {} conflicts with {} on row {prev_row}",
                                s.gop_id, s.tier, s.bitrate, s.psnr, prev.psnr
                            ),
                        });
                    }
                }
                _ => kept.push((s, row)),
            }
        }
        out.insert(key, kept.into_iter().map(|(s, _)| s).collect());
    }
    Ok(out)
}
