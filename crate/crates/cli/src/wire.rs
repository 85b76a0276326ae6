//! Advisory request and response documents.
//!
//! The HTTP service accepts [`AdvisoryRequest`] and answers with
//! [`AdvisoryResponse`]; `recommend --format json` prints the same response
//! shape.
//!
//! ```json
//! {
//!   "observations": [{"gop_id": "g1", "tier": "1080p", "bitrate": 3.0, "psnr": 50.2}],
//!   "target_bitrate": 3.0,
//!   "modes": ["trans_size", "vl", "nzs"]
//! }
//! ```

use rdladder::decision::{savings_report, Mode, SavingsReport, VideoBitrates};
use rdladder::ingest::{MeasurementSet, RDSample};
use rdladder::{Advisor, Error, Modes, Recommendation, ResolutionTier};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Observation {
    pub gop_id: String,
    pub tier: ResolutionTier,
    /// Mbps.
    pub bitrate: f64,
    /// dB.
    pub psnr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdvisoryRequest {
    /// Measured points; a GOP is evaluated at the highest tier it lists.
    pub observations: Vec<Observation>,
    pub target_bitrate: f64,
    pub modes: Vec<Mode>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub kind: String,
    pub message: String,
}

impl ErrorBody {
    pub fn new(kind: &str, message: impl Into<String>) -> Self {
        Self { kind: kind.to_string(), message: message.into() }
    }
}

impl From<&Error> for ErrorBody {
    fn from(e: &Error) -> Self {
        Self::new(error_kind(e), e.to_string())
    }
}

/// Top-level error document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorResponse {
    pub error: ErrorBody,
}

/// Stable machine-readable name for an error.
pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Input(_) => "invalid_input",
        Error::Degenerate(_) => "degenerate",
        Error::Conditioning { .. } => "ill_conditioned",
        Error::Domain(_) => "domain",
        Error::InsufficientData { .. } => "insufficient_data",
        Error::Coverage { .. } => "coverage",
        Error::Ambiguous { .. } => "ambiguous",
        Error::Model(_) => "invalid_model",
        Error::MissingTier(_) => "missing_tier",
        Error::IdenticalCurves => "identical_curves",
        Error::Row { .. } => "invalid_row",
        Error::Parse { .. } => "parse",
        Error::SchemaVersion { .. } => "schema_version",
    }
}

/// One GOP's outcome: a recommendation, or the reason there is none.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GopResult {
    Ok(Recommendation),
    Err { gop_id: String, error: ErrorBody },
}

impl GopResult {
    pub fn gop_id(&self) -> &str {
        match self {
            GopResult::Ok(r) => &r.gop_id,
            GopResult::Err { gop_id, .. } => gop_id,
        }
    }

    pub fn recommendation(&self) -> Option<&Recommendation> {
        match self {
            GopResult::Ok(r) => Some(r),
            GopResult::Err { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdvisoryResponse {
    /// In first-appearance order of the GOPs.
    pub recommendations: Vec<GopResult>,
    /// Over the GOPs that received a recommendation; absent when none did.
    pub savings: Option<SavingsReport>,
}

/// Validates a request and turns it into measurements, modes and target.
pub fn validate(req: AdvisoryRequest) -> Result<(MeasurementSet, Modes, f64), ErrorBody> {
    if req.observations.is_empty() {
        return Err(ErrorBody::new("invalid_input", "request has no observations"));
    }
    if !(req.target_bitrate.is_finite() && req.target_bitrate > 0.0) {
        return Err(ErrorBody::new(
            "invalid_input",
            format!("target_bitrate must be > 0, got {}", req.target_bitrate),
        ));
    }
    let modes: Modes = req.modes.into_iter().collect();
    if modes.is_empty() {
        return Err(ErrorBody::new("invalid_input", "at least one mode must be enabled"));
    }
    let samples = req
        .observations
        .into_iter()
        .enumerate()
        .map(|(i, o)| {
            RDSample::new(o.gop_id, o.tier, o.bitrate, o.psnr).map_err(|e| {
                ErrorBody::new(error_kind(&e), format!("observations[{i}]: {e}"))
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let set = MeasurementSet::from_samples(samples).map_err(|e| ErrorBody::from(&e))?;
    Ok((set, modes, req.target_bitrate))
}

/// Recommends for every GOP in `set`; failures are reported per GOP.
pub fn advise(advisor: &Advisor, set: &MeasurementSet, modes: Modes, target: f64) -> AdvisoryResponse {
    let recommendations: Vec<GopResult> = set
        .gop_observations()
        .iter()
        .map(|gop| match advisor.recommend(gop, modes, target) {
            Ok(r) => GopResult::Ok(r),
            Err(e) => GopResult::Err { gop_id: gop.gop_id.clone(), error: ErrorBody::from(&e) },
        })
        .collect();
    let (targets, proposed): (Vec<f64>, Vec<f64>) = recommendations
        .iter()
        .filter_map(GopResult::recommendation)
        .map(|r| (r.target_bitrate, r.proposed_bitrate))
        .unzip();
    let video = set.source.name.clone().unwrap_or_else(|| "input".to_string());
    let savings = (!targets.is_empty())
        .then(|| savings_report(&[VideoBitrates { video, targets, proposed }]).ok())
        .flatten();
    AdvisoryResponse { recommendations, savings }
}
