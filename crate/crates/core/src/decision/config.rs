use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DecisionConfig {
    /// PSNR at or above which coding is treated as visually lossless (dB).
    pub vl_psnr: f64,
    /// Slope below which the R-D curve counts as flat (dB per Mbps).
    pub nzs_slope: f64,
    /// Bitrate span (Mbps) for ladders and near-zero-slope intervals.
    pub operating_range: (f64, f64),
    /// Bitrate span searched for visually-lossless thresholds. Wider than
    /// the operating range, so thresholds may be extrapolated.
    pub vl_search_range: (f64, f64),
    /// Root-finding tolerance (Mbps).
    pub tolerance: f64,
}

impl Default for DecisionConfig {
    fn default() -> Self {
        Self {
            vl_psnr: 40.0,
            nzs_slope: 0.1,
            operating_range: (0.2, 6.0),
            vl_search_range: (0.2, 12.0),
            tolerance: 1e-9,
        }
    }
}

impl DecisionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.vl_psnr.is_finite() && self.vl_psnr > 0.0) {
            return Err(Error::input(format!("vl_psnr must be > 0, got {}", self.vl_psnr)));
        }
        if !(self.nzs_slope.is_finite() && self.nzs_slope > 0.0) {
            return Err(Error::input(format!("nzs_slope must be > 0, got {}", self.nzs_slope)));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::input("tolerance must be > 0"));
        }
        for (name, (lo, hi)) in [
            ("operating_range", self.operating_range),
            ("vl_search_range", self.vl_search_range),
        ] {
            if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo < hi) {
                return Err(Error::input(format!(
                    "{name} [{lo}, {hi}] must satisfy 0 < min < max"
                )));
            }
        }
        Ok(())
    }
}
