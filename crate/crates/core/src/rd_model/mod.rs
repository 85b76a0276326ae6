//! Polynomial R-D curves: quality (PSNR, dB) as a function of bitrate (Mbps).
//!
//! A [`CubicRD`] is `Q(R) = c0 + c1·R + c2·R² + c3·R³`, fitted to one cluster
//! centroid at one resolution tier. Evaluation is deliberately unclamped; the
//! `valid_range` only records where the fit was trained so that callers can
//! flag extrapolation.

mod fit;
mod tier;

pub use fit::{compare_fits, fit_log, fit_polynomial, FitFamily, FitReport, LogFit};
pub use tier::ResolutionTier;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly;

/// Cubic quality-vs-bitrate model for one cluster × resolution tier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCubic")]
pub struct CubicRD {
    coeffs: [f64; 4],
    valid_range: (f64, f64),
}

#[derive(Deserialize)]
struct RawCubic {
    coeffs: [f64; 4],
    valid_range: (f64, f64),
}

impl TryFrom<RawCubic> for CubicRD {
    type Error = Error;

    fn try_from(raw: RawCubic) -> Result<Self> {
        Self::new(raw.coeffs, raw.valid_range)
    }
}

impl CubicRD {
    /// `coeffs` are `[c0, c1, c2, c3]`, lowest order first.
    pub fn new(coeffs: [f64; 4], valid_range: (f64, f64)) -> Result<Self> {
        if let Some(c) = coeffs.iter().find(|c| !c.is_finite()) {
            return Err(Error::input(format!("non-finite coefficient {c}")));
        }
        let (lo, hi) = valid_range;
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo < hi) {
            return Err(Error::input(format!(
                "valid range [{lo}, {hi}] must satisfy 0 < r_min < r_max"
            )));
        }
        Ok(Self { coeffs, valid_range })
    }

    pub fn coeffs(&self) -> [f64; 4] {
        self.coeffs
    }

    pub fn valid_range(&self) -> (f64, f64) {
        self.valid_range
    }

    /// Predicted PSNR at bitrate `r`.
    pub fn eval(&self, r: f64) -> Result<f64> {
        check_bitrate(r)?;
        Ok(self.value(r))
    }

    /// dQ/dR at bitrate `r`, in dB per Mbps.
    pub fn eval_derivative(&self, r: f64) -> Result<f64> {
        check_bitrate(r)?;
        Ok(self.slope(r))
    }

    /// Unchecked evaluation, for callers that already validated `r`.
    #[inline]
    pub fn value(&self, r: f64) -> f64 {
        poly::eval(&self.coeffs, r)
    }

    #[inline]
    pub fn slope(&self, r: f64) -> f64 {
        poly::eval_derivative(&self.coeffs, r)
    }

    /// True when `r` lies outside the bitrate span the model was fitted on.
    pub fn is_extrapolated(&self, r: f64) -> bool {
        r < self.valid_range.0 || r > self.valid_range.1
    }

    /// Same curve shifted by `offset` dB.
    pub fn shifted(&self, offset: f64) -> Self {
        let mut coeffs = self.coeffs;
        coeffs[0] += offset;
        Self { coeffs, ..*self }
    }
}

fn check_bitrate(r: f64) -> Result<()> {
    if !r.is_finite() {
        return Err(Error::input(format!("bitrate must be finite, got {r}")));
    }
    if r < 0.0 {
        return Err(Error::input(format!("bitrate must be non-negative, got {r}")));
    }
    Ok(())
}
