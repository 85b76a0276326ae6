use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::RDSample;
use crate::rd_model::ResolutionTier;

/// Bitrates (Mbps) at which every R-D curve is sampled before clustering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct BitrateGrid(Vec<f64>);

impl BitrateGrid {
    pub const DEFAULT_MIN: f64 = 0.2;
    pub const DEFAULT_MAX: f64 = 6.0;
    pub const DEFAULT_LEN: usize = 10;

    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 4 {
            return Err(Error::input(format!(
                "bitrate grid needs at least 4 points, got {}",
                points.len()
            )));
        }
        if points.iter().any(|r| !r.is_finite() || *r <= 0.0) {
            return Err(Error::input("bitrate grid values must be finite and > 0"));
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::input("bitrate grid must be strictly increasing"));
        }
        Ok(Self(points))
    }

    /// `n` evenly spaced bitrates from `lo` to `hi` inclusive.
    pub fn linspace(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::input("bitrate grid needs at least 4 points"));
        }
        let step = (hi - lo) / (n - 1) as f64;
        let mut points: Vec<f64> = (0..n).map(|i| lo + step * i as f64).collect();
        points[n - 1] = hi;
        Self::new(points)
    }

    pub fn points(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.0[0]
    }

    pub fn max(&self) -> f64 {
        self.0[self.0.len() - 1]
    }
}

impl Default for BitrateGrid {
    fn default() -> Self {
        Self::linspace(Self::DEFAULT_MIN, Self::DEFAULT_MAX, Self::DEFAULT_LEN)
            .expect("default grid is valid")
    }
}

impl TryFrom<Vec<f64>> for BitrateGrid {
    type Error = Error;

    fn try_from(points: Vec<f64>) -> Result<Self> {
        Self::new(points)
    }
}

impl From<BitrateGrid> for Vec<f64> {
    fn from(grid: BitrateGrid) -> Self {
        grid.0
    }
}

/// One GOP's PSNR values at the grid bitrates; the K-means feature vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RDVector {
    pub gop_id: String,
    pub tier: ResolutionTier,
    pub psnr: Vec<f64>,
}

impl RDVector {
    pub fn new(
        gop_id: impl Into<String>,
        tier: ResolutionTier,
        psnr: Vec<f64>,
        grid: &BitrateGrid,
    ) -> Result<Self> {
        let gop_id = gop_id.into();
        if psnr.len() != grid.len() {
            return Err(Error::input(format!(
                "gop {gop_id}: R-D vector has {} values but the grid has {}",
                psnr.len(),
                grid.len()
            )));
        }
        if let Some(q) = psnr.iter().find(|q| !(q.is_finite() && **q > 0.0 && **q <= 100.0)) {
            return Err(Error::input(format!("gop {gop_id}: PSNR {q} outside (0, 100] dB")));
        }
        Ok(Self { gop_id, tier, psnr })
    }

    pub fn mean_psnr(&self) -> f64 {
        self.psnr.iter().sum::<f64>() / self.psnr.len() as f64
    }
}

/// Grid points within this relative distance of a sample bitrate reuse it.
const SNAP: f64 = 1e-9;

/// Piecewise-linear interpolation of one GOP×tier's samples onto `grid`.
///
/// Samples must cover the whole grid; there is no extrapolation.
pub fn resample_to_grid(samples: &[RDSample], grid: &BitrateGrid) -> Result<RDVector> {
    let first = samples
        .first()
        .ok_or_else(|| Error::input("cannot resample an empty sample list"))?;
    let (gop, tier) = (first.gop_id.as_str(), first.tier);
    if samples.len() < 2 {
        return Err(Error::input(format!(
            "gop {gop} ({tier}): need at least 2 samples to interpolate, got 1"
        )));
    }
    if let Some(s) = samples.iter().find(|s| s.gop_id != gop || s.tier != tier) {
        return Err(Error::input(format!(
            "resampling mixes gop {gop} ({tier}) with gop {} ({})",
            s.gop_id, s.tier
        )));
    }

    let mut pts: Vec<(f64, f64)> = samples.iter().map(|s| (s.bitrate, s.psnr)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut deduped: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for p in pts {
        match deduped.last() {
            Some(&(r, q)) if r == p.0 => {
                if q != p.1 {
                    return Err(Error::Ambiguous {
                        gop: gop.to_string(),
                        bitrate: r,
                        first: q,
                        second: p.1,
                    });
                }
            }
            _ => deduped.push(p),
        }
    }
    if deduped.len() < 2 {
        return Err(Error::input(format!(
            "gop {gop} ({tier}): need at least 2 distinct bitrates to interpolate"
        )));
    }

    let lo = deduped[0].0;
    let hi = deduped[deduped.len() - 1].0;
    let mut psnr = Vec::with_capacity(grid.len());
    for &r in grid.points() {
        let tol = SNAP * r.abs().max(1.0);
        if r < lo - tol || r > hi + tol {
            return Err(Error::Coverage {
                gop: gop.to_string(),
                bitrate: r,
                lo,
                hi,
            });
        }
        let idx = deduped.partition_point(|p| p.0 < r - tol);
        let (r1, q1) = deduped[idx.min(deduped.len() - 1)];
        if (r1 - r).abs() <= tol {
            psnr.push(q1);
            continue;
        }
        let (r0, q0) = deduped[idx - 1];
        let t = (r - r0) / (r1 - r0);
        psnr.push(q0 + t * (q1 - q0));
    }
    RDVector::new(gop, tier, psnr, grid)
}
