//! Knee points and per-cluster resolution ladders.

use serde::{Deserialize, Serialize};

use super::DecisionConfig;
use crate::clustering::ClusterModelSet;
use crate::error::{Error, Result};
use crate::rd_model::{CubicRD, ResolutionTier};
use crate::roots;

/// PSNR differences below this count as ties between tiers (dB).
const TIER_TIE_DB: f64 = 1e-9;

/// Bitrate where two R-D curves meet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Intersection {
    pub bitrate: f64,
    /// The curves touch without crossing (even-multiplicity root), so the
    /// better tier does not change here.
    pub touching: bool,
}

/// Bitrates in `range` where `a` and `b` predict the same PSNR, ascending.
///
/// Returns [`Error::IdenticalCurves`] when the two cubics have identical
/// coefficients, since then every bitrate qualifies.
pub fn curve_intersections(
    a: &CubicRD,
    b: &CubicRD,
    range: (f64, f64),
) -> Result<Vec<Intersection>> {
    let (lo, hi) = range;
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo < hi) {
        return Err(Error::input(format!("range [{lo}, {hi}] must satisfy 0 < min < max")));
    }
    let (ca, cb) = (a.coeffs(), b.coeffs());
    if ca == cb {
        return Err(Error::IdenticalCurves);
    }
    let diff: Vec<f64> = ca.iter().zip(cb).map(|(x, y)| x - y).collect();
    Ok(roots::real_roots_in(&diff, lo, hi)
        .into_iter()
        .map(|r| Intersection { bitrate: r.x, touching: r.touching })
        .collect())
}

/// Piecewise map from bitrate to the tier with the highest predicted PSNR.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolutionLadder {
    pub cluster: usize,
    pub range: (f64, f64),
    /// Strictly increasing, strictly inside `range`.
    pub breakpoints: Vec<f64>,
    /// One tier per segment; `tiers.len() == breakpoints.len() + 1`.
    pub tiers: Vec<ResolutionTier>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderSegment {
    pub lo: f64,
    pub hi: f64,
    pub tier: ResolutionTier,
}

impl ResolutionLadder {
    pub fn segments(&self) -> Vec<LadderSegment> {
        let mut edges = Vec::with_capacity(self.breakpoints.len() + 2);
        edges.push(self.range.0);
        edges.extend_from_slice(&self.breakpoints);
        edges.push(self.range.1);
        edges
            .windows(2)
            .zip(&self.tiers)
            .map(|(w, &tier)| LadderSegment { lo: w[0], hi: w[1], tier })
            .collect()
    }

    /// Tier for a bitrate already inside `range`. A bitrate equal to a
    /// breakpoint belongs to the segment below it.
    pub fn tier_at(&self, r: f64) -> ResolutionTier {
        let idx = self.breakpoints.partition_point(|&b| b < r);
        self.tiers[idx]
    }
}

/// Builds the resolution ladder of one cluster over `cfg.operating_range`.
pub fn build_ladder(
    model: &ClusterModelSet,
    cluster: usize,
    cfg: &DecisionConfig,
) -> Result<ResolutionLadder> {
    cfg.validate()?;
    let curves = model.cluster(cluster)?;
    let (lo, hi) = cfg.operating_range;

    let mut cuts = Vec::new();
    for (i, a) in curves.iter().enumerate() {
        for b in &curves[i + 1..] {
            match curve_intersections(&a.cubic, &b.cubic, (lo, hi)) {
                Ok(points) => cuts.extend(points.into_iter().map(|p| p.bitrate)),
                Err(Error::IdenticalCurves) => {}
                Err(e) => return Err(e),
            }
        }
    }
    cuts.retain(|&r| r > lo + cfg.tolerance && r < hi - cfg.tolerance);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|b, a| *b - *a <= cfg.tolerance);

    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(lo);
    edges.extend_from_slice(&cuts);
    edges.push(hi);

    // Touching intersections yield identical neighbours and disappear here.
    let mut breakpoints = Vec::new();
    let mut tiers: Vec<ResolutionTier> = Vec::new();
    for (i, w) in edges.windows(2).enumerate() {
        let tier = best_tier(model, cluster, 0.5 * (w[0] + w[1]))?;
        match tiers.last() {
            Some(&last) if last == tier => {}
            _ => {
                if i > 0 {
                    breakpoints.push(w[0]);
                }
                tiers.push(tier);
            }
        }
    }

    Ok(ResolutionLadder { cluster, range: (lo, hi), breakpoints, tiers })
}

/// Tier with the highest predicted PSNR at `r`; near-ties go to the higher tier.
pub fn best_tier(model: &ClusterModelSet, cluster: usize, r: f64) -> Result<ResolutionTier> {
    let curves = model.cluster(cluster)?;
    let best = curves.iter().map(|c| c.cubic.value(r)).fold(f64::NEG_INFINITY, f64::max);
    let tier = curves
        .iter()
        .rev()
        .find(|c| c.cubic.value(r) >= best - TIER_TIE_DB)
        .map(|c| c.tier)
        .expect("cluster has at least one tier");
    Ok(tier)
}

/// Ladder lookup for a target bitrate, clamped into the ladder range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TierChoice {
    pub tier: ResolutionTier,
    /// The target fell outside the operating range and was clamped for the lookup.
    pub clamped: bool,
}

pub fn recommend_resolution(ladder: &ResolutionLadder, target: f64) -> TierChoice {
    let (lo, hi) = ladder.range;
    let r = target.clamp(lo, hi);
    TierChoice { tier: ladder.tier_at(r), clamped: r != target }
}
