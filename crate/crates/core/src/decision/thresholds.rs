//! Visually-lossless thresholds and near-zero-slope intervals.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::DecisionConfig;
use crate::rd_model::{CubicRD, ResolutionTier};
use crate::roots;

/// Smallest bitrate at which a curve reaches the visually-lossless PSNR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VlThreshold {
    pub bitrate: f64,
    /// Lies outside the bitrate span the curve was fitted on.
    pub extrapolated: bool,
    /// The curve already exceeds the target at the bottom of the search
    /// range, so the threshold was pinned to it.
    pub clamped: bool,
}

/// `None` when the curve never reaches `cfg.vl_psnr` on an increasing branch
/// inside `cfg.vl_search_range`.
pub fn vl_threshold(model: &CubicRD, cfg: &DecisionConfig) -> Option<VlThreshold> {
    let (lo, hi) = cfg.vl_search_range;
    if model.value(lo) >= cfg.vl_psnr {
        return Some(VlThreshold {
            bitrate: lo,
            extrapolated: model.is_extrapolated(lo),
            clamped: true,
        });
    }
    let mut shifted = model.coeffs();
    shifted[0] -= cfg.vl_psnr;
    roots::real_roots_in(&shifted, lo, hi)
        .into_iter()
        .map(|r| r.x)
        .find(|&r| model.slope(r) > 0.0)
        .map(|bitrate| VlThreshold {
            bitrate,
            extrapolated: model.is_extrapolated(bitrate),
            clamped: false,
        })
}

/// Bitrate interval where the curve's slope stays below `cfg.nzs_slope`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NzsInterval {
    pub lo: f64,
    pub hi: f64,
    pub lo_clamped: bool,
    pub hi_clamped: bool,
}

impl NzsInterval {
    pub fn contains(&self, r: f64) -> bool {
        self.lo <= r && r <= self.hi
    }
}

/// Solves `Q'(R) = nzs_slope`. Present only when there are two distinct
/// roots with the slope below the threshold between them, and the interval
/// survives clamping to `cfg.operating_range`.
pub fn nzs_interval(model: &CubicRD, cfg: &DecisionConfig) -> Option<NzsInterval> {
    let [_, c1, c2, c3] = model.coeffs();
    let slope_eq = [c1 - cfg.nzs_slope, 2.0 * c2, 3.0 * c3];
    let crossings: Vec<f64> = roots::real_roots(&slope_eq)
        .into_iter()
        .filter(|r| !r.touching)
        .map(|r| r.x)
        .collect();
    let [r1, r2] = crossings[..] else { return None };
    if model.slope(0.5 * (r1 + r2)) >= cfg.nzs_slope {
        return None;
    }
    let (min, max) = cfg.operating_range;
    let lo = r1.max(min);
    let hi = r2.min(max);
    (lo < hi).then_some(NzsInterval { lo, hi, lo_clamped: r1 < min, hi_clamped: r2 > max })
}

/// Per (cluster, tier) results; a missing key means "does not exist".
pub type VlTable = BTreeMap<(usize, ResolutionTier), VlThreshold>;
pub type NzsTable = BTreeMap<(usize, ResolutionTier), NzsInterval>;

/// Caps `target` at the visually-lossless threshold when it exceeds it.
pub fn recommend_bitrate_vl(
    cluster: usize,
    tier: ResolutionTier,
    target: f64,
    thresholds: &VlTable,
) -> f64 {
    match thresholds.get(&(cluster, tier)) {
        Some(t) if target > t.bitrate => t.bitrate,
        _ => target,
    }
}

/// Drops `target` to the lower end of the near-zero-slope interval when it
/// lies inside it (both endpoints inclusive).
pub fn recommend_bitrate_nzs(
    cluster: usize,
    tier: ResolutionTier,
    target: f64,
    intervals: &NzsTable,
) -> f64 {
    match intervals.get(&(cluster, tier)) {
        Some(iv) if iv.contains(target) => iv.lo,
        _ => target,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cubic(c: [f64; 4]) -> CubicRD {
        CubicRD::new(c, (0.2, 6.0)).unwrap()
    }

    #[test]
    fn already_lossless_clamps_to_range_min() {
        let m = cubic([45.0, 1e-6, 1e-7, 1e-8]);
        let t = vl_threshold(&m, &DecisionConfig::default()).unwrap();
        assert_eq!(t.bitrate, 0.2);
        assert!(t.clamped);
    }

    #[test]
    fn never_reaches_target() {
        let m = cubic([20.0, 1.0, 0.0, 0.0]);
        assert!(vl_threshold(&m, &DecisionConfig::default()).is_none());
    }

    #[test]
    fn decreasing_branch_is_ignored() {
        // Starts below 40, rises to a peak under 40 and falls: no threshold.
        let m = cubic([30.0, 6.0, -1.0, 0.0]);
        assert!(vl_threshold(&m, &DecisionConfig::default()).is_none());
        // Peaks above 40 at R = 3: the rising crossing is the threshold.
        let m = cubic([31.0 + 1.0, 6.0, -1.0, 0.0]);
        let t = vl_threshold(&m, &DecisionConfig::default()).unwrap();
        assert!(m.slope(t.bitrate) > 0.0);
        assert!((m.value(t.bitrate) - 40.0).abs() < 1e-9);
        assert!(t.bitrate < 3.0);
    }

    #[test]
    fn linear_curve_has_no_interval() {
        let m = cubic([30.0, 0.05, 0.0, 0.0]);
        assert!(nzs_interval(&m, &DecisionConfig::default()).is_none());
    }

    #[test]
    fn interval_is_clamped() {
        // Q' = 3(R-1)(R-7) + 0.1 is below 0.1 on (1, 7).
        let m = cubic([30.0, 21.0 + 0.1, -12.0, 1.0]);
        let iv = nzs_interval(&m, &DecisionConfig::default()).unwrap();
        assert!((iv.lo - 1.0).abs() < 1e-9 && !iv.lo_clamped);
        assert_eq!(iv.hi, 6.0);
        assert!(iv.hi_clamped);
    }

    #[test]
    fn negative_leading_slope_term_is_absent() {
        // Q' = -(R-1)(R-3) + 0.1 is below 0.1 outside (1, 3), not between.
        let m = cubic([30.0, -3.0 + 0.1, 2.0, -1.0 / 3.0]);
        assert!(nzs_interval(&m, &DecisionConfig::default()).is_none());
    }

    #[test]
    fn bitrate_rules() {
        let key = (1, ResolutionTier::P1080);
        let vl: VlTable = [(key, VlThreshold { bitrate: 2.0, extrapolated: false, clamped: false })]
            .into_iter()
            .collect();
        assert_eq!(recommend_bitrate_vl(1, ResolutionTier::P1080, 3.0, &vl), 2.0);
        assert_eq!(recommend_bitrate_vl(1, ResolutionTier::P1080, 1.0, &vl), 1.0);
        assert_eq!(recommend_bitrate_vl(2, ResolutionTier::P1080, 3.0, &vl), 3.0);

        let nzs: NzsTable = [(key, NzsInterval { lo: 3.0, hi: 4.0, lo_clamped: false, hi_clamped: false })]
            .into_iter()
            .collect();
        assert_eq!(recommend_bitrate_nzs(1, ResolutionTier::P1080, 4.0, &nzs), 3.0);
        assert_eq!(recommend_bitrate_nzs(1, ResolutionTier::P1080, 3.0, &nzs), 3.0);
        assert_eq!(recommend_bitrate_nzs(1, ResolutionTier::P1080, 4.5, &nzs), 4.5);
        assert_eq!(recommend_bitrate_nzs(1, ResolutionTier::P720, 3.5, &nzs), 3.5);
    }
}
