//! The published six-cluster model.

use crate::clustering::{BitrateGrid, ClusterModelSet, TierCurve};
use crate::rd_model::{CubicRD, ResolutionTier};

pub const PAPER_PROVENANCE: &str = "published-six-cluster-model";
pub const PAPER_SEED: u64 = 42;
pub const PAPER_VALID_RANGE: (f64, f64) = (0.2, 6.0);

/// `[c1, c2, c3, c0]` per cluster, tiers 360p/540p/720p/1080p, as printed.
const COEFFS: [[[f64; 4]; 4]; 6] = [
    [
        [6.307, -1.554, 0.129, 16.857],
        [5.932, -1.571, 0.133, 17.382],
        [6.274, -1.499, 0.123, 17.034],
        [7.627, -1.643, 0.133, 15.749],
    ],
    [
        [7.171, -1.880, 0.158, 20.253],
        [7.419, -1.840, 0.152, 20.245],
        [7.799, -1.857, 0.152, 20.290],
        [9.071, -1.958, 0.156, 18.596],
    ],
    [
        [10.014, -2.867, 0.252, 22.660],
        [10.715, -2.904, 0.250, 22.494],
        [11.467, -2.987, 0.254, 22.166],
        [12.650, -2.915, 0.236, 20.103],
    ],
    [
        [13.527, -3.578, 0.297, 22.210],
        [12.318, -2.880, 0.223, 22.658],
        [12.845, -2.985, 0.231, 22.410],
        [14.786, -3.571, 0.294, 22.564],
    ],
    [
        [7.619, -1.888, 0.161, 29.598],
        [9.405, -2.604, 0.234, 29.483],
        [10.075, -2.700, 0.239, 28.743],
        [15.563, -4.010, 0.341, 27.468],
    ],
    [
        [14.048, -3.814, 0.327, 30.278],
        [14.374, -3.801, 0.323, 30.229],
        [13.695, -3.644, 0.311, 30.558],
        [17.415, -4.521, 0.383, 33.335],
    ],
];

/// The published cubic coefficients as a [`ClusterModelSet`]. Centroids are
/// the cubics evaluated on the default grid since the raw centroids were
/// not published.
pub fn builtin_paper_model() -> ClusterModelSet {
    let grid = BitrateGrid::default();
    let clusters = COEFFS
        .iter()
        .map(|tiers| {
            ResolutionTier::STANDARD
                .iter()
                .zip(tiers)
                .map(|(&tier, &[c1, c2, c3, c0])| {
                    let cubic = CubicRD::new([c0, c1, c2, c3], PAPER_VALID_RANGE)
                        .expect("published coefficients are finite");
                    let centroid = grid.points().iter().map(|&r| cubic.value(r)).collect();
                    TierCurve { tier, cubic, centroid }
                })
                .collect()
        })
        .collect();
    ClusterModelSet::new(
        grid,
        ResolutionTier::STANDARD.to_vec(),
        clusters,
        PAPER_SEED,
        PAPER_PROVENANCE,
    )
    .expect("published model is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_and_spot_values() {
        let m = builtin_paper_model();
        assert_eq!(m.k(), 6);
        assert_eq!(m.tiers(), ResolutionTier::STANDARD);
        assert_eq!(m.cubic(1, ResolutionTier::P360).unwrap().coeffs(), [16.857, 6.307, -1.554, 0.129]);
        assert_eq!(m.cubic(5, ResolutionTier::P720).unwrap().coeffs(), [28.743, 10.075, -2.700, 0.239]);
    }

    #[test]
    fn clusters_ascend_in_quality_at_every_tier() {
        let m = builtin_paper_model();
        for tier in ResolutionTier::STANDARD {
            let means: Vec<f64> = m
                .cluster_indices()
                .map(|c| {
                    let v = &m.curve(c, tier).unwrap().centroid;
                    v.iter().sum::<f64>() / v.len() as f64
                })
                .collect();
            assert!(means.windows(2).all(|w| w[0] < w[1]), "{tier}: {means:?}");
        }
    }
}
