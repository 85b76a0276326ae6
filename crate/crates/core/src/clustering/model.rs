use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::kmeans::{kmeans, KMeansResult};
use super::{BitrateGrid, RDVector};
use crate::error::{Error, Result};
use crate::rd_model::{compare_fits, fit_polynomial, CubicRD, FitReport, ResolutionTier};

/// Fitted curve and centroid for one cluster at one tier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TierCurve {
    pub tier: ResolutionTier,
    pub cubic: CubicRD,
    pub centroid: Vec<f64>,
}

/// K clusters × M tiers of cubic R-D models plus centroids and grid metadata.
///
/// Cluster indices are 1-based. Tiers are stored in ascending order and every
/// cluster carries one curve per tier. Persist with [`crate::ingest::save_model`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterModelSet {
    grid: BitrateGrid,
    tiers: Vec<ResolutionTier>,
    /// `clusters[i]` is cluster `i + 1`, curves aligned with `tiers`.
    clusters: Vec<Vec<TierCurve>>,
    seed: u64,
    provenance: String,
}

impl ClusterModelSet {
    /// `clusters[i]` becomes cluster `i + 1`; its curves may be in any tier
    /// order but must cover exactly `tiers`.
    pub fn new(
        grid: BitrateGrid,
        tiers: Vec<ResolutionTier>,
        clusters: Vec<Vec<TierCurve>>,
        seed: u64,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        let mut tiers = tiers;
        tiers.sort();
        let before = tiers.len();
        tiers.dedup();
        if tiers.is_empty() || tiers.len() != before {
            return Err(Error::Model("tier list must be non-empty and free of duplicates".into()));
        }
        if clusters.is_empty() {
            return Err(Error::Model("model needs at least one cluster".into()));
        }

        let mut ordered = Vec::with_capacity(clusters.len());
        for (i, mut curves) in clusters.into_iter().enumerate() {
            let index = i + 1;
            curves.sort_by_key(|c| c.tier);
            let curve_tiers: Vec<_> = curves.iter().map(|c| c.tier).collect();
            if curve_tiers != tiers {
                return Err(Error::Model(format!(
                    "cluster {index} has curves for {curve_tiers:?}, expected {tiers:?}"
                )));
            }
            if let Some(c) = curves.iter().find(|c| c.centroid.len() != grid.len()) {
                return Err(Error::Model(format!(
                    "cluster {index} {} centroid has {} values, grid has {}",
                    c.tier,
                    c.centroid.len(),
                    grid.len()
                )));
            }
            ordered.push(curves);
        }

        Ok(Self {
            grid,
            tiers,
            clusters: ordered,
            seed,
            provenance: provenance.into(),
        })
    }

    pub fn k(&self) -> usize {
        self.clusters.len()
    }

    pub fn grid(&self) -> &BitrateGrid {
        &self.grid
    }

    /// Ascending.
    pub fn tiers(&self) -> &[ResolutionTier] {
        &self.tiers
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    /// 1-based cluster indices.
    pub fn cluster_indices(&self) -> impl Iterator<Item = usize> {
        1..=self.k()
    }

    pub fn has_tier(&self, tier: ResolutionTier) -> bool {
        self.tiers.binary_search(&tier).is_ok()
    }

    /// All tier curves of a cluster, ascending by tier.
    pub fn cluster(&self, cluster: usize) -> Result<&[TierCurve]> {
        cluster
            .checked_sub(1)
            .and_then(|i| self.clusters.get(i))
            .map(Vec::as_slice)
            .ok_or_else(|| {
                Error::input(format!("cluster {cluster} outside 1..={}", self.k()))
            })
    }

    pub fn curve(&self, cluster: usize, tier: ResolutionTier) -> Result<&TierCurve> {
        let pos = self.tiers.binary_search(&tier).map_err(|_| Error::MissingTier(tier))?;
        Ok(&self.cluster(cluster)?[pos])
    }

    pub fn cubic(&self, cluster: usize, tier: ResolutionTier) -> Result<&CubicRD> {
        Ok(&self.curve(cluster, tier)?.cubic)
    }

    /// Renumbers clusters consistently across tiers: new cluster `i + 1` is
    /// old cluster `order[i]`.
    pub fn relabeled(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.k()];
        for &c in order {
            let slot = c
                .checked_sub(1)
                .and_then(|i| seen.get_mut(i))
                .ok_or_else(|| Error::input(format!("cluster {c} outside 1..={}", self.k())))?;
            if std::mem::replace(slot, true) {
                return Err(Error::input(format!("cluster {c} listed twice")));
            }
        }
        if order.len() != self.k() {
            return Err(Error::input("relabeling must list every cluster once"));
        }
        let clusters = order.iter().map(|&c| self.clusters[c - 1].clone()).collect();
        Ok(Self { clusters, ..self.clone() })
    }
}

/// Per-tier training diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TierTraining {
    pub tier: ResolutionTier,
    pub kmeans: KMeansResult,
    /// `fits[i]` is the curve-family comparison for cluster `i + 1`.
    pub fits: Vec<FitReport>,
    /// `cluster_of_label[l]` is the 1-based cluster that K-means label `l` became.
    pub cluster_of_label: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trained {
    pub model: ClusterModelSet,
    pub tiers: Vec<TierTraining>,
}

/// Clusters each tier independently, fits a cubic to every centroid and
/// aligns cluster numbers across tiers.
///
/// Numbering follows ascending mean centroid PSNR at the highest tier, so
/// cluster 1 holds the hardest-to-code content. Other tiers are aligned by
/// rank of mean centroid PSNR, which is the assignment minimising the total
/// mean-PSNR distance to the reference centroids.
pub fn train(
    vectors: &BTreeMap<ResolutionTier, Vec<RDVector>>,
    grid: &BitrateGrid,
    k: usize,
    seed: u64,
) -> Result<Trained> {
    if vectors.is_empty() {
        return Err(Error::input("no R-D vectors to train on"));
    }
    let mut per_tier = Vec::with_capacity(vectors.len());
    for (&tier, vs) in vectors {
        if let Some(v) = vs.iter().find(|v| v.psnr.len() != grid.len()) {
            return Err(Error::input(format!(
                "gop {} ({tier}) has {} values, grid has {}",
                v.gop_id,
                v.psnr.len(),
                grid.len()
            )));
        }
        let result = kmeans(vs, k, seed)?;
        per_tier.push((tier, result));
    }

    // Rank labels by mean centroid PSNR within each tier.
    let mut clusters: Vec<Vec<TierCurve>> = vec![Vec::with_capacity(per_tier.len()); k];
    let mut diagnostics = Vec::with_capacity(per_tier.len());
    for (tier, result) in per_tier {
        let mut order: Vec<usize> = (0..k).collect();
        let means: Vec<f64> = result
            .centroids
            .iter()
            .map(|c| c.iter().sum::<f64>() / c.len() as f64)
            .collect();
        order.sort_by(|&a, &b| means[a].total_cmp(&means[b]).then(a.cmp(&b)));

        let mut cluster_of_label = vec![0; k];
        let mut fits = Vec::with_capacity(k);
        for (rank, &label) in order.iter().enumerate() {
            cluster_of_label[label] = rank + 1;
            let centroid = result.centroids[label].clone();
            let points: Vec<(f64, f64)> =
                grid.points().iter().copied().zip(centroid.iter().copied()).collect();
            let cubic = fit_polynomial(&points, 3)?;
            fits.push(compare_fits(&points)?);
            clusters[rank].push(TierCurve { tier, cubic, centroid });
        }
        diagnostics.push(TierTraining { tier, kmeans: result, fits, cluster_of_label });
    }

    let tiers: Vec<ResolutionTier> = vectors.keys().copied().collect();
    let n: usize = vectors.values().map(Vec::len).sum();
    let model = ClusterModelSet::new(
        grid.clone(),
        tiers,
        clusters,
        seed,
        format!("trained: k={k} seed={seed} vectors={n}"),
    )?;
    Ok(Trained { model, tiers: diagnostics })
}

/// Nearest cluster for a GOP at one tier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub cluster: usize,
    /// PSNR distance (dB) to the chosen cluster's curve; RMS over points for
    /// multi-point assignment.
    pub distance: f64,
    pub tier: ResolutionTier,
}

/// Assigns one `(bitrate, psnr)` observation to the cluster whose fitted
/// curve predicts the closest PSNR at that bitrate.
pub fn assign_cluster(
    point: (f64, f64),
    model: &ClusterModelSet,
    tier: ResolutionTier,
) -> Result<Assignment> {
    assign_cluster_multi(&[point], model, tier)
}

/// Minimises the root-mean-square PSNR distance over several observations.
pub fn assign_cluster_multi(
    points: &[(f64, f64)],
    model: &ClusterModelSet,
    tier: ResolutionTier,
) -> Result<Assignment> {
    if points.is_empty() {
        return Err(Error::input("cluster assignment needs at least one observation"));
    }
    for &(r, q) in points {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::input(format!("bitrate must be finite and > 0, got {r}")));
        }
        if !q.is_finite() {
            return Err(Error::input(format!("PSNR must be finite, got {q}")));
        }
    }
    if !model.has_tier(tier) {
        return Err(Error::MissingTier(tier));
    }

    let mut best: Option<Assignment> = None;
    for cluster in model.cluster_indices() {
        let cubic = model.cubic(cluster, tier)?;
        let distance = if let [(r, q)] = points {
            (q - cubic.value(*r)).abs()
        } else {
            let ms = points.iter().map(|&(r, q)| (q - cubic.value(r)).powi(2)).sum::<f64>()
                / points.len() as f64;
            ms.sqrt()
        };
        if best.is_none_or(|b| distance < b.distance) {
            best = Some(Assignment { cluster, distance, tier });
        }
    }
    Ok(best.expect("model has at least one cluster"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat_model(levels: &[f64]) -> ClusterModelSet {
        let grid = BitrateGrid::default();
        let clusters = levels
            .iter()
            .map(|&q| {
                vec![TierCurve {
                    tier: ResolutionTier::P1080,
                    cubic: CubicRD::new([q, 0.0, 0.0, 0.0], (0.2, 6.0)).unwrap(),
                    centroid: vec![q; grid.len()],
                }]
            })
            .collect();
        ClusterModelSet::new(grid, vec![ResolutionTier::P1080], clusters, 0, "test").unwrap()
    }

    #[test]
    fn equidistant_goes_to_lower_index() {
        let m = flat_model(&[30.0, 32.0]);
        let a = assign_cluster((1.0, 31.0), &m, ResolutionTier::P1080).unwrap();
        assert_eq!(a.cluster, 1);
        assert_eq!(a.distance, 1.0);
    }

    #[test]
    fn multi_single_point_reduces() {
        let m = flat_model(&[30.0, 32.0, 36.0]);
        let one = assign_cluster((2.0, 33.5), &m, ResolutionTier::P1080).unwrap();
        let multi = assign_cluster_multi(&[(2.0, 33.5)], &m, ResolutionTier::P1080).unwrap();
        assert_eq!(one, multi);
        assert_eq!(one.cluster, 2);
    }

    #[test]
    fn multi_straddling_ties_low() {
        let m = flat_model(&[30.0, 32.0]);
        let pts = [(1.0, 30.5), (2.0, 31.5), (3.0, 31.0)];
        let a = assign_cluster_multi(&pts, &m, ResolutionTier::P1080).unwrap();
        assert_eq!(a.cluster, 1);
    }

    #[test]
    fn assignment_errors() {
        let m = flat_model(&[30.0]);
        assert!(matches!(
            assign_cluster((1.0, 30.0), &m, ResolutionTier::P720),
            Err(Error::MissingTier(_))
        ));
        assert!(assign_cluster_multi(&[], &m, ResolutionTier::P1080).is_err());
        assert!(assign_cluster((0.0, 30.0), &m, ResolutionTier::P1080).is_err());
    }

    #[test]
    fn relabel_checks_permutation() {
        let m = flat_model(&[30.0, 32.0, 36.0]);
        let r = m.relabeled(&[3, 1, 2]).unwrap();
        assert_eq!(r.cubic(1, ResolutionTier::P1080).unwrap().coeffs()[0], 36.0);
        assert!(m.relabeled(&[1, 1, 2]).is_err());
        assert!(m.relabeled(&[1, 2]).is_err());
        assert!(m.relabeled(&[0, 1, 2]).is_err());
    }

    #[test]
    fn model_invariants() {
        let grid = BitrateGrid::default();
        let curve = |tier| TierCurve {
            tier,
            cubic: CubicRD::new([30.0, 1.0, 0.0, 0.0], (0.2, 6.0)).unwrap(),
            centroid: vec![30.0; 10],
        };
        let missing = ClusterModelSet::new(
            grid.clone(),
            vec![ResolutionTier::P720, ResolutionTier::P1080],
            vec![vec![curve(ResolutionTier::P720)]],
            0,
            "x",
        );
        assert!(missing.is_err());
        let short = ClusterModelSet::new(
            grid,
            vec![ResolutionTier::P720],
            vec![vec![TierCurve { centroid: vec![1.0; 3], ..curve(ResolutionTier::P720) }]],
            0,
            "x",
        );
        assert!(short.is_err());
    }
}
