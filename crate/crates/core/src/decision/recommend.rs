use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ladder::{build_ladder, recommend_resolution, ResolutionLadder};
use super::thresholds::{
    nzs_interval, recommend_bitrate_nzs, recommend_bitrate_vl, vl_threshold, NzsInterval,
    NzsTable, VlThreshold, VlTable,
};
use super::DecisionConfig;
use crate::clustering::{assign_cluster_multi, ClusterModelSet};
use crate::error::{Error, Result};
use crate::rd_model::ResolutionTier;

/// Decision modes; `recommend` applies them in the order listed here.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Pick the resolution tier from the cluster's ladder.
    TransSize,
    /// Cap the bitrate at the visually-lossless threshold.
    Vl,
    /// Drop the bitrate to the start of the near-zero-slope interval.
    Nzs,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::TransSize, Mode::Vl, Mode::Nzs];

    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::TransSize => "trans_size",
            Mode::Vl => "vl",
            Mode::Nzs => "nzs",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "trans_size" | "transsize" | "ts" | "resolution" => Ok(Mode::TransSize),
            "vl" | "visually_lossless" => Ok(Mode::Vl),
            "nzs" | "near_zero_slope" => Ok(Mode::Nzs),
            other => Err(Error::input(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Modes {
    pub trans_size: bool,
    pub vl: bool,
    pub nzs: bool,
}

impl Modes {
    pub fn only(mode: Mode) -> Self {
        Self::from_iter([mode])
    }

    pub fn all() -> Self {
        Self::from_iter(Mode::ALL)
    }

    pub fn contains(&self, mode: Mode) -> bool {
        match mode {
            Mode::TransSize => self.trans_size,
            Mode::Vl => self.vl,
            Mode::Nzs => self.nzs,
        }
    }

    pub fn is_empty(&self) -> bool {
        !(self.trans_size || self.vl || self.nzs)
    }

    pub fn iter(&self) -> impl Iterator<Item = Mode> + '_ {
        Mode::ALL.into_iter().filter(|m| self.contains(*m))
    }

    /// Every combination with at least one mode enabled.
    pub fn combinations() -> impl Iterator<Item = Modes> {
        (1u8..8).map(|bits| Modes {
            trans_size: bits & 1 != 0,
            vl: bits & 2 != 0,
            nzs: bits & 4 != 0,
        })
    }
}

impl FromIterator<Mode> for Modes {
    fn from_iter<I: IntoIterator<Item = Mode>>(iter: I) -> Self {
        let mut modes = Modes::default();
        for m in iter {
            match m {
                Mode::TransSize => modes.trans_size = true,
                Mode::Vl => modes.vl = true,
                Mode::Nzs => modes.nzs = true,
            }
        }
        modes
    }
}

impl FromStr for Modes {
    type Err = Error;

    /// Comma-separated list, e.g. `trans_size,vl`. `all` enables every mode.
    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("all") {
            return Ok(Modes::all());
        }
        let modes = s
            .split(',')
            .filter(|p| !p.trim().is_empty())
            .map(str::parse)
            .collect::<Result<Modes>>()?;
        if modes.is_empty() {
            return Err(Error::input("at least one mode must be enabled"));
        }
        Ok(modes)
    }
}

impl fmt::Display for Modes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.iter().map(|m| m.as_str()).collect();
        f.write_str(&names.join(","))
    }
}

/// Observed R-D points of one GOP at its native tier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GopObservation {
    pub gop_id: String,
    pub tier: ResolutionTier,
    /// `(bitrate Mbps, PSNR dB)` pairs.
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recommendation {
    pub gop_id: String,
    pub cluster: usize,
    /// Assignment residual in dB.
    pub distance: f64,
    pub native_tier: ResolutionTier,
    pub tier: ResolutionTier,
    pub target_bitrate: f64,
    pub proposed_bitrate: f64,
    /// Modes that changed the tier or the bitrate.
    pub applied: Vec<Mode>,
    /// Model PSNR at the chosen tier and proposed bitrate.
    pub predicted_psnr: f64,
    /// `predicted_psnr` minus the model PSNR at the native tier and target.
    pub psnr_change: f64,
    /// The target fell outside the operating range for the ladder lookup.
    pub target_clamped: bool,
    /// The proposed bitrate lies outside the chosen curve's fitted span.
    pub extrapolated: bool,
    pub rationale: String,
}

/// A model with its ladders, thresholds and intervals precomputed.
///
/// Immutable after construction and safe to share between threads.
#[derive(Debug, Clone)]
pub struct Advisor {
    model: ClusterModelSet,
    cfg: DecisionConfig,
    ladders: Vec<ResolutionLadder>,
    vl: VlTable,
    nzs: NzsTable,
}

impl Advisor {
    pub fn new(model: ClusterModelSet, cfg: DecisionConfig) -> Result<Self> {
        cfg.validate()?;
        let ladders = model
            .cluster_indices()
            .map(|c| build_ladder(&model, c, &cfg))
            .collect::<Result<Vec<_>>>()?;
        let mut vl = VlTable::new();
        let mut nzs = NzsTable::new();
        for cluster in model.cluster_indices() {
            for curve in model.cluster(cluster)? {
                if let Some(t) = vl_threshold(&curve.cubic, &cfg) {
                    vl.insert((cluster, curve.tier), t);
                }
                if let Some(iv) = nzs_interval(&curve.cubic, &cfg) {
                    nzs.insert((cluster, curve.tier), iv);
                }
            }
        }
        Ok(Self { model, cfg, ladders, vl, nzs })
    }

    pub fn model(&self) -> &ClusterModelSet {
        &self.model
    }

    pub fn config(&self) -> &DecisionConfig {
        &self.cfg
    }

    pub fn ladder(&self, cluster: usize) -> Result<&ResolutionLadder> {
        cluster
            .checked_sub(1)
            .and_then(|i| self.ladders.get(i))
            .ok_or_else(|| Error::input(format!("cluster {cluster} outside 1..={}", self.model.k())))
    }

    pub fn ladders(&self) -> &[ResolutionLadder] {
        &self.ladders
    }

    pub fn vl_table(&self) -> &VlTable {
        &self.vl
    }

    pub fn nzs_table(&self) -> &NzsTable {
        &self.nzs
    }

    pub fn vl_threshold(&self, cluster: usize, tier: ResolutionTier) -> Option<&VlThreshold> {
        self.vl.get(&(cluster, tier))
    }

    pub fn nzs_interval(&self, cluster: usize, tier: ResolutionTier) -> Option<&NzsInterval> {
        self.nzs.get(&(cluster, tier))
    }

    /// Assign → pick tier → visually-lossless cap → near-zero-slope reduction.
    pub fn recommend(
        &self,
        gop: &GopObservation,
        modes: Modes,
        target: f64,
    ) -> Result<Recommendation> {
        if modes.is_empty() {
            return Err(Error::input("at least one mode must be enabled"));
        }
        if !(target.is_finite() && target > 0.0) {
            return Err(Error::input(format!("target bitrate must be > 0, got {target}")));
        }
        let assignment = assign_cluster_multi(&gop.points, &self.model, gop.tier)?;
        let cluster = assignment.cluster;
        let mut applied = Vec::new();
        let mut why = format!("cluster {cluster} (distance {:.3} dB)", assignment.distance);

        let mut tier = gop.tier;
        let mut target_clamped = false;
        if modes.trans_size {
            let choice = recommend_resolution(self.ladder(cluster)?, target);
            target_clamped = choice.clamped;
            if choice.tier != tier {
                applied.push(Mode::TransSize);
                let _ = write!(why, "; trans-size {} -> {}", gop.tier, choice.tier);
            } else {
                let _ = write!(why, "; keep {tier}");
            }
            tier = choice.tier;
        }

        let mut bitrate = target;
        let mut extrapolated = false;
        if modes.vl {
            let capped = recommend_bitrate_vl(cluster, tier, bitrate, &self.vl);
            if capped < bitrate {
                applied.push(Mode::Vl);
                let _ = write!(why, "; visually-lossless cap {capped:.3} Mbps");
                extrapolated |= self.vl[&(cluster, tier)].extrapolated;
                bitrate = capped;
            }
        }
        if modes.nzs {
            let reduced = recommend_bitrate_nzs(cluster, tier, bitrate, &self.nzs);
            if reduced < bitrate {
                applied.push(Mode::Nzs);
                let _ = write!(why, "; near-zero-slope floor {reduced:.3} Mbps");
                bitrate = reduced;
            }
        }
        if applied.iter().all(|m| *m == Mode::TransSize) {
            let _ = write!(why, "; bitrate kept at {bitrate:.3} Mbps");
        }

        let curve = self.model.cubic(cluster, tier)?;
        extrapolated |= curve.is_extrapolated(bitrate);
        let predicted_psnr = curve.value(bitrate);
        let native_psnr = self.model.cubic(cluster, gop.tier)?.value(target);

        Ok(Recommendation {
            gop_id: gop.gop_id.clone(),
            cluster,
            distance: assignment.distance,
            native_tier: gop.tier,
            tier,
            target_bitrate: target,
            proposed_bitrate: bitrate,
            applied,
            predicted_psnr,
            psnr_change: predicted_psnr - native_psnr,
            target_clamped,
            extrapolated,
            rationale: why,
        })
    }
}

/// One-shot convenience over [`Advisor::recommend`].
pub fn recommend(
    gop: &GopObservation,
    model: &ClusterModelSet,
    cfg: &DecisionConfig,
    modes: Modes,
    target: f64,
) -> Result<Recommendation> {
    Advisor::new(model.clone(), *cfg)?.recommend(gop, modes, target)
}
