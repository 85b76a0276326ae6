//! Knee points, resolution ladders, visually-lossless thresholds,
//! near-zero-slope intervals, per-GOP recommendations and savings.

mod config;
mod ladder;
mod recommend;
mod savings;
mod thresholds;

pub use config::DecisionConfig;
pub use ladder::{
    best_tier, build_ladder, curve_intersections, recommend_resolution, Intersection,
    LadderSegment, ResolutionLadder, TierChoice,
};
pub use recommend::{recommend, Advisor, GopObservation, Mode, Modes, Recommendation};
pub use savings::{savings_report, SavingsReport, VideoBitrates, VideoSavings};
pub use thresholds::{
    nzs_interval, recommend_bitrate_nzs, recommend_bitrate_vl, vl_threshold, NzsInterval,
    NzsTable, VlTable, VlThreshold,
};
