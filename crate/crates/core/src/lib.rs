//! Parametric rate-distortion models for transcoding decisions.
//!
//! The pipeline has two phases:
//!
//! * **Model formation**: per-GOP R-D measurements are resampled onto a fixed
//!   bitrate grid ([`clustering::resample_to_grid`]), clustered per resolution
//!   tier with K-means ([`clustering::kmeans`]), and each centroid is fitted
//!   with a cubic `Q(R)` ([`rd_model::fit_polynomial`]). The result is a
//!   [`ClusterModelSet`].
//! * **Decisions**: from the cubics we derive resolution ladders (knee points
//!   where two tiers' curves cross), visually-lossless bitrate thresholds and
//!   near-zero-slope intervals, and turn them into per-GOP recommendations
//!   ([`decision::Advisor`]).
//!
//! [`ingest`] reads measurement tables, persists models, and ships the
//! published six-cluster model as [`ingest::builtin_paper_model`].

pub mod clustering;
pub mod decision;
pub mod error;
pub mod ingest;
mod poly;
pub mod rd_model;
pub mod roots;

pub use clustering::{BitrateGrid, ClusterModelSet, RDVector};
pub use decision::{Advisor, DecisionConfig, Modes, Recommendation};
pub use error::{Error, Result};
pub use rd_model::{CubicRD, ResolutionTier};
