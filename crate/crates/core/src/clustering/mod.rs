//! Fixed-grid R-D vectors, K-means clustering and cluster assignment.

mod grid;
pub mod kmeans;
mod model;

pub use grid::{resample_to_grid, BitrateGrid, RDVector};
pub use kmeans::{kmeans, kmeans_raw, KMeansResult};
pub use model::{
    assign_cluster, assign_cluster_multi, train, Assignment, ClusterModelSet, TierCurve,
    TierTraining, Trained,
};
