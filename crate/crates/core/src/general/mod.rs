//! Arbitrary demands: the dispatcher, the clustering path for many tours, the
//! rounding and splitting path for few tours, and the distance partition.

pub mod backend;
pub mod cluster;
pub mod dispatch;
pub mod few_tours;
pub mod partition;

pub use backend::backend_solve;
pub use cluster::{
    cluster_small, many_tours_solve, stitch_segments, ClusterMap, Clustering, ManyToursOutcome,
    Segment,
};
pub use dispatch::{choose_branch, dispatch, solve, Algorithm, Branch, PartOutcome, SolveOutcome};
pub use few_tours::{few_tours_solve, round_down, rounded_instance, split_tour, FewToursOutcome};
pub use partition::{bounded_distance_partition, SubinstancePlan};
