//! Point trajectories and the motion costs derived from them.
//!
//! Pairwise costs compare translational motion; third-order costs fit a
//! Euclidean motion (rotation, scaling, translation) to two trajectories and
//! measure how well the third one follows it.

mod costs;
mod geometry;
mod trajectory;

pub use costs::{
    estimate_euclidean_transform, gamma, gamma_at, max_spatial_distance, mean_feature_distance,
    mean_spatial_distance, pairwise_cost, pairwise_cost_from_distances, pairwise_motion_distance,
    resolve_triplet_cost, transition_distances, triplet_cost, triplet_distance, triplet_distances, CostParams,
    TripletDistances,
};
pub use geometry::{angle_difference, EuclideanTransform, Vec2, DEGENERACY_EPS};
pub use trajectory::{common_frames3, FlowStats, Trajectory};

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum MotionError {
    #[error("trajectories share fewer than two frames")]
    NoOverlap,
    #[error("the two defining points coincide")]
    DegeneratePair,
    #[error("two points of the triple coincide")]
    DegenerateTriple,
    #[error("trajectory does not exist at frame {frame}")]
    NotAlive { frame: usize },
    #[error("invalid trajectory: {0}")]
    InvalidTrajectory(&'static str),
    #[error("invalid parameters: {0}")]
    InvalidParams(&'static str),
}
