//! Ground-truth generators and partition scores: multi-object motion scenes,
//! pixel-grid instances driven by a flow field, and random small instances.

mod grid;
pub mod presets;
mod random;
mod scene;
mod score;

pub use grid::{generate_grid_instance, FlowField, GridError, GridSpec, LIFT_DIRECTIONS, STENCIL};
pub use random::{random_instance, RandomInstanceSpec};
pub use scene::{generate_scene, ObjectSpec, Region, Scene, SceneError, SceneSpec};
pub use score::{score_partition, ScoreError, Scores};
