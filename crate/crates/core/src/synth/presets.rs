//! Ready-made scenes.

use crate::motion::{EuclideanTransform, Vec2};

use super::scene::{ObjectSpec, Region, SceneSpec};

/// A disc that rotates and pulsates in scale, directly next to a block
/// sliding past it.
///
/// Points far apart on the disc move very differently from frame to frame,
/// so a purely translational model splits it; as a whole it moves rigidly.
pub fn rotation_scene(seed: u64, noise_std: f64) -> SceneSpec {
    let frames = 20;
    let center = Vec2::new(70.0, 80.0);
    let steps: alloc::vec::Vec<EuclideanTransform> = (0..frames - 1)
        .map(|t| {
            let scale = if t % 2 == 0 { 1.08 } else { 1.0 / 1.08 };
            EuclideanTransform::about(center, 0.25, scale, Vec2::ZERO)
        })
        .collect();
    let slide = EuclideanTransform::new(0.0, 1.0, Vec2::new(0.0, -10.0));
    SceneSpec {
        frames,
        objects: alloc::vec![
            ObjectSpec::from_steps(Region::Disc { center, radius: 45.0 }, &steps),
            ObjectSpec::from_steps(
                Region::Rect {
                    min: Vec2::new(123.0, 30.0),
                    max: Vec2::new(200.0, 130.0),
                },
                &alloc::vec![slide; frames - 1],
            ),
        ],
        step: 8.0,
        noise_std,
        seed,
    }
}

/// Two identical square patches of `side × side` lattice points,
/// `gap_steps` lattice steps apart, translating in lockstep.
pub fn separated_objects_scene(side: usize, spacing: f64, gap_steps: usize, frames: usize, seed: u64) -> SceneSpec {
    let extent = spacing * (side as f64 - 1.0);
    let gap = spacing * gap_steps as f64;
    let shift = EuclideanTransform::new(0.0, 1.0, Vec2::new(2.0, 1.0));
    let patch = |x0: f64| {
        ObjectSpec::from_steps(
            Region::Rect {
                min: Vec2::new(x0, 0.0),
                max: Vec2::new(x0 + extent, extent),
            },
            &alloc::vec![shift; frames - 1],
        )
    };
    SceneSpec {
        frames,
        objects: alloc::vec![patch(0.0), patch(extent + gap)],
        step: spacing,
        noise_std: 0.0,
        seed,
    }
}
