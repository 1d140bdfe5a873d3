use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::motion::{EuclideanTransform, Trajectory, Vec2};

/// Spatial support of an object at frame 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Region {
    Rect { min: Vec2, max: Vec2 },
    Disc { center: Vec2, radius: f64 },
}

impl Region {
    pub fn contains(&self, p: Vec2) -> bool {
        match *self {
            Region::Rect { min, max } => p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y,
            Region::Disc { center, radius } => p.distance(center) <= radius,
        }
    }

    /// Axis-aligned bounding box.
    pub fn bounds(&self) -> (Vec2, Vec2) {
        match *self {
            Region::Rect { min, max } => (min, max),
            Region::Disc { center, radius } => (
                center - Vec2::new(radius, radius),
                center + Vec2::new(radius, radius),
            ),
        }
    }

    fn overlaps(&self, other: &Region) -> bool {
        use Region::*;
        match (*self, *other) {
            (Rect { min: a0, max: a1 }, Rect { min: b0, max: b1 }) => {
                a0.x <= b1.x && b0.x <= a1.x && a0.y <= b1.y && b0.y <= a1.y
            }
            (Disc { center: c, radius: r }, Disc { center: d, radius: s }) => c.distance(d) <= r + s,
            (Rect { min, max }, Disc { center, radius }) | (Disc { center, radius }, Rect { min, max }) => {
                let nearest = Vec2::new(center.x.clamp(min.x, max.x), center.y.clamp(min.y, max.y));
                nearest.distance(center) <= radius
            }
        }
    }
}

/// An object: its support at frame 0 and its motion from frame 0 to every
/// frame (the first entry is normally the identity).
#[derive(Clone, Debug, PartialEq)]
pub struct ObjectSpec {
    pub support: Region,
    pub motion: Vec<EuclideanTransform>,
}

impl ObjectSpec {
    pub fn fixed(support: Region, frames: usize) -> Self {
        Self {
            support,
            motion: alloc::vec![EuclideanTransform::IDENTITY; frames],
        }
    }

    /// Accumulates per-frame increments `frame t → t+1`.
    pub fn from_steps(support: Region, steps: &[EuclideanTransform]) -> Self {
        let mut motion = Vec::with_capacity(steps.len() + 1);
        motion.push(EuclideanTransform::IDENTITY);
        for step in steps {
            let last = *motion.last().expect("non-empty");
            motion.push(step.compose(&last));
        }
        Self { support, motion }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SceneSpec {
    pub frames: usize,
    pub objects: Vec<ObjectSpec>,
    /// Lattice spacing of the sampled trajectories in pixels.
    pub step: f64,
    pub noise_std: f64,
    pub seed: u64,
}

/// Trajectories with the index of the object each one was sampled from.
#[derive(Clone, Debug, PartialEq)]
pub struct Scene {
    pub trajectories: Vec<Trajectory>,
    pub labels: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SceneError {
    #[error("supports of objects {0} and {1} overlap")]
    OverlappingSupports(usize, usize),
    #[error("invalid scene: {0}")]
    Invalid(&'static str),
}

/// Samples a regular lattice over every object's support, moves each point
/// with its object and adds Gaussian noise. Deterministic in the seed.
pub fn generate_scene(spec: &SceneSpec) -> Result<Scene, SceneError> {
    if spec.frames < 2 {
        return Err(SceneError::Invalid("need at least two frames"));
    }
    if !(spec.step > 0.0) {
        return Err(SceneError::Invalid("lattice step must be positive"));
    }
    if !(spec.noise_std >= 0.0) || !spec.noise_std.is_finite() {
        return Err(SceneError::Invalid("noise must be finite and non-negative"));
    }
    if spec.objects.iter().any(|o| o.motion.len() != spec.frames) {
        return Err(SceneError::Invalid("every object needs one transform per frame"));
    }
    for (i, a) in spec.objects.iter().enumerate() {
        for (j, b) in spec.objects.iter().enumerate().skip(i + 1) {
            if a.support.overlaps(&b.support) {
                return Err(SceneError::OverlappingSupports(i, j));
            }
        }
    }
    let normal = Normal::new(0.0, spec.noise_std).map_err(|_| SceneError::Invalid("bad noise"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut trajectories = Vec::new();
    let mut labels = Vec::new();
    for (label, object) in spec.objects.iter().enumerate() {
        let (lo, hi) = object.support.bounds();
        let x0 = libm::ceil(lo.x / spec.step) as i64;
        let x1 = libm::floor(hi.x / spec.step) as i64;
        let y0 = libm::ceil(lo.y / spec.step) as i64;
        let y1 = libm::floor(hi.y / spec.step) as i64;
        for gy in y0..=y1 {
            for gx in x0..=x1 {
                let p = Vec2::new(gx as f64 * spec.step, gy as f64 * spec.step);
                if !object.support.contains(p) {
                    continue;
                }
                let positions = object
                    .motion
                    .iter()
                    .map(|m| {
                        let q = m.apply(p);
                        if spec.noise_std > 0.0 {
                            q + Vec2::new(normal.sample(&mut rng), normal.sample(&mut rng))
                        } else {
                            q
                        }
                    })
                    .collect();
                let id = trajectories.len() as u64;
                trajectories.push(Trajectory::new(id, 0, positions).expect("finite positions"));
                labels.push(label);
            }
        }
    }
    Ok(Scene { trajectories, labels })
}
