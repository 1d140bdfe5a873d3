use alloc::vec::Vec;
use core::ops::Range;

use super::{MotionError, Vec2};

/// A point tracked over consecutive frames, optionally with a feature vector
/// (e.g. color) per frame.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub id: u64,
    start_frame: usize,
    positions: Vec<Vec2>,
    feature_dim: usize,
    features: Vec<f64>,
}

impl Trajectory {
    pub fn new(id: u64, start_frame: usize, positions: Vec<Vec2>) -> Result<Self, MotionError> {
        Self::with_features(id, start_frame, positions, 0, Vec::new())
    }

    /// `features` holds `feature_dim` values per frame, frame-major.
    pub fn with_features(
        id: u64,
        start_frame: usize,
        positions: Vec<Vec2>,
        feature_dim: usize,
        features: Vec<f64>,
    ) -> Result<Self, MotionError> {
        if positions.len() < 2 {
            return Err(MotionError::InvalidTrajectory("fewer than two positions"));
        }
        if !positions.iter().all(|p| p.is_finite()) {
            return Err(MotionError::InvalidTrajectory("non-finite position"));
        }
        if features.len() != feature_dim * positions.len() {
            return Err(MotionError::InvalidTrajectory("feature count does not match length"));
        }
        if !features.iter().all(|f| f.is_finite()) {
            return Err(MotionError::InvalidTrajectory("non-finite feature"));
        }
        Ok(Self {
            id,
            start_frame,
            positions,
            feature_dim,
            features,
        })
    }

    pub fn start_frame(&self) -> usize {
        self.start_frame
    }

    /// One past the last frame.
    pub fn end_frame(&self) -> usize {
        self.start_frame + self.positions.len()
    }

    pub fn frames(&self) -> Range<usize> {
        self.start_frame..self.end_frame()
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[Vec2] {
        &self.positions
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    #[inline]
    pub fn alive_at(&self, frame: usize) -> bool {
        self.frames().contains(&frame)
    }

    #[inline]
    pub fn position(&self, frame: usize) -> Option<Vec2> {
        frame
            .checked_sub(self.start_frame)
            .and_then(|i| self.positions.get(i).copied())
    }

    pub fn feature(&self, frame: usize) -> Option<&[f64]> {
        let i = frame.checked_sub(self.start_frame)?;
        if i >= self.positions.len() {
            return None;
        }
        Some(&self.features[i * self.feature_dim..(i + 1) * self.feature_dim])
    }

    /// Forward difference at `frame`; the last frame reuses the final two
    /// positions.
    pub fn velocity(&self, frame: usize) -> Option<Vec2> {
        let i = frame.checked_sub(self.start_frame)?;
        let n = self.positions.len();
        if i >= n {
            return None;
        }
        let i = i.min(n - 2);
        Some(self.positions[i + 1] - self.positions[i])
    }

    /// Frames where both trajectories exist (possibly empty).
    pub fn common_frames(&self, other: &Trajectory) -> Range<usize> {
        let start = self.start_frame.max(other.start_frame);
        let end = self.end_frame().min(other.end_frame());
        start..end.max(start)
    }
}

/// Common frames of three trajectories.
pub fn common_frames3(a: &Trajectory, b: &Trajectory, c: &Trajectory) -> Range<usize> {
    let ab = a.common_frames(b);
    let start = ab.start.max(c.start_frame());
    let end = ab.end.min(c.end_frame());
    start..end.max(start)
}

/// Per-transition flow variation `σ_t` (transition `t → t+1`); transitions
/// without a value use `fallback`.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowStats {
    sigma: Vec<f64>,
    fallback: f64,
}

impl Default for FlowStats {
    fn default() -> Self {
        Self::uniform(1.0)
    }
}

impl FlowStats {
    pub fn uniform(sigma: f64) -> Self {
        assert!(sigma > 0.0, "sigma must be positive");
        Self {
            sigma: Vec::new(),
            fallback: sigma,
        }
    }

    pub fn per_transition(sigma: Vec<f64>) -> Result<Self, MotionError> {
        if sigma.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
            return Err(MotionError::InvalidParams("sigma must be positive and finite"));
        }
        Ok(Self { sigma, fallback: 1.0 })
    }

    #[inline]
    pub fn sigma(&self, t: usize) -> f64 {
        self.sigma.get(t).copied().unwrap_or(self.fallback)
    }
}
