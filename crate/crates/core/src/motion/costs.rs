use super::geometry::DEGENERACY_EPS;
use super::trajectory::common_frames3;
use super::{EuclideanTransform, FlowStats, MotionError, Trajectory, Vec2};

/// Parameters of the pairwise and third-order cost functions.
///
/// Pairwise: `c_ij = −max(θ̄0 + θ1·d^m + θ2·d^s + θ3·d^c, θ0 + θ1·d^m)`.
/// Third order: `c(d) = θ0⁽³⁾ + θ1⁽³⁾·d`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostParams {
    pub theta_bar0: f64,
    pub theta0: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
    pub triple_theta0: f64,
    pub triple_theta1: f64,
}

impl Default for CostParams {
    fn default() -> Self {
        Self {
            theta_bar0: 1.0,
            theta0: 1.0,
            theta1: -0.08,
            theta2: 0.0,
            theta3: 0.0,
            triple_theta0: -1.0,
            triple_theta1: 0.08,
        }
    }
}

impl CostParams {
    pub fn validate(&self) -> Result<(), MotionError> {
        let all = [
            self.theta_bar0,
            self.theta0,
            self.theta1,
            self.theta2,
            self.theta3,
            self.triple_theta0,
            self.triple_theta1,
        ];
        if !all.iter().all(|v| v.is_finite()) {
            return Err(MotionError::InvalidParams("parameters must be finite"));
        }
        if !(self.triple_theta1 > 0.0) {
            return Err(MotionError::InvalidParams("third-order slope must be positive"));
        }
        Ok(())
    }

    #[inline]
    pub fn triple_cost_at(&self, d: f64) -> f64 {
        self.triple_theta0 + self.triple_theta1 * d
    }
}

fn overlap(a: &Trajectory, b: &Trajectory) -> Result<core::ops::Range<usize>, MotionError> {
    let frames = a.common_frames(b);
    if frames.len() < 2 {
        return Err(MotionError::NoOverlap);
    }
    Ok(frames)
}

fn position(t: &Trajectory, frame: usize) -> Vec2 {
    t.position(frame).expect("frame inside common lifetime")
}

/// Maximum over common transitions of the velocity difference divided by
/// `σ_t`.
pub fn pairwise_motion_distance(a: &Trajectory, b: &Trajectory, stats: &FlowStats) -> Result<f64, MotionError> {
    let frames = overlap(a, b)?;
    let mut d: f64 = 0.0;
    for t in frames.start..frames.end - 1 {
        let va = position(a, t + 1) - position(a, t);
        let vb = position(b, t + 1) - position(b, t);
        d = d.max((va - vb).norm() / stats.sigma(t));
    }
    Ok(d)
}

/// Mean Euclidean distance over the common lifetime.
pub fn mean_spatial_distance(a: &Trajectory, b: &Trajectory) -> Result<f64, MotionError> {
    let frames = overlap(a, b)?;
    let n = frames.len() as f64;
    Ok(frames.map(|t| position(a, t).distance(position(b, t))).sum::<f64>() / n)
}

/// Maximum Euclidean distance over the common lifetime.
pub fn max_spatial_distance(a: &Trajectory, b: &Trajectory) -> Result<f64, MotionError> {
    let frames = overlap(a, b)?;
    Ok(frames
        .map(|t| position(a, t).distance(position(b, t)))
        .fold(0.0, f64::max))
}

/// Mean Euclidean feature distance over the common lifetime; zero when
/// either trajectory carries no features.
pub fn mean_feature_distance(a: &Trajectory, b: &Trajectory) -> Result<f64, MotionError> {
    let frames = overlap(a, b)?;
    if a.feature_dim() == 0 || a.feature_dim() != b.feature_dim() {
        return Ok(0.0);
    }
    let n = frames.len() as f64;
    let mut total = 0.0;
    for t in frames {
        let fa = a.feature(t).expect("alive");
        let fb = b.feature(t).expect("alive");
        let sq: f64 = fa.iter().zip(fb).map(|(x, y)| (x - y) * (x - y)).sum();
        total += libm::sqrt(sq);
    }
    Ok(total / n)
}

pub fn pairwise_cost_from_distances(motion: f64, spatial: f64, feature: f64, params: &CostParams) -> f64 {
    let full = params.theta_bar0 + params.theta1 * motion + params.theta2 * spatial + params.theta3 * feature;
    let motion_only = params.theta0 + params.theta1 * motion;
    -full.max(motion_only)
}

/// Pairwise cost; negative is attractive.
pub fn pairwise_cost(a: &Trajectory, b: &Trajectory, stats: &FlowStats, params: &CostParams) -> Result<f64, MotionError> {
    let dm = pairwise_motion_distance(a, b, stats)?;
    let ds = mean_spatial_distance(a, b)?;
    let dc = mean_feature_distance(a, b)?;
    Ok(pairwise_cost_from_distances(dm, ds, dc, params))
}

/// Motion of the pair `(a, b)` between frames `t` and `t1`.
pub fn estimate_euclidean_transform(
    a: &Trajectory,
    b: &Trajectory,
    t: usize,
    t1: usize,
) -> Result<EuclideanTransform, MotionError> {
    let get = |tr: &Trajectory, f: usize| tr.position(f).ok_or(MotionError::NotAlive { frame: f });
    EuclideanTransform::from_correspondences(get(a, t)?, get(b, t)?, get(a, t1)?, get(b, t1)?)
}

/// How far `c` deviates from the motion `transform` between `t` and `t1`.
pub fn triplet_distance(
    transform: &EuclideanTransform,
    c: &Trajectory,
    t: usize,
    t1: usize,
) -> Result<f64, MotionError> {
    let p0 = c.position(t).ok_or(MotionError::NotAlive { frame: t })?;
    let p1 = c.position(t1).ok_or(MotionError::NotAlive { frame: t1 })?;
    Ok(transform.apply(p0).distance(p1))
}

/// Normalization of the deviation of `c` from the motion of `(a, b)`:
/// `(1/σ)·(½(‖a−b‖/‖a−c‖ + ‖a−b‖/‖b−c‖))^¼`.
pub fn gamma_at(a: Vec2, b: Vec2, c: Vec2, sigma: f64) -> Result<f64, MotionError> {
    let ab = a.distance(b);
    let ac = a.distance(c);
    let bc = b.distance(c);
    if !(ab > DEGENERACY_EPS && ac > DEGENERACY_EPS && bc > DEGENERACY_EPS) {
        return Err(MotionError::DegenerateTriple);
    }
    let ratio = 0.5 * (ab / ac + ab / bc);
    Ok(libm::sqrt(libm::sqrt(ratio)) / sigma)
}

pub fn gamma(a: &Trajectory, b: &Trajectory, c: &Trajectory, t: usize, stats: &FlowStats) -> Result<f64, MotionError> {
    let get = |tr: &Trajectory| tr.position(t).ok_or(MotionError::NotAlive { frame: t });
    gamma_at(get(a)?, get(b)?, get(c)?, stats.sigma(t))
}

/// Smallest and largest normalized deviation over the three leave-one-out
/// motion models for positions at two frames.
pub fn transition_distances(before: [Vec2; 3], after: [Vec2; 3], sigma: f64) -> Result<(f64, f64), MotionError> {
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for (i, j, k) in [(0, 1, 2), (0, 2, 1), (1, 2, 0)] {
        let model = EuclideanTransform::from_correspondences(before[i], before[j], after[i], after[j])
            .map_err(|_| MotionError::DegenerateTriple)?;
        let g = gamma_at(before[i], before[j], before[k], sigma)?;
        let d = g * model.apply(before[k]).distance(after[k]);
        lo = lo.min(d);
        hi = hi.max(d);
    }
    Ok((lo, hi))
}

/// Symmetrized distances of a triple over its common lifetime.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TripletDistances {
    /// Maximum over transitions of the per-transition minimum.
    pub d_min: f64,
    /// Maximum over transitions of the per-transition maximum.
    pub d_max: f64,
}

/// Degenerate transitions are skipped; if every transition is degenerate the
/// triple is rejected.
pub fn triplet_distances(
    a: &Trajectory,
    b: &Trajectory,
    c: &Trajectory,
    stats: &FlowStats,
) -> Result<TripletDistances, MotionError> {
    let frames = common_frames3(a, b, c);
    if frames.len() < 2 {
        return Err(MotionError::NoOverlap);
    }
    let mut result: Option<TripletDistances> = None;
    for t in frames.start..frames.end - 1 {
        let before = [position(a, t), position(b, t), position(c, t)];
        let after = [position(a, t + 1), position(b, t + 1), position(c, t + 1)];
        let Ok((lo, hi)) = transition_distances(before, after, stats.sigma(t)) else {
            continue;
        };
        result = Some(match result {
            None => TripletDistances { d_min: lo, d_max: hi },
            Some(r) => TripletDistances {
                d_min: r.d_min.max(lo),
                d_max: r.d_max.max(hi),
            },
        });
    }
    result.ok_or(MotionError::DegenerateTriple)
}

/// `c(d_min)` if both `c(d_min)` and `c(d_max)` are positive, `c(d_max)` if
/// both are negative, otherwise 0 (the two estimates disagree).
pub fn resolve_triplet_cost(d_min: f64, d_max: f64, params: &CostParams) -> f64 {
    let lo = params.triple_cost_at(d_min);
    let hi = params.triple_cost_at(d_max);
    if lo > 0.0 && hi > 0.0 {
        lo
    } else if lo < 0.0 && hi < 0.0 {
        hi
    } else {
        0.0
    }
}

pub fn triplet_cost(
    a: &Trajectory,
    b: &Trajectory,
    c: &Trajectory,
    stats: &FlowStats,
    params: &CostParams,
) -> Result<f64, MotionError> {
    let d = triplet_distances(a, b, c, stats)?;
    Ok(resolve_triplet_cost(d.d_min, d.d_max, params))
}
