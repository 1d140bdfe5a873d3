use core::ops::{Add, AddAssign, Mul, Neg, Sub};

use super::MotionError;

/// Separations at or below this many pixels are degenerate.
pub const DEGENERACY_EPS: f64 = 1e-6;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    #[inline]
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        libm::hypot(self.x, self.y)
    }

    #[inline]
    pub fn distance(self, o: Vec2) -> f64 {
        (self - o).norm()
    }

    /// Counter-clockwise rotation by `angle` radians.
    #[inline]
    pub fn rotate(self, angle: f64) -> Vec2 {
        let (s, c) = libm::sincos(angle);
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// `x ↦ s·R_α·x + v`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EuclideanTransform {
    pub angle: f64,
    pub scale: f64,
    pub translation: Vec2,
}

impl EuclideanTransform {
    pub const IDENTITY: EuclideanTransform = EuclideanTransform {
        angle: 0.0,
        scale: 1.0,
        translation: Vec2::ZERO,
    };

    pub fn new(angle: f64, scale: f64, translation: Vec2) -> Self {
        Self {
            angle,
            scale,
            translation,
        }
    }

    #[inline]
    pub fn apply(&self, p: Vec2) -> Vec2 {
        p.rotate(self.angle) * self.scale + self.translation
    }

    /// `self` after `first`.
    pub fn compose(&self, first: &EuclideanTransform) -> EuclideanTransform {
        EuclideanTransform {
            angle: self.angle + first.angle,
            scale: self.scale * first.scale,
            translation: self.apply(first.translation),
        }
    }

    /// Rotation and scaling about `center`, followed by `shift`.
    pub fn about(center: Vec2, angle: f64, scale: f64, shift: Vec2) -> Self {
        let translation = center - center.rotate(angle) * scale + shift;
        Self::new(angle, scale, translation)
    }

    /// The motion taking `a0 → a1` and `b0 → b1`.
    ///
    /// The rotation magnitude is the angle between the two difference
    /// vectors, its sign that of their cross product.
    pub fn from_correspondences(a0: Vec2, b0: Vec2, a1: Vec2, b1: Vec2) -> Result<Self, MotionError> {
        let before = a0 - b0;
        let after = a1 - b1;
        let n0 = before.norm();
        if !(n0 > DEGENERACY_EPS) {
            return Err(MotionError::DegeneratePair);
        }
        let n1 = after.norm();
        let scale = n1 / n0;
        let angle = if n1 > DEGENERACY_EPS {
            // arccos(dot / (n0·n1)), evaluated without its loss of precision
            // near 0 and π
            let cross = before.cross(after);
            let magnitude = libm::atan2(cross.abs(), before.dot(after));
            if cross < 0.0 {
                -magnitude
            } else {
                magnitude
            }
        } else {
            0.0
        };
        let translation = ((a1 + b1) - (a0 + b0).rotate(angle) * scale) * 0.5;
        Ok(Self::new(angle, scale, translation))
    }
}

/// Difference of two angles mapped to `(-π, π]`.
pub fn angle_difference(a: f64, b: f64) -> f64 {
    let tau = 2.0 * core::f64::consts::PI;
    let d = libm::remainder(a - b, tau);
    if d <= -core::f64::consts::PI {
        d + tau
    } else {
        d
    }
}
