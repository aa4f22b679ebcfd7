use nalgebra::{Matrix3, Rotation3, Unit};

use super::primitives::{Circle3, SolidTorus, Vec3, EPS_UNIT};
use crate::error::{Error, Result};

/// Orientation-preserving similarity `x ↦ scale · R x + translation`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Similarity {
    pub scale: f64,
    pub rotation: Rotation3<f64>,
    pub translation: Vec3,
}

impl Similarity {
    pub fn new(scale: f64, rotation: Matrix3<f64>, translation: Vec3) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidParams(format!("similarity scale must be positive, got {scale}")));
        }
        let ortho = (rotation.transpose() * rotation - Matrix3::identity()).norm();
        if !(ortho < EPS_UNIT) || (rotation.determinant() - 1.0).abs() > EPS_UNIT {
            return Err(Error::InvalidParams(
                "rotation must be orthogonal with determinant +1".into(),
            ));
        }
        if !translation.iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidParams("translation must be finite".into()));
        }
        Ok(Self {
            scale,
            rotation: Rotation3::from_matrix_unchecked(rotation),
            translation,
        })
    }

    pub fn identity() -> Self {
        Self {
            scale: 1.0,
            rotation: Rotation3::identity(),
            translation: Vec3::zeros(),
        }
    }

    /// Rotation by `angle` about the line through `point` with direction `axis`
    /// (counterclockwise when looking against `axis`).
    pub fn rotation_about(point: Vec3, axis: Vec3, angle: f64) -> Self {
        let rotation = Rotation3::from_axis_angle(&Unit::new_normalize(axis), angle);
        Self {
            scale: 1.0,
            rotation,
            translation: point - rotation * point,
        }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Similarity) -> Similarity {
        Similarity {
            scale: self.scale * other.scale,
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation * self.scale + self.translation,
        }
    }

    pub fn apply_point(&self, p: &Vec3) -> Vec3 {
        self.rotation * p * self.scale + self.translation
    }

    pub fn apply_direction(&self, v: &Vec3) -> Vec3 {
        self.rotation * v
    }
}

/// Things that can be carried by a similarity.
pub trait Transform: Sized {
    fn transformed(&self, s: &Similarity) -> Self;
}

impl Transform for Vec3 {
    fn transformed(&self, s: &Similarity) -> Self {
        s.apply_point(self)
    }
}

impl Transform for Circle3 {
    fn transformed(&self, s: &Similarity) -> Self {
        Circle3 {
            center: s.apply_point(&self.center),
            normal: s.apply_direction(&self.normal),
            radius: self.radius * s.scale,
        }
    }
}

impl Transform for SolidTorus {
    fn transformed(&self, s: &Similarity) -> Self {
        SolidTorus {
            circle: self.circle.transformed(s),
            tube_radius: self.tube_radius * s.scale,
        }
    }
}

pub fn apply_similarity<T: Transform>(s: &Similarity, x: &T) -> T {
    x.transformed(s)
}
