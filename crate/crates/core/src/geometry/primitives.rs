use nalgebra::Vector3;

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;

/// Tolerance on unit normals and on rotation orthogonality.
pub const EPS_UNIT: f64 = 1e-9;

/// Normalizes `v`, rejecting zero or non-finite input.
pub fn unit(v: Vec3) -> Result<Vec3> {
    let n = v.norm();
    if !n.is_finite() || n == 0.0 {
        return Err(Error::InvalidParams(format!(
            "cannot normalize vector {:?}",
            v.as_slice()
        )));
    }
    Ok(v / n)
}

fn finite(v: &Vec3) -> bool {
    v.iter().all(|c| c.is_finite())
}

/// Canonical orthonormal frame `(e1, e2)` of the plane orthogonal to `normal`,
/// with `e1 × e2 = normal`.
///
/// `e1` points to the circle point of maximal x (ties broken by maximal y),
/// which makes angle 0 of every circle parametrization deterministic.
pub fn in_plane_frame(normal: &Vec3) -> (Vec3, Vec3) {
    let x = Vec3::x();
    let mut e1 = x - normal * normal.dot(&x);
    if e1.norm_squared() < 1e-18 {
        let y = Vec3::y();
        e1 = y - normal * normal.dot(&y);
    }
    let e1 = e1.normalize();
    let e2 = normal.cross(&e1);
    (e1, e2)
}

/// An affine plane given by a point and a unit normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plane {
    pub origin: Vec3,
    pub normal: Vec3,
}

impl Plane {
    pub fn new(origin: Vec3, normal: Vec3) -> Result<Self> {
        if !finite(&origin) {
            return Err(Error::InvalidParams("plane origin must be finite".into()));
        }
        Ok(Self {
            origin,
            normal: unit(normal)?,
        })
    }

    pub fn frame(&self) -> (Vec3, Vec3) {
        in_plane_frame(&self.normal)
    }

    /// Orthogonal projection of `p` onto the plane.
    pub fn project(&self, p: &Vec3) -> Vec3 {
        p - self.normal * (p - self.origin).dot(&self.normal)
    }

    /// Coordinates of the projection of `p` in the plane's canonical frame,
    /// relative to `origin`.
    pub fn coords(&self, p: &Vec3) -> [f64; 2] {
        let (e1, e2) = self.frame();
        let d = p - self.origin;
        [d.dot(&e1), d.dot(&e2)]
    }
}

/// Orthogonal projection onto `plane`, returned both as a point of space and
/// as 2D coordinates in the plane's frame.
pub fn project_point(plane: &Plane, p: &Vec3) -> (Vec3, [f64; 2]) {
    (plane.project(p), plane.coords(p))
}

/// A round circle in space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle3 {
    pub center: Vec3,
    pub normal: Vec3,
    pub radius: f64,
}

impl Circle3 {
    pub fn new(center: Vec3, normal: Vec3, radius: f64) -> Result<Self> {
        if !finite(&center) {
            return Err(Error::InvalidParams("circle center must be finite".into()));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidParams(format!(
                "circle radius must be positive, got {radius}"
            )));
        }
        Ok(Self {
            center,
            normal: unit(normal)?,
            radius,
        })
    }

    pub fn frame(&self) -> (Vec3, Vec3) {
        in_plane_frame(&self.normal)
    }

    pub fn point_at(&self, t: f64) -> Vec3 {
        let (e1, e2) = self.frame();
        self.center + (e1 * t.cos() + e2 * t.sin()) * self.radius
    }

    pub fn is_valid(&self) -> bool {
        finite(&self.center)
            && self.radius.is_finite()
            && self.radius > 0.0
            && (self.normal.norm() - 1.0).abs() < EPS_UNIT
    }
}

/// Closed tube neighbourhood of radius `tube_radius` around a circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolidTorus {
    pub circle: Circle3,
    pub tube_radius: f64,
}

impl SolidTorus {
    pub fn new(circle: Circle3, tube_radius: f64) -> Result<Self> {
        if !(tube_radius.is_finite() && tube_radius > 0.0 && tube_radius < circle.radius) {
            return Err(Error::InvalidParams(format!(
                "tube radius must lie in (0, {}), got {tube_radius}",
                circle.radius
            )));
        }
        Ok(Self {
            circle,
            tube_radius,
        })
    }

    /// Torus with central circle `(center, normal, major)` and tube `minor`.
    pub fn from_parts(center: Vec3, normal: Vec3, major: f64, minor: f64) -> Result<Self> {
        Self::new(Circle3::new(center, normal, major)?, minor)
    }

    pub fn center(&self) -> Vec3 {
        self.circle.center
    }

    pub fn major_radius(&self) -> f64 {
        self.circle.radius
    }

    pub fn ratio(&self) -> f64 {
        self.tube_radius / self.circle.radius
    }

    /// Euclidean diameter `2(R + r)`.
    pub fn diameter(&self) -> f64 {
        2.0 * (self.circle.radius + self.tube_radius)
    }

    pub fn contains_point(&self, p: &Vec3) -> bool {
        super::point_circle_distance(p, &self.circle) <= self.tube_radius
    }

    pub fn is_valid(&self) -> bool {
        self.circle.is_valid()
            && self.tube_radius.is_finite()
            && self.tube_radius > 0.0
            && self.tube_radius < self.circle.radius
    }
}
