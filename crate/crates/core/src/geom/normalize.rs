use serde::{Deserialize, Serialize};

use super::mesh::SurfaceMesh;
use super::vec::Vec3;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Uniform scale + translation mapping the input into the unit box:
/// `out = (v - center) * scale`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitBoxTransform<T> {
    pub center: Vec3<T>,
    pub scale: T,
}

impl<T: Real> UnitBoxTransform<T> {
    pub fn identity() -> Self {
        Self {
            center: Vec3::zero(),
            scale: T::one(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.center == Vec3::zero() && self.scale == T::one()
    }

    pub fn apply(&self, v: Vec3<T>) -> Vec3<T> {
        snap((v - self.center) * self.scale)
    }

    /// Maps normalized coordinates back to the input frame (up to the snapping quantum).
    pub fn invert(&self, v: Vec3<T>) -> Vec3<T> {
        v / self.scale + self.center
    }
}

/// Normalized coordinates are rounded to a power-of-two grid well below any
/// geometric tolerance (2^-39 for f64). Inputs that differ only by a uniform scale
/// then normalize to bit-identical meshes, and the operation is idempotent.
pub fn quantum<T: Real>() -> T {
    let bits = (T::epsilon().log2() * T::lit(0.75)).floor();
    T::lit(2.0).powf(bits)
}

#[inline]
fn snap1<T: Real>(x: T) -> T {
    let q = quantum::<T>();
    (x / q).round() * q
}

#[inline]
fn snap<T: Real>(v: Vec3<T>) -> Vec3<T> {
    Vec3::new(snap1(v.x), snap1(v.y), snap1(v.z))
}

fn is_normalized<T: Real>(mesh: &SurfaceMesh<T>) -> bool {
    let b = mesh.bbox();
    let e = b.extent();
    let longest = e.max_component();
    if longest != T::one() {
        return false;
    }
    let half = T::lit(0.5);
    for k in 0..3 {
        if b.min[k] != -b.max[k] || (e[k] == T::one() && b.max[k] != half) {
            return false;
        }
    }
    mesh.vertices.iter().all(|&v| snap(v) == v)
}

/// Rescales and recenters so the longest side of the bounding box is 1 and the box
/// is centered at the origin.
pub fn normalize_to_unit_box<T: Real>(mesh: &SurfaceMesh<T>) -> Result<(SurfaceMesh<T>, UnitBoxTransform<T>)> {
    if mesh.vertices.is_empty() {
        return Err(Error::Precondition("cannot normalize an empty mesh".into()));
    }
    if is_normalized(mesh) {
        return Ok((mesh.clone(), UnitBoxTransform::identity()));
    }
    let b = mesh.bbox();
    let longest = b.extent().max_component();
    if !(longest > T::zero()) || !longest.is_finite() {
        return Err(Error::Precondition("degenerate mesh: all vertices coincide".into()));
    }
    let t = UnitBoxTransform {
        center: b.center(),
        scale: T::one() / longest,
    };
    Ok((mesh.map_vertices(|v| t.apply(v)), t))
}
