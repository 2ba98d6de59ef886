use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::metrics::EulerConvention;
use super::sampling::PointCloud;
use crate::error::{Error, Result};
use crate::geom::vec::{mat3_apply, mat3_det, mat3_identity, mat3_mul, mat3_transpose};
use crate::geom::{Mat3, Vec3};
use crate::scalar::Real;

/// A rigid transform `x -> R x + T`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pose<T> {
    pub r: Mat3<T>,
    pub t: Vec3<T>,
}

impl<T: Real> Pose<T> {
    /// Checks `RᵀR = I` to 1e-8 and `det R = +1`.
    pub fn new(r: Mat3<T>, t: Vec3<T>) -> Result<Self> {
        let rtr = mat3_mul(&mat3_transpose(&r), &r);
        let id = mat3_identity::<T>();
        let tol = T::lit(1e-8);
        let orthonormal = (0..3).all(|i| (0..3).all(|j| (rtr[i][j] - id[i][j]).abs() <= tol));
        if !orthonormal || !((mat3_det(&r) - T::one()).abs() <= tol) || !t.is_finite() {
            return Err(Error::Precondition(
                "pose rotation is not a proper orthonormal matrix".into(),
            ));
        }
        Ok(Self { r, t })
    }

    pub fn identity() -> Self {
        Self {
            r: mat3_identity(),
            t: Vec3::zero(),
        }
    }

    pub fn apply(&self, p: Vec3<T>) -> Vec3<T> {
        mat3_apply(&self.r, p) + self.t
    }

    pub fn rotate(&self, p: Vec3<T>) -> Vec3<T> {
        mat3_apply(&self.r, p)
    }

    pub fn apply_cloud(&self, cloud: &PointCloud<T>) -> PointCloud<T> {
        cloud.map(|p| self.apply(p))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            r: mat3_mul(&self.r, &other.r),
            t: self.apply(other.t),
        }
    }
}

/// Uniformly distributed rotation (normalized Gaussian quaternion).
pub fn random_rotation<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Mat3<T> {
    let q = loop {
        let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            break q.map(|x| x / n);
        }
    };
    let [w, x, y, z] = q;
    let m = [
        [
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
        ],
        [
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
        ],
        [
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        ],
    ];
    m.map(|row| row.map(T::lit))
}

/// Centers the cloud and applies a random rotation; returns the pose that maps the
/// canonical cloud back onto the input.
pub fn canonicalize_piece<T: Real, R: Rng + ?Sized>(cloud: &PointCloud<T>, rng: &mut R) -> (PointCloud<T>, Pose<T>) {
    let c = cloud.centroid();
    let r0 = random_rotation::<T, _>(rng);
    let rt = mat3_transpose(&r0);
    let canonical = cloud.map(|p| mat3_apply(&rt, p - c));
    (canonical, Pose { r: r0, t: c })
}

fn axis_rotation<T: Real>(axis: usize, angle: T) -> Mat3<T> {
    let (s, c) = angle.sin_cos();
    let (o, z) = (T::one(), T::zero());
    match axis {
        0 => [[o, z, z], [z, c, -s], [z, s, c]],
        1 => [[c, z, s], [z, o, z], [-s, z, c]],
        _ => [[c, -s, z], [s, c, z], [z, z, o]],
    }
}

/// Rotation from angles in radians: intrinsic XYZ is `Rx(a) Ry(b) Rz(c)`, extrinsic
/// XYZ is `Rz(c) Ry(b) Rx(a)`.
pub fn rotation_from_euler<T: Real>(angles: [T; 3], convention: EulerConvention) -> Mat3<T> {
    let [rx, ry, rz] = [0, 1, 2].map(|i| axis_rotation(i, angles[i]));
    match convention {
        EulerConvention::IntrinsicXyz => mat3_mul(&mat3_mul(&rx, &ry), &rz),
        EulerConvention::ExtrinsicXyz => mat3_mul(&mat3_mul(&rz, &ry), &rx),
    }
}

/// Euler angles in radians (inverse of [`rotation_from_euler`]). At gimbal lock the
/// third angle is set to zero.
pub fn euler_angles<T: Real>(r: &Mat3<T>, convention: EulerConvention) -> [T; 3] {
    let one = T::one();
    let gimbal = T::one() - T::lit(1e-12);
    match convention {
        EulerConvention::IntrinsicXyz => {
            let s = r[0][2].max(-one).min(one);
            let b = s.asin();
            if s.abs() < gimbal {
                [(-r[1][2]).atan2(r[2][2]), b, (-r[0][1]).atan2(r[0][0])]
            } else {
                [r[2][1].atan2(r[1][1]), b, T::zero()]
            }
        }
        EulerConvention::ExtrinsicXyz => {
            let s = (-r[2][0]).max(-one).min(one);
            let b = s.asin();
            if s.abs() < gimbal {
                [r[2][1].atan2(r[2][2]), b, r[1][0].atan2(r[0][0])]
            } else {
                [(-r[1][2]).atan2(r[1][1]), b, T::zero()]
            }
        }
    }
}
