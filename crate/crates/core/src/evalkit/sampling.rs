use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use crate::error::{Error, Result};
use crate::geom::{SurfaceMesh, Vec3};
use crate::scalar::Real;

pub const DEFAULT_POINTS: usize = 1000;

#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud<T> {
    pub points: Vec<Vec3<T>>,
}

impl<T: Real> PointCloud<T> {
    pub fn new(points: Vec<Vec3<T>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Precondition("point cloud is empty".into()));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::Precondition("point cloud has non-finite coordinates".into()));
        }
        Ok(Self { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn centroid(&self) -> Vec3<T> {
        let mut c = Vec3::zero();
        for &p in &self.points {
            c += p;
        }
        c / T::of_usize(self.points.len())
    }

    pub fn map(&self, f: impl Fn(Vec3<T>) -> Vec3<T>) -> Self {
        Self {
            points: self.points.iter().map(|&p| f(p)).collect(),
        }
    }
}

/// Area-weighted uniform samples on the surface.
pub fn sample_point_cloud<T: Real, R: Rng + ?Sized>(
    surface: &SurfaceMesh<T>,
    n_pts: usize,
    rng: &mut R,
) -> Result<PointCloud<T>> {
    if n_pts == 0 {
        return Err(Error::Precondition("n_pts must be at least 1".into()));
    }
    let areas: Vec<f64> = (0..surface.faces.len())
        .map(|f| surface.face_area(f).to_f64_lossy())
        .collect();
    let total: f64 = areas.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::ZeroArea);
    }
    let faces = WeightedIndex::new(&areas).map_err(|_| Error::ZeroArea)?;
    let points = (0..n_pts)
        .map(|_| {
            let [a, b, c] = surface.triangle(faces.sample(rng));
            let (r1, r2): (f64, f64) = (rng.random(), rng.random());
            let s = r1.sqrt();
            let (wa, wb, wc) = (T::lit(1.0 - s), T::lit(s * (1.0 - r2)), T::lit(s * r2));
            a * wa + b * wb + c * wc
        })
        .collect();
    Ok(PointCloud { points })
}
