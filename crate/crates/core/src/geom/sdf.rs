use serde::{Deserialize, Serialize};

use super::bvh::TriangleBvh;
use super::inside::axis_line_hit;
use super::mesh::{Aabb, SurfaceMesh};
use super::vec::Vec3;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Cells of padding added around the sampled bounding box on every side.
pub const GRID_MARGIN: usize = 2;

/// Regular grid of signed distance samples (negative inside).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarGrid<T> {
    /// Node count per axis.
    pub resolution: [usize; 3],
    pub origin: Vec3<T>,
    pub spacing: T,
    /// Node values, x fastest.
    pub values: Vec<T>,
    /// Bounding box of the sampled shape; the grid extends `GRID_MARGIN` cells past it.
    pub bounds: Aabb<T>,
}

impl<T: Real> ScalarGrid<T> {
    /// Empty grid laid out over `bounds` with `cells` cells along the longest side.
    pub fn layout(bounds: Aabb<T>, cells: usize) -> Result<Self> {
        let longest = bounds.extent().max_component();
        if !(longest > T::zero()) {
            return Err(Error::Precondition("grid bounds are degenerate".into()));
        }
        if cells < 1 {
            return Err(Error::Precondition("grid needs at least one cell".into()));
        }
        let spacing = longest / T::of_usize(cells);
        let margin = T::of_usize(GRID_MARGIN);
        let origin = bounds.min - Vec3::splat(spacing * margin);
        let mut resolution = [0usize; 3];
        for (k, r) in resolution.iter_mut().enumerate() {
            let c = (bounds.extent()[k] / spacing).ceil().to_usize().unwrap_or(0).max(1);
            *r = c.min(cells) + 2 * GRID_MARGIN + 1;
        }
        let total = resolution.iter().product();
        Ok(Self {
            resolution,
            origin,
            spacing,
            values: vec![T::zero(); total],
            bounds,
        })
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.resolution[0] * (j + self.resolution[1] * k)
    }

    #[inline]
    pub fn node(&self, i: usize, j: usize, k: usize) -> Vec3<T> {
        self.origin + Vec3::new(T::of_usize(i), T::of_usize(j), T::of_usize(k)) * self.spacing
    }

    #[inline]
    pub fn value(&self, i: usize, j: usize, k: usize) -> T {
        self.values[self.index(i, j, k)]
    }

    pub fn cell_counts(&self) -> [usize; 3] {
        self.resolution.map(|r| r - 1)
    }

    /// Trilinear interpolation mean of the eight corners of cell `(i, j, k)`.
    pub fn cell_center_value(&self, i: usize, j: usize, k: usize) -> T {
        let mut s = T::zero();
        for c in 0..8 {
            s += self.value(i + (c & 1), j + (c >> 1 & 1), k + (c >> 2 & 1));
        }
        s / T::lit(8.0)
    }

    pub fn is_boundary_node(&self, i: usize, j: usize, k: usize) -> bool {
        let r = self.resolution;
        i == 0 || j == 0 || k == 0 || i + 1 == r[0] || j + 1 == r[1] || k + 1 == r[2]
    }

    /// Trilinear interpolation inside the grid. Outside it, the value at the
    /// nearest grid point plus the distance to it (a 1-Lipschitz extension).
    pub fn sample(&self, p: Vec3<T>) -> T {
        let mut idx = [0usize; 3];
        let mut frac = [T::zero(); 3];
        let mut clamped = p;
        for k in 0..3 {
            let hi = T::of_usize(self.resolution[k] - 1);
            let mut x = (p[k] - self.origin[k]) / self.spacing;
            if x < T::zero() {
                x = T::zero();
            }
            if x > hi {
                x = hi;
            }
            clamped[k] = self.origin[k] + x * self.spacing;
            let base = x.floor().min(hi - T::one()).max(T::zero());
            idx[k] = base.to_usize().unwrap_or(0);
            frac[k] = x - base;
        }
        let mut v = T::zero();
        for c in 0..8 {
            let (di, dj, dk) = (c & 1, c >> 1 & 1, c >> 2 & 1);
            let w = |d: usize, f: T| if d == 1 { f } else { T::one() - f };
            let weight = w(di, frac[0]) * w(dj, frac[1]) * w(dk, frac[2]);
            v += weight * self.value(idx[0] + di, idx[1] + dj, idx[2] + dk);
        }
        v + (p - clamped).norm()
    }

    /// Re-samples onto a grid with `cells` cells along the longest side of the same bounds.
    pub fn resample(&self, cells: usize) -> Result<Self> {
        let mut out = Self::layout(self.bounds, cells)?;
        let [nx, ny, nz] = out.resolution;
        for k in 0..nz {
            for j in 0..ny {
                for i in 0..nx {
                    let idx = out.index(i, j, k);
                    out.values[idx] = self.sample(out.node(i, j, k));
                }
            }
        }
        Ok(out)
    }
}

/// Samples the signed distance to `mesh` on a grid with `grid_n` cells along the
/// longest side of its bounding box plus a two-cell margin.
///
/// The sign is a majority vote of crossing parity along the three axis directions.
/// Open surfaces are accepted with a warning; parity still decides the sign.
pub fn voxelize_sdf<T: Real>(mesh: &SurfaceMesh<T>, grid_n: usize) -> Result<ScalarGrid<T>> {
    if grid_n < 8 {
        return Err(Error::Precondition(format!(
            "grid size must be at least 8, got {grid_n}"
        )));
    }
    if mesh.faces.is_empty() {
        return Err(Error::Precondition("cannot voxelize an empty mesh".into()));
    }
    if !mesh.is_closed() {
        log::warn!("voxelize_sdf: surface is not watertight; sign falls back to ray parity");
    }
    let mut grid = ScalarGrid::layout(mesh.bbox(), grid_n)?;
    let inside = parity_votes(mesh, &grid);
    let bvh = TriangleBvh::new(mesh);
    let [nx, ny, nz] = grid.resolution;
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                let idx = grid.index(i, j, k);
                let d = bvh.distance_squared(grid.node(i, j, k)).sqrt();
                grid.values[idx] = if inside[idx] >= 2 { -d } else { d };
            }
        }
    }
    Ok(grid)
}

/// Number of axes (0..=3) along which each grid node sees odd crossing parity.
fn parity_votes<T: Real>(mesh: &SurfaceMesh<T>, grid: &ScalarGrid<T>) -> Vec<u8> {
    let r = grid.resolution;
    let mut votes = vec![0u8; grid.values.len()];
    for axis in 0..3 {
        let (a1, a2) = ((axis + 1) % 3, (axis + 2) % 3);
        let (n1, n2) = (r[a1], r[a2]);
        let mut lines: Vec<Vec<T>> = vec![Vec::new(); n1 * n2];
        let to_index = |x: T, a: usize| (x - grid.origin[a]) / grid.spacing;
        for f in 0..mesh.faces.len() {
            let tri = mesh.triangle(f);
            let lo1 = tri.iter().map(|p| p[a1]).fold(T::infinity(), T::min);
            let hi1 = tri.iter().map(|p| p[a1]).fold(T::neg_infinity(), T::max);
            let lo2 = tri.iter().map(|p| p[a2]).fold(T::infinity(), T::min);
            let hi2 = tri.iter().map(|p| p[a2]).fold(T::neg_infinity(), T::max);
            let range = |lo: T, hi: T, a: usize, n: usize| {
                let s = to_index(lo, a).ceil().max(T::zero()).to_usize().unwrap_or(0);
                let e = to_index(hi, a).floor().to_isize().unwrap_or(-1);
                (s, if e < 0 { 0 } else { (e as usize + 1).min(n) })
            };
            let (s1, e1) = range(lo1, hi1, a1, n1);
            let (s2, e2) = range(lo2, hi2, a2, n2);
            for j2 in s2..e2 {
                for j1 in s1..e1 {
                    let u = grid.origin[a1] + T::of_usize(j1) * grid.spacing;
                    let v = grid.origin[a2] + T::of_usize(j2) * grid.spacing;
                    if let Some(d) = axis_line_hit(&tri, axis, u, v) {
                        lines[j1 + n1 * j2].push(d);
                    }
                }
            }
        }
        for j2 in 0..n2 {
            for j1 in 0..n1 {
                let hits = &mut lines[j1 + n1 * j2];
                hits.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
                let mut h = 0;
                for t in 0..r[axis] {
                    let x = grid.origin[axis] + T::of_usize(t) * grid.spacing;
                    while h < hits.len() && hits[h] < x {
                        h += 1;
                    }
                    if h % 2 == 1 {
                        let mut ijk = [0usize; 3];
                        ijk[axis] = t;
                        ijk[a1] = j1;
                        ijk[a2] = j2;
                        votes[grid.index(ijk[0], ijk[1], ijk[2])] += 1;
                    }
                }
            }
        }
    }
    votes
}
