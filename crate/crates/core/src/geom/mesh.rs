use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::vec::Vec3;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Triangle surface with counter-clockwise, outward-facing faces.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SurfaceMesh<T> {
    pub vertices: Vec<Vec3<T>>,
    pub faces: Vec<[usize; 3]>,
}

/// Axis-aligned bounding box.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aabb<T> {
    pub min: Vec3<T>,
    pub max: Vec3<T>,
}

impl<T: Real> Aabb<T> {
    pub fn empty() -> Self {
        Self {
            min: Vec3::splat(T::infinity()),
            max: Vec3::splat(T::neg_infinity()),
        }
    }

    pub fn from_points<'a>(points: impl IntoIterator<Item = &'a Vec3<T>>) -> Self {
        let mut b = Self::empty();
        for p in points {
            b.grow(*p);
        }
        b
    }

    #[inline]
    pub fn grow(&mut self, p: Vec3<T>) {
        self.min = self.min.min(p);
        self.max = self.max.max(p);
    }

    pub fn union(&self, o: &Self) -> Self {
        Self {
            min: self.min.min(o.min),
            max: self.max.max(o.max),
        }
    }

    pub fn extent(&self) -> Vec3<T> {
        self.max - self.min
    }

    pub fn center(&self) -> Vec3<T> {
        (self.min + self.max) * T::lit(0.5)
    }

    /// Squared distance from `p` to the box (zero inside).
    pub fn distance_squared(&self, p: Vec3<T>) -> T {
        let mut d = T::zero();
        for i in 0..3 {
            let v = if p[i] < self.min[i] {
                self.min[i] - p[i]
            } else if p[i] > self.max[i] {
                p[i] - self.max[i]
            } else {
                T::zero()
            };
            d += v * v;
        }
        d
    }
}

impl<T: Real> SurfaceMesh<T> {
    pub fn new(vertices: Vec<Vec3<T>>, faces: Vec<[usize; 3]>) -> Self {
        Self { vertices, faces }
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    #[inline]
    pub fn triangle(&self, f: usize) -> [Vec3<T>; 3] {
        let [a, b, c] = self.faces[f];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn face_area(&self, f: usize) -> T {
        let [a, b, c] = self.triangle(f);
        (b - a).cross(c - a).norm() * T::lit(0.5)
    }

    pub fn area(&self) -> T {
        (0..self.faces.len()).map(|f| self.face_area(f)).sum()
    }

    /// Enclosed volume by the divergence theorem; positive for outward orientation.
    pub fn signed_volume(&self) -> T {
        let six = T::lit(6.0);
        (0..self.faces.len())
            .map(|f| {
                let [a, b, c] = self.triangle(f);
                a.dot(b.cross(c)) / six
            })
            .sum()
    }

    /// Volume-weighted centroid of the enclosed solid; falls back to the vertex mean
    /// for degenerate (zero-volume) surfaces.
    pub fn volume_centroid(&self) -> Vec3<T> {
        let mut acc = Vec3::zero();
        let mut vol = T::zero();
        for f in 0..self.faces.len() {
            let [a, b, c] = self.triangle(f);
            let v = a.dot(b.cross(c)) / T::lit(6.0);
            acc += (a + b + c) * (v / T::lit(4.0));
            vol += v;
        }
        if vol.abs() > T::epsilon() {
            acc / vol
        } else {
            self.vertex_mean()
        }
    }

    pub fn vertex_mean(&self) -> Vec3<T> {
        if self.vertices.is_empty() {
            return Vec3::zero();
        }
        let s = self.vertices.iter().fold(Vec3::zero(), |acc, &v| acc + v);
        s / T::of_usize(self.vertices.len())
    }

    pub fn bbox(&self) -> Aabb<T> {
        Aabb::from_points(&self.vertices)
    }

    /// Checks index ranges and rejects zero-area faces.
    pub fn validate(&self) -> Result<()> {
        let n = self.vertices.len();
        for (i, f) in self.faces.iter().enumerate() {
            if f.iter().any(|&v| v >= n) {
                return Err(Error::InvalidMesh(format!("face {i} references vertex outside 0..{n}")));
            }
            if !(self.face_area(i) > T::zero()) {
                return Err(Error::InvalidMesh(format!("face {i} has zero area")));
            }
        }
        if self.vertices.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidMesh("non-finite vertex coordinate".into()));
        }
        Ok(())
    }

    /// Edges used by a number of faces other than two, or used twice in the same
    /// direction. Empty for a closed, consistently oriented surface.
    pub fn boundary_or_nonmanifold_edges(&self) -> Vec<(usize, usize)> {
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for f in &self.faces {
            for k in 0..3 {
                *directed.entry((f[k], f[(k + 1) % 3])).or_default() += 1;
            }
        }
        let mut bad: Vec<(usize, usize)> = directed
            .iter()
            .filter(|(&(a, b), &c)| c != 1 || directed.get(&(b, a)).copied() != Some(1))
            .map(|(&e, _)| e)
            .collect();
        bad.sort_unstable();
        bad
    }

    pub fn is_closed(&self) -> bool {
        !self.faces.is_empty() && self.boundary_or_nonmanifold_edges().is_empty()
    }

    pub fn map_vertices(&self, f: impl Fn(Vec3<T>) -> Vec3<T>) -> Self {
        Self {
            vertices: self.vertices.iter().map(|&v| f(v)).collect(),
            faces: self.faces.clone(),
        }
    }
}

/// Tetrahedral volume mesh.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TetMesh<T> {
    pub vertices: Vec<Vec3<T>>,
    pub tets: Vec<[usize; 4]>,
}

/// Signed volume of the tetrahedron `(a, b, c, d)`; positive when `d` lies on the
/// side of `abc` that sees it counter-clockwise.
#[inline]
pub fn tet_signed_volume<T: Real>(a: Vec3<T>, b: Vec3<T>, c: Vec3<T>, d: Vec3<T>) -> T {
    (b - a).cross(c - a).dot(d - a) / T::lit(6.0)
}

/// Local corner triples of the four tet faces, ordered so that the face normal
/// points away from the omitted corner for a positively oriented tet.
pub const TET_FACES: [[usize; 3]; 4] = [[1, 2, 3], [0, 3, 2], [0, 1, 3], [0, 2, 1]];

impl<T: Real> TetMesh<T> {
    pub fn new(vertices: Vec<Vec3<T>>, tets: Vec<[usize; 4]>) -> Self {
        Self { vertices, tets }
    }

    /// Vertex count.
    #[inline]
    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    /// Tetrahedron count.
    #[inline]
    pub fn m(&self) -> usize {
        self.tets.len()
    }

    #[inline]
    pub fn corners(&self, t: usize) -> [Vec3<T>; 4] {
        let [a, b, c, d] = self.tets[t];
        [self.vertices[a], self.vertices[b], self.vertices[c], self.vertices[d]]
    }

    pub fn tet_volume(&self, t: usize) -> T {
        let [a, b, c, d] = self.corners(t);
        tet_signed_volume(a, b, c, d)
    }

    pub fn tet_centroid(&self, t: usize) -> Vec3<T> {
        let [a, b, c, d] = self.corners(t);
        (a + b + c + d) * T::lit(0.25)
    }

    pub fn volume(&self) -> T {
        (0..self.m()).map(|t| self.tet_volume(t)).sum()
    }

    pub fn bbox(&self) -> Aabb<T> {
        Aabb::from_points(&self.vertices)
    }

    /// Swaps two corners of every negatively oriented tet.
    pub fn fix_orientation(&mut self) {
        for t in 0..self.tets.len() {
            if self.tet_volume(t) < T::zero() {
                self.tets[t].swap(2, 3);
            }
        }
    }

    /// Index range, distinct corners and strictly positive volume.
    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        for (i, t) in self.tets.iter().enumerate() {
            if t.iter().any(|&v| v >= n) {
                return Err(Error::InvalidMesh(format!("tet {i} references vertex outside 0..{n}")));
            }
            if !(self.tet_volume(i) > T::zero()) {
                return Err(Error::InvalidMesh(format!("tet {i} has non-positive volume")));
            }
        }
        if self.vertices.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidMesh("non-finite vertex coordinate".into()));
        }
        Ok(())
    }

    /// Uniformly scaled copy (used for scaling-law checks).
    pub fn scaled(&self, s: T) -> Self {
        Self {
            vertices: self.vertices.iter().map(|&v| v * s).collect(),
            tets: self.tets.clone(),
        }
    }

    /// Boundary faces of the mesh as `(tet, local face index)`, sorted.
    pub fn boundary_faces(&self) -> Vec<(usize, usize)> {
        let mut count: HashMap<[usize; 3], Vec<(usize, usize)>> = HashMap::new();
        for (t, tet) in self.tets.iter().enumerate() {
            for (lf, f) in TET_FACES.iter().enumerate() {
                let mut key = [tet[f[0]], tet[f[1]], tet[f[2]]];
                key.sort_unstable();
                count.entry(key).or_default().push((t, lf));
            }
        }
        let mut out: Vec<(usize, usize)> = count.into_values().filter(|v| v.len() == 1).map(|v| v[0]).collect();
        out.sort_unstable();
        out
    }

    /// Vertices touched by at least one boundary face, ascending.
    pub fn boundary_vertices(&self) -> Vec<usize> {
        let mut vs: Vec<usize> = self
            .boundary_faces()
            .into_iter()
            .flat_map(|(t, lf)| TET_FACES[lf].map(|c| self.tets[t][c]))
            .collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }
}
