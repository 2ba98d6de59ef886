use std::ops::{Deref, DerefMut};

use serde::{Deserialize, Serialize};

use super::element::{block_apply, block_quad, element_mass, element_stiffness, Block12, Material};
use crate::error::{Error, Result};
use crate::geom::{FaceAdjacency, TetMesh, Vec3};
use crate::linalg::{dot, CsrMatrix};
use crate::scalar::Real;

/// Displacement stored per tet corner: index `12 t + 3 c + d`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CornerField<T>(pub Vec<T>);

impl<T: Real> CornerField<T> {
    pub fn zeros(m: usize) -> Self {
        Self(vec![T::zero(); 12 * m])
    }

    pub fn tets(&self) -> usize {
        self.0.len() / 12
    }

    pub fn corner(&self, t: usize, c: usize) -> Vec3<T> {
        let i = 12 * t + 3 * c;
        Vec3::new(self.0[i], self.0[i + 1], self.0[i + 2])
    }

    pub fn set_corner(&mut self, t: usize, c: usize, v: Vec3<T>) {
        let i = 12 * t + 3 * c;
        self.0[i..i + 3].copy_from_slice(&v.to_array());
    }

    pub fn into_inner(self) -> Vec<T> {
        self.0
    }
}

impl<T> Deref for CornerField<T> {
    type Target = [T];
    fn deref(&self) -> &[T] {
        &self.0
    }
}

impl<T> DerefMut for CornerField<T> {
    fn deref_mut(&mut self) -> &mut [T] {
        &mut self.0
    }
}

/// Infinitesimal rigid motion `r` (translations x, y, z, then rotations about x, y, z)
/// evaluated at offset `p` from the rotation center.
pub fn rigid_motion_at<T: Real>(r: usize, p: Vec3<T>) -> Vec3<T> {
    let mut e = Vec3::zero();
    e[r % 3] = T::one();
    if r < 3 {
        e
    } else {
        e.cross(p)
    }
}

/// Block-diagonal mass and stiffness on corner fields plus the face jump operators.
#[derive(Clone, Debug)]
pub struct DiscreteOperators<T> {
    pub mass: Vec<Block12<T>>,
    pub stiffness: Vec<Block12<T>>,
    pub adjacency: FaceAdjacency<T>,
    pub sqrt_areas: Vec<T>,
}

/// Per-tet (unassembled) element matrices and jump data.
pub fn lift_discontinuous<T: Real>(
    mesh: &TetMesh<T>,
    material: &Material,
    adjacency: FaceAdjacency<T>,
) -> Result<DiscreteOperators<T>> {
    material.validate()?;
    if adjacency.tet_faces.len() != mesh.m() {
        return Err(Error::Precondition("adjacency belongs to a different mesh".into()));
    }
    let rho = T::lit(material.density);
    let mut mass = Vec::with_capacity(mesh.m());
    let mut stiffness = Vec::with_capacity(mesh.m());
    for t in 0..mesh.m() {
        let vol = mesh.tet_volume(t);
        if !(vol > T::zero()) {
            return Err(Error::InvalidMesh(format!("tet {t} has non-positive volume")));
        }
        mass.push(element_mass(vol, rho));
        stiffness.push(element_stiffness(mesh.corners(t), material));
    }
    let sqrt_areas = adjacency.areas.iter().map(|a| a.sqrt()).collect();
    Ok(DiscreteOperators {
        mass,
        stiffness,
        adjacency,
        sqrt_areas,
    })
}

impl<T: Real> DiscreteOperators<T> {
    pub fn m(&self) -> usize {
        self.mass.len()
    }

    pub fn dim(&self) -> usize {
        12 * self.m()
    }

    pub fn faces(&self) -> usize {
        self.adjacency.faces.len()
    }

    fn block_mul(blocks: &[Block12<T>], u: &[T]) -> Vec<T> {
        assert_eq!(u.len(), 12 * blocks.len());
        let mut out = vec![T::zero(); u.len()];
        for (t, b) in blocks.iter().enumerate() {
            block_apply(b, &u[12 * t..12 * t + 12], &mut out[12 * t..12 * t + 12]);
        }
        out
    }

    pub fn mass_mul(&self, u: &[T]) -> Vec<T> {
        Self::block_mul(&self.mass, u)
    }

    pub fn stiffness_mul(&self, u: &[T]) -> Vec<T> {
        Self::block_mul(&self.stiffness, u)
    }

    /// `u^T M v`
    pub fn m_dot(&self, u: &[T], v: &[T]) -> T {
        dot(u, &self.mass_mul(v))
    }

    pub fn m_norm_squared(&self, u: &[T]) -> T {
        assert_eq!(u.len(), self.dim());
        (0..self.m())
            .map(|t| block_quad(&self.mass[t], &u[12 * t..12 * t + 12]))
            .sum()
    }

    /// `u^T Q u / 2`
    pub fn elastic_energy(&self, u: &[T]) -> T {
        assert_eq!(u.len(), self.dim());
        let q: T = (0..self.m())
            .map(|t| block_quad(&self.stiffness[t], &u[12 * t..12 * t + 12]))
            .sum();
        q * T::lit(0.5)
    }

    /// Corner differences across face `f`: side 0 minus side 1, ordered by the face's sorted vertices.
    pub fn jump(&self, f: usize, u: &[T]) -> [T; 9] {
        let face = &self.adjacency.faces[f];
        let [a, b] = face.tets;
        let mut out = [T::zero(); 9];
        for j in 0..3 {
            let ca = 12 * a + 3 * face.corners[0][j] as usize;
            let cb = 12 * b + 3 * face.corners[1][j] as usize;
            for d in 0..3 {
                out[3 * j + d] = u[ca + d] - u[cb + d];
            }
        }
        out
    }

    pub fn jump_norm(&self, f: usize, u: &[T]) -> T {
        self.jump(f, u).iter().map(|&x| x * x).sum::<T>().sqrt()
    }

    pub fn jump_norms(&self, u: &[T]) -> Vec<T> {
        (0..self.faces()).map(|f| self.jump_norm(f, u)).collect()
    }

    pub fn discontinuity_energy(&self, u: &[T]) -> T {
        (0..self.faces())
            .map(|f| self.sqrt_areas[f] * self.jump_norm(f, u))
            .sum()
    }

    /// `u^T Q u / 2 + omega E_D(u)`
    pub fn objective(&self, u: &[T], omega: T) -> T {
        self.elastic_energy(u) + omega * self.discontinuity_energy(u)
    }

    fn block_csr(blocks: &[Block12<T>]) -> CsrMatrix<T> {
        let n = 12 * blocks.len();
        let mut trips = Vec::with_capacity(144 * blocks.len());
        for (t, b) in blocks.iter().enumerate() {
            for (i, row) in b.iter().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    trips.push((12 * t + i, 12 * t + j, v));
                }
            }
        }
        CsrMatrix::from_triplets(n, n, trips)
    }

    pub fn mass_csr(&self) -> CsrMatrix<T> {
        Self::block_csr(&self.mass)
    }

    pub fn stiffness_csr(&self) -> CsrMatrix<T> {
        Self::block_csr(&self.stiffness)
    }
}

/// Global rigid motions sampled at every corner (center: mean vertex).
pub fn rigid_corner_fields<T: Real>(mesh: &TetMesh<T>) -> Vec<CornerField<T>> {
    let center = mesh.vertices.iter().fold(Vec3::zero(), |s, &v| s + v) / T::of_usize(mesh.n().max(1));
    (0..6)
        .map(|r| {
            let mut u = CornerField::zeros(mesh.m());
            for (t, tet) in mesh.tets.iter().enumerate() {
                for (c, &v) in tet.iter().enumerate() {
                    u.set_corner(t, c, rigid_motion_at(r, mesh.vertices[v] - center));
                }
            }
            u
        })
        .collect()
}

/// `E_D(u) = sum_f sqrt(A_f) |J_f u|`
pub fn discontinuity_energy<T: Real>(ops: &DiscreteOperators<T>, u: &CornerField<T>) -> T {
    ops.discontinuity_energy(u)
}
