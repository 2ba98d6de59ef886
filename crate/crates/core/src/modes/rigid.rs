//! Per-tet rigid coordinates: each tet carries six mass-orthonormal rigid motions.

use nalgebra::{DMatrix, Matrix6};

use crate::fem::discrete::rigid_motion_at;
use crate::fem::DiscreteOperators;
use crate::geom::TetMesh;
use crate::linalg::dot;
use crate::scalar::Real;

pub(crate) struct RigidSpace<T> {
    /// `basis[t][i][r]`: corner-space row `i` of rigid basis vector `r` for tet `t`.
    basis: Vec<[[T; 6]; 12]>,
    /// Jump rows of each face for its two sides: `J_f u = side0 c_a - side1 c_b`.
    face_rows: Vec<[[[T; 6]; 9]; 2]>,
    face_tets: Vec<[usize; 2]>,
    sqrt_areas: Vec<T>,
    incident: Vec<Vec<(usize, usize)>>,
}

impl<T: Real> RigidSpace<T> {
    pub fn new(mesh: &TetMesh<T>, ops: &DiscreteOperators<T>) -> Self {
        let mut basis = Vec::with_capacity(mesh.m());
        for t in 0..mesh.m() {
            let centroid = mesh.tet_centroid(t);
            let corners = mesh.corners(t);
            let g = DMatrix::<f64>::from_fn(12, 6, |i, r| {
                rigid_motion_at(r, corners[i / 3] - centroid)[i % 3].to_f64_lossy()
            });
            let m = DMatrix::<f64>::from_fn(12, 12, |i, j| ops.mass[t][i][j].to_f64_lossy());
            let gram: Matrix6<f64> = Matrix6::from_iterator((g.transpose() * &m * &g).iter().copied());
            let l = gram.cholesky().expect("rigid Gram matrix is SPD").l();
            let linv_t = l.try_inverse().expect("invertible").transpose();
            let r = &g * DMatrix::from_iterator(6, 6, linv_t.iter().copied());
            let mut b = [[T::zero(); 6]; 12];
            for (i, row) in b.iter_mut().enumerate() {
                for (k, v) in row.iter_mut().enumerate() {
                    *v = T::lit(r[(i, k)]);
                }
            }
            basis.push(b);
        }
        let mut face_rows = Vec::with_capacity(ops.faces());
        let mut face_tets = Vec::with_capacity(ops.faces());
        let mut incident = vec![Vec::new(); mesh.m()];
        for (f, face) in ops.adjacency.faces.iter().enumerate() {
            let mut rows = [[[T::zero(); 6]; 9]; 2];
            for (s, side) in rows.iter_mut().enumerate() {
                let t = face.tets[s];
                incident[t].push((f, s));
                for j in 0..3 {
                    let c = face.corners[s][j] as usize;
                    for d in 0..3 {
                        side[3 * j + d] = basis[t][3 * c + d];
                    }
                }
            }
            face_rows.push(rows);
            face_tets.push(face.tets);
        }
        Self {
            basis,
            face_rows,
            face_tets,
            sqrt_areas: ops.sqrt_areas.clone(),
            incident,
        }
    }

    pub fn dim(&self) -> usize {
        6 * self.basis.len()
    }

    pub fn faces(&self) -> usize {
        self.face_rows.len()
    }

    pub fn to_corners(&self, c: &[T]) -> Vec<T> {
        let mut u = vec![T::zero(); 12 * self.basis.len()];
        for (t, b) in self.basis.iter().enumerate() {
            for i in 0..12 {
                u[12 * t + i] = dot(&b[i], &c[6 * t..6 * t + 6]);
            }
        }
        u
    }

    /// Mass-orthogonal projection of a corner field onto rigid coordinates.
    pub fn project_corners(&self, ops: &DiscreteOperators<T>, u: &[T]) -> Vec<T> {
        let mu = ops.mass_mul(u);
        let mut c = vec![T::zero(); self.dim()];
        for (t, b) in self.basis.iter().enumerate() {
            for r in 0..6 {
                c[6 * t + r] = (0..12).map(|i| b[i][r] * mu[12 * t + i]).sum();
            }
        }
        c
    }

    pub fn sqrt_area(&self, f: usize) -> T {
        self.sqrt_areas[f]
    }

    pub fn jump(&self, f: usize, c: &[T]) -> [T; 9] {
        let [a, b] = self.face_tets[f];
        let [ra, rb] = &self.face_rows[f];
        std::array::from_fn(|i| dot(&ra[i], &c[6 * a..6 * a + 6]) - dot(&rb[i], &c[6 * b..6 * b + 6]))
    }

    pub fn jump_norm(&self, f: usize, c: &[T]) -> T {
        self.jump(f, c).iter().map(|&x| x * x).sum::<T>().sqrt()
    }

    /// `out = sum_f w_f K_f^T K_f c`
    pub fn weighted_apply(&self, w: &[T], c: &[T], out: &mut [T]) {
        out.iter_mut().for_each(|v| *v = T::zero());
        for f in 0..self.faces() {
            let j = self.jump(f, c);
            let [a, b] = self.face_tets[f];
            let [ra, rb] = &self.face_rows[f];
            for r in 0..6 {
                let mut sa = T::zero();
                let mut sb = T::zero();
                for i in 0..9 {
                    sa += ra[i][r] * j[i];
                    sb += rb[i][r] * j[i];
                }
                out[6 * a + r] += w[f] * sa;
                out[6 * b + r] -= w[f] * sb;
            }
        }
    }

    /// Inverses of the 6x6 diagonal blocks of the weighted operator.
    pub fn block_jacobi(&self, w: &[T]) -> Vec<Matrix6<f64>> {
        self.incident
            .iter()
            .map(|inc| {
                let mut blk = Matrix6::<f64>::zeros();
                for &(f, s) in inc {
                    let rows = &self.face_rows[f][s];
                    let wf = w[f].to_f64_lossy();
                    for p in 0..6 {
                        for q in 0..6 {
                            let v: f64 = (0..9)
                                .map(|i| rows[i][p].to_f64_lossy() * rows[i][q].to_f64_lossy())
                                .sum();
                            blk[(p, q)] += wf * v;
                        }
                    }
                }
                let reg = 1e-12 * blk.trace().max(f64::MIN_POSITIVE);
                for p in 0..6 {
                    blk[(p, p)] += reg;
                }
                blk.try_inverse().unwrap_or_else(Matrix6::identity)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{lift_discontinuous, Material};
    use crate::geom::{primitives, tet_adjacency};

    #[test]
    fn basis_is_mass_orthonormal_and_jumps_agree() {
        let mesh = primitives::tet_block::<f64>(2, 1, 1, 0.5);
        let ops = lift_discontinuous(&mesh, &Material::default(), tet_adjacency(&mesh).unwrap()).unwrap();
        let space = RigidSpace::new(&mesh, &ops);
        let c: Vec<f64> = (0..space.dim()).map(|i| ((i * 31 % 17) as f64 - 8.0) / 7.0).collect();
        let u = space.to_corners(&c);
        assert!((ops.m_norm_squared(&u) - dot(&c, &c)).abs() < 1e-12);
        let back = space.project_corners(&ops, &u);
        for (a, b) in c.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
        for f in 0..ops.faces() {
            assert!((space.jump_norm(f, &c) - ops.jump_norm(f, &u)).abs() < 1e-12);
        }
        assert!(ops.elastic_energy(&u) < 1e-12);
    }
}
