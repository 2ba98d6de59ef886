//! Best piecewise rigid field for a fixed partition of the tets.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector, Matrix6, Vector6};

use crate::fem::discrete::rigid_motion_at;
use crate::fem::DiscreteOperators;
use crate::geom::{TetMesh, Vec3};
use crate::linalg::sym_eigen;
use crate::scalar::Real;
use crate::unionfind::UnionFind;

/// Solution of one partition: energy `E_D`, per-piece motion coefficients, and
/// whether the reweighting met its tolerance.
pub(crate) struct PieceSolution {
    pub energy: f64,
    pub coeffs: Vec<Vector6<f64>>,
    pub converged: bool,
}

pub(crate) struct PartitionSolver<'a, T> {
    mesh: &'a TetMesh<T>,
    ops: &'a DiscreteOperators<T>,
    center: Vec3<T>,
    /// Per face: the 9x6 rigid generator rows at its three shared vertices.
    face_gen: Vec<[[f64; 6]; 9]>,
    /// Per tet: `G^T M G`.
    gram: Vec<Matrix6<f64>>,
    /// Per constraint field and tet: `G^T M q`.
    constraint: Vec<Vec<Vector6<f64>>>,
}

impl<'a, T: Real> PartitionSolver<'a, T> {
    pub fn new(mesh: &'a TetMesh<T>, ops: &'a DiscreteOperators<T>) -> Self {
        let center = mesh.vertices.iter().fold(Vec3::zero(), |s, &v| s + v) / T::of_usize(mesh.n());
        let face_gen = ops
            .adjacency
            .faces
            .iter()
            .map(|face| {
                std::array::from_fn(|i| {
                    let p = mesh.vertices[face.vertices[i / 3]] - center;
                    std::array::from_fn(|r| rigid_motion_at(r, p)[i % 3].to_f64_lossy())
                })
            })
            .collect();
        let gram = (0..mesh.m())
            .map(|t| {
                let g = Self::tet_gen(mesh, center, t);
                let mut out = Matrix6::zeros();
                for i in 0..12 {
                    for j in 0..12 {
                        let mij = ops.mass[t][i][j].to_f64_lossy();
                        if mij != 0.0 {
                            for p in 0..6 {
                                for q in 0..6 {
                                    out[(p, q)] += g[i][p] * mij * g[j][q];
                                }
                            }
                        }
                    }
                }
                out
            })
            .collect();
        Self {
            mesh,
            ops,
            center,
            face_gen,
            gram,
            constraint: Vec::new(),
        }
    }

    fn tet_gen(mesh: &TetMesh<T>, center: Vec3<T>, t: usize) -> [[f64; 6]; 12] {
        let tet = mesh.tets[t];
        std::array::from_fn(|i| {
            let p = mesh.vertices[tet[i / 3]] - center;
            std::array::from_fn(|r| rigid_motion_at(r, p)[i % 3].to_f64_lossy())
        })
    }

    /// Projects each tet's part of `u` to `G^T M u_t` (6 values per tet).
    pub fn moments(&self, u: &[T]) -> Vec<Vector6<f64>> {
        let mu = self.ops.mass_mul(u);
        (0..self.mesh.m())
            .map(|t| {
                let g = Self::tet_gen(self.mesh, self.center, t);
                Vector6::from_fn(|r, _| (0..12).map(|i| g[i][r] * mu[12 * t + i].to_f64_lossy()).sum())
            })
            .collect()
    }

    /// Best rigid motion of each tet, in the global frame, fitted to `u`.
    pub fn tet_motions(&self, u: &[T]) -> Vec<Vector6<f64>> {
        self.moments(u)
            .iter()
            .zip(&self.gram)
            .map(|(b, g)| g.cholesky().map(|c| c.solve(b)).unwrap_or_else(Vector6::zeros))
            .collect()
    }

    pub fn set_constraints(&mut self, fields: &[&[T]]) {
        self.constraint = fields.iter().map(|q| self.moments(q)).collect();
    }

    /// Connected pieces of the tets when only faces between equal `side`s are kept.
    pub fn pieces(&self, side: &[usize]) -> (Vec<usize>, usize) {
        let mut uf = UnionFind::new(self.mesh.m());
        for f in &self.ops.adjacency.faces {
            if side[f.tets[0]] == side[f.tets[1]] {
                uf.union(f.tets[0], f.tets[1]);
            }
        }
        uf.labels()
    }

    /// Minimizes `E_D` over unit-mass piecewise rigid fields on `labels` that satisfy the constraints.
    pub fn solve(&self, labels: &[usize], pieces: usize, max_iters: usize) -> Option<PieceSolution> {
        if pieces < 2 {
            return None;
        }
        let n = 6 * pieces;
        // Constraint rows and their null space.
        let nc = self.constraint.len();
        let mut b = DMatrix::<f64>::zeros(nc.max(1), n);
        for (qi, h) in self.constraint.iter().enumerate() {
            for (t, ht) in h.iter().enumerate() {
                for r in 0..6 {
                    b[(qi, 6 * labels[t] + r)] += ht[r];
                }
            }
        }
        let btb = b.transpose() * &b;
        let (vals, vecs) = sym_eigen(n, btb.transpose().as_slice());
        let top = vals.last().copied().unwrap_or(0.0).max(f64::MIN_POSITIVE);
        let null: Vec<&Vec<f64>> = vals
            .iter()
            .zip(&vecs)
            .filter(|(v, _)| **v <= 1e-11 * top || nc == 0)
            .map(|(_, v)| v)
            .collect();
        let d = null.len();
        if d == 0 {
            return None;
        }
        let z = DMatrix::<f64>::from_fn(n, d, |i, j| null[j][i]);
        let mut gm = DMatrix::<f64>::zeros(n, n);
        for (t, g) in self.gram.iter().enumerate() {
            let o = 6 * labels[t];
            for p in 0..6 {
                for q in 0..6 {
                    gm[(o + p, o + q)] += g[(p, q)];
                }
            }
        }
        let s = z.transpose() * &gm * &z;
        let l = s.cholesky()?.l();
        let linv_t = l.try_inverse()?.transpose();
        let tm = &z * linv_t;

        // Jump operators of the cut faces in whitened coordinates.
        let mut cut: Vec<(f64, DMatrix<f64>)> = Vec::new();
        for (f, face) in self.ops.adjacency.faces.iter().enumerate() {
            let (pa, pb) = (labels[face.tets[0]], labels[face.tets[1]]);
            if pa == pb {
                continue;
            }
            let fg = &self.face_gen[f];
            let k = DMatrix::<f64>::from_fn(9, d, |i, j| {
                (0..6)
                    .map(|r| fg[i][r] * (tm[(6 * pa + r, j)] - tm[(6 * pb + r, j)]))
                    .sum()
            });
            cut.push((self.ops.sqrt_areas[f].to_f64_lossy(), k));
        }
        let grams: Vec<DMatrix<f64>> = cut.iter().map(|(_, k)| k.transpose() * k).collect();
        let energy = |x: &DVector<f64>| -> f64 { cut.iter().map(|(a, k)| a * (k * x).norm()).sum() };
        let smallest = |w: &[f64]| -> DVector<f64> {
            let mut lmat = DMatrix::<f64>::zeros(d, d);
            for (wf, g) in w.iter().zip(&grams) {
                lmat += g * *wf;
            }
            let (_, vecs) = sym_eigen(d, lmat.transpose().as_slice());
            DVector::from_vec(vecs[0].clone())
        };

        let mut x = smallest(&cut.iter().map(|c| c.0).collect::<Vec<_>>());
        let mut best_e = energy(&x);
        let mut best = x.clone();
        let jmax = cut.iter().map(|(_, k)| (k * &x).norm()).fold(0.0, f64::max);
        let floor = 1e-10 * jmax.max(f64::MIN_POSITIVE);
        let mut eps = jmax;
        let mut stall = 0;
        let mut converged = false;
        for _ in 0..max_iters {
            let w: Vec<f64> = cut.iter().map(|(a, k)| a / (k * &x).norm().max(eps)).collect();
            x = smallest(&w);
            let e = energy(&x);
            if e < best_e * (1.0 - 1e-12) {
                stall = 0;
            } else {
                stall += 1;
            }
            if e < best_e {
                best_e = e;
                best.clone_from(&x);
            }
            eps = (eps * 0.5).max(floor);
            if eps == floor && stall >= 4 {
                converged = true;
                break;
            }
        }
        let a = &tm * best;
        Some(PieceSolution {
            energy: best_e,
            coeffs: (0..pieces).map(|p| Vector6::from_fn(|r, _| a[6 * p + r])).collect(),
            converged,
        })
    }

    /// Corner field of per-piece rigid motions; identical at shared vertices within a piece.
    pub fn field(&self, labels: &[usize], coeffs: &[Vector6<f64>]) -> Vec<T> {
        let mut out = vec![T::zero(); 12 * self.mesh.m()];
        let coeffs: Vec<[T; 6]> = coeffs.iter().map(|a| std::array::from_fn(|i| T::lit(a[i]))).collect();
        for (t, tet) in self.mesh.tets.iter().enumerate() {
            let a = &coeffs[labels[t]];
            for (c, &v) in tet.iter().enumerate() {
                let p = self.mesh.vertices[v] - self.center;
                let mut val = Vec3::zero();
                for (r, &ar) in a.iter().enumerate() {
                    val += rigid_motion_at(r, p) * ar;
                }
                out[12 * t + 3 * c..12 * t + 3 * c + 3].copy_from_slice(&val.to_array());
            }
        }
        out
    }
}

/// Collects distinct partitions, keyed by their canonical label arrays.
#[derive(Default)]
pub(crate) struct CandidateSet {
    seen: HashMap<Vec<usize>, usize>,
    pub list: Vec<(Vec<usize>, usize)>,
}

impl CandidateSet {
    pub fn insert(&mut self, labels: Vec<usize>, pieces: usize) {
        if pieces < 2 || self.seen.contains_key(&labels) {
            return;
        }
        self.seen.insert(labels.clone(), self.list.len());
        self.list.push((labels, pieces));
    }
}
