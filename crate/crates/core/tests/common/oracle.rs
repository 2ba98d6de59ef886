//! Dense brute-force minimizer of `u^T Q u / 2 + omega E_D(u)` over unit-mass corner
//! fields that are mass-orthogonal to the rigid motions, by majorize-minimize on a
//! smoothed jump norm from random starts.

use bbx_core::fem::discrete::rigid_corner_fields;
use bbx_core::fem::DiscreteOperators;
use bbx_core::geom::TetMesh;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct DenseProblem {
    q: DMatrix<f64>,
    jumps: Vec<(f64, DMatrix<f64>)>,
    /// Maps reduced coordinates (unit sphere) to mass-normalized, constrained corner fields.
    basis: DMatrix<f64>,
}

fn column_matrix(n: usize, apply: impl Fn(&[f64]) -> Vec<f64>, rows: usize) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(rows, n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        for (i, v) in apply(&e).into_iter().enumerate() {
            out[(i, j)] = v;
        }
        e[j] = 0.0;
    }
    out
}

impl DenseProblem {
    pub fn new(mesh: &TetMesh<f64>, ops: &DiscreteOperators<f64>) -> Self {
        let n = ops.dim();
        let mass = column_matrix(n, |u| ops.mass_mul(u), n);
        let q = column_matrix(n, |u| ops.stiffness_mul(u), n);
        let jumps = (0..ops.faces())
            .map(|f| (ops.sqrt_areas[f], column_matrix(n, |u| ops.jump(f, u).to_vec(), 9)))
            .collect();
        let l = mass.cholesky().expect("mass is positive definite").l();
        let rigid = rigid_corner_fields(mesh);
        let c = DMatrix::from_fn(n, rigid.len(), |i, j| rigid[j].0[i]);
        let b = l.transpose() * c;
        let svd = b.svd(true, false);
        let u = svd.u.unwrap();
        // Full orthonormal basis completing range(B).
        let full = DMatrix::<f64>::identity(n, n) - &u * u.transpose();
        let eig = SymmetricEigen::new(full);
        let keep: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i] > 0.5).collect();
        let w = DMatrix::from_fn(n, keep.len(), |i, j| eig.eigenvectors[(i, keep[j])]);
        let basis = l.transpose().lu().solve(&w).unwrap();
        Self { q, jumps, basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn objective(&self, u: &DVector<f64>, omega: f64) -> f64 {
        let e = 0.5 * u.dot(&(&self.q * u));
        let d: f64 = self.jumps.iter().map(|(s, j)| s * (j * u).norm()).sum();
        e + omega * d
    }

    fn lowest(&self, weights: &[f64]) -> DVector<f64> {
        let mut h = self.q.clone();
        for ((_, j), &w) in self.jumps.iter().zip(weights) {
            h += j.transpose() * j * w;
        }
        let red = self.basis.transpose() * h * &self.basis;
        let red = (&red + red.transpose()) * 0.5;
        let eig = SymmetricEigen::new(red);
        let i = eig.eigenvalues.imin();
        &self.basis * eig.eigenvectors.column(i)
    }

    /// Best objective over `starts` random initial fields.
    pub fn minimize(&self, omega: f64, starts: usize, seed: u64) -> (f64, DVector<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut best = (f64::INFINITY, DVector::zeros(self.basis.nrows()));
        for _ in 0..starts {
            let y = DVector::from_fn(self.dim(), |_, _| rng.random_range(-1.0..1.0));
            let mut u = &self.basis * y.normalize();
            for eps in [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-8, 1e-10] {
                for _ in 0..25 {
                    let w: Vec<f64> = self
                        .jumps
                        .iter()
                        .map(|(s, j)| omega * s / ((j * &u).norm_squared() + eps * eps).sqrt())
                        .collect();
                    u = self.lowest(&w);
                }
            }
            let f = self.objective(&u, omega);
            if f < best.0 {
                best = (f, u);
            }
        }
        best
    }
}
