#![allow(dead_code)]

use bbx_core::fem::{lift_discontinuous, DiscreteOperators, Material};
use bbx_core::geom::{tet_adjacency, TetMesh, Vec3};
use bbx_core::linalg::CsrMatrix;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vec(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

pub fn ops(mesh: &TetMesh<f64>) -> DiscreteOperators<f64> {
    lift_discontinuous(mesh, &Material::default(), tet_adjacency(mesh).unwrap()).unwrap()
}

/// Block mesh with every vertex moved by up to `amount` of the cell size.
pub fn jittered(mesh: &TetMesh<f64>, amount: f64, seed: u64) -> TetMesh<f64> {
    let mut r = rng(seed);
    let mut m = mesh.clone();
    for v in &mut m.vertices {
        *v += Vec3::new(
            r.random_range(-amount..amount),
            r.random_range(-amount..amount),
            r.random_range(-amount..amount),
        );
    }
    m
}

pub fn dense(a: &CsrMatrix<f64>) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(a.nrows, a.ncols);
    for r in 0..a.nrows {
        for k in a.row_ptr[r]..a.row_ptr[r + 1] {
            d[(r, a.col_idx[k])] += a.values[k];
        }
    }
    d
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
pub mod oracle;

/// `k` tets glued face to face along a twisted strip: tet `i` is `[i, i+1, i+2, i+3]`.
pub fn tet_chain(k: usize) -> TetMesh<f64> {
    let mut v = vec![
        Vec3::new(0.0, 0.0, 0.0),
        Vec3::new(1.0, 0.0, 0.0),
        Vec3::new(0.5, 0.9, 0.0),
        Vec3::new(0.5, 0.3, 0.8),
    ];
    for i in 0..k.saturating_sub(1) {
        let c = (v[i + 1] + v[i + 2] + v[i + 3]) / 3.0;
        let next = c * 2.0 - v[i] + Vec3::new(0.05 * i as f64, -0.03, 0.02);
        v.push(next);
    }
    let mut m = TetMesh::new(v, (0..k).map(|i| [i, i + 1, i + 2, i + 3]).collect());
    m.fix_orientation();
    m
}
