use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{lobpcg, CsrMatrix};
use crate::scalar::Real;

/// Smallest generalized eigenpairs of `(Q, M)` on vertex fields.
#[derive(Clone, Debug)]
pub struct ElasticModes<T> {
    /// M-orthonormal columns, each of length `3n`.
    pub vectors: Vec<Vec<T>>,
    /// Ascending.
    pub values: Vec<T>,
}

/// The `k` smallest eigenpairs of `Q u = lambda M u`, with residuals below `1e-7 |Q|`.
pub fn elastic_modes<T: Real>(m: &CsrMatrix<T>, q: &CsrMatrix<T>, k: usize) -> Result<ElasticModes<T>> {
    let n = m.nrows;
    if k == 0 || k > n {
        return Err(Error::Dimension {
            requested: k,
            available: n,
        });
    }
    let qn = q.max_abs();
    let shift = if m.max_abs() > T::zero() {
        qn / m.max_abs() * T::lit(1e-3)
    } else {
        T::one()
    };
    let diag: Vec<T> = q
        .diagonal()
        .iter()
        .zip(m.diagonal())
        .map(|(&a, b)| T::one() / (a + shift * b))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let x0: Vec<Vec<T>> = (0..k)
        .map(|_| (0..n).map(|_| T::lit(StandardNormal.sample(&mut rng))).collect())
        .collect();
    let apply_m = |x: &[T], y: &mut [T]| m.mul_vec_into(x, y);
    let res = lobpcg(
        |x: &[T], y: &mut [T]| q.mul_vec_into(x, y),
        Some(&apply_m),
        |r: &[T], z: &mut [T]| {
            for i in 0..r.len() {
                z[i] = r[i] * diag[i];
            }
        },
        |_: &mut [T]| {},
        x0,
        5000,
        qn * T::lit(1e-7),
    );
    if !res.converged {
        return Err(Error::NonConvergence(format!(
            "elastic modes: residuals {:?} after {} iterations",
            res.residuals, res.iterations
        )));
    }
    Ok(ElasticModes {
        vectors: res.vectors,
        values: res.values.into_iter().map(|v| v.max(T::zero())).collect(),
    })
}
