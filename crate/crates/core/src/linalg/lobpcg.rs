//! Locally optimal block preconditioned conjugate gradient for the smallest
//! eigenpairs of `A x = lambda B x` with symmetric `A` and SPD `B`.

use super::dense::sym_eigen;
use super::{axpy, dot};
use crate::scalar::Real;

#[derive(Clone, Debug)]
pub struct LobpcgResult<T> {
    /// Ritz values, ascending.
    pub values: Vec<T>,
    /// B-orthonormal Ritz vectors.
    pub vectors: Vec<Vec<T>>,
    pub residuals: Vec<T>,
    pub iterations: usize,
    pub converged: bool,
}

/// Runs LOBPCG from the block `x0`.
///
/// `b == None` means `B = I`. `project` maps a vector onto the admissible subspace
/// (it must commute with the problem, e.g. a B-orthogonal projector onto the
/// complement of known eigenvectors). Converged when every residual norm is `<= tol`.
#[allow(clippy::too_many_arguments)]
pub fn lobpcg<T: Real>(
    a: impl Fn(&[T], &mut [T]),
    b: Option<&dyn Fn(&[T], &mut [T])>,
    precond: impl Fn(&[T], &mut [T]),
    project: impl Fn(&mut [T]),
    x0: Vec<Vec<T>>,
    max_iters: usize,
    tol: T,
) -> LobpcgResult<T> {
    let k = x0.len();
    assert!(k > 0);
    let n = x0[0].len();
    let apply_b = |v: &[T], out: &mut [T]| match b {
        Some(b) => b(v, out),
        None => out.copy_from_slice(v),
    };

    let mut x: Vec<Vec<T>> = x0;
    for v in &mut x {
        project(v);
    }
    let mut p: Vec<Vec<T>> = Vec::new();
    let mut w: Vec<Vec<T>> = Vec::new();
    let mut result = LobpcgResult {
        values: vec![T::zero(); k],
        vectors: Vec::new(),
        residuals: vec![T::infinity(); k],
        iterations: 0,
        converged: false,
    };
    let mut bx: Vec<Vec<T>> = Vec::new();

    for it in 0..=max_iters {
        // B-orthonormal basis of span(X, W, P) by twice-repeated modified Gram-Schmidt.
        let mut basis: Vec<Vec<T>> = Vec::with_capacity(3 * k);
        let mut bbasis: Vec<Vec<T>> = Vec::with_capacity(3 * k);
        let mut tmp = vec![T::zero(); n];
        for (group, vs) in [&x, &w, &p].into_iter().enumerate() {
            for v in vs {
                let mut s = v.clone();
                apply_b(&s, &mut tmp);
                let norm0 = dot(&s, &tmp).max(T::zero()).sqrt();
                if norm0 == T::zero() || !norm0.is_finite() {
                    continue;
                }
                for _ in 0..2 {
                    for (q, bq) in basis.iter().zip(&bbasis) {
                        let c = dot(bq, &s);
                        axpy(-c, q, &mut s);
                    }
                }
                apply_b(&s, &mut tmp);
                let nrm = dot(&s, &tmp).max(T::zero()).sqrt();
                let drop = if group == 0 { T::lit(1e-10) } else { T::lit(1e-8) };
                if nrm <= drop * norm0 {
                    continue;
                }
                let inv = T::one() / nrm;
                s.iter_mut().for_each(|v| *v *= inv);
                tmp.iter_mut().for_each(|v| *v *= inv);
                basis.push(s);
                bbasis.push(tmp.clone());
            }
        }
        let dim = basis.len();
        if dim < k {
            break;
        }
        let mut abasis = vec![vec![T::zero(); n]; dim];
        for (q, aq) in basis.iter().zip(abasis.iter_mut()) {
            a(q, aq);
        }
        let mut h = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in i..dim {
                let v = dot(&basis[i], &abasis[j]).to_f64_lossy();
                h[i * dim + j] = v;
                h[j * dim + i] = v;
            }
        }
        let (vals, vecs) = sym_eigen(dim, &h);
        let combine = |src: &[Vec<T>], y: &[f64]| -> Vec<T> {
            let mut out = vec![T::zero(); n];
            for (s, &c) in src.iter().zip(y) {
                axpy(T::lit(c), s, &mut out);
            }
            out
        };
        let new_x: Vec<Vec<T>> = vecs[..k].iter().map(|y| combine(&basis, y)).collect();
        let new_ax: Vec<Vec<T>> = vecs[..k].iter().map(|y| combine(&abasis, y)).collect();
        let new_bx: Vec<Vec<T>> = vecs[..k].iter().map(|y| combine(&bbasis, y)).collect();

        if it > 0 {
            p = new_x
                .iter()
                .map(|xn| {
                    let mut d = xn.clone();
                    for (xo, bxo) in x.iter().zip(&bx) {
                        axpy(-dot(bxo, xn), xo, &mut d);
                    }
                    d
                })
                .collect();
        }
        x = new_x;
        bx = new_bx;
        result.iterations = it;
        let mut residuals = Vec::with_capacity(k);
        w = Vec::with_capacity(k);
        for i in 0..k {
            let lambda = T::lit(vals[i]);
            result.values[i] = lambda;
            let mut r = new_ax[i].clone();
            axpy(-lambda, &bx[i], &mut r);
            residuals.push(dot(&r, &r).sqrt());
            let mut z = vec![T::zero(); n];
            precond(&r, &mut z);
            project(&mut z);
            w.push(z);
        }
        result.residuals = residuals;
        if result.residuals.iter().all(|&r| r <= tol) {
            result.converged = true;
            break;
        }
    }
    result.vectors = x;
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_smallest_pairs() {
        let n = 40;
        let d: Vec<f64> = (0..n).map(|i| 1.0 + i as f64).collect();
        let x0: Vec<Vec<f64>> = (0..3)
            .map(|j| (0..n).map(|i| ((i * 7 + j * 13) % 11) as f64 + 0.5).collect())
            .collect();
        let res = lobpcg(
            |v: &[f64], out: &mut [f64]| {
                for i in 0..n {
                    out[i] = d[i] * v[i];
                }
            },
            None,
            |r: &[f64], z: &mut [f64]| {
                for i in 0..n {
                    z[i] = r[i] / d[i];
                }
            },
            |_: &mut [f64]| {},
            x0,
            200,
            1e-10,
        );
        assert!(res.converged);
        for (i, v) in res.values.iter().enumerate() {
            assert!((v - (i + 1) as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn generalized_with_projection() {
        // A = diag(1..n), B = 2 I, first coordinate projected out.
        let n = 20;
        let b = |v: &[f64], out: &mut [f64]| {
            for i in 0..v.len() {
                out[i] = 2.0 * v[i];
            }
        };
        let res = lobpcg(
            |v: &[f64], out: &mut [f64]| {
                for i in 0..n {
                    out[i] = (i + 1) as f64 * v[i];
                }
            },
            Some(&b),
            |r: &[f64], z: &mut [f64]| z.copy_from_slice(r),
            |v: &mut [f64]| v[0] = 0.0,
            vec![vec![1.0; n]],
            500,
            1e-9,
        );
        assert!(res.converged);
        assert!((res.values[0] - 1.0).abs() < 1e-8);
        let bn: f64 = res.vectors[0].iter().map(|x| 2.0 * x * x).sum();
        assert!((bn - 1.0).abs() < 1e-12);
    }
}
