//! Vector helpers, sparse matrices and small dense eigen solves.

pub mod dense;
pub mod lobpcg;
pub mod sparse;

pub use dense::{numerical_rank, sym_eigen};
pub use lobpcg::{lobpcg, LobpcgResult};
pub use sparse::CsrMatrix;

use crate::scalar::Real;

#[inline]
pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

#[inline]
pub fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// `y += alpha * x`
#[inline]
pub fn axpy<T: Real>(alpha: T, x: &[T], y: &mut [T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[inline]
pub fn scale<T: Real>(alpha: T, x: &mut [T]) {
    for v in x {
        *v *= alpha;
    }
}
