use nalgebra::{DMatrix, SymmetricEigen};

/// Eigen decomposition of a symmetric row-major `n x n` matrix.
/// Eigenvalues ascending; `vectors[i]` is the unit eigenvector of `values[i]`.
pub fn sym_eigen(n: usize, a: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
    assert_eq!(a.len(), n * n);
    let m = DMatrix::from_fn(n, n, |i, j| 0.5 * (a[i * n + j] + a[j * n + i]));
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = order
        .iter()
        .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
        .collect();
    (values, vectors)
}

/// Rank of a row-major `rows x cols` matrix: singular values above `rel_tol * sigma_max`.
pub fn numerical_rank(rows: usize, cols: usize, a: &[f64], rel_tol: f64) -> usize {
    assert_eq!(a.len(), rows * cols);
    if rows == 0 || cols == 0 {
        return 0;
    }
    let m = DMatrix::from_row_slice(rows, cols, a);
    let sv = m.singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * max).count()
}
