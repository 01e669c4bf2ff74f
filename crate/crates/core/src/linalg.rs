//! Dense Hermitian helpers on top of `nalgebra`.

use nalgebra::DMatrix;

use crate::C64;

/// Roundoff negativity tolerated before an eigenvalue is treated as an error.
pub const NEGATIVITY_TOLERANCE: f64 = 1e-9;

/// `(m + m^dagger) / 2`.
pub fn symmetrize(m: &DMatrix<C64>) -> DMatrix<C64> {
    (m + m.adjoint()).scale(0.5)
}

/// Largest entrywise deviation from Hermiticity, `max |m_ij - conj(m_ji)|`.
pub fn hermiticity_defect(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for j in 0..n {
        for i in 0..=j {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigen-decomposition of the Hermitian part of `m`.
///
/// Returns eigenvalues in ascending order with the matching eigenvectors as
/// columns.
pub fn hermitian_eigen(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let eig = symmetrize(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), order.len(), |i, k| {
        eig.eigenvectors[(i, order[k])]
    });
    (values, vectors)
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let mut values: Vec<f64> = symmetrize(m).symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

/// Principal square root of a positive semidefinite Hermitian matrix.
///
/// Negative eigenvalues, and positive ones at the roundoff level of the
/// largest, are clamped to zero.
pub fn psd_sqrt(m: &DMatrix<C64>) -> DMatrix<C64> {
    let (values, vectors) = hermitian_eigen(m);
    let largest = values.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    let floor = largest * f64::EPSILON * values.len() as f64;
    let roots: Vec<f64> = values
        .iter()
        .map(|&v| if v > floor { v.sqrt() } else { 0.0 })
        .collect();
    let scaled = DMatrix::from_fn(vectors.nrows(), vectors.ncols(), |i, k| {
        vectors[(i, k)] * roots[k]
    });
    &scaled * vectors.adjoint()
}

fn roundoff_floor(values: &[f64]) -> f64 {
    let largest = values.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    largest * f64::EPSILON * values.len() as f64
}

const SVD_MAX_ITERATIONS: usize = 10_000;

/// Singular values in descending order.
///
/// Falls back to square roots of the Gram-matrix eigenvalues if the
/// iterative SVD does not converge.
pub fn singular_values(m: &DMatrix<C64>) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut values: Vec<f64> = match m.clone().try_svd(false, false, f64::EPSILON, SVD_MAX_ITERATIONS) {
        Some(svd) => svd.singular_values.iter().copied().collect(),
        None => {
            let gram = if m.nrows() <= m.ncols() {
                m * m.adjoint()
            } else {
                m.adjoint() * m
            };
            let eig = hermitian_eigenvalues(&gram);
            let floor = roundoff_floor(&eig);
            eig.iter().map(|&v| if v > floor { v.sqrt() } else { 0.0 }).collect()
        }
    };
    values.sort_by(|a, b| b.total_cmp(a));
    values
}

/// Trace norm: sum of singular values.
pub fn nuclear_norm(m: &DMatrix<C64>) -> f64 {
    singular_values(m).iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn sqrt_squares_back() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[c(2.0, 0.0), c(0.5, 0.5), c(0.5, -0.5), c(1.0, 0.0)],
        );
        let r = psd_sqrt(&m);
        let back = &r * &r;
        assert!((back - m).norm() < 1e-12);
    }

    #[test]
    fn eigenvalues_sorted_ascending() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(3.0, 0.0),
            c(-1.0, 0.0),
            c(2.0, 0.0),
        ]));
        assert_eq!(hermitian_eigenvalues(&m), vec![-1.0, 2.0, 3.0]);
        let (vals, vecs) = hermitian_eigen(&m);
        assert_eq!(vals, vec![-1.0, 2.0, 3.0]);
        assert!((vecs[(1, 0)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nuclear_norm_of_diagonal() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(-3.0, 0.0), c(0.0, 2.0)]));
        assert!((nuclear_norm(&m) - 5.0).abs() < 1e-12);
    }
}
