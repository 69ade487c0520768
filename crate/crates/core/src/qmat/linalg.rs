//! Spectral routines backed by nalgebra.

use nalgebra::DMatrix;

use super::matrix::{ComplexMatrix, C64};

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    assert!(m.is_square(), "eigenvalues need a square matrix");
    let h = symmetrize(m);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigen-decomposition (ascending eigenvalues, eigenvectors as columns).
pub fn hermitian_eigen(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    assert!(m.is_square());
    let eig = symmetrize(m).symmetric_eigen();
    let n = m.rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vecs = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vecs)
}

pub fn min_eigenvalue(m: &ComplexMatrix) -> f64 {
    hermitian_eigenvalues(m)[0]
}

/// Singular values of a complex matrix in descending order.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let mut sv: Vec<f64> = m.to_nalgebra().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Singular values of a real matrix in descending order.
pub fn real_singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Sum of singular values.
pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    singular_values(m).iter().sum()
}

pub fn real_trace_norm(m: &DMatrix<f64>) -> f64 {
    real_singular_values(m).iter().sum()
}

// nalgebra's symmetric eigensolver reads only one triangle; average both so
// rounding noise in the input does not bias the result.
fn symmetrize(m: &ComplexMatrix) -> DMatrix<C64> {
    let a = m.to_nalgebra();
    (&a + a.adjoint()) * C64::new(0.5, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_norm_of_identity() {
        assert!((trace_norm(&ComplexMatrix::identity(5)) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn trace_norm_of_signed_diagonal() {
        let m = ComplexMatrix::from_real_diagonal(&[1.0, -1.0, 1.0]);
        assert!((trace_norm(&m) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn eigenvalues_are_sorted() {
        let m = ComplexMatrix::from_real_diagonal(&[3.0, -2.0, 0.5]);
        assert_eq!(hermitian_eigenvalues(&m), vec![-2.0, 0.5, 3.0]);
    }

    #[test]
    fn eigenvectors_diagonalize() {
        let m = ComplexMatrix::from_fn(3, 3, |i, j| {
            if i == j {
                C64::new(i as f64, 0.0)
            } else if i < j {
                C64::new(0.3, 0.2 * (i + j) as f64)
            } else {
                C64::new(0.3, -0.2 * (i + j) as f64)
            }
        });
        let (vals, v) = hermitian_eigen(&m);
        let d = v.adjoint().matmul(&m).matmul(&v);
        for i in 0..3 {
            assert!((d[(i, i)].re - vals[i]).abs() < 1e-10);
        }
    }
}
