//! Floating-point helpers on top of nalgebra used by the verification paths.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, same order as `values`.
    pub vectors: DMatrix<Complex64>,
}

pub fn hermitian_eigen(m: &DMatrix<Complex64>) -> HermitianEigen {
    let n = m.nrows();
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    HermitianEigen { values, vectors }
}

impl HermitianEigen {
    /// `V f(Lambda) V^dagger`.
    pub fn function(&self, f: impl Fn(f64) -> Complex64) -> DMatrix<Complex64> {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for c in 0..n {
            let fc = f(self.values[c]);
            for r in 0..n {
                scaled[(r, c)] *= fc;
            }
        }
        scaled * self.vectors.adjoint()
    }

    pub fn reconstruction_error(&self, m: &DMatrix<Complex64>) -> f64 {
        max_abs(&(self.function(Complex64::from) - m))
    }
}

pub fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn mat_vec(m: &DMatrix<Complex64>, v: &[Complex64]) -> Vec<Complex64> {
    let out = m * DVector::from_column_slice(v);
    out.iter().copied().collect()
}

/// Numerical rank: singular values above `rel_tol * sigma_max`.
pub fn numerical_rank(m: &DMatrix<Complex64>, rel_tol: f64) -> usize {
    let sv = m.clone().singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * max).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_of_sigma1() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
            ],
        );
        let e = hermitian_eigen(&m);
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
        assert!(e.reconstruction_error(&m) < 1e-14);
    }

    #[test]
    fn rank_of_product_and_bell() {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let product = DMatrix::from_row_slice(2, 2, &[zero, one, zero, zero]);
        let bell = DMatrix::from_row_slice(2, 2, &[one, zero, zero, one]);
        assert_eq!(numerical_rank(&product, 1e-10), 1);
        assert_eq!(numerical_rank(&bell, 1e-10), 2);
        assert_eq!(numerical_rank(&DMatrix::zeros(2, 2), 1e-10), 0);
    }
}
