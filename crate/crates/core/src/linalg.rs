//! Small dense complex linear algebra on top of nalgebra.

use nalgebra::SymmetricEigen;

use crate::error::{Error, Result};
use crate::CMatrix;

/// Eigenvalues (ascending is not guaranteed) and eigenvectors of a Hermitian matrix.
pub(crate) fn hermitian_eigen(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = SymmetricEigen::new(a.clone());
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

/// `V diag(f(lambda)) V^H` for a Hermitian matrix.
pub(crate) fn hermitian_map(values: &[f64], vectors: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let mut scaled = vectors.clone();
    for (j, &lam) in values.iter().enumerate() {
        let s = f(lam);
        scaled.column_mut(j).scale_mut(s);
    }
    &scaled * vectors.adjoint()
}

/// Moore-Penrose pseudo-inverse through the SVD.
pub(crate) fn pseudo_inverse(a: &CMatrix) -> Result<CMatrix> {
    let svd = a.clone().svd(true, true);
    let max_sv = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let eps = max_sv * 1e-12 * a.nrows().max(a.ncols()) as f64;
    svd.pseudo_inverse(eps)
        .map_err(|e| Error::Numerical(format!("pseudo-inverse failed: {e}")))
}

pub(crate) fn max_hermitian_defect(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut worst: f64 = 0.0;
    for p in 0..n {
        for q in 0..n {
            worst = worst.max((a[(p, q)] - a[(q, p)].conj()).norm());
        }
    }
    worst
}
