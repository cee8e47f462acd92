//! Dense complex linear algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Largest singular value.
pub fn spectral_norm(a: &CMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0, |m: f64, &s| m.max(s))
}

/// Largest entrywise modulus.
pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().fold(0.0, |m: f64, z| m.max(z.norm()))
}

/// `max |A - A*|` entrywise.
pub fn hermitian_defect(a: &CMatrix) -> f64 {
    max_abs(&(a - a.adjoint()))
}

/// `(A + A*) / 2`.
pub fn hermitian_part(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()).scale(0.5)
}

/// Eigen-decomposition of a Hermitian matrix; eigenvalues ascending with
/// eigenvectors as the matching columns.
pub fn hermitian_eigen(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = SymmetricEigen::new(hermitian_part(a));
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, k| eig.eigenvectors[(r, order[k])]);
    (values, vectors)
}

/// Orthonormal basis (columns) of `{x : A x = 0}`, with singular values at
/// or below `tol · max(1, ‖A‖₂)` treated as zero.
pub fn nullspace(a: &CMatrix, tol: f64) -> CMatrix {
    let cols = a.ncols();
    if cols == 0 {
        return CMatrix::zeros(0, 0);
    }
    // pad to a tall matrix so the SVD returns a full right basis
    let tall = if a.nrows() < cols {
        let mut t = CMatrix::zeros(cols, cols);
        t.view_mut((0, 0), (a.nrows(), cols)).copy_from(a);
        t
    } else {
        a.clone()
    };
    let svd = SVD::new(tall, false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let norm = svd.singular_values.iter().fold(0.0f64, |m, &s| m.max(s));
    let cutoff = tol * norm.max(1.0);
    let kept: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] <= cutoff)
        .collect();
    CMatrix::from_fn(cols, kept.len(), |r, k| v_t[(kept[k], r)].conj())
}

/// `‖U*U - I‖₂`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.nrows();
    spectral_norm(&(u.adjoint() * u - CMatrix::identity(n, n)))
}

pub fn trace(a: &CMatrix) -> Complex64 {
    a.diagonal().iter().sum()
}

/// `⟨x, y⟩ = Σ xᵢ conj(yᵢ)`, linear in the first argument.
pub fn inner(x: &CVector, y: &CVector) -> Complex64 {
    x.iter().zip(y.iter()).map(|(a, b)| a * b.conj()).sum()
}

/// JSON form of a complex matrix: rows of `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MatrixJson(pub Vec<Vec<[f64; 2]>>);

impl MatrixJson {
    pub fn from_matrix(a: &CMatrix) -> Self {
        Self(
            (0..a.nrows())
                .map(|r| (0..a.ncols()).map(|c| [a[(r, c)].re, a[(r, c)].im]).collect())
                .collect(),
        )
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let rows = self.0.len();
        let cols = self.0.first().map_or(0, Vec::len);
        if let Some(bad) = self.0.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch {
                expected: cols,
                found: bad.len(),
            });
        }
        Ok(CMatrix::from_fn(rows, cols, |r, col| {
            let [re, im] = self.0[r][col];
            c(re, im)
        }))
    }
}
