//! Positive definite functions: Gram matrices, positivity certificates and
//! the finite GNS factorization.
//!
//! A function `φ: Γ → ℂ` is positive definite when every matrix
//! `[φ(gⱼ⁻¹ gᵢ)]ᵢⱼ` is positive semidefinite. Positivity is certified
//! numerically with a relative eigenvalue tolerance.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::linalg::{self, CMatrix, CVector, MatrixJson};

/// Relative eigenvalue tolerance used when none is given.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Something that can be evaluated on group elements of type `G`.
///
/// Implementors are expected to be normalized, `evaluate(e) = 1`.
pub trait PdFunction<G> {
    fn evaluate(&self, g: &G) -> Complex64;
}

impl<G, F: Fn(&G) -> Complex64> PdFunction<G> for F {
    fn evaluate(&self, g: &G) -> Complex64 {
        self(g)
    }
}

/// Outcome of a positivity check.
#[derive(Debug, Clone, Serialize)]
pub struct GramReport {
    #[serde(serialize_with = "serialize_matrix")]
    pub matrix: CMatrix,
    pub min_eigenvalue: f64,
    pub spectral_norm: f64,
    pub psd: bool,
    pub tolerance: f64,
}

fn serialize_matrix<S: serde::Serializer>(m: &CMatrix, s: S) -> core::result::Result<S::Ok, S::Error> {
    MatrixJson::from_matrix(m).serialize(s)
}

/// `[φ(gⱼ⁻¹ gᵢ)]ᵢⱼ`, symmetrized to `(A + A*)/2`.
pub fn gram<G: GroupElement, P: PdFunction<G> + ?Sized>(phi: &P, elements: &[G]) -> Result<CMatrix> {
    if elements.is_empty() {
        return Err(Error::EmptyElements);
    }
    let m = elements.len();
    let inverses: Vec<G> = elements.iter().map(GroupElement::inverse).collect();
    let a = CMatrix::from_fn(m, m, |i, j| phi.evaluate(&inverses[j].compose(&elements[i])));
    Ok(linalg::hermitian_part(&a))
}

/// Minimum eigenvalue test: PSD iff `λ_min ≥ -tol · max(1, ‖A‖₂)`.
pub fn psd_check(a: &CMatrix, tol: f64) -> Result<GramReport> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: a.ncols(),
        });
    }
    if a.is_empty() {
        return Err(Error::EmptyElements);
    }
    let asymmetry = linalg::hermitian_defect(a);
    let scale = linalg::max_abs(a).max(1.0);
    if asymmetry > tol * scale {
        return Err(Error::NotHermitian {
            asymmetry,
            tol: tol * scale,
        });
    }
    let (values, _) = linalg::hermitian_eigen(a);
    let min_eigenvalue = values[0];
    let spectral_norm = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(GramReport {
        matrix: a.clone(),
        min_eigenvalue,
        spectral_norm,
        psd: min_eigenvalue >= -tol * spectral_norm.max(1.0),
        tolerance: tol,
    })
}

/// Vectors `v₁..v_m ∈ ℂʳ` with `⟨vᵢ, vⱼ⟩ = φ(gⱼ⁻¹ gᵢ)`, obtained from the
/// eigen-decomposition of the Gram matrix after discarding eigenvalues at
/// or below `tol · ‖A‖₂`. `r` is the numerical rank.
pub fn gns_vectors<G: GroupElement, P: PdFunction<G> + ?Sized>(
    phi: &P,
    elements: &[G],
    tol: f64,
) -> Result<Vec<CVector>> {
    let a = gram(phi, elements)?;
    let report = psd_check(&a, tol)?;
    if !report.psd {
        return Err(Error::NotPositive(Box::new(report)));
    }
    let (values, vectors) = linalg::hermitian_eigen(&a);
    let cutoff = tol * report.spectral_norm;
    let kept: Vec<usize> = (0..values.len()).filter(|&k| values[k] > cutoff).collect();
    let m = elements.len();
    Ok((0..m)
        .map(|i| {
            CVector::from_iterator(
                kept.len(),
                kept.iter().map(|&k| vectors[(i, k)] * values[k].sqrt()),
            )
        })
        .collect())
}

/// `max |⟨vᵢ, vⱼ⟩ - A_ij|`.
pub fn reconstruction_error(vectors: &[CVector], a: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for (i, vi) in vectors.iter().enumerate() {
        for (j, vj) in vectors.iter().enumerate() {
            worst = worst.max((linalg::inner(vi, vj) - a[(i, j)]).norm());
        }
    }
    worst
}
