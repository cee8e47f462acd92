//! Unitary matrices and finite-dimensional unitary representations.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GroupElement, TableElement};
use crate::linalg::{self, CMatrix, ONE, ZERO};
use crate::perm::FinitaryPermutation;

/// Tolerance on `‖U*U - I‖₂`.
pub const UNITARY_TOLERANCE: f64 = 1e-9;

/// A unitary matrix; also the group element type for matrix groups.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix(CMatrix);

impl UnitaryMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        let defect = linalg::unitarity_defect(&m);
        if defect > UNITARY_TOLERANCE {
            return Err(Error::NotUnitary(defect));
        }
        Ok(Self(m))
    }

    pub(crate) fn new_unchecked(m: CMatrix) -> Self {
        Self(m)
    }

    pub fn identity(n: usize) -> Self {
        Self(CMatrix::identity(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    /// Normalized trace `tr(U)/n`.
    pub fn normalized_trace(&self) -> Complex64 {
        linalg::trace(&self.0) / self.dim() as f64
    }
}

impl GroupElement for UnitaryMatrix {
    fn compose(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0)
    }

    fn inverse(&self) -> Self {
        Self(self.0.adjoint())
    }
}

/// A unitary representation `π: G → U(d)`.
pub trait UnitaryRepresentation<G> {
    fn dim(&self) -> usize;
    fn matrix(&self, g: &G) -> CMatrix;
}

/// `π(U) = U` on matrix groups.
#[derive(Debug, Clone, Copy)]
pub struct DefiningRepresentation {
    pub dim: usize,
}

impl UnitaryRepresentation<UnitaryMatrix> for DefiningRepresentation {
    fn dim(&self) -> usize {
        self.dim
    }

    fn matrix(&self, g: &UnitaryMatrix) -> CMatrix {
        g.matrix().clone()
    }
}

/// `π ≡ 1` in dimension 1.
#[derive(Debug, Clone, Copy, Default)]
pub struct TrivialRepresentation;

impl<G> UnitaryRepresentation<G> for TrivialRepresentation {
    fn dim(&self) -> usize {
        1
    }

    fn matrix(&self, _: &G) -> CMatrix {
        CMatrix::identity(1, 1)
    }
}

/// Groups up to this order are validated on every pair.
pub const EXHAUSTIVE_CHECK_LIMIT: usize = 1000;

/// A representation of a [`FiniteGroup`] given by one matrix per element.
#[derive(Debug, Clone)]
pub struct FiniteRepresentation {
    group: Arc<FiniteGroup>,
    matrices: Vec<CMatrix>,
}

impl FiniteRepresentation {
    /// Checks unitarity and `π(ab) = π(a)π(b)`: on every pair for groups of
    /// order at most [`EXHAUSTIVE_CHECK_LIMIT`], otherwise on a fixed
    /// pseudo-random sample of pairs.
    pub fn new(group: Arc<FiniteGroup>, matrices: Vec<CMatrix>) -> Result<Self> {
        let n = group.order();
        if matrices.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: matrices.len(),
            });
        }
        let d = matrices[0].nrows();
        for m in &matrices {
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: m.nrows().max(m.ncols()),
                });
            }
            let defect = linalg::unitarity_defect(m);
            if defect > UNITARY_TOLERANCE {
                return Err(Error::NotUnitary(defect));
            }
        }
        let check = |a: usize, b: usize| -> Result<()> {
            let lhs = &matrices[group.mul(a, b)];
            let rhs = &matrices[a] * &matrices[b];
            let err = linalg::max_abs(&(lhs - rhs));
            if err > UNITARY_TOLERANCE {
                return Err(Error::NotHomomorphism(format!(
                    "π({a}·{b}) differs from π({a})π({b}) by {err:e}"
                )));
            }
            Ok(())
        };
        if n <= EXHAUSTIVE_CHECK_LIMIT {
            for a in 0..n {
                for b in 0..n {
                    check(a, b)?;
                }
            }
        } else {
            let mut state = 0x5EED_u64;
            for _ in 0..10 * n {
                state = crate::rng::splitmix64(state);
                let a = (state % n as u64) as usize;
                state = crate::rng::splitmix64(state);
                let b = (state % n as u64) as usize;
                check(a, b)?;
            }
        }
        Ok(Self { group, matrices })
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn matrix_at(&self, index: usize) -> &CMatrix {
        &self.matrices[index]
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    pub fn dimension(&self) -> usize {
        self.matrices[0].nrows()
    }

    /// `⟨χ, χ⟩ = Σ |tr π(g)|² / |G|`; equals 1 exactly for irreducible π.
    pub fn character_norm(&self) -> f64 {
        self.matrices
            .iter()
            .map(|m| linalg::trace(m).norm_sqr())
            .sum::<f64>()
            / self.group.order() as f64
    }

    pub fn is_irreducible(&self) -> bool {
        (self.character_norm() - 1.0).abs() < 1e-9
    }
}

impl UnitaryRepresentation<TableElement> for FiniteRepresentation {
    fn dim(&self) -> usize {
        self.dimension()
    }

    fn matrix(&self, g: &TableElement) -> CMatrix {
        self.matrices[g.index()].clone()
    }
}

impl UnitaryRepresentation<usize> for FiniteRepresentation {
    fn dim(&self) -> usize {
        self.dimension()
    }

    fn matrix(&self, g: &usize) -> CMatrix {
        self.matrices[*g].clone()
    }
}

/// `n × n` matrix with `P eᵢ = e_{σ(i)}`, so `P_{στ} = P_σ P_τ`.
pub fn permutation_matrix(sigma: &FinitaryPermutation, n: usize) -> CMatrix {
    let mut p = CMatrix::from_element(n, n, ZERO);
    for i in 1..=n {
        p[(sigma.apply(i) - 1, i - 1)] = ONE;
    }
    p
}

/// Orthonormal basis (columns) of the sum-zero hyperplane in `ℂⁿ`.
fn sum_zero_basis(n: usize) -> CMatrix {
    CMatrix::from_fn(n, n - 1, |r, col| {
        let k = (col + 1) as f64;
        let norm = (k * (k + 1.0)).sqrt();
        if r <= col {
            Complex64::new(1.0 / norm, 0.0)
        } else if r == col + 1 {
            Complex64::new(-k / norm, 0.0)
        } else {
            ZERO
        }
    })
}

/// The symmetric group `S_n` together with its `(n-1)`-dimensional standard
/// irreducible representation (the permutation action restricted to the
/// sum-zero hyperplane). Requires `n ≥ 2`.
pub fn standard_representation(
    n: usize,
) -> Result<(Arc<FiniteGroup>, Vec<FinitaryPermutation>, FiniteRepresentation)> {
    if n < 2 {
        return Err(Error::Precondition(
            "the standard representation needs n >= 2".into(),
        ));
    }
    let (group, elements) = FiniteGroup::symmetric(n)?;
    let group = Arc::new(group);
    let basis = sum_zero_basis(n);
    let matrices = elements
        .iter()
        .map(|s| basis.adjoint() * permutation_matrix(s, n) * &basis)
        .collect();
    let rep = FiniteRepresentation::new(Arc::clone(&group), matrices)?;
    Ok((group, elements, rep))
}

/// The sign representation of `S_n`.
pub fn sign_representation(
    n: usize,
) -> Result<(Arc<FiniteGroup>, Vec<FinitaryPermutation>, FiniteRepresentation)> {
    let (group, elements) = FiniteGroup::symmetric(n)?;
    let group = Arc::new(group);
    let matrices = elements
        .iter()
        .map(|s| CMatrix::from_element(1, 1, Complex64::new(s.sign().to_f64(), 0.0)))
        .collect();
    let rep = FiniteRepresentation::new(Arc::clone(&group), matrices)?;
    Ok((group, elements, rep))
}
