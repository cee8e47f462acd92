//! Random positive definite functions built from linear algebra: vector
//! states on the unit sphere, characters of the circle, matrix coefficients
//! of unitary representations over a compact group, and the point
//! stabilizers of `S_n` acting on `{1..n}`.

use std::collections::HashSet;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::group::{close_under, GroupElement};
use crate::linalg::{self, CMatrix, CVector};
use crate::perm::FinitaryPermutation;
use crate::rep::{UnitaryMatrix, UnitaryRepresentation, UNITARY_TOLERANCE};

pub const UNIT_TOLERANCE: f64 = 1e-12;

/// A unit vector `ξ ∈ ℂⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitVector(CVector);

impl UnitVector {
    pub fn new(v: CVector) -> Result<Self> {
        let defect = (v.norm() - 1.0).abs();
        if defect > UNIT_TOLERANCE {
            return Err(Error::NotUnit(defect));
        }
        Ok(Self(v))
    }

    /// Rescales a nonzero vector to unit length.
    pub fn normalize(v: CVector) -> Result<Self> {
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotUnit(1.0));
        }
        Ok(Self(v.unscale(norm)))
    }

    /// Standard basis vector `e_k` (0-based) of `ℂⁿ`.
    pub fn basis(n: usize, k: usize) -> Self {
        let mut v = CVector::zeros(n);
        v[k] = linalg::ONE;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn vector(&self) -> &CVector {
        &self.0
    }
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Uniform point of the unit sphere in `ℂⁿ`: normalized complex Gaussian.
pub fn sample_sphere<R: Rng + ?Sized>(n: usize, rng: &mut R) -> UnitVector {
    assert!(n >= 1);
    loop {
        let v = CVector::from_iterator(n, (0..n).map(|_| complex_gaussian(rng)));
        if let Ok(u) = UnitVector::normalize(v) {
            return u;
        }
    }
}

/// `φ_ξ(γ) = ⟨γξ, ξ⟩`.
pub fn sphere_phi(gamma: &UnitaryMatrix, xi: &UnitVector) -> Result<Complex64> {
    if gamma.dim() != xi.dim() {
        return Err(Error::DimensionMismatch {
            expected: gamma.dim(),
            found: xi.dim(),
        });
    }
    Ok(linalg::inner(&(gamma.matrix() * xi.vector()), xi.vector()))
}

/// `h.ξ` for the natural action of unitaries on the sphere.
pub fn rotate(h: &UnitaryMatrix, xi: &UnitVector) -> Result<UnitVector> {
    if h.dim() != xi.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: xi.dim(),
        });
    }
    Ok(UnitVector(h.matrix() * xi.vector()))
}

/// Haar-distributed element of `U(n)`: QR of a complex Ginibre matrix with
/// `R`'s diagonal phases moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> UnitaryMatrix {
    assert!(n >= 1);
    let z = CMatrix::from_fn(n, n, |_, _| complex_gaussian(rng));
    let qr = z.qr();
    let q = qr.q();
    let r = qr.r();
    let phases = CMatrix::from_diagonal(&CVector::from_iterator(
        n,
        (0..n).map(|i| {
            let d = r[(i, i)];
            if d.norm() == 0.0 {
                linalg::ONE
            } else {
                d / d.norm()
            }
        }),
    ));
    UnitaryMatrix::new_unchecked(q * phases)
}

/// `φ^ξ_g(h) = ⟨π(hg)ξ, π(g)ξ⟩`.
///
/// The homomorphism property is spot-checked on the pair `(h, g)` used.
pub fn rep_phi<G, P>(pi: &P, g: &G, h: &G, xi: &UnitVector) -> Result<Complex64>
where
    G: GroupElement,
    P: UnitaryRepresentation<G> + ?Sized,
{
    if pi.dim() != xi.dim() {
        return Err(Error::DimensionMismatch {
            expected: pi.dim(),
            found: xi.dim(),
        });
    }
    let pi_g = pi.matrix(g);
    let pi_hg = pi.matrix(&h.compose(g));
    let defect = linalg::max_abs(&(&pi_hg - pi.matrix(h) * &pi_g));
    if defect > UNITARY_TOLERANCE {
        return Err(Error::NotHomomorphism(format!(
            "π(hg) differs from π(h)π(g) by {defect:e}"
        )));
    }
    Ok(linalg::inner(&(pi_hg * xi.vector()), &(pi_g * xi.vector())))
}

/// `φ_z(k) = z^k` for `|z| = 1`.
pub fn circle_phi(z: Complex64, k: i64) -> Result<Complex64> {
    let defect = (z.norm() - 1.0).abs();
    if defect > UNIT_TOLERANCE {
        return Err(Error::NotUnit(defect));
    }
    let base = if k < 0 { z.conj() } else { z };
    let mut exp = k.unsigned_abs();
    let mut acc = linalg::ONE;
    let mut pow = base;
    while exp > 0 {
        if exp & 1 == 1 {
            acc *= pow;
        }
        pow *= pow;
        exp >>= 1;
    }
    Ok(acc)
}

/// Uniform point of the unit circle.
pub fn sample_circle<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let t: f64 = rng.random::<f64>() * std::f64::consts::TAU;
    Complex64::from_polar(1.0, t)
}

/// Indicator of `σ ∈ Stab(i)` for `S_n` acting on `{1..n}`.
pub fn sn_irs_phi(i: usize, sigma: &FinitaryPermutation, n: usize) -> Result<f64> {
    if i == 0 || i > n {
        return Err(Error::OutOfRange { point: i, n });
    }
    if sigma.max_support() > n {
        return Err(Error::OutOfRange {
            point: sigma.max_support(),
            n,
        });
    }
    Ok(if sigma.apply(i) == i { 1.0 } else { 0.0 })
}

/// Mean of [`sn_irs_phi`] over uniform `i`, i.e. `fix(σ)/n`.
pub fn sn_irs_expectation(sigma: &FinitaryPermutation, n: usize) -> Result<f64> {
    let mut total = 0.0;
    for i in 1..=n {
        total += sn_irs_phi(i, sigma, n)?;
    }
    Ok(total / n as f64)
}

/// Upper bound on matrix group closures.
pub const MATRIX_GROUP_LIMIT: usize = 10_000;

#[derive(Clone)]
struct RoundedKey(Vec<(i64, i64)>, CMatrix);

impl PartialEq for RoundedKey {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl Eq for RoundedKey {}

impl std::hash::Hash for RoundedKey {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.hash(state);
    }
}

fn rounded(m: CMatrix) -> RoundedKey {
    let key = m
        .iter()
        .map(|z| ((z.re * 1e8).round() as i64, (z.im * 1e8).round() as i64))
        .collect();
    RoundedKey(key, m)
}

/// All elements of the finite matrix group generated by `generators`,
/// deduplicated on an `1e-8` grid. Fails past [`MATRIX_GROUP_LIMIT`].
pub fn matrix_group_closure(generators: &[UnitaryMatrix]) -> Result<Vec<UnitaryMatrix>> {
    let n = generators.first().map_or(1, UnitaryMatrix::dim);
    let gens: Vec<RoundedKey> = generators.iter().map(|g| rounded(g.matrix().clone())).collect();
    let elements = close_under(
        rounded(CMatrix::identity(n, n)),
        &gens,
        |a, b| rounded(&a.1 * &b.1),
        MATRIX_GROUP_LIMIT,
    )?;
    Ok(elements
        .into_iter()
        .map(|k| UnitaryMatrix::new_unchecked(k.1))
        .collect())
}

/// Words of length at most `radius` in the generators and their inverses.
pub fn word_ball(generators: &[UnitaryMatrix], radius: usize) -> Vec<UnitaryMatrix> {
    let n = generators.first().map_or(1, UnitaryMatrix::dim);
    let mut letters: Vec<UnitaryMatrix> = generators.to_vec();
    letters.extend(generators.iter().map(GroupElement::inverse));
    let mut seen = HashSet::new();
    let id = rounded(CMatrix::identity(n, n));
    seen.insert(id.clone());
    let mut ball = vec![id.1];
    let mut layer = ball.clone();
    for _ in 0..radius {
        let mut next = Vec::new();
        for w in &layer {
            for l in &letters {
                let key = rounded(w * l.matrix());
                if seen.insert(key.clone()) {
                    next.push(key.1);
                }
            }
        }
        ball.extend(next.iter().cloned());
        layer = next;
    }
    ball.into_iter().map(UnitaryMatrix::new_unchecked).collect()
}
