//! Fixed-point algebras of `L^∞(Ω) ⊗ M_d` for finite groups acting on finite
//! probability spaces.
//!
//! A [`MatrixField`] assigns a `d × d` matrix `f_ω` to every point. The
//! group acts by
//!
//! ```text
//! θ_γ(f)_{γ.ω} = π(γ) f_ω π(γ)⁻¹
//! ```
//!
//! and the fixed points `M^θ` form a finite-dimensional C*-algebra. Positive
//! fixed fields with trace 1 correspond to random positive definite
//! functions `φ_ω(γ) = tr(π(γ) f_ω)/d`, and minimal projections of `M^θ` to
//! the extremal ones.
//!
//! The trace is `τ_M(f) = Σ_ω μ(ω) tr(f_ω)/d` and fields carry the inner
//! product `⟨f, g⟩ = τ_M(f* g)`.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::group::{close_under, FiniteGroup, TableElement};
use crate::linalg::{self, CMatrix, CVector};
use crate::linear_examples::UnitVector;
use crate::rep::FiniteRepresentation;

/// Residual bound on invariance, idempotency, adjointness and orthonormality.
pub const ALGEBRA_TOLERANCE: f64 = 1e-9;

/// Seed for the generic elements used by [`minimal_projections`].
pub const DEFAULT_PROJECTION_SEED: u64 = 0x1BAD_5EED;

/// A finite group acting on finitely many points with an invariant
/// probability vector.
#[derive(Debug, Clone)]
pub struct FiniteActionSpace {
    group: Arc<FiniteGroup>,
    /// `action[g][ω] = g.ω`
    action: Vec<Vec<usize>>,
    weights: Vec<f64>,
}

impl FiniteActionSpace {
    pub fn new(group: Arc<FiniteGroup>, action: Vec<Vec<usize>>, weights: Vec<f64>) -> Result<Self> {
        let n_points = weights.len();
        if n_points == 0 {
            return Err(Error::InvalidAction("no points".into()));
        }
        if action.len() != group.order() {
            return Err(Error::InvalidAction(format!(
                "action table has {} rows for a group of order {}",
                action.len(),
                group.order()
            )));
        }
        for (g, row) in action.iter().enumerate() {
            if row.len() != n_points {
                return Err(Error::InvalidAction(format!(
                    "row {g} has {} entries for {n_points} points",
                    row.len()
                )));
            }
            let mut hit = vec![false; n_points];
            for &w in row {
                if w >= n_points || std::mem::replace(&mut hit[w], true) {
                    return Err(Error::InvalidAction(format!(
                        "element {g} does not act by a bijection"
                    )));
                }
            }
        }
        let e = group.identity();
        if action[e].iter().enumerate().any(|(w, &v)| w != v) {
            return Err(Error::InvalidAction("identity does not act trivially".into()));
        }
        for a in 0..group.order() {
            for b in 0..group.order() {
                let ab = group.mul(a, b);
                if (0..n_points).any(|w| action[ab][w] != action[a][action[b][w]]) {
                    return Err(Error::InvalidAction(format!(
                        "(g{a}·g{b}).ω differs from g{a}.(g{b}.ω)"
                    )));
                }
            }
        }
        if weights.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidAction("weights must be positive".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidAction(format!("weights sum to {total}, not 1")));
        }
        for row in &action {
            for (w, &v) in row.iter().enumerate() {
                if weights[v] != weights[w] {
                    return Err(Error::InvalidAction(format!(
                        "weights are not invariant: μ({v}) = {} but μ({w}) = {}",
                        weights[v], weights[w]
                    )));
                }
            }
        }
        Ok(Self {
            group,
            action,
            weights,
        })
    }

    /// The group acting on itself by left multiplication, uniform weights.
    pub fn left_multiplication(group: Arc<FiniteGroup>) -> Self {
        let n = group.order();
        let action = (0..n).map(|g| (0..n).map(|h| group.mul(g, h)).collect()).collect();
        Self::new(group, action, vec![1.0 / n as f64; n]).expect("left multiplication is an action")
    }

    /// A single point.
    pub fn point(group: Arc<FiniteGroup>) -> Self {
        let action = vec![vec![0]; group.order()];
        Self::new(group, action, vec![1.0]).expect("trivial action")
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn act(&self, g: usize, point: usize) -> usize {
        self.action[g][point]
    }

    pub fn is_transitive(&self) -> bool {
        let orbit: std::collections::BTreeSet<usize> = self.action.iter().map(|row| row[0]).collect();
        orbit.len() == self.len()
    }
}

/// One `d × d` matrix per point of a [`FiniteActionSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixField {
    mats: Vec<CMatrix>,
}

impl MatrixField {
    pub fn new(mats: Vec<CMatrix>) -> Result<Self> {
        let d = mats.first().map_or(0, CMatrix::nrows);
        if mats.is_empty() {
            return Err(Error::Precondition("a field needs at least one point".into()));
        }
        for m in &mats {
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: m.nrows().max(m.ncols()),
                });
            }
        }
        Ok(Self { mats })
    }

    pub fn identity(points: usize, d: usize) -> Self {
        Self {
            mats: vec![CMatrix::identity(d, d); points],
        }
    }

    pub fn zeros(points: usize, d: usize) -> Self {
        Self {
            mats: vec![CMatrix::zeros(d, d); points],
        }
    }

    pub fn points(&self) -> usize {
        self.mats.len()
    }

    pub fn dim(&self) -> usize {
        self.mats[0].nrows()
    }

    pub fn at(&self, point: usize) -> &CMatrix {
        &self.mats[point]
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.mats
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&CMatrix, &CMatrix) -> CMatrix) -> Self {
        Self {
            mats: self.mats.iter().zip(&other.mats).map(|(a, b)| f(a, b)).collect(),
        }
    }

    fn map(&self, f: impl Fn(&CMatrix) -> CMatrix) -> Self {
        Self {
            mats: self.mats.iter().map(f).collect(),
        }
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|a| a * s)
    }

    pub fn adjoint(&self) -> Self {
        self.map(|a| a.adjoint())
    }

    /// Largest entrywise modulus over all points.
    pub fn max_abs(&self) -> f64 {
        self.mats.iter().map(linalg::max_abs).fold(0.0, f64::max)
    }

    /// `τ_M(f) = Σ μ(ω) tr(f_ω)/d`.
    pub fn trace(&self, space: &FiniteActionSpace) -> Complex64 {
        let d = self.dim() as f64;
        self.mats
            .iter()
            .zip(space.weights())
            .map(|(m, &w)| linalg::trace(m) * (w / d))
            .sum()
    }

    /// `⟨f, g⟩ = τ_M(f* g)`.
    pub fn inner(&self, other: &Self, space: &FiniteActionSpace) -> Complex64 {
        let d = self.dim() as f64;
        self.mats
            .iter()
            .zip(&other.mats)
            .zip(space.weights())
            .map(|((a, b), &w)| a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum::<Complex64>() * (w / d))
            .sum()
    }

    pub fn norm(&self, space: &FiniteActionSpace) -> f64 {
        self.inner(self, space).re.max(0.0).sqrt()
    }

    /// `Σ μ(ω) f_ω`.
    pub fn integral(&self, space: &FiniteActionSpace) -> CMatrix {
        let d = self.dim();
        self.mats
            .iter()
            .zip(space.weights())
            .fold(CMatrix::zeros(d, d), |acc, (m, &w)| acc + m * Complex64::new(w, 0.0))
    }

    /// `max ‖f_{γ.ω} - π(γ) f_ω π(γ)*‖` over the given group elements and all points.
    pub fn invariance_residual(
        &self,
        space: &FiniteActionSpace,
        rep: &FiniteRepresentation,
        elements: &[usize],
    ) -> f64 {
        let mut worst = 0.0f64;
        for &g in elements {
            let u = rep.matrix_at(g);
            for w in 0..self.points() {
                let lhs = &self.mats[space.act(g, w)];
                let rhs = u * &self.mats[w] * u.adjoint();
                worst = worst.max(linalg::max_abs(&(lhs - rhs)));
            }
        }
        worst
    }

    /// Numerical rank of `f_ω`.
    pub fn rank_at(&self, point: usize) -> usize {
        let (values, _) = linalg::hermitian_eigen(&self.mats[point]);
        values.iter().filter(|v| v.abs() > 1e-8).count()
    }
}

/// Orthonormal basis of `M^θ`.
#[derive(Debug, Clone)]
pub struct FixedPointBasis {
    space: FiniteActionSpace,
    rep: FiniteRepresentation,
    basis: Vec<MatrixField>,
}

impl FixedPointBasis {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn fields(&self) -> &[MatrixField] {
        &self.basis
    }

    pub fn space(&self) -> &FiniteActionSpace {
        &self.space
    }

    pub fn rep(&self) -> &FiniteRepresentation {
        &self.rep
    }

    /// Coefficients `cⱼ = ⟨bⱼ, f⟩`.
    pub fn coordinates(&self, f: &MatrixField) -> Vec<Complex64> {
        self.basis.iter().map(|b| b.inner(f, &self.space)).collect()
    }

    pub fn combine(&self, coeffs: &[Complex64]) -> MatrixField {
        let d = self.rep.dimension();
        self.basis
            .iter()
            .zip(coeffs)
            .fold(MatrixField::zeros(self.space.len(), d), |acc, (b, &c)| acc.add(&b.scale(c)))
    }

    /// `‖f - P f‖` for the orthogonal projection `P` onto `M^θ`.
    pub fn membership_residual(&self, f: &MatrixField) -> f64 {
        let proj = self.combine(&self.coordinates(f));
        f.sub(&proj).max_abs()
    }

    /// Checks that products and adjoints of basis elements stay in the span.
    pub fn closure_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in &self.basis {
            worst = worst.max(self.membership_residual(&a.adjoint()));
            for b in &self.basis {
                worst = worst.max(self.membership_residual(&a.mul(b)));
            }
        }
        worst
    }
}

fn check_compatible(space: &FiniteActionSpace, rep: &FiniteRepresentation) -> Result<()> {
    if !Arc::ptr_eq(space.group(), rep.group()) && space.group().table() != rep.group().table() {
        return Err(Error::Precondition(
            "action space and representation are over different groups".into(),
        ));
    }
    Ok(())
}

/// Solves `f_{γ.ω} = π(γ) f_ω π(γ)⁻¹` for all generators `γ` and points `ω`
/// and returns an orthonormal basis of the solutions.
pub fn fixed_space(
    space: &FiniteActionSpace,
    rep: &FiniteRepresentation,
    generators: &[usize],
) -> Result<FixedPointBasis> {
    check_compatible(space, rep)?;
    let group = space.group();
    let generated = close_under(group.identity(), generators, |&a, &b| group.mul(a, b), group.order())?;
    if generated.len() != group.order() {
        return Err(Error::Precondition(format!(
            "generators span a subgroup of order {} in a group of order {}",
            generated.len(),
            group.order()
        )));
    }

    let d = rep.dimension();
    let p = space.len();
    let block = d * d;
    let idx = |w: usize, r: usize, c: usize| w * block + r * d + c;
    // unknowns are scaled by sqrt(μ(ω)/d) so the Euclidean product matches ⟨·,·⟩
    let scale: Vec<f64> = space.weights().iter().map(|&w| (w / d as f64).sqrt()).collect();

    let rows = generators.len() * p * block;
    let mut system = CMatrix::zeros(rows.max(1), p * block);
    let mut row = 0;
    for &g in generators {
        let u = rep.matrix_at(g);
        for w in 0..p {
            let target = space.act(g, w);
            for r in 0..d {
                for c in 0..d {
                    system[(row, idx(target, r, c))] += Complex64::new(1.0 / scale[target], 0.0);
                    for a in 0..d {
                        for b in 0..d {
                            system[(row, idx(w, a, b))] -= u[(r, a)] * u[(c, b)].conj() / scale[w];
                        }
                    }
                    row += 1;
                }
            }
        }
    }

    let null = linalg::nullspace(&system, 1e-10);
    let basis: Vec<MatrixField> = (0..null.ncols())
        .map(|k| MatrixField {
            mats: (0..p)
                .map(|w| CMatrix::from_fn(d, d, |r, c| null[(idx(w, r, c), k)] / scale[w]))
                .collect(),
        })
        .collect();

    let all: Vec<usize> = (0..group.order()).collect();
    for (k, b) in basis.iter().enumerate() {
        let residual = b.invariance_residual(space, rep, &all);
        if residual > ALGEBRA_TOLERANCE {
            return Err(Error::Precondition(format!(
                "basis field {k} has invariance residual {residual:e}"
            )));
        }
    }
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate() {
            let expected = if i == j { 1.0 } else { 0.0 };
            let err = (a.inner(b, space) - Complex64::new(expected, 0.0)).norm();
            if err > ALGEBRA_TOLERANCE {
                return Err(Error::Precondition(format!(
                    "basis fields {i}, {j} are not orthonormal (error {err:e})"
                )));
            }
        }
    }

    Ok(FixedPointBasis {
        space: space.clone(),
        rep: rep.clone(),
        basis,
    })
}

/// Block structure of `M^θ ≅ ⊕ M_{kᵢ}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraStructure {
    pub center_dimension: usize,
    /// `kᵢ` for each simple summand.
    pub block_sizes: Vec<usize>,
}

/// Spectral projections of a self-adjoint field, grouping eigenvalues across
/// all points that agree within `cluster_tol`.
fn spectral_projections(a: &MatrixField, cluster_tol: f64) -> Vec<(f64, MatrixField)> {
    let d = a.dim();
    let eigs: Vec<(Vec<f64>, CMatrix)> = a.mats.iter().map(linalg::hermitian_eigen).collect();
    let mut all: Vec<f64> = eigs.iter().flat_map(|(v, _)| v.iter().copied()).collect();
    all.sort_by(f64::total_cmp);
    let mut centers: Vec<f64> = Vec::new();
    let mut start = 0;
    for i in 1..=all.len() {
        if i == all.len() || all[i] - all[i - 1] > cluster_tol {
            centers.push(all[start..i].iter().sum::<f64>() / (i - start) as f64);
            start = i;
        }
    }
    let nearest = |v: f64| {
        (0..centers.len())
            .min_by(|&i, &j| (centers[i] - v).abs().total_cmp(&(centers[j] - v).abs()))
            .expect("at least one eigenvalue")
    };
    let mut parts: Vec<MatrixField> = vec![MatrixField::zeros(a.points(), d); centers.len()];
    for (w, (vals, vecs)) in eigs.iter().enumerate() {
        for (k, &v) in vals.iter().enumerate() {
            let col = vecs.column(k);
            parts[nearest(v)].mats[w] += col * col.adjoint();
        }
    }
    centers.into_iter().zip(parts).collect()
}

fn random_self_adjoint(basis: &FixedPointBasis, rng: &mut ChaCha8Rng) -> MatrixField {
    let coeffs: Vec<Complex64> = (0..basis.dimension())
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let x = basis.combine(&coeffs);
    x.add(&x.adjoint()).scale(Complex64::new(0.5, 0.0))
}

/// Numerical rank of a list of fields under `⟨·,·⟩`.
fn span_rank(fields: &[MatrixField], space: &FiniteActionSpace) -> usize {
    if fields.is_empty() {
        return 0;
    }
    let n = fields.len();
    let g = CMatrix::from_fn(n, n, |i, j| fields[i].inner(&fields[j], space));
    let (values, _) = linalg::hermitian_eigen(&g);
    let top = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    values.iter().filter(|&&v| v > 1e-9 * top.max(1e-300)).count()
}

/// Orthonormal basis of the center `{z ∈ M^θ : zb = bz for all b}`.
pub fn center(basis: &FixedPointBasis) -> Vec<MatrixField> {
    let dim = basis.dimension();
    let p = basis.space.len();
    let d = basis.rep.dimension();
    let stride = p * d * d;
    let mut system = CMatrix::zeros((dim * stride).max(1), dim);
    for (j, bj) in basis.basis.iter().enumerate() {
        for (k, bk) in basis.basis.iter().enumerate() {
            let comm = bj.mul(bk).sub(&bk.mul(bj));
            for (w, m) in comm.mats.iter().enumerate() {
                for r in 0..d {
                    for c in 0..d {
                        system[(k * stride + w * d * d + r * d + c, j)] = m[(r, c)];
                    }
                }
            }
        }
    }
    let null = linalg::nullspace(&system, 1e-10);
    (0..null.ncols())
        .map(|k| basis.combine(&null.column(k).iter().copied().collect::<Vec<_>>()))
        .collect()
}

/// Minimal projections of `M^θ` summing to the identity field, using the
/// default seed for the generic elements.
pub fn minimal_projections(basis: &FixedPointBasis) -> Result<Vec<MatrixField>> {
    minimal_projections_seeded(basis, DEFAULT_PROJECTION_SEED)
}

/// As [`minimal_projections`]; different seeds select different (unitarily
/// conjugate) maximal families whenever some block has size at least 2.
pub fn minimal_projections_seeded(basis: &FixedPointBasis, seed: u64) -> Result<Vec<MatrixField>> {
    Ok(decompose(basis, seed)?.1)
}

/// Center dimension, block sizes and a maximal family of minimal projections.
pub fn decompose(basis: &FixedPointBasis, seed: u64) -> Result<(AlgebraStructure, Vec<MatrixField>)> {
    let space = &basis.space;
    let closure = basis.closure_residual();
    if closure > ALGEBRA_TOLERANCE {
        return Err(Error::NotClosed(closure));
    }
    let points = space.len();
    let d = basis.rep.dimension();
    let identity = MatrixField::identity(points, d);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let center_basis = center(basis);
    let all_elements: Vec<usize> = (0..space.group().order()).collect();

    const ATTEMPTS: usize = 16;
    let mut last_error = String::new();
    'attempt: for _ in 0..ATTEMPTS {
        // minimal central projections from a generic central self-adjoint element
        let coeffs: Vec<Complex64> = center_basis
            .iter()
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), 0.0))
            .collect();
        let z = center_basis
            .iter()
            .zip(&coeffs)
            .fold(MatrixField::zeros(points, d), |acc, (b, &c)| acc.add(&b.scale(c)));
        let z = z.add(&z.adjoint()).scale(Complex64::new(0.5, 0.0));
        let central = spectral_projections(&z, 1e-7);
        if central.len() != center_basis.len() {
            last_error = format!(
                "found {} central projections for a center of dimension {}",
                central.len(),
                center_basis.len()
            );
            continue;
        }

        let mut block_sizes = Vec::new();
        let mut projections = Vec::new();
        for (_, e) in &central {
            let block_fields: Vec<MatrixField> = basis.basis.iter().map(|b| e.mul(b)).collect();
            let block_dim = span_rank(&block_fields, space);
            let k = (block_dim as f64).sqrt().round() as usize;
            if k * k != block_dim {
                return Err(Error::Projection(format!(
                    "block of dimension {block_dim} is not a full matrix algebra"
                )));
            }
            // generic self-adjoint element of the block, with the complement
            // shifted away so its eigenvalue forms its own cluster
            let s = random_self_adjoint(basis, &mut rng);
            let shift = 10.0 * (1.0 + s.max_abs() * d as f64);
            let a = e
                .mul(&s)
                .mul(e)
                .add(&identity.sub(e).scale(Complex64::new(shift, 0.0)));
            let parts: Vec<MatrixField> = spectral_projections(&a, 1e-7)
                .into_iter()
                .filter(|(lambda, _)| (lambda - shift).abs() > 1.0)
                .map(|(_, p)| p)
                .collect();
            if parts.len() != k {
                last_error = format!("block of size {k} split into {} projections", parts.len());
                continue 'attempt;
            }
            for p in &parts {
                if let Err(e) = verify_minimal_projection(basis, p, &all_elements) {
                    last_error = e.to_string();
                    continue 'attempt;
                }
            }
            block_sizes.push(k);
            projections.extend(parts);
        }

        let total = projections
            .iter()
            .fold(MatrixField::zeros(points, d), |acc, p| acc.add(p));
        let completeness = total.sub(&identity).max_abs();
        if completeness > ALGEBRA_TOLERANCE {
            last_error = format!("projections sum to the identity only up to {completeness:e}");
            continue;
        }
        return Ok((
            AlgebraStructure {
                center_dimension: center_basis.len(),
                block_sizes,
            },
            projections,
        ));
    }
    Err(Error::Projection(last_error))
}

/// Checks `p² = p = p*`, `p ∈ M^θ` and `p M^θ p = ℂ p`.
pub fn verify_minimal_projection(
    basis: &FixedPointBasis,
    p: &MatrixField,
    elements: &[usize],
) -> Result<()> {
    let idem = p.mul(p).sub(p).max_abs();
    let adj = p.adjoint().sub(p).max_abs();
    if idem > ALGEBRA_TOLERANCE || adj > ALGEBRA_TOLERANCE {
        return Err(Error::Projection(format!(
            "not a projection: |p² - p| = {idem:e}, |p* - p| = {adj:e}"
        )));
    }
    let inv = p.invariance_residual(&basis.space, &basis.rep, elements);
    let member = basis.membership_residual(p);
    if inv > ALGEBRA_TOLERANCE || member > ALGEBRA_TOLERANCE {
        return Err(Error::Projection(format!(
            "projection is not fixed: invariance residual {inv:e}, membership residual {member:e}"
        )));
    }
    let corner: Vec<MatrixField> = basis.basis.iter().map(|b| p.mul(b).mul(p)).collect();
    let rank = span_rank(&corner, &basis.space);
    if rank != 1 {
        return Err(Error::Projection(format!(
            "projection is not minimal: corner algebra has dimension {rank}"
        )));
    }
    Ok(())
}

/// Outcome of comparing `Σ μ(ω) f_ω` with `τ_M(f)·1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectationCheck {
    pub holds: bool,
    pub residual: f64,
    pub trace: Complex64,
}

pub fn expectation_identity_check(f: &MatrixField, space: &FiniteActionSpace) -> ExpectationCheck {
    let d = f.dim();
    let trace = f.trace(space);
    let residual = linalg::spectral_norm(&(f.integral(space) - CMatrix::identity(d, d) * trace));
    ExpectationCheck {
        holds: residual <= ALGEBRA_TOLERANCE,
        residual,
        trace,
    }
}

/// The random positive definite function `φ_ω(γ) = tr(π(γ) f_ω)/d`.
#[derive(Debug, Clone)]
pub struct FieldIrpdf {
    field: MatrixField,
    rep: FiniteRepresentation,
    space: FiniteActionSpace,
}

/// Validates `f` and wraps it as a family of positive definite functions.
///
/// Requires a transitive action, an irreducible `π`, `f` θ-invariant, each
/// `f_ω` positive semidefinite, and `τ_M(f) = 1`.
pub fn irpdf_from_positive_element(
    f: &MatrixField,
    rep: &FiniteRepresentation,
    space: &FiniteActionSpace,
) -> Result<FieldIrpdf> {
    check_compatible(space, rep)?;
    if !space.is_transitive() {
        return Err(Error::Precondition("the action must be transitive".into()));
    }
    if !rep.is_irreducible() {
        return Err(Error::Precondition(format!(
            "the representation must be irreducible, ⟨χ, χ⟩ = {}",
            rep.character_norm()
        )));
    }
    if f.points() != space.len() || f.dim() != rep.dimension() {
        return Err(Error::DimensionMismatch {
            expected: space.len() * rep.dimension(),
            found: f.points() * f.dim(),
        });
    }
    let all: Vec<usize> = (0..space.group().order()).collect();
    let residual = f.invariance_residual(space, rep, &all);
    if residual > ALGEBRA_TOLERANCE {
        return Err(Error::Precondition(format!(
            "field is not invariant: residual {residual:e} > {ALGEBRA_TOLERANCE:e}"
        )));
    }
    for (w, m) in f.mats.iter().enumerate() {
        let asym = linalg::hermitian_defect(m);
        if asym > ALGEBRA_TOLERANCE {
            return Err(Error::Precondition(format!(
                "f at point {w} is not self-adjoint: |f - f*| = {asym:e}"
            )));
        }
        let (values, _) = linalg::hermitian_eigen(m);
        if values[0] < -ALGEBRA_TOLERANCE {
            return Err(Error::Precondition(format!(
                "f at point {w} has eigenvalue {} < 0",
                values[0]
            )));
        }
    }
    let tau = f.trace(space);
    if (tau - Complex64::new(1.0, 0.0)).norm() > ALGEBRA_TOLERANCE {
        return Err(Error::Precondition(format!("τ_M(f) = {tau} ≠ 1")));
    }
    Ok(FieldIrpdf {
        field: f.clone(),
        rep: rep.clone(),
        space: space.clone(),
    })
}

impl FieldIrpdf {
    /// `φ_ω(γ)` for point index `ω` and group element index `γ`.
    pub fn phi(&self, point: usize, gamma: usize) -> Complex64 {
        let m = self.rep.matrix_at(gamma) * self.field.at(point);
        linalg::trace(&m) / self.field.dim() as f64
    }

    /// `φ_ω` as a function on group elements.
    pub fn at(&self, point: usize) -> impl Fn(&TableElement) -> Complex64 + '_ {
        move |g| self.phi(point, g.index())
    }

    /// `Σ μ(ω) φ_ω(γ)`.
    pub fn expectation(&self, gamma: usize) -> Complex64 {
        (0..self.space.len())
            .map(|w| self.phi(w, gamma) * self.space.weights()[w])
            .sum()
    }

    pub fn field(&self) -> &MatrixField {
        &self.field
    }

    /// `max |φ_{γ'.ω}(γ) - φ_ω(γ'⁻¹ γ γ')|` over all points and pairs.
    pub fn equivariance_defect(&self) -> f64 {
        let g = self.space.group();
        let mut worst = 0.0f64;
        for w in 0..self.space.len() {
            for gp in 0..g.order() {
                let moved = self.space.act(gp, w);
                for gamma in 0..g.order() {
                    let conj = g.mul(g.mul(g.inv(gp), gamma), gp);
                    worst = worst.max((self.phi(moved, gamma) - self.phi(w, conj)).norm());
                }
            }
        }
        worst
    }
}

/// For the left-multiplication space: `f_g = d · P_{π(g)ξ}`, the field
/// whose positive definite functions are `⟨π(hg)ξ, π(g)ξ⟩`.
pub fn vector_state_field(
    space: &FiniteActionSpace,
    rep: &FiniteRepresentation,
    xi: &UnitVector,
) -> Result<MatrixField> {
    check_compatible(space, rep)?;
    let d = rep.dimension();
    if xi.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: xi.dim(),
        });
    }
    let group = space.group();
    if space.len() != group.order()
        || (0..group.order()).any(|g| space.act(g, group.identity()) != g)
    {
        return Err(Error::Precondition(
            "vector state fields live on the left-multiplication space".into(),
        ));
    }
    let mats = (0..group.order())
        .map(|g| {
            let v: CVector = rep.matrix_at(g) * xi.vector();
            &v * v.adjoint() * Complex64::new(d as f64, 0.0)
        })
        .collect();
    MatrixField::new(mats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ONE;
    use crate::rep::{permutation_matrix, sign_representation, standard_representation, FiniteRepresentation};

    fn s3() -> (Arc<FiniteGroup>, Vec<crate::perm::FinitaryPermutation>, FiniteRepresentation) {
        standard_representation(3).unwrap()
    }

    fn index_of(elements: &[crate::perm::FinitaryPermutation], s: &str) -> usize {
        let target: crate::perm::FinitaryPermutation = s.parse().unwrap();
        elements.iter().position(|g| *g == target).unwrap()
    }

    #[test]
    fn point_space_with_irreducible_rep_has_scalar_fixed_points() {
        let (group, elements, rep) = s3();
        let space = FiniteActionSpace::point(Arc::clone(&group));
        let gens = [index_of(&elements, "(1 2)"), index_of(&elements, "(1 2 3)")];
        let basis = fixed_space(&space, &rep, &gens).unwrap();
        assert_eq!(basis.dimension(), 1);
        let f = &basis.fields()[0];
        // a unit multiple of the identity
        let z = f.at(0)[(0, 0)];
        assert!((z.norm() - 1.0).abs() < 1e-9);
        assert!((f.at(0) - CMatrix::identity(2, 2) * z).norm() < 1e-9);
    }

    #[test]
    fn left_multiplication_gives_d_squared() {
        let (group, elements, rep) = s3();
        let space = FiniteActionSpace::left_multiplication(Arc::clone(&group));
        let gens = [index_of(&elements, "(1 2)"), index_of(&elements, "(1 2 3)")];
        let basis = fixed_space(&space, &rep, &gens).unwrap();
        assert_eq!(basis.dimension(), 4);
        // each solution is determined by its value at e: f_g = π(g) f_e π(g)⁻¹
        let e = group.identity();
        for b in basis.fields() {
            for g in 0..6 {
                let u = rep.matrix_at(g);
                let expected = u * b.at(e) * u.adjoint();
                assert!((b.at(g) - expected).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn trivial_rep_on_transitive_space_gives_constants() {
        let (group, elements, _) = s3();
        let trivial = FiniteRepresentation::new(
            Arc::clone(&group),
            vec![CMatrix::identity(1, 1); 6],
        )
        .unwrap();
        let space = FiniteActionSpace::left_multiplication(Arc::clone(&group));
        let gens = [index_of(&elements, "(1 2)"), index_of(&elements, "(1 2 3)")];
        let basis = fixed_space(&space, &trivial, &gens).unwrap();
        assert_eq!(basis.dimension(), 1);
        let f = &basis.fields()[0];
        for g in 1..6 {
            assert!((f.at(g) - f.at(0)).norm() < 1e-9);
        }
    }

    #[test]
    fn dimension_independent_of_generators() {
        let (group, elements, rep) = s3();
        let space = FiniteActionSpace::left_multiplication(Arc::clone(&group));
        let a = [index_of(&elements, "(1 2)"), index_of(&elements, "(1 2 3)")];
        let b = [index_of(&elements, "(1 2)"), index_of(&elements, "(2 3)")];
        let all: Vec<usize> = (0..6).collect();
        let da = fixed_space(&space, &rep, &a).unwrap().dimension();
        let db = fixed_space(&space, &rep, &b).unwrap().dimension();
        let dc = fixed_space(&space, &rep, &all).unwrap().dimension();
        assert_eq!((da, db, dc), (4, 4, 4));
    }

    #[test]
    fn non_generating_set_rejected() {
        let (group, elements, rep) = s3();
        let space = FiniteActionSpace::left_multiplication(Arc::clone(&group));
        let gens = [index_of(&elements, "(1 2)")];
        assert!(fixed_space(&space, &rep, &gens).is_err());
    }

    #[test]
    fn non_invariant_weights_rejected() {
        let (group, _, _) = s3();
        let n = group.order();
        let action = (0..n).map(|g| (0..n).map(|h| group.mul(g, h)).collect()).collect();
        let weights = vec![0.25, 0.15, 0.15, 0.15, 0.15, 0.15];
        let r = FiniteActionSpace::new(Arc::clone(&group), action, weights);
        assert!(matches!(r, Err(Error::InvalidAction(_))));
    }

    #[test]
    fn one_dimensional_algebra_has_identity_as_only_projection() {
        let (group, elements, rep) = s3();
        let space = FiniteActionSpace::point(Arc::clone(&group));
        let gens = [index_of(&elements, "(1 2)"), index_of(&elements, "(1 2 3)")];
        let basis = fixed_space(&space, &rep, &gens).unwrap();
        let projections = minimal_projections(&basis).unwrap();
        assert_eq!(projections.len(), 1);
        assert!(projections[0].sub(&MatrixField::identity(1, 2)).max_abs() < 1e-9);
    }

    #[test]
    fn reducible_rep_on_point_gives_two_blocks() {
        // S3 permutation representation on a point: M^θ = commutant = ℂ ⊕ ℂ
        let (group, elements) = FiniteGroup::symmetric(3).unwrap();
        let group = Arc::new(group);
        let mats = elements
            .iter()
            .map(|s| crate::rep::permutation_matrix(s, 3))
            .collect();
        let rep = FiniteRepresentation::new(Arc::clone(&group), mats).unwrap();
        let space = FiniteActionSpace::point(Arc::clone(&group));
        let all: Vec<usize> = (0..6).collect();
        let basis = fixed_space(&space, &rep, &all).unwrap();
        assert_eq!(basis.dimension(), 2);
        let (structure, projections) = decompose(&basis, 3).unwrap();
        assert_eq!(structure.center_dimension, 2);
        assert_eq!(structure.block_sizes, vec![1, 1]);
        let mut ranks: Vec<usize> = projections.iter().map(|p| p.rank_at(0)).collect();
        ranks.sort();
        assert_eq!(ranks, vec![1, 2]);
    }

    #[test]
    fn sign_rep_fixed_space_on_left_multiplication() {
        let (group, _, rep) = sign_representation(3).unwrap();
        let space = FiniteActionSpace::left_multiplication(Arc::clone(&group));
        let all: Vec<usize> = (0..6).collect();
        let basis = fixed_space(&space, &rep, &all).unwrap();
        assert_eq!(basis.dimension(), 1);
    }

    #[test]
    fn expectation_check_negative_control() {
        let (group, _, _) = s3();
        let space = FiniteActionSpace::left_multiplication(Arc::clone(&group));
        let mut mats = vec![CMatrix::zeros(2, 2); 6];
        mats[0][(0, 0)] = ONE * 6.0;
        let f = MatrixField::new(mats).unwrap();
        let check = expectation_identity_check(&f, &space);
        assert!(!check.holds);
        assert!(check.residual > 0.1);
    }

    #[test]
    fn irpdf_precondition_errors() {
        let (group, _, rep) = s3();
        let space = FiniteActionSpace::left_multiplication(Arc::clone(&group));
        let doubled = MatrixField::identity(6, 2).scale(Complex64::new(2.0, 0.0));
        let e = irpdf_from_positive_element(&doubled, &rep, &space).unwrap_err();
        assert!(e.to_string().contains("τ_M"), "{e}");
        let mut mats = vec![CMatrix::identity(2, 2); 6];
        mats[2][(0, 0)] = ONE * 3.0;
        let bumped = MatrixField::new(mats).unwrap();
        let e = irpdf_from_positive_element(&bumped, &rep, &space).unwrap_err();
        assert!(e.to_string().contains("invariant"), "{e}");
    }

    #[test]
    fn irpdf_requires_transitive_irreducible_model() {
        let (group, elements, rep) = s3();
        // two orbits: the identity coset and the rest
        let action: Vec<Vec<usize>> = (0..6).map(|_| (0..2).collect()).collect();
        let two_points = FiniteActionSpace::new(Arc::clone(&group), action, vec![0.5, 0.5]).unwrap();
        let f = MatrixField::identity(2, 2);
        let e = irpdf_from_positive_element(&f, &rep, &two_points).unwrap_err();
        assert!(e.to_string().contains("transitive"), "{e}");

        let mats = elements.iter().map(|s| permutation_matrix(s, 3)).collect();
        let reducible = FiniteRepresentation::new(Arc::clone(&group), mats).unwrap();
        let space = FiniteActionSpace::point(group);
        let e = irpdf_from_positive_element(&MatrixField::identity(1, 3), &reducible, &space).unwrap_err();
        assert!(e.to_string().contains("irreducible"), "{e}");
    }
}
