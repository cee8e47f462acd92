//! The coordinate-permutation model realizing Thoma characters as
//! expectations of random positive definite functions.
//!
//! A configuration `ω ∈ Qⁿ` carries i.i.d. labels: `Plus(i)` with
//! probability `αᵢ`, `Minus(i)` with probability `βᵢ`, otherwise a uniform
//! point of `[0, δ]`. The infinite symmetric group permutes coordinates, and
//!
//! ```text
//! φ_ω(g) = sgn(g, ω)  if g.ω = ω,   0 otherwise,
//! ```
//!
//! where `sgn(g, ω)` is the sign of `∏ (g(j) - g(i))` over pairs `i < j`
//! of `Minus`-labelled coordinates. Its mean over `ω` is `τ_{α,β}(g)`.
//!
//! Only finite prefixes are stored. `φ_ω(g)` depends on coordinates up to
//! `max(support(g))`, and so does the sign: for `i ≤ M = max(support(g))`
//! and `j > M` we have `g(j) - g(i) = j - g(i) > 0`, and pairs with both
//! indices above `M` are fixed by `g`. Every factor outside `[1, M]²` is
//! positive.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::{FinitaryPermutation, Sign};
use crate::thoma::ThomaParams;

/// A point of `Q = ℕ₊ ⊔ ℕ₋ ⊔ [0, δ]`. Atom indices are 1-based.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub enum Label {
    Plus(usize),
    Minus(usize),
    Continuum(f64),
}

impl PartialEq for Label {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Label::Plus(a), Label::Plus(b)) => a == b,
            (Label::Minus(a), Label::Minus(b)) => a == b,
            (Label::Continuum(a), Label::Continuum(b)) => a.to_bits() == b.to_bits(),
            _ => false,
        }
    }
}

impl Eq for Label {}

impl Label {
    pub fn is_minus(&self) -> bool {
        matches!(self, Label::Minus(_))
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Plus(i) => write!(f, "+{i}"),
            Label::Minus(i) => write!(f, "-{i}"),
            Label::Continuum(u) => write!(f, "c{u:.6}"),
        }
    }
}

/// Finite prefix `(ω₁, ..., ωₙ)` of a point of `Ω = Q^ℕ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    labels: Vec<Label>,
    params: ThomaParams,
}

/// Draws one label from `μ`.
pub fn sample_label<R: Rng + ?Sized>(params: &ThomaParams, rng: &mut R) -> Label {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &a) in params.alpha().iter().enumerate() {
        acc += a;
        if u < acc {
            return Label::Plus(i + 1);
        }
    }
    for (i, &b) in params.beta().iter().enumerate() {
        acc += b;
        if u < acc {
            return Label::Minus(i + 1);
        }
    }
    let delta = params.delta();
    if delta > 0.0 {
        return Label::Continuum(rng.random::<f64>() * delta);
    }
    // δ = 0 and u landed in rounding slack above the accumulated atom mass
    match (params.alpha().len(), params.beta().len()) {
        (_, nb) if nb > 0 => Label::Minus(nb),
        (na, _) => Label::Plus(na.max(1)),
    }
}

/// `n` i.i.d. labels drawn from `μ`.
pub fn sample_config<R: Rng + ?Sized>(params: &ThomaParams, n: usize, rng: &mut R) -> Configuration {
    assert!(n >= 1, "configurations have at least one coordinate");
    let labels = (0..n).map(|_| sample_label(params, rng)).collect();
    Configuration {
        labels,
        params: params.clone(),
    }
}

impl Configuration {
    /// Builds a configuration from explicit labels, checking them against `params`.
    pub fn from_labels(params: &ThomaParams, labels: Vec<Label>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Precondition("configuration must be nonempty".into()));
        }
        let delta = params.delta();
        for (i, label) in labels.iter().enumerate() {
            let ok = match *label {
                Label::Plus(k) => k >= 1 && k <= params.alpha().len(),
                Label::Minus(k) => k >= 1 && k <= params.beta().len(),
                Label::Continuum(u) => (0.0..=delta).contains(&u),
            };
            if !ok {
                return Err(Error::Precondition(format!(
                    "label {label} at coordinate {} is outside the support of the parameters",
                    i + 1
                )));
            }
        }
        Ok(Self {
            labels,
            params: params.clone(),
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn params(&self) -> &ThomaParams {
        &self.params
    }

    /// Coordinate `i` (1-based).
    pub fn label(&self, i: usize) -> Label {
        self.labels[i - 1]
    }

    fn check_fits(&self, g: &FinitaryPermutation) -> Result<()> {
        let needed = g.max_support();
        if needed > self.len() {
            return Err(Error::SupportExceedsLength {
                needed,
                len: self.len(),
            });
        }
        Ok(())
    }

    /// `h.ω` with `(h.ω)ᵢ = ω_{h⁻¹(i)}`.
    pub fn act(&self, h: &FinitaryPermutation) -> Result<Self> {
        self.check_fits(h)?;
        let mut labels = self.labels.clone();
        for i in h.support() {
            // (h.ω)_{h(i)} = ω_i
            labels[h.apply(i) - 1] = self.labels[i - 1];
        }
        Ok(Self {
            labels,
            params: self.params.clone(),
        })
    }

    pub fn is_fixed(&self, g: &FinitaryPermutation) -> Result<bool> {
        self.check_fits(g)?;
        Ok(g.support().all(|i| self.label(g.apply(i)) == self.label(i)))
    }

    /// `sgn(g, ω)`, defined for every `g` whether or not it fixes `ω`.
    pub fn cocycle_sign(&self, g: &FinitaryPermutation) -> Result<Sign> {
        self.check_fits(g)?;
        let positions: Vec<usize> = (1..=g.max_support())
            .filter(|&i| self.label(i).is_minus())
            .collect();
        Ok(g.inversion_parity_unchecked(&positions))
    }

    /// `φ_ω(g)` in `{-1, 0, 1}`.
    pub fn phi(&self, g: &FinitaryPermutation) -> Result<f64> {
        if !self.is_fixed(g)? {
            return Ok(0.0);
        }
        Ok(self.cocycle_sign(g)?.to_f64())
    }
}

/// Free functions mirroring the [`Configuration`] methods.
pub fn act(h: &FinitaryPermutation, omega: &Configuration) -> Result<Configuration> {
    omega.act(h)
}

pub fn is_fixed(g: &FinitaryPermutation, omega: &Configuration) -> Result<bool> {
    omega.is_fixed(g)
}

pub fn cocycle_sign(g: &FinitaryPermutation, omega: &Configuration) -> Result<Sign> {
    omega.cocycle_sign(g)
}

pub fn phi(g: &FinitaryPermutation, omega: &Configuration) -> Result<f64> {
    omega.phi(g)
}

/// A probability-measure-preserving action that can be sampled.
pub trait PmpAction: Sync {
    type Point: Clone + PartialEq;
    type Element;

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Point;
    fn act(&self, g: &Self::Element, point: &Self::Point) -> Result<Self::Point>;

    fn is_fixed(&self, g: &Self::Element, point: &Self::Point) -> Result<bool> {
        Ok(self.act(g, point)? == *point)
    }
}

/// The coordinate-permutation action on `(Qⁿ, μⁿ)`.
#[derive(Debug, Clone)]
pub struct VkAction {
    pub params: ThomaParams,
    pub n: usize,
}

impl PmpAction for VkAction {
    type Point = Configuration;
    type Element = FinitaryPermutation;

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Configuration {
        sample_config(&self.params, self.n, rng)
    }

    fn act(&self, g: &FinitaryPermutation, point: &Configuration) -> Result<Configuration> {
        point.act(g)
    }

    fn is_fixed(&self, g: &FinitaryPermutation, point: &Configuration) -> Result<bool> {
        point.is_fixed(g)
    }
}

/// A unit-modulus cocycle `c(gh, ω) = c(h, ω) c(g, h.ω)`.
pub trait Cocycle<A: PmpAction>: Sync {
    fn value(&self, action: &A, g: &A::Element, point: &A::Point) -> Result<Complex64>;
}

/// `c ≡ 1`; yields the stabilizer indicator.
#[derive(Debug, Clone, Copy, Default)]
pub struct TrivialCocycle;

impl<A: PmpAction> Cocycle<A> for TrivialCocycle {
    fn value(&self, _: &A, _: &A::Element, _: &A::Point) -> Result<Complex64> {
        Ok(Complex64::new(1.0, 0.0))
    }
}

/// The sign cocycle on the coordinate-permutation action.
#[derive(Debug, Clone, Copy, Default)]
pub struct SignCocycle;

impl Cocycle<VkAction> for SignCocycle {
    fn value(
        &self,
        _: &VkAction,
        g: &FinitaryPermutation,
        point: &Configuration,
    ) -> Result<Complex64> {
        Ok(Complex64::new(point.cocycle_sign(g)?.to_f64(), 0.0))
    }
}

/// The random positive definite function `φ_ω(g) = c(g, ω)·[g.ω = ω]`.
#[derive(Debug, Clone)]
pub struct CocycleIrpdf<A, C> {
    pub action: A,
    pub cocycle: C,
}

pub fn make_cocycle_irpdf<A: PmpAction, C: Cocycle<A>>(action: A, cocycle: C) -> CocycleIrpdf<A, C> {
    CocycleIrpdf { action, cocycle }
}

impl<A: PmpAction, C: Cocycle<A>> CocycleIrpdf<A, C> {
    pub fn evaluate(&self, point: &A::Point, g: &A::Element) -> Result<Complex64> {
        if self.action.is_fixed(g, point)? {
            self.cocycle.value(&self.action, g, point)
        } else {
            Ok(Complex64::new(0.0, 0.0))
        }
    }

    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> A::Point {
        self.action.sample(rng)
    }
}
