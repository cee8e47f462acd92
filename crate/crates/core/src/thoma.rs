//! Thoma parameters and the extremal characters `τ_{α,β}` of the infinite
//! symmetric group:
//!
//! ```text
//! τ_{α,β}(g) = ∏_{k≥2} s_k^{r_k(g)},   s_k = Σ αᵢᵏ + (-1)^{k+1} Σ βᵢᵏ
//! ```
//!
//! where `r_k(g)` counts the `k`-cycles of `g`. Only finitely supported
//! parameter sequences are represented.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::FinitaryPermutation;

/// Slack allowed on `Σα + Σβ ≤ 1`.
pub const SIMPLEX_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct ThomaParams {
    alpha: Vec<f64>,
    beta: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    #[serde(default)]
    alpha: Vec<f64>,
    #[serde(default)]
    beta: Vec<f64>,
}

impl TryFrom<RawParams> for ThomaParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        Self::new(raw.alpha, raw.beta)
    }
}

impl From<ThomaParams> for RawParams {
    fn from(p: ThomaParams) -> Self {
        RawParams {
            alpha: p.alpha,
            beta: p.beta,
        }
    }
}

fn normalize(name: &str, mut seq: Vec<f64>) -> Result<Vec<f64>> {
    for (i, &x) in seq.iter().enumerate() {
        if !x.is_finite() || x < 0.0 {
            return Err(Error::InvalidParams(format!(
                "{name}[{i}] = {x} is negative or not finite"
            )));
        }
        if x > 1.0 {
            return Err(Error::InvalidParams(format!("{name}[{i}] = {x} exceeds 1")));
        }
    }
    for (i, w) in seq.windows(2).enumerate() {
        if w[1] > w[0] {
            return Err(Error::InvalidParams(format!(
                "{name} must be non-increasing, but {name}[{}] = {} > {name}[{i}] = {}",
                i + 1,
                w[1],
                w[0]
            )));
        }
    }
    // non-increasing, so zeros form a suffix
    while seq.last() == Some(&0.0) {
        seq.pop();
    }
    Ok(seq)
}

impl ThomaParams {
    /// Validates and normalizes (trailing zeros dropped).
    pub fn new(alpha: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        let alpha = normalize("alpha", alpha)?;
        let beta = normalize("beta", beta)?;
        let total: f64 = alpha.iter().chain(&beta).sum();
        if total > 1.0 + SIMPLEX_TOLERANCE {
            return Err(Error::InvalidParams(format!(
                "sum of alpha and beta is {total}, which exceeds 1"
            )));
        }
        Ok(Self { alpha, beta })
    }

    /// `α = β = 0`: the regular character `δ_e`.
    pub fn regular() -> Self {
        Self {
            alpha: vec![],
            beta: vec![],
        }
    }

    /// `α = (1)`: the trivial character.
    pub fn trivial() -> Self {
        Self {
            alpha: vec![1.0],
            beta: vec![],
        }
    }

    /// `β = (1)`: the alternating character.
    pub fn alternating() -> Self {
        Self {
            alpha: vec![],
            beta: vec![1.0],
        }
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    /// Continuous mass `1 - Σα - Σβ`, clamped at 0.
    pub fn delta(&self) -> f64 {
        (1.0 - self.alpha.iter().sum::<f64>() - self.beta.iter().sum::<f64>()).max(0.0)
    }

    pub fn s_k(&self, k: usize) -> Result<f64> {
        if k < 2 {
            return Err(Error::CycleLengthTooSmall(k));
        }
        let exp = k as i32;
        let a: f64 = self.alpha.iter().map(|x| x.powi(exp)).sum();
        let b: f64 = self.beta.iter().map(|x| x.powi(exp)).sum();
        Ok(if k.is_multiple_of(2) { a - b } else { a + b })
    }

    /// `τ_{α,β}(g)`. Uses `s_k^0 = 1`, so `τ(e) = 1` for every parameter set.
    pub fn tau(&self, g: &FinitaryPermutation) -> f64 {
        g.cycle_counts()
            .into_iter()
            .map(|(k, r)| {
                self.s_k(k)
                    .expect("cycle lengths are at least 2")
                    .powi(r as i32)
            })
            .product()
    }

    /// Parameters `(α ∪ β sorted, ∅)`, whose character is the expectation of
    /// the plain stabilizer indicator on the same coordinate space.
    pub fn merged_atoms(&self) -> Self {
        let mut alpha: Vec<f64> = self.alpha.iter().chain(&self.beta).copied().collect();
        alpha.sort_by(|a, b| b.total_cmp(a));
        Self {
            alpha,
            beta: vec![],
        }
    }
}
