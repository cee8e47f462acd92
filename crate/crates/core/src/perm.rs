//! Finitary permutations of the positive integers.
//!
//! A [`FinitaryPermutation`] stores only the points it moves. Composition
//! follows `(p ∘ q)(i) = p(q(i))` everywhere in the crate.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::group::GroupElement;

/// A sign in `{+1, -1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_parity(odd: bool) -> Self {
        if odd {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn value(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn to_f64(self) -> f64 {
        f64::from(self.value())
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_parity(self != rhs)
    }
}

/// A bijection of `{1, 2, 3, ...}` moving finitely many points.
///
/// Fixed points are never stored, so structural equality is group equality
/// and the key set of the image table is exactly the support.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FinitaryPermutation {
    images: BTreeMap<usize, usize>,
}

impl FinitaryPermutation {
    pub fn identity() -> Self {
        Self::default()
    }

    /// Product of disjoint cycles. Each cycle `[a, b, c]` maps `a → b → c → a`.
    pub fn from_cycles<C: AsRef<[usize]>>(cycles: &[C]) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut images = BTreeMap::new();
        for cycle in cycles {
            let cycle = cycle.as_ref();
            for &point in cycle {
                if point == 0 {
                    return Err(Error::NonPositivePoint(point));
                }
                if !seen.insert(point) {
                    return Err(Error::DuplicatePoint(point));
                }
            }
            if cycle.len() < 2 {
                continue;
            }
            for (k, &point) in cycle.iter().enumerate() {
                images.insert(point, cycle[(k + 1) % cycle.len()]);
            }
        }
        Ok(Self { images })
    }

    /// Builds a permutation from explicit `(point, image)` pairs.
    ///
    /// Pairs with `point == image` are dropped. The remaining pairs must form
    /// a bijection of their domain onto itself.
    pub fn from_images<I: IntoIterator<Item = (usize, usize)>>(pairs: I) -> Result<Self> {
        let mut images = BTreeMap::new();
        for (from, to) in pairs {
            if from == 0 || to == 0 {
                return Err(Error::NonPositivePoint(0));
            }
            if images.insert(from, to).is_some() {
                return Err(Error::DuplicatePoint(from));
            }
        }
        images.retain(|from, to| from != to);
        let domain: BTreeSet<usize> = images.keys().copied().collect();
        let image: BTreeSet<usize> = images.values().copied().collect();
        if image.len() != images.len() {
            return Err(Error::NotABijection("two points share an image".into()));
        }
        if domain != image {
            return Err(Error::NotABijection(
                "the moved points are not closed under the map".into(),
            ));
        }
        Ok(Self { images })
    }

    /// The permutation of `{1..n}` given in one-line notation `[σ(1), ..., σ(n)]`.
    pub fn from_one_line(one_line: &[usize]) -> Result<Self> {
        Self::from_images(one_line.iter().enumerate().map(|(i, &v)| (i + 1, v)))
    }

    pub fn transposition(a: usize, b: usize) -> Result<Self> {
        Self::from_cycles(&[[a, b]])
    }

    /// Uniformly random permutation of `{1..n}`.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut one_line: Vec<usize> = (1..=n).collect();
        one_line.shuffle(rng);
        Self::from_one_line(&one_line).expect("a shuffle is a bijection")
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images.get(&i).copied().unwrap_or(i)
    }

    /// `self ∘ other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        let mut images = BTreeMap::new();
        for &i in self.images.keys().chain(other.images.keys()) {
            let j = self.apply(other.apply(i));
            if j != i {
                images.insert(i, j);
            }
        }
        Self { images }
    }

    pub fn inverse(&self) -> Self {
        Self {
            images: self.images.iter().map(|(&a, &b)| (b, a)).collect(),
        }
    }

    /// `h ∘ self ∘ h⁻¹`.
    pub fn conjugate_by(&self, h: &Self) -> Self {
        Self {
            images: self
                .images
                .iter()
                .map(|(&a, &b)| (h.apply(a), h.apply(b)))
                .collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.images.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.images.keys().copied()
    }

    pub fn support_len(&self) -> usize {
        self.images.len()
    }

    /// Largest moved point, or 0 for the identity.
    pub fn max_support(&self) -> usize {
        self.images.keys().next_back().copied().unwrap_or(0)
    }

    /// Non-trivial cycles, each rotated to start at its smallest point and
    /// listed in order of that point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut visited = BTreeSet::new();
        let mut out = Vec::new();
        for &start in self.images.keys() {
            if visited.contains(&start) {
                continue;
            }
            let mut cycle = vec![start];
            visited.insert(start);
            let mut next = self.apply(start);
            while next != start {
                visited.insert(next);
                cycle.push(next);
                next = self.apply(next);
            }
            out.push(cycle);
        }
        out
    }

    /// Number `r_k` of `k`-cycles for each `k >= 2` that occurs.
    pub fn cycle_counts(&self) -> BTreeMap<usize, usize> {
        let mut counts = BTreeMap::new();
        for cycle in self.cycles() {
            *counts.entry(cycle.len()).or_insert(0) += 1;
        }
        counts
    }

    pub fn order(&self) -> u64 {
        fn gcd(a: u64, b: u64) -> u64 {
            if b == 0 {
                a
            } else {
                gcd(b, a % b)
            }
        }
        self.cycle_counts()
            .keys()
            .fold(1u64, |acc, &k| acc / gcd(acc, k as u64) * k as u64)
    }

    /// Ordinary sign, `∏ (-1)^{(k+1) r_k}`.
    pub fn sign(&self) -> Sign {
        let odd = self
            .cycle_counts()
            .iter()
            .filter(|(k, r)| *k % 2 == 0 && *r % 2 == 1)
            .count()
            % 2
            == 1;
        Sign::from_parity(odd)
    }

    /// `(-1)^m` with `m` the number of pairs `a < b` in `positions` with
    /// `p(a) > p(b)`; this is the sign of `∏_{a<b} (p(b) - p(a))`.
    pub fn restricted_inversion_parity(&self, positions: &[usize]) -> Result<Sign> {
        for w in positions.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::UnsortedPositions {
                    prev: w[0],
                    next: w[1],
                });
            }
        }
        Ok(self.inversion_parity_unchecked(positions))
    }

    pub(crate) fn inversion_parity_unchecked(&self, positions: &[usize]) -> Sign {
        let imgs: Vec<usize> = positions.iter().map(|&a| self.apply(a)).collect();
        let mut odd = false;
        for (i, &pa) in imgs.iter().enumerate() {
            for &pb in &imgs[i + 1..] {
                if pa > pb {
                    odd = !odd;
                }
            }
        }
        Sign::from_parity(odd)
    }
}

impl GroupElement for FinitaryPermutation {
    fn compose(&self, other: &Self) -> Self {
        FinitaryPermutation::compose(self, other)
    }

    fn inverse(&self) -> Self {
        FinitaryPermutation::inverse(self)
    }
}

impl Mul for &FinitaryPermutation {
    type Output = FinitaryPermutation;

    fn mul(self, rhs: &FinitaryPermutation) -> FinitaryPermutation {
        self.compose(rhs)
    }
}

impl fmt::Display for FinitaryPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return f.write_str("e");
        }
        for cycle in self.cycles() {
            f.write_str("(")?;
            for (k, p) in cycle.iter().enumerate() {
                if k > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{p}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for FinitaryPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for FinitaryPermutation {
    type Err = Error;

    /// Parses disjoint cycle notation such as `"(1 2)(3 4 5)"`; `"e"` or an
    /// empty string is the identity. Commas are accepted as separators.
    fn from_str(s: &str) -> Result<Self> {
        let parse_err = |msg: &str| Error::Parse {
            input: s.to_string(),
            msg: msg.to_string(),
        };
        let trimmed = s.trim();
        if trimmed.is_empty() || trimmed == "e" || trimmed == "()" {
            return Ok(Self::identity());
        }
        let mut cycles = Vec::new();
        let mut rest = trimmed;
        while !rest.is_empty() {
            let Some(after_open) = rest.strip_prefix('(') else {
                return Err(parse_err("expected `(`"));
            };
            let close = after_open
                .find(')')
                .ok_or_else(|| parse_err("unclosed cycle"))?;
            let body = &after_open[..close];
            let cycle = body
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| parse_err(&format!("`{t}` is not a positive integer")))
                })
                .collect::<Result<Vec<_>>>()?;
            cycles.push(cycle);
            rest = after_open[close + 1..].trim_start();
        }
        Self::from_cycles(&cycles)
    }
}

impl Serialize for FinitaryPermutation {
    fn serialize<S: Serializer>(&self, serializer: S) -> core::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FinitaryPermutation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> core::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> FinitaryPermutation {
        s.parse().unwrap()
    }

    #[test]
    fn empty_cycle_list_is_identity() {
        let e = FinitaryPermutation::from_cycles::<Vec<usize>>(&[]).unwrap();
        assert!(e.is_identity());
        assert_eq!(e, FinitaryPermutation::identity());
    }

    #[test]
    fn transposition_swaps() {
        let t = FinitaryPermutation::from_cycles(&[vec![1, 2]]).unwrap();
        assert_eq!(t.apply(1), 2);
        assert_eq!(t.apply(2), 1);
        assert_eq!(t.apply(3), 3);
    }

    #[test]
    fn two_cycles_support_and_order() {
        let g = FinitaryPermutation::from_cycles(&[vec![1, 2], vec![3, 4, 5]]).unwrap();
        assert_eq!(g.support().collect::<Vec<_>>(), vec![1, 2, 3, 4, 5]);
        // brute force: smallest m with g^m = e
        let mut power = g.clone();
        let mut m = 1;
        while !power.is_identity() {
            power = power.compose(&g);
            m += 1;
        }
        assert_eq!(m, 6);
        assert_eq!(g.order(), 6);
    }

    #[test]
    fn duplicate_points_rejected() {
        assert!(matches!(
            FinitaryPermutation::from_cycles(&[vec![1, 2, 1]]),
            Err(Error::DuplicatePoint(1))
        ));
        assert!(matches!(
            FinitaryPermutation::from_cycles(&[vec![1, 2], vec![2, 3]]),
            Err(Error::DuplicatePoint(2))
        ));
        assert!(matches!(
            FinitaryPermutation::from_cycles(&[vec![0, 2]]),
            Err(Error::NonPositivePoint(0))
        ));
    }

    #[test]
    fn compose_uses_right_to_left_convention() {
        let a = p("(1 2)");
        let b = p("(2 3)");
        let c = a.compose(&b);
        // table lookup: i -> a(b(i))
        assert_eq!(c.apply(1), 2);
        assert_eq!(c.apply(2), 3);
        assert_eq!(c.apply(3), 1);
        assert_eq!(c, p("(1 2 3)"));
    }

    #[test]
    fn compose_with_identity_and_inverse() {
        let g = p("(1 5 2)(3 7)");
        let e = FinitaryPermutation::identity();
        assert_eq!(e.compose(&g), g);
        assert!(g.compose(&g.inverse()).is_identity());
    }

    #[test]
    fn inverse_examples() {
        assert!(FinitaryPermutation::identity().inverse().is_identity());
        assert_eq!(p("(1 2)").inverse(), p("(1 2)"));
        assert_eq!(p("(1 2 3)").inverse(), p("(1 3 2)"));
    }

    #[test]
    fn cycle_count_examples() {
        assert!(FinitaryPermutation::identity().cycle_counts().is_empty());
        let c = p("(1 2)(3 4 5)").cycle_counts();
        assert_eq!(c, BTreeMap::from([(2, 1), (3, 1)]));
        let g = p("(1 2)(3 4)(5 6 7)");
        let c = g.cycle_counts();
        assert_eq!(c, BTreeMap::from([(2, 2), (3, 1)]));
        assert_eq!(c.iter().map(|(k, r)| k * r).sum::<usize>(), 7);
        assert_eq!(g.support_len(), 7);
    }

    #[test]
    fn restricted_parity_examples() {
        let e = FinitaryPermutation::identity();
        assert_eq!(e.restricted_inversion_parity(&[1, 4, 9]).unwrap(), Sign::Plus);
        assert_eq!(p("(1 2)").restricted_inversion_parity(&[1, 2]).unwrap(), Sign::Minus);
        assert_eq!(
            p("(1 2 3)").restricted_inversion_parity(&[1, 2, 3]).unwrap(),
            Sign::Plus
        );
    }

    #[test]
    fn restricted_parity_rejects_unsorted() {
        let g = p("(1 2)");
        assert!(matches!(
            g.restricted_inversion_parity(&[2, 1]),
            Err(Error::UnsortedPositions { prev: 2, next: 1 })
        ));
        assert!(g.restricted_inversion_parity(&[1, 1]).is_err());
    }

    #[test]
    fn display_and_parse() {
        assert_eq!(p("e").to_string(), "e");
        assert_eq!(p("(3 4 5)(2 1)").to_string(), "(1 2)(3 4 5)");
        assert_eq!(p("(1, 2)").to_string(), "(1 2)");
        assert!("(1 2".parse::<FinitaryPermutation>().is_err());
        assert!("1 2".parse::<FinitaryPermutation>().is_err());
        assert!("(1 x)".parse::<FinitaryPermutation>().is_err());
    }

    #[test]
    fn from_images_validates() {
        assert!(FinitaryPermutation::from_images([(1, 2), (2, 3)]).is_err());
        assert!(FinitaryPermutation::from_images([(1, 2), (2, 2)]).is_err());
        assert_eq!(
            FinitaryPermutation::from_images([(1, 2), (2, 1), (3, 3)]).unwrap(),
            p("(1 2)")
        );
    }
}
