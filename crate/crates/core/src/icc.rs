//! Witnesses for infinite conjugacy classes in finitary `S_∞`.

use std::collections::HashSet;

use serde::Serialize;

use crate::perm::FinitaryPermutation;
use crate::rng::stream;

/// A conjugator `γ` together with `γFγ⁻¹` and the result of checking
/// `γFγ⁻¹ ∩ F ⊆ {e}`.
#[derive(Debug, Clone, Serialize)]
pub struct WitnessReport {
    pub witness: FinitaryPermutation,
    pub conjugated_set: Vec<FinitaryPermutation>,
    pub verified: bool,
}

/// Builds `γ = ∏ᵢ (i, M+i)` for `M` the largest point moved by any member of
/// `set`. Conjugation by `γ` shifts every support into `(M, 2M]`, so no
/// non-identity conjugate can lie in `set`.
pub fn displacing_element(set: &[FinitaryPermutation]) -> WitnessReport {
    let m = set.iter().map(FinitaryPermutation::max_support).max().unwrap_or(0);
    let cycles: Vec<[usize; 2]> = (1..=m).map(|i| [i, m + i]).collect();
    let witness = FinitaryPermutation::from_cycles(&cycles).expect("disjoint transpositions");
    let conjugated_set: Vec<FinitaryPermutation> =
        set.iter().map(|f| f.conjugate_by(&witness)).collect();
    let members: HashSet<&FinitaryPermutation> = set.iter().collect();
    let verified = conjugated_set
        .iter()
        .all(|c| c.is_identity() || !members.contains(c));
    assert!(verified, "support translation failed to displace {set:?}");
    WitnessReport {
        witness,
        conjugated_set,
        verified,
    }
}

/// Number of distinct conjugates `hgh⁻¹` over `k` random conjugators; a
/// lower bound on the size of the conjugacy class of `g`.
///
/// The `j`-th conjugator (1-based) is uniform on `S_{M+j}` with
/// `M = max(support(g))`, drawn from its own stream, so the count for `k`
/// only depends on the first `k` draws and is non-decreasing in `k`.
pub fn conjugacy_lower_bound(g: &FinitaryPermutation, k: usize, seed: u64) -> usize {
    let m = g.max_support();
    let mut seen = HashSet::new();
    seen.insert(g.clone());
    for j in 1..=k {
        let h = FinitaryPermutation::random(m + j, &mut stream(seed, j as u64));
        seen.insert(g.conjugate_by(&h));
    }
    seen.len()
}
