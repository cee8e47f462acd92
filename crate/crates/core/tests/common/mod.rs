#![allow(dead_code)]

use irpdf_core::rng::stream;
use irpdf_core::{sample_config, Configuration, FinitaryPermutation, ThomaParams};
use proptest::prelude::*;

/// Uniform permutation of `{1..n}` built from a shuffled one-line list.
pub fn perm(n: usize) -> impl Strategy<Value = FinitaryPermutation> {
    Just((1..=n).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(|v| FinitaryPermutation::from_one_line(&v).unwrap())
}

pub fn perm_up_to(max: usize) -> impl Strategy<Value = FinitaryPermutation> {
    (1..=max).prop_flat_map(perm)
}

/// Random point of the simplex: up to three `α`s and `β`s plus slack for `δ`.
pub fn params() -> impl Strategy<Value = ThomaParams> {
    (
        prop::collection::vec(0.0f64..1.0, 0..4),
        prop::collection::vec(0.0f64..1.0, 0..4),
        0.0f64..1.0,
    )
        .prop_map(|(mut a, mut b, slack)| {
            let total: f64 = a.iter().sum::<f64>() + b.iter().sum::<f64>() + slack;
            if total > 0.0 {
                a.iter_mut().for_each(|x| *x /= total);
                b.iter_mut().for_each(|x| *x /= total);
            }
            a.sort_by(|x, y| y.total_cmp(x));
            b.sort_by(|x, y| y.total_cmp(x));
            ThomaParams::new(a, b).unwrap()
        })
}

pub fn config(params: &ThomaParams, n: usize, seed: u64) -> Configuration {
    sample_config(params, n, &mut stream(seed, 0))
}

/// Cycle lengths of a one-line permutation of `{1..n}` by direct traversal.
pub fn oracle_cycle_lengths(one_line: &[usize]) -> Vec<usize> {
    let n = one_line.len();
    let mut seen = vec![false; n];
    let mut lengths = Vec::new();
    for start in 0..n {
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = one_line[i] - 1;
            len += 1;
        }
        if len > 0 {
            lengths.push(len);
        }
    }
    lengths
}

pub fn one_line(g: &FinitaryPermutation, n: usize) -> Vec<usize> {
    (1..=n).map(|i| g.apply(i)).collect()
}

/// `∏_cycles (Σ αᵢᵏ + (-1)^{k+1} Σ βᵢᵏ)` over cycles of length ≥ 2.
pub fn oracle_tau(alpha: &[f64], beta: &[f64], one_line: &[usize]) -> f64 {
    oracle_cycle_lengths(one_line)
        .into_iter()
        .filter(|&k| k >= 2)
        .map(|k| {
            let a: f64 = alpha.iter().map(|x| x.powi(k as i32)).sum();
            let b: f64 = beta.iter().map(|x| x.powi(k as i32)).sum();
            a + if k % 2 == 0 { -b } else { b }
        })
        .product()
}

/// Sign from a brute-force inversion count.
pub fn oracle_sign(one_line: &[usize]) -> i32 {
    let mut inversions = 0;
    for i in 0..one_line.len() {
        for j in i + 1..one_line.len() {
            if one_line[i] > one_line[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 { 1 } else { -1 }
}
