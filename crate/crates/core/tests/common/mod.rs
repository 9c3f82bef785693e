//! Brute-force oracles sharing no code with the library algorithms.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use proptest::prelude::*;
use vclab_core::{Concept, ConceptClass};

/// Rows as plain `Vec<bool>`.
pub fn rows(class: &ConceptClass) -> Vec<Vec<bool>> {
    class
        .concepts()
        .iter()
        .map(|c| (0..class.n()).map(|i| c.get(i)).collect())
        .collect()
}

/// All subsets of `0..n` of size `k`, lexicographic.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn go(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for p in start..n {
            cur.push(p);
            go(n, k, p + 1, cur, out);
            cur.pop();
        }
    }
    go(n, k, 0, &mut Vec::new(), &mut out);
    out
}

pub fn naive_patterns(rows: &[Vec<bool>], pts: &[usize]) -> usize {
    let mut seen: Vec<Vec<bool>> = rows
        .iter()
        .map(|r| pts.iter().map(|&p| r[p]).collect())
        .collect();
    seen.sort();
    seen.dedup();
    seen.len()
}

/// Largest shattered set size by checking every subset of `0..n`.
pub fn naive_vc(rows: &[Vec<bool>], n: usize) -> usize {
    (0..=n)
        .filter(|&k| {
            subsets(n, k)
                .iter()
                .any(|s| naive_patterns(rows, s) == 1 << k)
        })
        .max()
        .unwrap_or(0)
}

/// Lexicographically first minimum teaching set by increasing-size enumeration.
pub fn naive_min_teaching(rows: &[Vec<bool>], n: usize, target: usize) -> Vec<usize> {
    for k in 0..=n {
        for s in subsets(n, k) {
            let unique = rows
                .iter()
                .enumerate()
                .all(|(i, r)| i == target || s.iter().any(|&p| r[p] != rows[target][p]));
            if unique {
                return s;
            }
        }
    }
    unreachable!("rows are distinct, so the full domain teaches")
}

/// Distance as an exact rational under integer weights.
pub fn exact_dist(a: &[bool], b: &[bool], weights: &[u64]) -> BigRational {
    let num: u64 = (0..a.len())
        .filter(|&i| a[i] != b[i])
        .map(|i| weights[i])
        .sum();
    let den: u64 = weights.iter().sum();
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// `q > base^(-1/s)` for rational `q`, via `q^s · base > 1`.
pub fn exceeds_root(q: &BigRational, base: u64, s: u32) -> bool {
    let mut lhs = BigRational::one();
    for _ in 0..s {
        lhs *= q;
    }
    lhs * BigRational::from_integer(BigInt::from(base)) > BigRational::one()
}

pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn pow(q: &BigRational, e: u64) -> BigRational {
    let mut out = BigRational::one();
    for _ in 0..e {
        out *= q;
    }
    out
}

pub fn binom(n: u64, k: u64) -> BigInt {
    let mut out = BigInt::one();
    for i in 0..k {
        out = out * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    out
}

/// `2(2m+1)^d (1 − ε/4)^m` exactly.
pub fn exact_ds(m: u64, d: u32, eps: &BigRational) -> f64 {
    let base = BigRational::from_integer(BigInt::from(2 * m + 1));
    let keep = BigRational::one() - eps / BigRational::from_integer(BigInt::from(4));
    (BigRational::from_integer(BigInt::from(2)) * pow(&base, u64::from(d)) * pow(&keep, m))
        .to_f64()
        .unwrap()
}

/// `q Σ_{j ≤ k} C(m, j)(1 − ε)^{m−j}` exactly.
pub fn exact_lw(m: u64, k: u64, q: u64, eps: &BigRational) -> f64 {
    let keep = BigRational::one() - eps;
    let mut sum = BigRational::zero();
    for j in 0..=k {
        sum += BigRational::from_integer(binom(m, j)) * pow(&keep, m - j);
    }
    (sum * BigRational::from_integer(BigInt::from(q)))
        .to_f64()
        .unwrap()
}

pub fn same_to_12_digits(a: f64, b: f64) -> bool {
    a == b || ((a - b) / b).abs() < 1e-12
}

/// Random classes over `1..=max_n` points with up to `max_rows` rows.
pub fn arb_class(max_n: usize, max_rows: usize) -> impl Strategy<Value = ConceptClass> {
    (1..=max_n).prop_flat_map(move |n| {
        prop::collection::vec(prop::collection::vec(any::<bool>(), n), 1..=max_rows).prop_map(
            move |rows| {
                let concepts = rows.into_iter().map(Concept::from_bits).collect();
                ConceptClass::new(n, concepts).unwrap()
            },
        )
    })
}

pub fn ratio_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap()
}
