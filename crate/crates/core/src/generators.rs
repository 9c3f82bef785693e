//! Deterministic generators for structured and random concept classes.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::class::{Concept, ConceptClass};
use crate::error::{Error, Result};

/// Candidate draws allowed before a random generator gives up.
pub const REJECTION_BUDGET: usize = 1_000_000;

fn need_points(n: usize) -> Result<()> {
    if n < 1 {
        return Err(Error::InvalidParameter("generators need n >= 1".into()));
    }
    Ok(())
}

fn build(n: usize, rows: Vec<Concept>) -> ConceptClass {
    ConceptClass::new(n, rows).expect("generator produced rows of the right length")
}

pub fn singletons_with_empty(n: usize) -> Result<ConceptClass> {
    need_points(n)?;
    let mut rows = vec![Concept::zeros(n)];
    for i in 0..n {
        let mut c = Concept::zeros(n);
        c.set(i, true);
        rows.push(c);
    }
    Ok(build(n, rows))
}

/// Indicators of contiguous runs `[a, b]` over `0..n`, plus the empty concept.
pub fn intervals(n: usize) -> Result<ConceptClass> {
    need_points(n)?;
    let mut rows = vec![Concept::zeros(n)];
    for a in 0..n {
        for b in a..n {
            rows.push(Concept::from_bits((0..n).map(|i| a <= i && i <= b)));
        }
    }
    Ok(build(n, rows))
}

pub fn full_cube(n: usize) -> Result<ConceptClass> {
    need_points(n)?;
    if n >= 24 {
        return Err(Error::InvalidParameter(format!(
            "full cube over {n} points is too large"
        )));
    }
    let rows = (0..1usize << n)
        .map(|m| Concept::from_bits((0..n).map(|i| m >> i & 1 == 1)))
        .collect();
    Ok(build(n, rows))
}

/// All vectors of Hamming weight at most `d`: a maximum class of VC-dimension `d`.
pub fn hamming_ball(n: usize, d: usize) -> Result<ConceptClass> {
    need_points(n)?;
    if d > n {
        return Err(Error::InvalidParameter(format!(
            "hamming ball needs d <= n (d={d}, n={n})"
        )));
    }
    let mut rows = Vec::new();
    let mut current = Vec::new();
    fn extend(n: usize, d: usize, start: usize, current: &mut Vec<usize>, rows: &mut Vec<Concept>) {
        let mut c = Concept::zeros(n);
        for &p in current.iter() {
            c.set(p, true);
        }
        rows.push(c);
        if current.len() == d {
            return;
        }
        for p in start..n {
            current.push(p);
            extend(n, d, p + 1, current, rows);
            current.pop();
        }
    }
    extend(n, d, 0, &mut current, &mut rows);
    Ok(build(n, rows))
}

fn random_concept(rng: &mut ChaCha8Rng, n: usize) -> Concept {
    Concept::from_bits((0..n).map(|_| rng.random::<bool>()))
}

/// Incremental rejection sampling: each candidate is kept iff `accept(current, candidate)`.
fn rejection_sample<F>(n: usize, size: usize, seed: u64, mut accept: F) -> Result<ConceptClass>
where
    F: FnMut(&[Concept], &Concept) -> bool,
{
    need_points(n)?;
    if size == 0 {
        return Err(Error::InvalidParameter(
            "class size must be positive".into(),
        ));
    }
    if n < 64 && size > 1usize << n {
        return Err(Error::InvalidParameter(format!(
            "size {size} exceeds 2^{n} distinct concepts"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows: Vec<Concept> = Vec::with_capacity(size);
    let mut seen: HashSet<Concept> = HashSet::new();
    for _ in 0..REJECTION_BUDGET {
        if rows.len() == size {
            break;
        }
        let cand = random_concept(&mut rng, n);
        if seen.contains(&cand) {
            continue;
        }
        if accept(&rows, &cand) {
            seen.insert(cand.clone());
            rows.push(cand);
        }
    }
    if rows.len() < size {
        return Err(Error::BudgetExhausted {
            budget: REJECTION_BUDGET,
            accepted: rows.len(),
        });
    }
    Ok(build(n, rows))
}

pub fn random_class(n: usize, size: usize, seed: u64) -> Result<ConceptClass> {
    rejection_sample(n, size, seed, |_, _| true)
}

/// Calls `f` on every `k`-subset of `0..n` in lexicographic order until it returns `true`.
fn any_subset(n: usize, k: usize, mut f: impl FnMut(&[usize]) -> bool) -> bool {
    if k > n {
        return false;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if f(&idx) {
            return true;
        }
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return false;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn patterns_with(rows: &[Concept], cand: &Concept, points: &[usize]) -> usize {
    let key = |c: &Concept| -> u64 {
        points
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &p)| acc | (u64::from(c.get(p)) << i))
    };
    let mut keys: HashSet<u64> = rows.iter().map(key).collect();
    keys.insert(key(cand));
    keys.len()
}

/// Random class of VC-dimension at most `d`: a candidate is rejected if it would shatter a `(d+1)`-set.
pub fn random_vc_bounded(n: usize, d: usize, size: usize, seed: u64) -> Result<ConceptClass> {
    let k = d + 1;
    rejection_sample(n, size, seed, |rows, cand| {
        if k >= 64 || rows.len() + 1 < 1 << k {
            return true;
        }
        !any_subset(n, k, |pts| patterns_with(rows, cand, pts) == 1 << k)
    })
}

/// Random (3,6) class: a candidate is rejected if it creates a seventh pattern on some triple.
pub fn random_36(n: usize, size: usize, seed: u64) -> Result<ConceptClass> {
    rejection_sample(n, size, seed, |rows, cand| {
        rows.len() < 6 || !any_subset(n, 3, |pts| patterns_with(rows, cand, pts) > 6)
    })
}
