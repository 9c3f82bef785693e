//! Exhaustive or sampled correctness checking of the recursive scheme.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::class::{ConceptClass, LabeledSample};
use crate::compression::scheme::{
    check_level, check_size_report, msw_compress_traced, msw_reconstruct, CompressionTrace,
    LevelCase,
};
use crate::compression::{BaseThreshold, CompressedSample, SchemeParams};
use crate::error::Error;

pub const DEFAULT_BUDGET: u64 = 1_000_000;
pub const DEFAULT_SAMPLES: u64 = 10_000;

/// Failure messages kept in a report; the count is always exact.
const MAX_LISTED_FAILURES: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyMode {
    Exhaustive,
    Sampled,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub n: usize,
    pub size: usize,
    pub mode: VerifyMode,
    pub pairs: u64,
    pub failure_count: u64,
    pub failures: Vec<String>,
    pub max_kept: usize,
    pub max_depth: usize,
    pub base_levels: u64,
    pub no_shrink_levels: u64,
    pub case1_levels: u64,
    pub case2_levels: u64,
    /// Groups of pairs sharing one compressed form.
    pub collision_groups: u64,
    pub malformed_rejected: bool,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failure_count == 0 && self.malformed_rejected
    }
}

struct PairOutcome {
    sample: LabeledSample,
    wire: Option<String>,
    problems: Vec<String>,
    kept: usize,
    depth: usize,
    cases: [u64; 4],
}

/// `⌊log₂ m⌋` for `m ≥ 1`.
fn floor_log2(m: usize) -> usize {
    (usize::BITS - 1 - m.max(1).leading_zeros()) as usize
}

fn ceil_log2(m: u64) -> usize {
    if m <= 1 {
        0
    } else {
        (u64::BITS - (m - 1).leading_zeros()) as usize
    }
}

/// Runs every single-pair check on `(c, Y)`.
pub fn check_pair(
    class: &ConceptClass,
    params: &SchemeParams,
    sample: &LabeledSample,
) -> (Option<CompressedSample>, CompressionTrace, Vec<String>) {
    let mut problems = Vec::new();
    let (cs, trace) = match msw_compress_traced(class, sample, params) {
        Ok(v) => v,
        Err(e) => {
            problems.push(format!("compression failed: {e}"));
            return (None, CompressionTrace::default(), problems);
        }
    };
    if let Some((p, _)) = cs.kept.iter().find(|&(p, l)| sample.label(p) != Some(l)) {
        problems.push(format!(
            "kept point {p} is not a sample point with the same label"
        ));
    }
    if let Err(e) = cs.validate(class.n()) {
        problems.push(format!("side information invalid: {e}"));
    }
    match msw_reconstruct(class, &cs) {
        Ok(h) if h.agrees_with(sample) => {}
        Ok(h) => problems.push(format!("reconstruction {h} disagrees with the sample")),
        Err(e) => problems.push(format!("reconstruction failed: {e}")),
    }
    let wire = cs.to_json();
    match CompressedSample::from_json(&wire) {
        Ok(back) if back == cs && back.to_json() == wire => {}
        _ => problems.push(format!("serialization does not round-trip: {wire}")),
    }
    if let Some(base) = trace.levels.last() {
        let base_bound = floor_log2(base.class.len());
        if base.kept_size > base_bound {
            problems.push(format!(
                "base level kept {} points, bound {base_bound}",
                base.kept_size
            ));
        }
        if cs.kept.len() > cs.info.depth + base_bound {
            problems.push(format!(
                "|Z| = {} exceeds T + base size {}",
                cs.kept.len(),
                cs.info.depth + base_bound
            ));
        }
    }
    if cs.info.depth == 0 && cs.kept.len() > floor_log2(class.len()) {
        problems.push(format!("base compression kept {} points", cs.kept.len()));
    }
    if let BaseThreshold::Fixed(b) = params.base_threshold {
        if cs.kept.len() > cs.info.depth + ceil_log2(b) + 1 {
            problems.push(format!(
                "|Z| = {} exceeds T + log2(threshold) + 1",
                cs.kept.len()
            ));
        }
    }
    problems.extend(check_size_report(&cs, &trace));
    for (depth, level) in trace.levels.iter().enumerate() {
        problems.extend(
            check_level(level)
                .into_iter()
                .map(|p| format!("level {depth}: {p}")),
        );
    }
    (Some(cs), trace, problems)
}

fn case_counts(trace: &CompressionTrace) -> [u64; 4] {
    let mut counts = [0; 4];
    for level in &trace.levels {
        let slot = match level.case {
            LevelCase::Base => 0,
            LevelCase::BaseNoShrink => 1,
            LevelCase::Unfaithful { .. } => 2,
            LevelCase::Faithful => 3,
        };
        counts[slot] += 1;
    }
    counts
}

fn mask_points(n: usize, mask: u64) -> Vec<usize> {
    (0..n).filter(|i| mask >> i & 1 == 1).collect()
}

fn sampled_pair(class: &ConceptClass, seed: u64, index: u64) -> LabeledSample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let c = class.concept(rng.random_range(0..class.len()));
    loop {
        let points: Vec<usize> = (0..class.n()).filter(|_| rng.random::<bool>()).collect();
        if !points.is_empty() {
            return LabeledSample::from_concept(c, &points);
        }
    }
}

/// Checks every `(c, Y)` with `Y` nonempty when `|C|·(2^n − 1) ≤ budget`, otherwise
/// `samples` pairs drawn from `seed` (one generator stream per pair).
pub fn verify_scheme(
    class: &ConceptClass,
    params: &SchemeParams,
    budget: u64,
    samples: u64,
    seed: u64,
) -> VerifyReport {
    let n = class.n();
    let exhaustive_pairs = if n < 63 {
        (class.len() as u64).checked_mul((1u64 << n) - 1)
    } else {
        None
    };
    let (mode, pairs) = match exhaustive_pairs {
        Some(p) if p <= budget => (VerifyMode::Exhaustive, p),
        _ => (VerifyMode::Sampled, samples),
    };
    let masks = (1u64 << n.min(63)) - 1;
    let outcomes: Vec<PairOutcome> = (0..pairs)
        .into_par_iter()
        .map(|i| {
            let sample = match mode {
                VerifyMode::Exhaustive => {
                    let c = class.concept((i / masks) as usize);
                    LabeledSample::from_concept(c, &mask_points(n, i % masks + 1))
                }
                VerifyMode::Sampled => sampled_pair(class, seed, i),
            };
            let (cs, trace, problems) = check_pair(class, params, &sample);
            PairOutcome {
                wire: cs.as_ref().map(CompressedSample::to_json),
                kept: cs.as_ref().map_or(0, |c| c.kept.len()),
                depth: cs.as_ref().map_or(0, |c| c.info.depth),
                cases: case_counts(&trace),
                sample,
                problems,
            }
        })
        .collect();

    let mut failures = Vec::new();
    let mut failure_count = 0u64;
    let mut note = |msg: String| {
        failure_count += 1;
        if failures.len() < MAX_LISTED_FAILURES {
            failures.push(msg);
        }
    };
    let mut cases = [0u64; 4];
    let mut groups: HashMap<&str, Vec<Option<bool>>> = HashMap::new();
    let mut group_sizes: HashMap<&str, u64> = HashMap::new();
    for o in &outcomes {
        for p in &o.problems {
            note(format!("{:?}: {p}", o.sample));
        }
        for (a, b) in cases.iter_mut().zip(o.cases) {
            *a += b;
        }
        let Some(wire) = o.wire.as_deref() else {
            continue;
        };
        *group_sizes.entry(wire).or_default() += 1;
        let labels = groups.entry(wire).or_insert_with(|| vec![None; n]);
        for (p, l) in o.sample.iter() {
            match labels[p] {
                Some(prev) if prev != l => {
                    note(format!(
                        "compression {wire} shared by samples disagreeing at {p}"
                    ));
                }
                _ => labels[p] = Some(l),
            }
        }
    }
    let collision_groups = group_sizes.values().filter(|&&k| k > 1).count() as u64;
    let malformed_rejected =
        malformed_probe(class, outcomes.first().and_then(|o| o.wire.as_deref()));

    VerifyReport {
        n,
        size: class.len(),
        mode,
        pairs,
        failure_count,
        failures,
        max_kept: outcomes.iter().map(|o| o.kept).max().unwrap_or(0),
        max_depth: outcomes.iter().map(|o| o.depth).max().unwrap_or(0),
        base_levels: cases[0],
        no_shrink_levels: cases[1],
        case1_levels: cases[2],
        case2_levels: cases[3],
        collision_groups,
        malformed_rejected,
    }
}

/// Corrupts `f(T)` to a point outside `Z` and expects reconstruction to reject it.
fn malformed_probe(class: &ConceptClass, wire: Option<&str>) -> bool {
    let mut cs = wire
        .and_then(|w| CompressedSample::from_json(w).ok())
        .unwrap_or_else(|| CompressedSample::base(LabeledSample::empty()));
    cs.info.depth = cs.info.depth.max(1);
    let outside = (0..)
        .find(|&p| cs.kept.label(p).is_none())
        .expect("finite Z");
    cs.info.f.insert(cs.info.depth, outside);
    matches!(
        msw_reconstruct(class, &cs),
        Err(Error::MalformedSideInfo(_))
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{random_vc_bounded, singletons_with_empty};

    #[test]
    fn singletons_default_params() {
        let s = singletons_with_empty(6).unwrap();
        let r = verify_scheme(&s, &SchemeParams::default(), DEFAULT_BUDGET, 100, 0);
        assert!(r.passed(), "{:?}", r.failures);
        assert_eq!(r.mode, VerifyMode::Exhaustive);
        assert_eq!(r.pairs, 7 * 63);
        assert_eq!(r.max_depth, 0);
        assert!(r.collision_groups > 0);
    }

    #[test]
    fn forced_recursion_on_vc2_classes() {
        let params = SchemeParams::fixed(4).unwrap();
        let mut case1 = 0;
        let mut case2 = 0;
        for seed in 0..3 {
            let class = random_vc_bounded(8, 2, 24, seed).unwrap();
            let r = verify_scheme(&class, &params, DEFAULT_BUDGET, 100, 0);
            assert!(r.passed(), "{:?}", r.failures);
            case1 += r.case1_levels;
            case2 += r.case2_levels;
        }
        assert!(case1 > 0 && case2 > 0, "case1 {case1}, case2 {case2}");
    }

    #[test]
    fn sampling_is_deterministic() {
        let class = random_vc_bounded(8, 2, 24, 1).unwrap();
        let params = SchemeParams::fixed(4).unwrap();
        let a = verify_scheme(&class, &params, 10, 300, 9);
        assert_eq!(a.mode, VerifyMode::Sampled);
        assert_eq!(a.pairs, 300);
        assert!(a.passed(), "{:?}", a.failures);
        assert_eq!(a, verify_scheme(&class, &params, 10, 300, 9));
    }

    #[test]
    fn log_helpers() {
        assert_eq!(floor_log2(1), 0);
        assert_eq!(floor_log2(7), 2);
        assert_eq!(floor_log2(8), 3);
        assert_eq!(ceil_log2(4), 2);
        assert_eq!(ceil_log2(5), 3);
    }
}
