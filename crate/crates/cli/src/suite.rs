//! Acceptance criteria 1–8, each checked against brute-force oracles.

use std::fmt::Write as _;
use std::time::Instant;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;
use vclab_core::compression::base::{base_compress, base_reconstruct};
use vclab_core::compression::rank::{matrix_rank, rank_compress, rank_reconstruct};
use vclab_core::compression::scheme::{msw_compress_traced, LevelCase, LevelTrace};
use vclab_core::compression::verify::{verify_scheme, DEFAULT_BUDGET, DEFAULT_SAMPLES};
use vclab_core::generators::{
    full_cube, hamming_ball, intervals, random_36, random_class, random_vc_bounded,
    singletons_with_empty,
};
use vclab_core::metric::{
    dual_approx_set, greedy_packing, haussler_bound, sampling_packing_bound, Distribution,
    EpsilonSpec,
};
use vclab_core::pac::{
    simulate_compression_learner, simulate_consistency_failure, smallest_m_for_ds, PacExperiment,
};
use vclab_core::teaching::{
    halving_teaching_concept, is_36_class, is_teaching_set, lemma36_teaching, min_teaching_set,
    rt_dimension, thm14_teaching_concept,
};
use vclab_core::{
    sauer_bound, CompressedSample, Concept, ConceptClass, LabeledSample, SchemeParams,
};

/// Seed shared by every randomized part of the suite.
pub const SUITE_SEED: u64 = 20_160_901;

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    /// Wall-clock time; not serialized, so reports stay reproducible.
    #[serde(skip)]
    pub seconds: f64,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "criterion {}: {} - {} ({})",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail
        )
    }
}

/// Collects violations, keeping the first few messages.
#[derive(Default)]
struct Tally {
    checks: u64,
    violations: u64,
    first: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.violations += 1;
            if self.first.len() < 5 {
                self.first.push(msg());
            }
        }
    }

    fn merge(&mut self, other: Tally) {
        self.checks += other.checks;
        self.violations += other.violations;
        for m in other.first {
            if self.first.len() < 5 {
                self.first.push(m);
            }
        }
    }

    fn finish(self, id: u32, name: &'static str, extra: &str, start: Instant) -> CriterionResult {
        let mut detail = format!("{} checks, {} violations", self.checks, self.violations);
        if !extra.is_empty() {
            write!(detail, ", {extra}").unwrap();
        }
        for m in &self.first {
            write!(detail, "; {m}").unwrap();
        }
        CriterionResult {
            id,
            name,
            passed: self.violations == 0,
            detail,
            seconds: start.elapsed().as_secs_f64(),
        }
    }
}

/// The named classes every criterion runs over.
pub fn suite_classes() -> Vec<(String, ConceptClass)> {
    let mut out = Vec::new();
    for n in 3..=8 {
        out.push((
            format!("singletons({n})"),
            singletons_with_empty(n).unwrap(),
        ));
    }
    for n in 3..=8 {
        out.push((format!("intervals({n})"), intervals(n).unwrap()));
    }
    for n in 2..=4 {
        out.push((format!("cube({n})"), full_cube(n).unwrap()));
    }
    for (n, d) in [(4, 1), (4, 2), (5, 2)] {
        out.push((format!("hamming({n},{d})"), hamming_ball(n, d).unwrap()));
    }
    for i in 0..20u64 {
        let seed = SUITE_SEED + i;
        let n = 5 + (i % 4) as usize;
        let (name, class) = if i % 2 == 0 {
            let size = (8 + 5 * i as usize).min(48).min(1 << n);
            (
                format!("random({n},{size},{seed})"),
                random_class(n, size, seed),
            )
        } else {
            let d = 1 + (i % 3) as usize;
            let size = [6, 14, 22][(i % 3) as usize];
            (
                format!("vc_bounded({n},{d},{size},{seed})"),
                random_vc_bounded(n, d, size, seed),
            )
        };
        out.push((
            name,
            class.expect("suite generator parameters are feasible"),
        ));
    }
    for i in 0..10u64 {
        let seed = SUITE_SEED + 100 + i;
        let n = 6 + (i % 3) as usize;
        let size = [10, 12, 14][(i % 3) as usize] - 2 * usize::from(n == 6);
        out.push((
            format!("36({n},{size},{seed})"),
            random_36(n, size, seed).expect("suite generator parameters are feasible"),
        ));
    }
    out
}

fn mask_points(n: usize, mask: u64) -> Vec<usize> {
    (0..n).filter(|i| mask >> i & 1 == 1).collect()
}

/// Every `(c, Y)` pair of a class, Y nonempty.
fn all_samples(c: &ConceptClass) -> Vec<LabeledSample> {
    let masks = (1u64 << c.n()) - 1;
    c.concepts()
        .iter()
        .flat_map(|t| {
            (1..=masks).map(move |m| LabeledSample::from_concept(t, &mask_points(c.n(), m)))
        })
        .collect()
}

fn floor_log2(m: usize) -> usize {
    (usize::BITS - 1 - m.leading_zeros()) as usize
}

fn ceil_log2(m: usize) -> usize {
    if m <= 1 {
        0
    } else {
        (usize::BITS - (m - 1).leading_zeros()) as usize
    }
}

fn forced() -> SchemeParams {
    SchemeParams::fixed(4).expect("valid threshold")
}

pub fn criterion_1(classes: &[(String, ConceptClass)]) -> CriterionResult {
    let start = Instant::now();
    let mut tally = Tally::default();
    let mut pairs = 0;
    for (label, params) in [
        ("default", SchemeParams::default()),
        ("threshold 4", forced()),
    ] {
        for (name, c) in classes {
            let r = verify_scheme(c, &params, DEFAULT_BUDGET, DEFAULT_SAMPLES, SUITE_SEED);
            pairs += r.pairs;
            tally.check(
                r.mode == vclab_core::compression::verify::VerifyMode::Exhaustive,
                || format!("{name}: not exhaustive"),
            );
            tally.checks += r.pairs;
            tally.violations += r.failure_count;
            if r.failure_count > 0 && tally.first.len() < 5 {
                tally
                    .first
                    .push(format!("{name} ({label}): {}", r.failures.join(" | ")));
            }
            tally.check(r.malformed_rejected, || {
                format!("{name}: malformed input accepted")
            });
        }
    }
    tally.finish(
        1,
        "compression round-trip",
        &format!("{pairs} pairs"),
        start,
    )
}

/// Rounding, case split and shrinkage at one level, rederived from the level's data.
fn audit_level(level: &LevelTrace, tally: &mut Tally) {
    let (Some(eps), Some(rounding), Some(a_star)) =
        (&level.epsilon, &level.rounding, &level.a_star)
    else {
        return;
    };
    let c = &level.class;
    let EpsilonSpec::Root { base, s } = *eps else {
        tally.check(false, || "level epsilon is not symbolic".into());
        return;
    };
    // ε = |C|^(-1/s) with s = d·2^d + 1, d = VC + 2
    let d = naive_vc(c) as u32 + 2;
    tally.check(base == c.len() as u64 && s == d * (1 << d) + 1, || {
        format!("epsilon {eps} does not match |C| = {}, d = {d}", c.len())
    });
    // p/q ≤ |C|^(-1/s)  <=>  p^s·|C| ≤ q^s
    let within =
        |p: u64, q: u64| BigUint::from(p).pow(s) * BigUint::from(base) <= BigUint::from(q).pow(s);
    let column = |x: usize| -> Vec<bool> { c.concepts().iter().map(|k| k.get(x)).collect() };
    for (x, &rx) in rounding.iter().enumerate() {
        let diff = column(x)
            .iter()
            .zip(column(rx))
            .filter(|(a, b)| *a != b)
            .count() as u64;
        tally.check(a_star.contains(&rx) && within(diff, c.len() as u64), || {
            format!("rounding of {x} to {rx} is not within epsilon")
        });
    }
    let consistent: Vec<&Concept> = c
        .concepts()
        .iter()
        .filter(|k| k.agrees_with(&level.sample))
        .collect();
    let witness = level.sample.points.iter().find_map(|&x| {
        consistent
            .iter()
            .find(|k| k.get(x) != k.get(rounding[x]))
            .map(|k| (x, *k))
    });
    match &level.case {
        LevelCase::Unfaithful { x, rx, witness: w } => {
            // f(T) = x iff x is the first point with an unfaithful consistent concept
            tally.check(
                witness.map(|p| p.0) == Some(*x) && rounding[*x] == *rx,
                || format!("case 1 at {x} but the first unfaithful point is {witness:?}"),
            );
            tally.check(
                w.agrees_with(&level.sample) && w.get(*x) != w.get(*rx) && c.contains(w),
                || "case 1 witness invalid".into(),
            );
            let child = level.child_size.unwrap_or(usize::MAX) as u64;
            tally.check(within(child, c.len() as u64), || {
                format!("|C'| = {child} exceeds eps·|C| with |C| = {}", c.len())
            });
        }
        LevelCase::Faithful => {
            tally.check(witness.is_none(), || {
                "case 2 although an unfaithful concept exists".into()
            });
            tally.check(a_star.len() < c.n(), || {
                format!("case 2 with |A*| = {} and n = {}", a_star.len(), c.n())
            });
        }
        LevelCase::BaseNoShrink => {
            tally.check(a_star.len() == c.n(), || {
                "fallback although A* shrinks".into()
            });
        }
        LevelCase::Base => {}
    }
}

pub fn criterion_2(classes: &[(String, ConceptClass)]) -> CriterionResult {
    let start = Instant::now();
    let params = forced();
    let per_class: Vec<(Tally, [u64; 3])> = classes
        .par_iter()
        .map(|(name, c)| {
            let mut tally = Tally::default();
            let mut counts = [0u64; 3];
            for sample in all_samples(c) {
                let Ok((_, trace)) = msw_compress_traced(c, &sample, &params) else {
                    tally.check(false, || format!("{name}: compression failed"));
                    continue;
                };
                for level in &trace.levels {
                    match level.case {
                        LevelCase::Unfaithful { .. } => counts[0] += 1,
                        LevelCase::Faithful => counts[1] += 1,
                        _ => counts[2] += 1,
                    }
                    audit_level(level, &mut tally);
                }
            }
            (tally, counts)
        })
        .collect();
    let mut tally = Tally::default();
    let mut counts = [0u64; 3];
    for (t, c) in per_class {
        tally.merge(t);
        for i in 0..3 {
            counts[i] += c[i];
        }
    }
    tally.check(counts[0] > 0 && counts[1] > 0, || {
        "recursion never reached both cases".into()
    });
    let extra = format!("{} case-1 levels, {} case-2 levels", counts[0], counts[1]);
    tally.finish(2, "per-level inequalities", &extra, start)
}

/// Rank of a 0/1 matrix over GF(p) for a large prime; never exceeds the rational rank.
fn rank_mod_p(rows: &[Vec<bool>], cols: usize) -> usize {
    const P: u64 = 1_000_000_007;
    let mut m: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| r.iter().map(|&b| u64::from(b)).collect())
        .collect();
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = pow_mod(m[rank][col], P - 2, P);
        let pivot_row = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank && row[col] != 0 {
                let f = row[col] * inv % P;
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v = (*v + P - f * p % P) % P;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

pub fn criterion_3(classes: &[(String, ConceptClass)]) -> CriterionResult {
    let start = Instant::now();
    let tallies: Vec<Tally> = classes
        .par_iter()
        .map(|(name, c)| {
            let mut tally = Tally::default();
            let bound = floor_log2(c.len());
            let rows: Vec<Vec<bool>> = c
                .concepts()
                .iter()
                .map(|k| (0..c.n()).map(|i| k.get(i)).collect())
                .collect();
            let rank = matrix_rank(c);
            tally.check(
                rank >= rank_mod_p(&rows, c.n()) && rank <= c.n().min(c.len()),
                || format!("{name}: rank {rank} inconsistent"),
            );
            for sample in all_samples(c) {
                let kept = base_compress(c, &sample).expect("realizable");
                tally.check(kept.len() <= bound, || {
                    format!("{name}: base kept {} > {bound}", kept.len())
                });
                let h = base_reconstruct(c, &kept).expect("replay");
                tally.check(h.agrees_with(&sample) && kept_in(&kept, &sample), || {
                    format!("{name}: base round trip failed on {sample:?}")
                });
                let kept = rank_compress(c, &sample).expect("realizable");
                tally.check(kept.len() <= rank, || {
                    format!("{name}: rank kept {}", kept.len())
                });
                let h = rank_reconstruct(c, &kept).expect("consistent");
                tally.check(h.agrees_with(&sample) && kept_in(&kept, &sample), || {
                    format!("{name}: rank round trip failed on {sample:?}")
                });
            }
            tally
        })
        .collect();
    let mut tally = Tally::default();
    tallies.into_iter().for_each(|t| tally.merge(t));
    tally.finish(3, "base and rank scheme sizes", "", start)
}

fn kept_in(kept: &LabeledSample, sample: &LabeledSample) -> bool {
    kept.iter().all(|(p, l)| sample.label(p) == Some(l))
}

fn naive_vc(c: &ConceptClass) -> usize {
    naive_vc_up_to(c, c.n())
}

/// Largest shattered set of size at most `cap`, by enumerating point subsets.
fn naive_vc_up_to(c: &ConceptClass, cap: usize) -> usize {
    let shattered = |pts: &[usize]| {
        let mut seen: Vec<u64> = c
            .concepts()
            .iter()
            .map(|k| {
                pts.iter()
                    .enumerate()
                    .fold(0, |a, (i, &p)| a | u64::from(k.get(p)) << i)
            })
            .collect();
        seen.sort_unstable();
        seen.dedup();
        seen.len() == 1 << pts.len()
    };
    let mut best = 0;
    // shattered sets are closed under subsets, so stop at the first size with none
    for k in 1..=cap.min(c.n()) {
        if combinations(c.n(), k)
            .into_iter()
            .any(|pts| shattered(&pts))
        {
            best = k;
        } else {
            break;
        }
    }
    best
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Teaching-set check written from the definition.
fn teaches(c: &ConceptClass, target: &Concept, set: &[usize]) -> bool {
    c.concepts()
        .iter()
        .filter(|k| *k != target)
        .all(|k| set.iter().any(|&p| k.get(p) != target.get(p)))
}

pub fn criterion_4(classes: &[(String, ConceptClass)]) -> CriterionResult {
    let start = Instant::now();
    let mut tally = Tally::default();
    let mut all: Vec<(String, ConceptClass)> = classes.to_vec();
    for n in 9..=10 {
        all.push((
            format!("singletons({n})"),
            singletons_with_empty(n).unwrap(),
        ));
    }
    let results: Vec<Tally> = all
        .par_iter()
        .map(|(name, c)| {
            let mut t = Tally::default();
            let log_bound = ceil_log2(c.len());
            let h = halving_teaching_concept(c);
            t.check(h.size() <= log_bound, || {
                format!("{name}: halving size {}", h.size())
            });
            t.check(
                teaches(c, &h.concept, &h.set) && is_teaching_set(c, &h.concept, &h.set).unwrap(),
                || format!("{name}: halving set invalid"),
            );
            let th = thm14_teaching_concept(c, 2);
            t.check(teaches(c, &th.report.concept, &th.report.set), || {
                format!("{name}: thm14 set invalid")
            });
            t.check(
                th.steps
                    .iter()
                    .all(|s| s.class_after > 0 && s.class_after < s.class_before),
                || format!("{name}: thm14 trace does not shrink"),
            );
            let (rtd, dec) = rt_dimension(c);
            t.check(rtd <= log_bound, || {
                format!("{name}: rtd {rtd} > {log_bound}")
            });
            let vc = naive_vc(c);
            if vc == 1 {
                t.check(rtd == 1, || format!("{name}: VC-1 class with rtd {rtd}"));
            }
            if name.starts_with("singletons") {
                t.check(rtd == 1, || format!("{name}: rtd {rtd}"));
            }
            if let Some(d) = name
                .strip_prefix("hamming(")
                .and_then(|s| s.split(',').nth(1))
            {
                let d: usize = d.trim_end_matches(')').parse().unwrap();
                t.check(rtd == d, || format!("{name}: rtd {rtd} != {d}"));
            }
            // layers partition the class; each set teaches within the remaining class
            let mut remaining: Vec<usize> = (0..c.len()).collect();
            for layer in &dec.layers {
                let sub = ConceptClass::new(
                    c.n(),
                    remaining.iter().map(|&i| c.concept(i).clone()).collect(),
                )
                .unwrap();
                for (i, set) in &layer.entries {
                    t.check(
                        set.len() == layer.size && teaches(&sub, c.concept(*i), set),
                        || format!("{name}: layer entry {i} invalid"),
                    );
                }
                let min = remaining
                    .iter()
                    .map(|&i| naive_min_size(&sub, c.concept(i)))
                    .min()
                    .unwrap();
                t.check(min == layer.size, || {
                    format!("{name}: layer size {} != {min}", layer.size)
                });
                remaining.retain(|i| !layer.entries.iter().any(|e| e.0 == *i));
            }
            t.check(remaining.is_empty(), || {
                format!("{name}: layers do not cover the class")
            });
            if is_36_class(c) {
                match lemma36_teaching(c) {
                    Ok(r) => t.check(r.size() <= 3 && teaches(c, &r.concept, &r.set), || {
                        format!("{name}: lemma36 set {:?} invalid", r.set)
                    }),
                    Err(e) => t.check(false, || format!("{name}: lemma36 failed: {e}")),
                }
            }
            t
        })
        .collect();
    results.into_iter().for_each(|t| tally.merge(t));
    let n36 = classes.iter().filter(|(n, _)| n.starts_with("36(")).count();
    let ok36 = classes
        .iter()
        .filter(|(n, _)| n.starts_with("36("))
        .all(|(_, c)| is_36_class(c));
    tally.check(ok36, || "a generated (3,6) class is not (3,6)".into());
    tally.finish(4, "teaching", &format!("{n36} (3,6) classes"), start)
}

/// Smallest teaching set size by increasing-size enumeration.
fn naive_min_size(c: &ConceptClass, target: &Concept) -> usize {
    naive_min_set(c, target).len()
}

fn naive_min_set(c: &ConceptClass, target: &Concept) -> Vec<usize> {
    let n = c.n();
    let mut masks: Vec<u64> = (0..1u64 << n).collect();
    // increasing size, then lexicographic point order
    masks.sort_by_key(|&m| (m.count_ones(), mask_points(n, m)));
    for m in masks {
        let set = mask_points(n, m);
        if teaches(c, target, &set) {
            return set;
        }
    }
    unreachable!("the whole domain teaches")
}

/// `w/total > p/q` by cross-multiplication.
fn exceeds(w: u64, total: u64, p: u64, q: u64) -> bool {
    u128::from(w) * u128::from(q) > u128::from(p) * u128::from(total)
}

fn hamming(a: &Concept, b: &Concept) -> u64 {
    (0..a.len()).filter(|&i| a.get(i) != b.get(i)).count() as u64
}

pub fn criterion_5(classes: &[(String, ConceptClass)]) -> CriterionResult {
    let start = Instant::now();
    let mut tally = Tally::default();
    for (name, c) in classes {
        let d = naive_vc(c) as u32;
        for (p, q) in [(1u64, 8u64), (1, 4), (1, 2)] {
            let eps = EpsilonSpec::rational(p, q).unwrap();
            let e = p as f64 / q as f64;
            let pk = greedy_packing(c, &Distribution::uniform(c.n()), eps).unwrap();
            let total = c.n() as u64;
            let members: Vec<&Concept> = pk.members.iter().map(|&i| c.concept(i)).collect();
            for (i, a) in members.iter().enumerate() {
                for b in &members[i + 1..] {
                    tally.check(exceeds(hamming(a, b), total, p, q), || {
                        format!("{name} eps {p}/{q}: members {a} {b} too close")
                    });
                }
            }
            for k in c.concepts() {
                tally.check(
                    members.iter().any(|m| !exceeds(hamming(m, k), total, p, q)),
                    || format!("{name} eps {p}/{q}: {k} uncovered"),
                );
            }
            let b = haussler_bound(d, e).unwrap();
            let size = pk.len() as f64;
            tally.check(size <= b.tight * (1.0 + 1e-12), || {
                format!("{name}: packing {size} above {}", b.tight)
            });
            tally.check(size <= b.weak.max(1.0) * (1.0 + 1e-12), || {
                format!("{name}: packing {size} above weak {}", b.weak)
            });
            if d >= 1 {
                let s = sampling_packing_bound(d, e).unwrap();
                tally.check(size <= s, || format!("{name}: packing {size} above {s}"));
            }
            // dual: columns under the uniform distribution on concepts
            let a = dual_approx_set(c, eps);
            let cols: Vec<Concept> = a.points.iter().map(|&x| c.column(x)).collect();
            let m = c.len() as u64;
            for (i, x) in cols.iter().enumerate() {
                for y in &cols[i + 1..] {
                    tally.check(exceeds(hamming(x, y), m, p, q), || {
                        format!("{name}: dual members too close")
                    });
                }
            }
            for x in 0..c.n() {
                let col = c.column(x);
                tally.check(
                    cols.iter().any(|y| !exceeds(hamming(&col, y), m, p, q)),
                    || format!("{name}: column {x} uncovered"),
                );
            }
            let db = haussler_bound(1 << (d + 1), e).unwrap();
            let dsize = a.points.len() as f64;
            tally.check(
                dsize <= db.tight * (1.0 + 1e-12) && dsize <= db.weak * (1.0 + 1e-12),
                || format!("{name}: dual packing {dsize} above bound"),
            );
        }
    }
    tally.finish(5, "packing", "", start)
}

pub fn criterion_6(classes: &[(String, ConceptClass)]) -> CriterionResult {
    let start = Instant::now();
    let results: Vec<Tally> = classes
        .par_iter()
        .map(|(name, c)| {
            let mut t = Tally::default();
            let vc = naive_vc(c);
            t.check(c.vc_dimension() == vc, || {
                format!("{name}: vc {} != {vc}", c.vc_dimension())
            });
            let sauer = sauer_bound(c.n() as u64, vc as u64).unwrap();
            let direct: u64 = (0..=vc as u64).map(|k| binom(c.n() as u64, k)).sum();
            t.check(sauer == BigUint::from(direct), || {
                format!("{name}: sauer mismatch")
            });
            t.check(BigUint::from(c.len()) <= sauer, || {
                format!("{name}: above sauer bound")
            });
            if name.starts_with("hamming") {
                t.check(BigUint::from(c.len()) == sauer, || {
                    format!("{name}: not maximum")
                });
            }
            if vc <= 3 {
                let dual = c.dual();
                let dvc = naive_vc_up_to(&dual, floor_log2(dual.len()));
                t.check(dvc <= 1 << (vc + 1), || format!("{name}: dual vc {dvc}"));
            }
            if c.n() <= 8 {
                for k in c.concepts() {
                    let fast = min_teaching_set(c, k, None).unwrap().unwrap();
                    let slow = naive_min_set(c, k);
                    t.check(fast == slow, || {
                        format!("{name}: {k}: {fast:?} vs {slow:?}")
                    });
                }
            }
            t
        })
        .collect();
    let mut tally = Tally::default();
    results.into_iter().for_each(|t| tally.merge(t));
    tally.finish(6, "structural invariants", "", start)
}

fn binom(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

pub fn criterion_7() -> CriterionResult {
    let start = Instant::now();
    let mut tally = Tally::default();
    let m = smallest_m_for_ds(2, 0.25, 0.1, 1_000_000).expect("bound eventually drops");
    let iv = intervals(20).unwrap();
    let a = simulate_consistency_failure(&PacExperiment {
        mu: Distribution::uniform(iv.n()),
        target: iv
            .index_of(&Concept::from_bits((0..20).map(|i| (5..15).contains(&i))))
            .unwrap(),
        class: iv,
        m: m as usize,
        eps: num_rational::Ratio::new(1, 4),
        trials: 2000,
        seed: SUITE_SEED,
    })
    .expect("valid experiment");
    tally.check(a.rate <= a.bound_up + 3.0 * a.std_err, || {
        format!("double sampling: rate {} above {} + 3σ", a.rate, a.bound)
    });
    let s = singletons_with_empty(12).unwrap();
    let b = simulate_compression_learner(
        &PacExperiment {
            mu: Distribution::uniform(12),
            target: 0,
            class: s,
            m: 40,
            eps: num_rational::Ratio::new(3, 10),
            trials: 2000,
            seed: SUITE_SEED,
        },
        &SchemeParams::default(),
    )
    .expect("valid experiment");
    tally.check(b.rate <= b.bound_up + 3.0 * b.std_err, || {
        format!("compression: rate {} above {} + 3σ", b.rate, b.bound)
    });
    let extra = format!(
        "(a) m={m} rate={:.3e} bound={:.3e}; (b) rate={:.3e} bound={:.3e}",
        a.rate, a.bound, b.rate, b.bound
    );
    tally.finish(7, "PAC bounds", &extra, start)
}

/// Runs `vclab` in-process and returns (exit code, stdout).
fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = crate::run(
        std::iter::once("vclab").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (code, out)
}

pub fn criterion_8(classes: &[(String, ConceptClass)]) -> CriterionResult {
    let start = Instant::now();
    let mut tally = Tally::default();
    let dir = std::env::temp_dir().join(format!("vclab-suite-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    let class_path = dir.join("class.txt");
    std::fs::write(&class_path, intervals(6).unwrap().to_text()).expect("write class");
    let cp = class_path.to_str().expect("utf-8 path");
    let invocations: [&[&str]; 5] = [
        &["analyze", "-c", cp, "--eps", "1/4", "--eps", "1/2"],
        &[
            "compress",
            "-c",
            cp,
            "--target",
            "7",
            "--points",
            "0,2,3,5",
            "--base-threshold",
            "4",
        ],
        &["verify", "-c", cp, "--base-threshold", "4"],
        &[
            "verify",
            "-c",
            cp,
            "--budget",
            "10",
            "--samples",
            "500",
            "--seed",
            "7",
        ],
        &[
            "pac", "-c", cp, "--target", "3", "--m", "10,20", "--eps", "1/4", "--trials", "300",
            "--seed", "5",
        ],
    ];
    for args in invocations {
        let first = run_cli(args);
        let second = run_cli(args);
        tally.check(first.0 == 0 && first == second, || {
            format!("{} differs across runs", args[0])
        });
    }
    let _ = std::fs::remove_dir_all(&dir);
    for (name, c) in classes
        .iter()
        .filter(|(n, _)| n.starts_with("intervals") || n.starts_with("vc_bounded"))
    {
        for sample in all_samples(c).into_iter().step_by(7) {
            let (cs, _) = msw_compress_traced(c, &sample, &forced()).expect("realizable");
            let wire = cs.to_json();
            let back = CompressedSample::from_json(&wire);
            tally.check(
                back.as_ref().is_ok_and(|b| *b == cs && b.to_json() == wire),
                || format!("{name}: {wire} does not round-trip"),
            );
        }
    }
    tally.finish(8, "determinism", "", start)
}

pub const CRITERIA: std::ops::RangeInclusive<u32> = 1..=8;

/// Runs the selected criteria (all when `only` is empty), in order.
pub fn run_all(only: &[u32]) -> Vec<CriterionResult> {
    let wanted = |id: u32| only.is_empty() || only.contains(&id);
    let classes = suite_classes();
    let mut out = Vec::new();
    if wanted(1) {
        out.push(criterion_1(&classes));
    }
    if wanted(2) {
        out.push(criterion_2(&classes));
    }
    if wanted(3) {
        out.push(criterion_3(&classes));
    }
    if wanted(4) {
        out.push(criterion_4(&classes));
    }
    if wanted(5) {
        out.push(criterion_5(&classes));
    }
    if wanted(6) {
        out.push(criterion_6(&classes));
    }
    if wanted(7) {
        out.push(criterion_7());
    }
    if wanted(8) {
        out.push(criterion_8(&classes));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn naive_vc_of_known_classes() {
        assert_eq!(naive_vc(&intervals(5).unwrap()), 2);
        assert_eq!(naive_vc(&full_cube(3).unwrap()), 3);
        assert_eq!(naive_vc(&singletons_with_empty(4).unwrap()), 1);
        assert_eq!(naive_vc_up_to(&full_cube(4).unwrap(), 2), 2);
    }

    #[test]
    fn combinations_count() {
        assert_eq!(combinations(6, 3).len(), 20);
        assert_eq!(combinations(4, 0), vec![Vec::<usize>::new()]);
        assert_eq!(combinations(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
    }

    #[test]
    fn modular_rank() {
        let rows = vec![
            vec![true, true, false],
            vec![false, true, true],
            vec![true, false, true],
        ];
        assert_eq!(rank_mod_p(&rows, 3), 3);
        let rows = vec![vec![true, false], vec![true, false], vec![false, false]];
        assert_eq!(rank_mod_p(&rows, 2), 1);
    }

    #[test]
    fn strict_comparison() {
        assert!(exceeds(2, 8, 1, 8));
        assert!(!exceeds(1, 8, 1, 8));
        assert!(!exceeds(0, 8, 1, 8));
    }

    #[test]
    fn naive_teaching_of_empty_interval() {
        let c = intervals(4).unwrap();
        assert_eq!(naive_min_set(&c, c.concept(0)), vec![0, 1, 2, 3]);
    }

    #[test]
    fn suite_classes_have_expected_shape() {
        let classes = suite_classes();
        assert_eq!(classes.len(), 6 + 6 + 3 + 3 + 20 + 10);
        for (name, c) in &classes {
            assert!(c.n() <= 8 && c.len() <= 256, "{name}");
            if name.starts_with("random") || name.starts_with("vc_bounded") {
                assert!(c.len() <= 48, "{name}");
            }
        }
    }
}
