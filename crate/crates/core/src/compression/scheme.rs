//! Recursive compression over dual approximating sets.
//!
//! At every level the class `C` (over local points `0..n`) fixes `d = VC(C) + 2`,
//! `ε = |C|^(-1/(d·2^d+1))` and the greedy approximating set `A*(C, ε)` with its rounding
//! `r`. Small classes use the majority-halving base scheme with `T = 0`. Otherwise:
//!
//! * **Case 1** (some consistent `c` and `x ∈ Y` with `c(x) ≠ c(r(x))`): keep `x`, recurse
//!   on the concepts that agree with `c` on `{x, r(x)}`, with those two points deleted,
//!   and record `f(T) = x`.
//! * **Case 2** (every consistent `c` agrees with itself on `x` and `r(x)` for `x ∈ Y`):
//!   recurse on `C|_{A*}` with the sample pushed through `r`, pulling kept points back
//!   through `s`, the smallest preimage of `r` in the sample.
//!
//! Both maps derive `(d, ε, A*, r)` from the class alone, so the reconstructor rebuilds
//! exactly what the compressor used. Points in the recursion are always local to the
//! level; translation happens on the way down and back up.

use std::collections::BTreeMap;

use crate::class::{Concept, ConceptClass, LabeledSample};
use crate::compression::base::{base_compress, base_reconstruct};
use crate::compression::{
    ceil_log2_big, side_info_count, CompressedSample, SchemeParams, SideInfo,
};
use crate::error::{Error, Result};
use crate::metric::{dual_approx_set, epsilon_of, within_fraction, DualApprox, EpsilonSpec};

/// Quantities both maps derive from a class with at least two concepts.
#[derive(Clone, Debug)]
pub struct LevelPlan {
    pub vc: usize,
    /// `VC + 2`
    pub d: u32,
    pub epsilon: EpsilonSpec,
    pub approx: DualApprox,
}

pub fn level_plan(class: &ConceptClass) -> LevelPlan {
    let vc = class.vc_dimension();
    let d = vc as u32 + 2;
    let epsilon = epsilon_of(class.len() as u64, d).expect("class has at least two concepts");
    let approx = dual_approx_set(class, epsilon);
    LevelPlan {
        vc,
        d,
        epsilon,
        approx,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LevelCase {
    /// Class at or below the base threshold (or empty sample).
    Base,
    /// `A*` kept every column, so no domain reduction is possible; base scheme used.
    BaseNoShrink,
    Unfaithful {
        x: usize,
        rx: usize,
        witness: Concept,
    },
    Faithful,
}

impl LevelCase {
    pub fn tag(&self) -> &'static str {
        match self {
            LevelCase::Base => "base",
            LevelCase::BaseNoShrink => "base-no-shrink",
            LevelCase::Unfaithful { .. } => "case1",
            LevelCase::Faithful => "case2",
        }
    }

    pub fn is_base(&self) -> bool {
        matches!(self, LevelCase::Base | LevelCase::BaseNoShrink)
    }
}

/// What happened at one level of a compression, in that level's local coordinates.
#[derive(Clone, Debug)]
pub struct LevelTrace {
    pub class: ConceptClass,
    pub sample: LabeledSample,
    pub case: LevelCase,
    /// Present whenever the level was above the base threshold.
    pub epsilon: Option<EpsilonSpec>,
    pub a_star: Option<Vec<usize>>,
    pub rounding: Option<Vec<usize>>,
    pub child_size: Option<usize>,
    pub child_n: Option<usize>,
    /// `|Z|` produced at this level (after extending the child's result).
    pub kept_size: usize,
}

#[derive(Clone, Debug, Default)]
pub struct CompressionTrace {
    /// Top level first.
    pub levels: Vec<LevelTrace>,
}

impl CompressionTrace {
    pub fn count(&self, tag: &str) -> usize {
        self.levels.iter().filter(|l| l.case.tag() == tag).count()
    }
}

pub fn msw_compress(
    class: &ConceptClass,
    sample: &LabeledSample,
    params: &SchemeParams,
) -> Result<CompressedSample> {
    Ok(msw_compress_traced(class, sample, params)?.0)
}

pub fn msw_compress_traced(
    class: &ConceptClass,
    sample: &LabeledSample,
    params: &SchemeParams,
) -> Result<(CompressedSample, CompressionTrace)> {
    if let Some(&p) = sample.points.iter().find(|&&p| p >= class.n()) {
        return Err(Error::PointOutOfRange {
            point: p,
            n: class.n(),
        });
    }
    if !class.is_realizable(sample) {
        return Err(Error::Unrealizable);
    }
    let mut trace = CompressionTrace::default();
    let out = compress_level(class, sample, params, &mut trace)?;
    Ok((out, trace))
}

fn is_base(class: &ConceptClass, params: &SchemeParams) -> bool {
    use crate::compression::BaseThreshold;
    match params.base_threshold {
        BaseThreshold::Fixed(t) => class.len() as u64 <= t,
        BaseThreshold::Asymptotic => {
            let d = class.vc_dimension() as u32 + 2;
            class.len() as u64 <= params.threshold_for(d)
        }
    }
}

fn without(n: usize, removed: &[usize]) -> Vec<usize> {
    (0..n).filter(|p| !removed.contains(p)).collect()
}

/// Position of each parent point in `keep` (ascending), if kept.
fn local_index(keep: &[usize], p: usize) -> Option<usize> {
    keep.binary_search(&p).ok()
}

fn compress_level(
    class: &ConceptClass,
    sample: &LabeledSample,
    params: &SchemeParams,
    trace: &mut CompressionTrace,
) -> Result<CompressedSample> {
    let slot = trace.levels.len();
    trace.levels.push(LevelTrace {
        class: class.clone(),
        sample: sample.clone(),
        case: LevelCase::Base,
        epsilon: None,
        a_star: None,
        rounding: None,
        child_size: None,
        child_n: None,
        kept_size: 0,
    });
    if sample.is_empty() || class.len() < 2 || is_base(class, params) {
        let kept = base_compress(class, sample)?;
        trace.levels[slot].kept_size = kept.len();
        return Ok(CompressedSample::base(kept));
    }
    let plan = level_plan(class);
    let approx = &plan.approx;
    {
        let level = &mut trace.levels[slot];
        level.epsilon = Some(plan.epsilon);
        level.a_star = Some(approx.points.clone());
        level.rounding = Some(approx.rounding.clone());
    }
    if approx.points.len() == class.n() {
        let kept = base_compress(class, sample)?;
        let level = &mut trace.levels[slot];
        level.case = LevelCase::BaseNoShrink;
        level.kept_size = kept.len();
        return Ok(CompressedSample::base(kept));
    }

    let witness = sample.points.iter().find_map(|&x| {
        let rx = approx.r(x);
        if rx == x {
            return None;
        }
        class
            .consistent(sample)
            .find(|c| c.get(x) != c.get(rx))
            .map(|c| (x, rx, c.clone()))
    });

    let out = match witness {
        Some((x, rx, c)) => {
            let (bx, brx) = (c.get(x), c.get(rx));
            let keep = without(class.n(), &[x, rx]);
            let child = class
                .filter(|o| o.get(x) == bx && o.get(rx) == brx)
                .expect("witness survives")
                .project_unchecked(&keep);
            let child_sample = LabeledSample::from_pairs(
                sample
                    .iter()
                    .filter_map(|(p, l)| local_index(&keep, p).map(|i| (i, l)))
                    .collect(),
            );
            {
                let level = &mut trace.levels[slot];
                level.case = LevelCase::Unfaithful {
                    x,
                    rx,
                    witness: c.clone(),
                };
                level.child_size = Some(child.len());
                level.child_n = Some(child.n());
            }
            let sub = compress_level(&child, &child_sample, params, trace)?;
            let mut pairs: Vec<(usize, bool)> =
                sub.kept.iter().map(|(i, l)| (keep[i], l)).collect();
            pairs.push((x, bx));
            pairs.sort_unstable_by_key(|&(p, _)| p);
            let depth = sub.info.depth + 1;
            let mut f: BTreeMap<usize, usize> =
                sub.info.f.iter().map(|(&t, &i)| (t, keep[i])).collect();
            f.insert(depth, x);
            CompressedSample {
                kept: LabeledSample::from_pairs(pairs),
                info: SideInfo { depth, f },
            }
        }
        None => {
            let a_star = &approx.points;
            // s(x'): smallest sample point rounding to x'
            let mut preimage: BTreeMap<usize, (usize, bool)> = BTreeMap::new();
            for (p, l) in sample.iter() {
                preimage.entry(approx.r(p)).or_insert((p, l));
            }
            let child = class.project_unchecked(a_star);
            let child_sample = LabeledSample::from_pairs(
                preimage
                    .iter()
                    .map(|(&xp, &(_, l))| (local_index(a_star, xp).expect("rounding in A*"), l))
                    .collect(),
            );
            {
                let level = &mut trace.levels[slot];
                level.case = LevelCase::Faithful;
                level.child_size = Some(child.len());
                level.child_n = Some(child.n());
            }
            let sub = compress_level(&child, &child_sample, params, trace)?;
            let s = |i: usize| preimage[&a_star[i]].0;
            let mut pairs: Vec<(usize, bool)> = sub.kept.iter().map(|(i, l)| (s(i), l)).collect();
            pairs.sort_unstable_by_key(|&(p, _)| p);
            let f = sub.info.f.iter().map(|(&t, &i)| (t, s(i))).collect();
            CompressedSample {
                kept: LabeledSample::from_pairs(pairs),
                info: SideInfo {
                    depth: sub.info.depth + 1,
                    f,
                },
            }
        }
    };
    trace.levels[slot].kept_size = out.kept.len();
    Ok(out)
}

/// Reconstructs a hypothesis over the whole domain.
///
/// Structurally malformed side information is an error. Well-formed input that no
/// compression could have produced maps to the first concept of the class.
pub fn msw_reconstruct(class: &ConceptClass, cs: &CompressedSample) -> Result<Concept> {
    cs.validate(class.n())?;
    Ok(
        reconstruct_level(class, &cs.kept, &cs.info.f, cs.info.depth)
            .unwrap_or_else(|| class.concept(0).clone()),
    )
}

/// `None` marks input outside the image of the compressor.
fn reconstruct_level(
    class: &ConceptClass,
    kept: &LabeledSample,
    f: &BTreeMap<usize, usize>,
    depth: usize,
) -> Option<Concept> {
    if depth == 0 {
        if !f.is_empty() {
            return None;
        }
        return base_reconstruct(class, kept).ok();
    }
    if class.len() < 2 {
        return None;
    }
    let plan = level_plan(class);
    let approx = &plan.approx;
    let n = class.n();
    if approx.points.len() == n {
        return None;
    }
    if let Some(&x) = f.get(&depth) {
        let rx = approx.r(x);
        if rx == x {
            return None;
        }
        let zx = kept.label(x)?;
        let keep = without(n, &[x, rx]);
        let child = class
            .filter(|o| o.get(x) == zx && o.get(rx) != zx)?
            .project_unchecked(&keep);
        let child_kept = LabeledSample::from_pairs(
            kept.iter()
                .filter_map(|(p, l)| local_index(&keep, p).map(|i| (i, l)))
                .collect(),
        );
        let mut child_f = BTreeMap::new();
        for (&t, &p) in f.range(..depth) {
            child_f.insert(t, local_index(&keep, p)?);
        }
        let h_child = reconstruct_level(&child, &child_kept, &child_f, depth - 1)?;
        let mut h = Concept::zeros(n);
        for (i, &p) in keep.iter().enumerate() {
            h.set(p, h_child.get(i));
        }
        h.set(x, zx);
        h.set(rx, !zx);
        Some(h)
    } else {
        let a_star = &approx.points;
        let mut preimage: BTreeMap<usize, bool> = BTreeMap::new();
        for (p, l) in kept.iter() {
            preimage.entry(approx.r(p)).or_insert(l);
        }
        let child = class.project_unchecked(a_star);
        let child_kept = LabeledSample::from_pairs(
            preimage
                .iter()
                .map(|(&xp, &l)| (local_index(a_star, xp).expect("rounding in A*"), l))
                .collect(),
        );
        let mut child_f = BTreeMap::new();
        for (&t, &p) in f.range(..depth) {
            let i = local_index(a_star, approx.r(p)).expect("rounding in A*");
            if child_f.values().any(|&v| v == i) {
                return None;
            }
            child_f.insert(t, i);
        }
        let h_child = reconstruct_level(&child, &child_kept, &child_f, depth - 1)?;
        Some(Concept::from_bits((0..n).map(|x| {
            h_child.get(local_index(a_star, approx.r(x)).expect("rounding in A*"))
        })))
    }
}

/// Size accounting for one compression.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct SizeReport {
    pub kept_size: usize,
    pub depth: usize,
    pub levels: usize,
    pub cases: Vec<&'static str>,
    /// `⌈log₂ |Q|⌉` for side information of depth at most `T` over `|Z|` kept points.
    pub side_info_bits: u64,
}

pub fn size_report(cs: &CompressedSample, trace: &CompressionTrace) -> SizeReport {
    let q = side_info_count(cs.kept.len(), cs.info.depth);
    SizeReport {
        kept_size: cs.kept.len(),
        depth: cs.info.depth,
        levels: trace.levels.len(),
        cases: trace.levels.iter().map(|l| l.case.tag()).collect(),
        side_info_bits: ceil_log2_big(&q),
    }
}

/// Problems with a size report against its compression and trace.
pub fn check_size_report(cs: &CompressedSample, trace: &CompressionTrace) -> Vec<String> {
    let mut problems = Vec::new();
    let report = size_report(cs, trace);
    if report.levels != report.depth + 1 {
        problems.push(format!(
            "{} levels for depth {}",
            report.levels, report.depth
        ));
    }
    let bases = trace.levels.iter().filter(|l| l.case.is_base()).count();
    if bases != 1 || !trace.levels.last().is_some_and(|l| l.case.is_base()) {
        problems.push("trace must end in exactly one base level".into());
    }
    if let Some(top) = trace.levels.first() {
        if top.kept_size != report.kept_size {
            problems.push("top-level kept size differs from the output".into());
        }
    }
    for pair in trace.levels.windows(2) {
        let (upper, lower) = (&pair[0], &pair[1]);
        let grow = upper.kept_size as isize - lower.kept_size as isize;
        let expected = isize::from(matches!(upper.case, LevelCase::Unfaithful { .. }));
        if grow != expected {
            problems.push(format!(
                "level added {grow} kept points, expected {expected}"
            ));
        }
        if upper.child_size != Some(lower.class.len()) || upper.child_n != Some(lower.class.n()) {
            problems.push("child dimensions differ from the next level".into());
        }
    }
    let unfaithful = trace
        .levels
        .iter()
        .filter(|l| matches!(l.case, LevelCase::Unfaithful { .. }))
        .count();
    if unfaithful != cs.info.f.len() {
        problems.push(format!(
            "{unfaithful} case-1 levels but |f| = {}",
            cs.info.f.len()
        ));
    }
    problems
}

/// Per-level inequalities and the two-sided characterization of the case split.
pub fn check_level(level: &LevelTrace) -> Vec<String> {
    let mut problems = Vec::new();
    let (Some(eps), Some(rounding), Some(a_star)) =
        (&level.epsilon, &level.rounding, &level.a_star)
    else {
        return problems;
    };
    let class = &level.class;
    let unfaithful_exists = level.sample.points.iter().any(|&x| {
        let rx = rounding[x];
        class
            .consistent(&level.sample)
            .any(|c| c.get(x) != c.get(rx))
    });
    match &level.case {
        LevelCase::Unfaithful { x, rx, witness } => {
            if !level.sample.points.contains(x) {
                problems.push(format!("case1 point {x} is not in the sample"));
            }
            if rounding[*x] != *rx {
                problems.push(format!("case1 rounding mismatch at {x}"));
            }
            if !witness.agrees_with(&level.sample) || witness.get(*x) == witness.get(*rx) {
                problems.push(format!("case1 witness does not disagree at ({x}, {rx})"));
            }
            if !class.contains(witness) {
                problems.push("case1 witness is not in the class".into());
            }
            let child = level.child_size.unwrap_or(usize::MAX) as u64;
            if !within_fraction(child, class.len() as u64, eps) {
                problems.push(format!(
                    "case1 shrinkage violated: |C'| = {child}, |C| = {}, eps = {eps}",
                    class.len()
                ));
            }
        }
        LevelCase::Faithful => {
            if unfaithful_exists {
                problems.push("case2 taken although an unfaithful witness exists".into());
            }
            if a_star.len() >= class.n() {
                problems.push(format!(
                    "case2 without domain shrinkage: |A*| = {}, n = {}",
                    a_star.len(),
                    class.n()
                ));
            }
        }
        LevelCase::BaseNoShrink => {
            if a_star.len() != class.n() {
                problems.push("no-shrink fallback taken although A* is smaller".into());
            }
        }
        LevelCase::Base => {}
    }
    problems
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compression::base::base_compress;
    use crate::generators::{hamming_ball, intervals, random_vc_bounded, singletons_with_empty};

    fn all_masks(n: usize) -> impl Iterator<Item = Vec<usize>> {
        (1u64..1 << n).map(move |m| (0..n).filter(|i| m >> i & 1 == 1).collect())
    }

    fn round_trip_all(class: &ConceptClass, params: &SchemeParams) -> (usize, usize) {
        let mut case1 = 0;
        let mut case2 = 0;
        for c in class.concepts() {
            for pts in all_masks(class.n()) {
                let sample = LabeledSample::from_concept(c, &pts);
                let (cs, trace) = msw_compress_traced(class, &sample, params).unwrap();
                assert!(cs.kept.points.iter().all(|p| pts.contains(p)));
                assert!(cs.kept.iter().all(|(p, l)| c.get(p) == l));
                let h = msw_reconstruct(class, &cs).unwrap();
                assert!(
                    h.agrees_with(&sample),
                    "round trip failed for {c} on {pts:?}"
                );
                assert_eq!(cs.info.depth + 1, trace.levels.len());
                for level in &trace.levels {
                    assert!(check_level(level).is_empty(), "{:?}", check_level(level));
                }
                case1 += trace.count("case1");
                case2 += trace.count("case2");
            }
        }
        (case1, case2)
    }

    #[test]
    fn default_params_match_base_scheme() {
        let s = singletons_with_empty(5).unwrap();
        for c in s.concepts() {
            let sample = LabeledSample::from_concept(c, &[0, 2, 3]);
            let cs = msw_compress(&s, &sample, &SchemeParams::default()).unwrap();
            assert_eq!(cs.info.depth, 0);
            assert!(cs.info.f.is_empty());
            assert_eq!(cs.kept, base_compress(&s, &sample).unwrap());
        }
    }

    #[test]
    fn forced_recursion_round_trips() {
        let params = SchemeParams::fixed(4).unwrap();
        let mut totals = (0, 0);
        for class in [
            intervals(6).unwrap(),
            hamming_ball(5, 2).unwrap(),
            random_vc_bounded(7, 2, 20, 11).unwrap(),
        ] {
            let (a, b) = round_trip_all(&class, &params);
            totals.0 += a;
            totals.1 += b;
        }
        assert!(totals.0 > 0, "no unfaithful level exercised");
        assert!(totals.1 > 0, "no faithful level exercised");
    }

    #[test]
    fn malformed_side_info_is_an_error() {
        let iv = intervals(5).unwrap();
        let cs = CompressedSample {
            kept: LabeledSample::new(vec![1], vec![true]).unwrap(),
            info: SideInfo {
                depth: 1,
                f: [(1, 3)].into_iter().collect(),
            },
        };
        assert!(matches!(
            msw_reconstruct(&iv, &cs),
            Err(Error::MalformedSideInfo(_))
        ));
    }

    #[test]
    fn non_image_input_maps_to_first_concept() {
        let iv = intervals(5).unwrap();
        let cs = CompressedSample {
            kept: LabeledSample::empty(),
            info: SideInfo {
                depth: 7,
                f: BTreeMap::new(),
            },
        };
        // depth 7 cannot be reached on five points
        assert_eq!(msw_reconstruct(&iv, &cs).unwrap(), iv.concept(0).clone());
    }

    #[test]
    fn unrealizable_sample_is_rejected() {
        let s = singletons_with_empty(4).unwrap();
        let sample = LabeledSample::new(vec![0, 1], vec![true, true]).unwrap();
        assert_eq!(
            msw_compress(&s, &sample, &SchemeParams::default()).unwrap_err(),
            Error::Unrealizable
        );
    }

    #[test]
    fn deterministic() {
        let params = SchemeParams::fixed(3).unwrap();
        let iv = intervals(6).unwrap();
        let sample = LabeledSample::from_concept(iv.concept(9), &[0, 1, 3, 4, 5]);
        let a = msw_compress(&iv, &sample, &params).unwrap();
        let b = msw_compress(&iv, &sample, &params).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }
}
