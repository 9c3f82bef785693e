//! Teaching sets and the recursive teaching hierarchy.

use serde::Serialize;

use crate::class::{Concept, ConceptClass};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TeachingMethod {
    Exact,
    Halving,
    Thm14,
    Lemma36,
}

/// A concept together with a teaching set for it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TeachingReport {
    pub concept: Concept,
    pub set: Vec<usize>,
    pub method: TeachingMethod,
}

impl TeachingReport {
    pub fn size(&self) -> usize {
        self.set.len()
    }
}

/// True iff `c` is the only concept of `class` consistent with `c|_points`.
pub fn is_teaching_set(class: &ConceptClass, c: &Concept, points: &[usize]) -> Result<bool> {
    if !class.contains(c) {
        return Err(Error::NotInClass);
    }
    let points = class.normalize_points(points)?;
    Ok(class
        .concepts()
        .iter()
        .filter(|&other| other != c)
        .all(|other| points.iter().any(|&p| other.get(p) != c.get(p))))
}

/// Lexicographically first minimum hitting set of a family of point sets.
struct HittingSearch {
    sets: Vec<Concept>,
    n: usize,
}

impl HittingSearch {
    fn new(n: usize, mut sets: Vec<Concept>) -> Self {
        sets.sort_unstable_by_key(|s| s.count_ones());
        // drop supersets: hitting the smaller set suffices
        let mut kept: Vec<Concept> = Vec::with_capacity(sets.len());
        for s in sets {
            if !kept.iter().any(|k| k.is_subset_of(&s)) {
                kept.push(s);
            }
        }
        HittingSearch { sets: kept, n }
    }

    /// Greedy count of pairwise-disjoint unhit sets restricted to points `>= from`.
    fn disjoint_lower_bound(&self, unhit: &[usize], from: usize) -> Option<usize> {
        let mut used = Concept::zeros(self.n);
        let mut count = 0;
        for &i in unhit {
            let avail: Vec<usize> = self.sets[i].ones().filter(|&p| p >= from).collect();
            if avail.is_empty() {
                return None;
            }
            if avail.iter().all(|&p| !used.get(p)) {
                for p in avail {
                    used.set(p, true);
                }
                count += 1;
            }
        }
        Some(count)
    }

    fn search(
        &self,
        chosen: &mut Vec<usize>,
        mask: &mut Concept,
        from: usize,
        slots: usize,
    ) -> bool {
        let unhit: Vec<usize> = (0..self.sets.len())
            .filter(|&i| !self.sets[i].intersects(mask))
            .collect();
        if unhit.is_empty() {
            return true;
        }
        if slots == 0 {
            return false;
        }
        match self.disjoint_lower_bound(&unhit, from) {
            Some(lb) if lb <= slots => {}
            _ => return false,
        }
        // every unhit set must still be hit, so the next point cannot pass the smallest maximum
        let ceiling = unhit
            .iter()
            .map(|&i| self.sets[i].last_one().expect("nonempty set"))
            .min()
            .unwrap();
        for p in from..=ceiling {
            chosen.push(p);
            mask.set(p, true);
            if self.search(chosen, mask, p + 1, slots - 1) {
                return true;
            }
            mask.set(p, false);
            chosen.pop();
        }
        false
    }

    /// Smallest hitting set of size at most `cap`, lexicographically first among minimum ones.
    fn solve(&self, cap: usize) -> Option<Vec<usize>> {
        if self.sets.iter().any(|s| s.count_ones() == 0) {
            return None;
        }
        let start = self
            .disjoint_lower_bound(&(0..self.sets.len()).collect::<Vec<_>>(), 0)
            .unwrap_or(0);
        for k in start..=cap.min(self.n) {
            let mut chosen = Vec::with_capacity(k);
            let mut mask = Concept::zeros(self.n);
            if self.search(&mut chosen, &mut mask, 0, k) {
                return Some(chosen);
            }
        }
        None
    }
}

/// A minimum teaching set for `c`, or `None` when every teaching set is larger than `cap`.
///
/// Computed as a minimum hitting set of the disagreement sets `Δ(c, c')`; among minimum
/// sets the lexicographically smallest sorted point list is returned.
pub fn min_teaching_set(
    class: &ConceptClass,
    c: &Concept,
    cap: Option<usize>,
) -> Result<Option<Vec<usize>>> {
    if !class.contains(c) {
        return Err(Error::NotInClass);
    }
    let sets: Vec<Concept> = class
        .concepts()
        .iter()
        .filter(|&o| o != c)
        .map(|o| o.xor(c))
        .collect();
    let search = HittingSearch::new(class.n(), sets);
    Ok(search.solve(cap.unwrap_or(class.n())))
}

fn ceil_log2(x: usize) -> usize {
    if x <= 1 {
        0
    } else {
        (usize::BITS - (x - 1).leading_zeros()) as usize
    }
}

/// Halving: repeatedly split on the smallest non-constant point, keeping the minority label.
pub fn halving_teaching_concept(class: &ConceptClass) -> TeachingReport {
    let (concept, set) = halve(class.concepts().to_vec(), Vec::new());
    TeachingReport {
        concept,
        set,
        method: TeachingMethod::Halving,
    }
}

fn halve(mut survivors: Vec<Concept>, mut set: Vec<usize>) -> (Concept, Vec<usize>) {
    let n = survivors[0].len();
    while survivors.len() > 1 {
        let (x, ones) = (0..n)
            .find_map(|x| {
                let ones = survivors.iter().filter(|c| c.get(x)).count();
                (ones != 0 && ones != survivors.len()).then_some((x, ones))
            })
            .expect("distinct concepts differ somewhere");
        let zeros = survivors.len() - ones;
        // minority label; ties keep 0
        let label = ones < zeros;
        survivors.retain(|c| c.get(x) == label);
        set.push(x);
    }
    set.sort_unstable();
    set.dedup();
    (survivors.pop().unwrap(), set)
}

/// One iteration of the pair-selection loop.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Thm14Step {
    pub x: usize,
    pub x_prime: usize,
    pub labels: (bool, bool),
    pub class_before: usize,
    pub class_after: usize,
}

#[derive(Clone, Debug)]
pub struct Thm14Report {
    pub report: TeachingReport,
    pub steps: Vec<Thm14Step>,
    /// Points contributed by the final halving phase.
    pub halving_points: Vec<usize>,
}

/// `(4e²)^(d·2^(d+2))` clamped to `i64::MAX`.
pub fn thm14_default_threshold(d: usize) -> u64 {
    let exp = (d as f64) * 2f64.powi(d as i32 + 2);
    let log = exp * (4.0 * std::f64::consts::E.powi(2)).ln();
    if log >= (i64::MAX as f64).ln() {
        i64::MAX as u64
    } else {
        log.exp().floor() as u64
    }
}

/// Pair-selection teaching construction.
///
/// While the surviving class is larger than `fallback_threshold`, pick the ordered pair
/// `(x, x')` and labels `(b, b')` whose slice `{c : c(x)=b, c(x')=b'}` is nonempty, proper,
/// and smallest (ties: smallest `(x, x', b, b')`), and keep only that slice. The remainder
/// is finished by halving.
pub fn thm14_teaching_concept(class: &ConceptClass, fallback_threshold: u64) -> Thm14Report {
    let d = class.vc_dimension();
    let n = class.n();
    let mut survivors: Vec<Concept> = class.concepts().to_vec();
    let mut set = Vec::new();
    let mut steps = Vec::new();
    while survivors.len() as u64 > fallback_threshold {
        let mut best: Option<(usize, usize, usize, bool, bool)> = None;
        for x in 0..n {
            for xp in 0..n {
                if x == xp {
                    continue;
                }
                let mut counts = [0usize; 4];
                for c in &survivors {
                    counts[(usize::from(c.get(x)) << 1) | usize::from(c.get(xp))] += 1;
                }
                for (k, &count) in counts.iter().enumerate() {
                    if count == 0 || count == survivors.len() {
                        continue;
                    }
                    if best.is_none_or(|b| count < b.0) {
                        best = Some((count, x, xp, k & 2 != 0, k & 1 != 0));
                    }
                }
            }
        }
        let Some((size, x, xp, b, bp)) = best else {
            break;
        };
        if d >= 2 {
            let exp = (d as f64) * 2f64.powi(d as i32 + 2);
            let len = survivors.len() as f64;
            if len.ln() > exp * (4.0 * std::f64::consts::E.powi(2)).ln() {
                assert!(
                    (size as f64) <= len.powf(1.0 - 1.0 / exp),
                    "pair slice exceeds |C|^(1-1/(d 2^(d+2)))"
                );
            }
        }
        let before = survivors.len();
        survivors.retain(|c| c.get(x) == b && c.get(xp) == bp);
        debug_assert_eq!(survivors.len(), size);
        steps.push(Thm14Step {
            x,
            x_prime: xp,
            labels: (b, bp),
            class_before: before,
            class_after: size,
        });
        set.push(x);
        set.push(xp);
    }
    let (concept, halving_points) = halve(survivors, Vec::new());
    set.extend_from_slice(&halving_points);
    set.sort_unstable();
    set.dedup();
    Thm14Report {
        report: TeachingReport {
            concept,
            set,
            method: TeachingMethod::Thm14,
        },
        steps,
        halving_points,
    }
}

/// One layer of the recursive teaching hierarchy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RtLayer {
    pub size: usize,
    /// `(index into the original class, minimum teaching set within the remaining class)`.
    pub entries: Vec<(usize, Vec<usize>)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RtDecomposition {
    pub layers: Vec<RtLayer>,
}

/// Recursive teaching dimension together with the layer decomposition.
pub fn rt_dimension(class: &ConceptClass) -> (usize, RtDecomposition) {
    let mut remaining = class.clone();
    let mut layers = Vec::new();
    loop {
        // some concept always has a teaching set no larger than the halving one
        let mut best = halving_teaching_concept(&remaining).size();
        let mut entries: Vec<(usize, Vec<usize>)> = Vec::new();
        for c in remaining.concepts() {
            let Some(set) = min_teaching_set(&remaining, c, Some(best)).expect("member") else {
                continue;
            };
            if set.len() < best {
                best = set.len();
                entries.clear();
            }
            entries.push((class.index_of(c).expect("subclass member"), set));
        }
        debug_assert!(!entries.is_empty());
        let layer_points: Vec<usize> = entries.iter().map(|e| e.0).collect();
        layers.push(RtLayer {
            size: best,
            entries,
        });
        match remaining.filter(|c| !layer_points.contains(&class.index_of(c).unwrap())) {
            Some(rest) => remaining = rest,
            None => break,
        }
    }
    let rtd = layers.iter().map(|l| l.size).max().unwrap_or(0);
    (rtd, RtDecomposition { layers })
}

/// Every projection onto three points shows at most six patterns.
pub fn is_36_class(class: &ConceptClass) -> bool {
    violating_triple(class).is_none()
}

fn violating_triple(class: &ConceptClass) -> Option<[usize; 3]> {
    if class.len() < 7 {
        return None;
    }
    let n = class.n();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                if class.pattern_count(&[a, b, c]) > 6 {
                    return Some([a, b, c]);
                }
            }
        }
    }
    None
}

/// First concept (canonical order) with a teaching set of at most one point.
fn single_point_teacher(class: &ConceptClass) -> Option<(Concept, Vec<usize>)> {
    if class.len() == 1 {
        return Some((class.concept(0).clone(), Vec::new()));
    }
    for c in class.concepts() {
        for x in 0..class.n() {
            let unique = class
                .concepts()
                .iter()
                .filter(|o| o.get(x) == c.get(x))
                .count()
                == 1;
            if unique {
                return Some((c.clone(), vec![x]));
            }
        }
    }
    None
}

/// Teaching set of size at most 3 for some concept of a (3,6) class.
pub fn lemma36_teaching(class: &ConceptClass) -> Result<TeachingReport> {
    if let Some(t) = violating_triple(class) {
        return Err(Error::Not36Class(t));
    }
    let vc = class.vc_dimension();
    if vc <= 1 {
        let (concept, set) = single_point_teacher(class).ok_or_else(|| {
            Error::InvalidParameter("VC-1 class without a single-point teaching set".into())
        })?;
        return Ok(TeachingReport {
            concept,
            set,
            method: TeachingMethod::Lemma36,
        });
    }
    // smallest quadrant over all shattered pairs; ties go to the smallest (x, x', b, b')
    let n = class.n();
    let mut best: Option<(usize, usize, usize, bool, bool)> = None;
    for x in 0..n {
        for xp in x + 1..n {
            if !class.shatters(&[x, xp]) {
                continue;
            }
            let mut counts = [0usize; 4];
            for c in class.concepts() {
                counts[(usize::from(c.get(x)) << 1) | usize::from(c.get(xp))] += 1;
            }
            for (k, &count) in counts.iter().enumerate() {
                if best.is_none_or(|b| count < b.0) {
                    best = Some((count, x, xp, k & 2 != 0, k & 1 != 0));
                }
            }
        }
    }
    let (_, x, xp, b, bp) = best.expect("VC-2 class has a shattered pair");
    let quadrant = class
        .filter(|c| c.get(x) == b && c.get(xp) == bp)
        .expect("shattered pair quadrants are nonempty");
    if quadrant.vc_dimension() > 1 {
        return Err(Error::InvalidParameter(format!(
            "minimal quadrant at ({x}, {xp}) has VC-dimension above 1"
        )));
    }
    let (concept, inner) = single_point_teacher(&quadrant).ok_or_else(|| {
        Error::InvalidParameter("VC-1 quadrant without a single-point teaching set".into())
    })?;
    let mut set = vec![x, xp];
    set.extend(inner);
    set.sort_unstable();
    set.dedup();
    Ok(TeachingReport {
        concept,
        set,
        method: TeachingMethod::Lemma36,
    })
}

/// `⌈log₂ |C|⌉`, the halving bound.
pub fn halving_bound(class: &ConceptClass) -> usize {
    ceil_log2(class.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{full_cube, hamming_ball, intervals, random_36, singletons_with_empty};

    fn class(rows: &[&str]) -> ConceptClass {
        ConceptClass::from_strs(rows).unwrap()
    }

    fn point_concept(n: usize, ones: &[usize]) -> Concept {
        let mut c = Concept::zeros(n);
        for &p in ones {
            c.set(p, true);
        }
        c
    }

    #[test]
    fn teaching_set_examples() {
        let single = class(&["0110"]);
        assert!(is_teaching_set(&single, single.concept(0), &[]).unwrap());

        let s = singletons_with_empty(4).unwrap();
        let two = point_concept(4, &[2]);
        assert!(is_teaching_set(&s, &two, &[2]).unwrap());
        let empty = Concept::zeros(4);
        assert!(!is_teaching_set(&s, &empty, &[0, 1, 2]).unwrap());
        assert!(is_teaching_set(&s, &empty, &[0, 1, 2, 3]).unwrap());
        assert_eq!(
            is_teaching_set(&s, &point_concept(4, &[0, 1]), &[0]).unwrap_err(),
            Error::NotInClass
        );
    }

    #[test]
    fn min_teaching_examples() {
        let single = class(&["01"]);
        assert_eq!(
            min_teaching_set(&single, single.concept(0), None).unwrap(),
            Some(vec![])
        );

        let s = singletons_with_empty(5).unwrap();
        let empty = Concept::zeros(5);
        assert_eq!(
            min_teaching_set(&s, &empty, None).unwrap(),
            Some(vec![0, 1, 2, 3, 4])
        );
        assert_eq!(min_teaching_set(&s, &empty, Some(4)).unwrap(), None);

        // the empty interval must see a 0 under every single-point interval
        let iv = intervals(4).unwrap();
        let set = min_teaching_set(&iv, &Concept::zeros(4), None)
            .unwrap()
            .unwrap();
        assert_eq!(set, vec![0, 1, 2, 3]);
        // the full run [0, 3] is pinned by its two endpoints
        let full = Concept::parse("1111").unwrap();
        assert_eq!(
            min_teaching_set(&iv, &full, None).unwrap(),
            Some(vec![0, 3])
        );
    }

    #[test]
    fn halving_examples() {
        let single = class(&["101"]);
        let r = halving_teaching_concept(&single);
        assert!(r.set.is_empty());

        let two = class(&["0", "1"]);
        assert_eq!(halving_teaching_concept(&two).set, vec![0]);

        let cube = full_cube(3).unwrap();
        let r = halving_teaching_concept(&cube);
        assert_eq!(r.set, vec![0, 1, 2]);
        assert!(is_teaching_set(&cube, &r.concept, &r.set).unwrap());
    }

    #[test]
    fn thm14_falls_back_immediately() {
        let iv = intervals(5).unwrap();
        let t = thm14_teaching_concept(&iv, iv.len() as u64);
        assert!(t.steps.is_empty());
        assert_eq!(t.report.set, halving_teaching_concept(&iv).set);
        assert_eq!(t.report.concept, halving_teaching_concept(&iv).concept);
    }

    #[test]
    fn thm14_trace_shrinks() {
        let hb = hamming_ball(6, 2).unwrap();
        let t = thm14_teaching_concept(&hb, 2);
        assert!(!t.steps.is_empty());
        for s in &t.steps {
            assert!(s.class_after > 0 && s.class_after < s.class_before);
        }
        assert!(is_teaching_set(&hb, &t.report.concept, &t.report.set).unwrap());
    }

    #[test]
    fn default_threshold_is_astronomical() {
        assert_eq!(thm14_default_threshold(2), i64::MAX as u64);
        assert_eq!(thm14_default_threshold(0), 1);
    }

    #[test]
    fn rtd_examples() {
        let (rtd, dec) = rt_dimension(&singletons_with_empty(6).unwrap());
        assert_eq!(rtd, 1);
        assert_eq!(dec.layers.len(), 2);
        assert_eq!(dec.layers[0].entries.len(), 6);
        assert_eq!(dec.layers[1].size, 0);

        let (rtd, dec) = rt_dimension(&full_cube(2).unwrap());
        assert_eq!(rtd, 2);
        assert_eq!(dec.layers.len(), 1);
        assert_eq!(dec.layers[0].entries.len(), 4);
    }

    #[test]
    fn is36_examples() {
        assert!(!is_36_class(&full_cube(3).unwrap()));
        assert!(is_36_class(&singletons_with_empty(6).unwrap()));
        // every ordered triple shows all patterns but 101
        assert!(!is_36_class(&intervals(5).unwrap()));
        assert!(is_36_class(&intervals(2).unwrap()));
        assert!(is_36_class(&class(&["01", "10"])));
    }

    #[test]
    fn lemma36_examples() {
        let s = singletons_with_empty(5).unwrap();
        let r = lemma36_teaching(&s).unwrap();
        assert_eq!(r.size(), 1);
        assert!(is_teaching_set(&s, &r.concept, &r.set).unwrap());

        for seed in 0..5 {
            let c = random_36(8, 14, seed).unwrap();
            let r = lemma36_teaching(&c).unwrap();
            assert!(r.size() <= 3);
            assert!(is_teaching_set(&c, &r.concept, &r.set).unwrap());
        }

        assert!(matches!(
            lemma36_teaching(&full_cube(3).unwrap()),
            Err(Error::Not36Class([0, 1, 2]))
        ));
    }
}
