//! Concept classes over a finite domain `0..n`.
//!
//! A [`ConceptClass`] is a deduplicated 0/1 matrix whose rows are kept in
//! lexicographic order, so every tie-break downstream is reproducible.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use serde::Deserialize;

use crate::error::{Error, Result};

const WORD: usize = 64;

/// A 0/1 vector indexed by domain points, packed into 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Concept {
    words: Vec<u64>,
    len: usize,
}

impl Concept {
    pub fn zeros(len: usize) -> Self {
        Concept {
            words: vec![0; len.div_ceil(WORD)],
            len,
        }
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut words = Vec::new();
        let mut len = 0;
        for b in bits {
            if len % WORD == 0 {
                words.push(0);
            }
            if b {
                words[len / WORD] |= 1 << (len % WORD);
            }
            len += 1;
        }
        Concept { words, len }
    }

    /// Parses a string of `'0'`/`'1'` characters.
    pub fn parse(s: &str) -> Option<Self> {
        let mut bits = Vec::with_capacity(s.len());
        for ch in s.chars() {
            match ch {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => return None,
            }
        }
        Some(Self::from_bits(bits))
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        if value {
            self.words[i / WORD] |= 1 << (i % WORD);
        } else {
            self.words[i / WORD] &= !(1 << (i % WORD));
        }
    }

    pub fn intersects(&self, other: &Concept) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn is_subset_of(&self, other: &Concept) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    /// Set points, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                (rest != 0).then(|| {
                    let bit = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    w * WORD + bit
                })
            })
        })
    }

    /// Bitwise xor: the indicator of the disagreement set.
    pub fn xor(&self, other: &Concept) -> Concept {
        debug_assert_eq!(self.len, other.len);
        Concept {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a ^ b)
                .collect(),
            len: self.len,
        }
    }

    /// Largest set point, if any.
    pub fn last_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .rev()
            .find(|(_, w)| **w != 0)
            .map(|(i, w)| i * WORD + (WORD - 1 - w.leading_zeros() as usize))
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of points where the two concepts differ.
    pub fn hamming(&self, other: &Concept) -> usize {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    /// Points (ascending) where the two concepts differ.
    pub fn disagreements(&self, other: &Concept) -> Vec<usize> {
        debug_assert_eq!(self.len, other.len);
        let mut out = Vec::new();
        for (w, (a, b)) in self.words.iter().zip(&other.words).enumerate() {
            let mut diff = a ^ b;
            while diff != 0 {
                let bit = diff.trailing_zeros() as usize;
                out.push(w * WORD + bit);
                diff &= diff - 1;
            }
        }
        out
    }

    /// Gathers the bits at `points`, in the given order.
    pub fn project(&self, points: &[usize]) -> Concept {
        Concept::from_bits(points.iter().map(|&p| self.get(p)))
    }

    /// Packs the bits at `points` into an integer key; `points.len()` must be below 64.
    #[inline]
    pub(crate) fn pattern_key(&self, points: &[usize]) -> u64 {
        debug_assert!(points.len() < WORD);
        points
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &p)| acc | (u64::from(self.get(p)) << i))
    }

    pub fn agrees_with(&self, sample: &LabeledSample) -> bool {
        sample
            .points
            .iter()
            .zip(&sample.labels)
            .all(|(&p, &l)| self.get(p) == l)
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }
}

impl Ord for Concept {
    /// Lexicographic on the 0/1 string: the first differing point decides, 0 < 1.
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.words.iter().zip(&other.words) {
            let diff = a ^ b;
            if diff != 0 {
                let bit = diff.trailing_zeros();
                return if (a >> bit) & 1 == 0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                };
            }
        }
        self.len.cmp(&other.len)
    }
}

impl PartialOrd for Concept {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bits() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Concept({self})")
    }
}

/// A subset of the domain together with a 0/1 label per point.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LabeledSample {
    pub points: Vec<usize>,
    pub labels: Vec<bool>,
}

impl LabeledSample {
    /// Builds a sample, sorting by point. Fails on duplicate points or a length mismatch.
    pub fn new(points: Vec<usize>, labels: Vec<bool>) -> Result<Self> {
        if points.len() != labels.len() {
            return Err(Error::LengthMismatch {
                expected: points.len(),
                found: labels.len(),
            });
        }
        let mut pairs: Vec<(usize, bool)> = points.into_iter().zip(labels).collect();
        pairs.sort_unstable_by_key(|&(p, _)| p);
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidParameter("duplicate point in sample".into()));
        }
        Ok(Self::from_pairs(pairs))
    }

    pub fn empty() -> Self {
        LabeledSample {
            points: Vec::new(),
            labels: Vec::new(),
        }
    }

    pub(crate) fn from_pairs(pairs: Vec<(usize, bool)>) -> Self {
        let (points, labels) = pairs.into_iter().unzip();
        LabeledSample { points, labels }
    }

    /// The labels `c` assigns to `points` (which must be sorted and distinct).
    pub fn from_concept(c: &Concept, points: &[usize]) -> Self {
        LabeledSample {
            points: points.to_vec(),
            labels: points.iter().map(|&p| c.get(p)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn label(&self, point: usize) -> Option<bool> {
        self.points
            .binary_search(&point)
            .ok()
            .map(|i| self.labels[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, bool)> + '_ {
        self.points.iter().copied().zip(self.labels.iter().copied())
    }
}

/// A set of concepts over the domain `0..n`, deduplicated and sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConceptClass {
    n: usize,
    concepts: Vec<Concept>,
}

/// Result of [`load_class`].
#[derive(Clone, Debug)]
pub struct LoadedClass {
    pub class: ConceptClass,
    pub duplicates_removed: usize,
}

impl ConceptClass {
    /// Builds a class from rows of length `n`, removing duplicate rows.
    pub fn new(n: usize, concepts: Vec<Concept>) -> Result<Self> {
        Ok(Self::with_dedup_count(n, concepts)?.0)
    }

    /// Like [`ConceptClass::new`] but also reports how many duplicate rows were dropped.
    pub fn with_dedup_count(n: usize, mut concepts: Vec<Concept>) -> Result<(Self, usize)> {
        if concepts.is_empty() {
            return Err(Error::EmptyClass);
        }
        if let Some(c) = concepts.iter().find(|c| c.len() != n) {
            return Err(Error::LengthMismatch {
                expected: n,
                found: c.len(),
            });
        }
        let before = concepts.len();
        concepts.sort_unstable();
        concepts.dedup();
        let removed = before - concepts.len();
        Ok((ConceptClass { n, concepts }, removed))
    }

    /// Parses rows written as `'0'`/`'1'` strings.
    pub fn from_strs(rows: &[&str]) -> Result<Self> {
        let text: String = rows.iter().map(|r| format!("{r}\n")).collect();
        Ok(load_class(&text)?.class)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    #[inline]
    pub fn concepts(&self) -> &[Concept] {
        &self.concepts
    }

    #[inline]
    pub fn concept(&self, index: usize) -> &Concept {
        &self.concepts[index]
    }

    pub fn get(&self, index: usize) -> Result<&Concept> {
        self.concepts.get(index).ok_or(Error::IndexOutOfRange {
            index,
            size: self.len(),
        })
    }

    pub fn index_of(&self, c: &Concept) -> Option<usize> {
        self.concepts.binary_search(c).ok()
    }

    pub fn contains(&self, c: &Concept) -> bool {
        self.index_of(c).is_some()
    }

    /// Sorts and dedups a point list, checking every point lies in the domain.
    pub fn normalize_points(&self, points: &[usize]) -> Result<Vec<usize>> {
        if let Some(&p) = points.iter().find(|&&p| p >= self.n) {
            return Err(Error::PointOutOfRange {
                point: p,
                n: self.n,
            });
        }
        let mut v = points.to_vec();
        v.sort_unstable();
        v.dedup();
        Ok(v)
    }

    /// The restriction `C|_Y`, rows deduplicated. Columns follow the order of `points`.
    pub fn restrict(&self, points: &[usize]) -> Result<ConceptClass> {
        if points.is_empty() {
            return Err(Error::EmptySubset);
        }
        if let Some(&p) = points.iter().find(|&&p| p >= self.n) {
            return Err(Error::PointOutOfRange {
                point: p,
                n: self.n,
            });
        }
        Ok(self.project_unchecked(points))
    }

    /// Projection onto `points` without validation; an empty list gives the one-row class over no points.
    pub(crate) fn project_unchecked(&self, points: &[usize]) -> ConceptClass {
        let rows = self.concepts.iter().map(|c| c.project(points)).collect();
        ConceptClass::new(points.len(), rows).expect("projection of a nonempty class")
    }

    /// The subclass of concepts satisfying `keep`, or `None` when nothing survives.
    pub fn filter<F: FnMut(&Concept) -> bool>(&self, mut keep: F) -> Option<ConceptClass> {
        let concepts: Vec<Concept> = self.concepts.iter().filter(|c| keep(c)).cloned().collect();
        if concepts.is_empty() {
            None
        } else {
            // already sorted and distinct
            Some(ConceptClass {
                n: self.n,
                concepts,
            })
        }
    }

    /// Concepts consistent with `sample`.
    pub fn consistent<'a>(
        &'a self,
        sample: &'a LabeledSample,
    ) -> impl Iterator<Item = &'a Concept> + 'a {
        self.concepts.iter().filter(move |c| c.agrees_with(sample))
    }

    pub fn is_realizable(&self, sample: &LabeledSample) -> bool {
        self.consistent(sample).next().is_some()
    }

    /// Number of distinct patterns on `points`.
    pub fn pattern_count(&self, points: &[usize]) -> usize {
        if points.len() < WORD {
            let keys: HashSet<u64> = self
                .concepts
                .iter()
                .map(|c| c.pattern_key(points))
                .collect();
            keys.len()
        } else {
            let rows: HashSet<Concept> = self.concepts.iter().map(|c| c.project(points)).collect();
            rows.len()
        }
    }

    /// Whether every labeling of `points` is realized. The empty set is always shattered.
    pub fn shatters(&self, points: &[usize]) -> bool {
        let k = points.len();
        if k >= WORD || (1usize << k) > self.len() {
            return false;
        }
        self.pattern_count(points) == 1usize << k
    }

    /// Size of the largest shattered subset.
    ///
    /// Shattered sets are grown level by level from shattered prefixes; since every
    /// subset of a shattered set is shattered, the search stops at the first empty level.
    pub fn vc_dimension(&self) -> usize {
        self.shattered_sets_by_size().len().saturating_sub(1)
    }

    /// All shattered sets grouped by size (index 0 holds the empty set).
    pub fn shattered_sets_by_size(&self) -> Vec<Vec<Vec<usize>>> {
        let mut levels = vec![vec![Vec::new()]];
        loop {
            let k = levels.len();
            if k >= WORD || (1usize << k) > self.len() {
                break;
            }
            let mut next = Vec::new();
            for set in levels.last().unwrap() {
                let start = set.last().map_or(0, |&l| l + 1);
                for p in start..self.n {
                    let mut cand = set.clone();
                    cand.push(p);
                    if self.shatters(&cand) {
                        next.push(cand);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            levels.push(next);
        }
        levels
    }

    /// One column of the matrix: the dual concept `c_x` over the concept index order.
    pub fn column(&self, x: usize) -> Concept {
        Concept::from_bits(self.concepts.iter().map(|c| c.get(x)))
    }

    /// The dual class `C*`: distinct columns, each a concept over the concept indices of `C`.
    pub fn dual(&self) -> ConceptClass {
        let cols = (0..self.n).map(|x| self.column(x)).collect();
        ConceptClass::new(self.len(), cols).expect("dual of a nonempty class")
    }

    /// Whether two domain points carry identical columns.
    pub fn has_duplicate_columns(&self) -> bool {
        let cols: HashSet<Concept> = (0..self.n).map(|x| self.column(x)).collect();
        cols.len() < self.n
    }

    /// Writes the class in the text format: one row per line.
    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(self.len() * (self.n + 1));
        for c in &self.concepts {
            s.push_str(&c.to_string());
            s.push('\n');
        }
        s
    }
}

#[derive(Deserialize)]
struct JsonClass {
    n: usize,
    concepts: Vec<String>,
}

/// Parses the class text format (or its JSON form), deduplicating rows.
pub fn load_class(source: &str) -> Result<LoadedClass> {
    if source.trim_start().starts_with('{') {
        return load_json(source);
    }
    let mut rows = Vec::new();
    let mut width = None;
    for (i, raw) in source.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let row = parse_row(line, line_no)?;
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(Error::RaggedRow {
                    line: line_no,
                    expected: w,
                    found: row.len(),
                })
            }
            _ => {}
        }
        rows.push(row);
    }
    let n = width.ok_or(Error::EmptyFile)?;
    if n == 0 {
        return Err(Error::EmptyFile);
    }
    let (class, duplicates_removed) = ConceptClass::with_dedup_count(n, rows)?;
    Ok(LoadedClass {
        class,
        duplicates_removed,
    })
}

fn parse_row(line: &str, line_no: usize) -> Result<Concept> {
    if let Some(ch) = line.chars().find(|&c| c != '0' && c != '1') {
        return Err(Error::BadChar { line: line_no, ch });
    }
    Ok(Concept::parse(line).expect("checked characters"))
}

fn load_json(source: &str) -> Result<LoadedClass> {
    let parsed: JsonClass = serde_json::from_str(source).map_err(|e| Error::Json(e.to_string()))?;
    if parsed.concepts.is_empty() || parsed.n == 0 {
        return Err(Error::EmptyFile);
    }
    let mut rows = Vec::with_capacity(parsed.concepts.len());
    for (i, s) in parsed.concepts.iter().enumerate() {
        let row = parse_row(s, i + 1)?;
        if row.len() != parsed.n {
            return Err(Error::RaggedRow {
                line: i + 1,
                expected: parsed.n,
                found: row.len(),
            });
        }
        rows.push(row);
    }
    let (class, duplicates_removed) = ConceptClass::with_dedup_count(parsed.n, rows)?;
    Ok(LoadedClass {
        class,
        duplicates_removed,
    })
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// `Σ_{k=0}^{d} C(n, k)`, the Sauer–Shelah bound on a class of VC-dimension `d` over `n` points.
pub fn sauer_bound(n: u64, d: u64) -> Result<BigUint> {
    if d > n {
        return Err(Error::InvalidParameter(format!(
            "sauer_bound requires d <= n (got d={d}, n={n})"
        )));
    }
    Ok((0..=d).map(|k| binomial(n, k)).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn class(rows: &[&str]) -> ConceptClass {
        ConceptClass::from_strs(rows).unwrap()
    }

    #[test]
    fn load_basic() {
        let l = load_class("01\n10\n").unwrap();
        assert_eq!(l.class.n(), 2);
        assert_eq!(l.class.len(), 2);
        assert_eq!(l.duplicates_removed, 0);
    }

    #[test]
    fn load_dedups() {
        let l = load_class("01\n01\n10\n").unwrap();
        assert_eq!(l.class.len(), 2);
        assert_eq!(l.duplicates_removed, 1);
    }

    #[test]
    fn load_errors() {
        assert!(matches!(
            load_class("01\n1\n"),
            Err(Error::RaggedRow { line: 2, .. })
        ));
        assert!(matches!(
            load_class("0a\n"),
            Err(Error::BadChar { ch: 'a', .. })
        ));
        assert_eq!(load_class("").unwrap_err(), Error::EmptyFile);
        assert_eq!(
            load_class("# only a comment\n").unwrap_err(),
            Error::EmptyFile
        );
    }

    #[test]
    fn load_comments_and_json() {
        let l = load_class("# header\n011\n# mid\n100\n").unwrap();
        assert_eq!(l.class.len(), 2);
        let j = load_class(r#"{"n": 3, "concepts": ["011", "100", "011"]}"#).unwrap();
        assert_eq!(j.class, l.class);
        assert_eq!(j.duplicates_removed, 1);
        assert!(matches!(
            load_class(r#"{"n": 3, "concepts": ["01"]}"#),
            Err(Error::RaggedRow { .. })
        ));
    }

    #[test]
    fn rows_are_lexicographic() {
        let c = class(&["110", "001", "100", "010"]);
        let rows: Vec<String> = c.concepts().iter().map(|c| c.to_string()).collect();
        assert_eq!(rows, ["001", "010", "100", "110"]);
    }

    #[test]
    fn ordering_crosses_word_boundary() {
        let mut a = Concept::zeros(70);
        let mut b = Concept::zeros(70);
        a.set(65, true);
        b.set(3, true);
        assert!(a < b);
        b.set(3, false);
        assert!(b < a);
        assert_eq!(a.disagreements(&b), vec![65]);
    }

    #[test]
    fn restrict_examples() {
        let cube = class(&["00", "01", "10", "11"]);
        assert_eq!(cube.restrict(&[0]).unwrap(), class(&["0", "1"]));
        let s = class(&["000", "100", "010", "001"]);
        assert_eq!(s.restrict(&[0, 1, 2]).unwrap(), s);
        let merge = class(&["001", "011", "101"]);
        assert_eq!(merge.restrict(&[1, 2]).unwrap(), class(&["01", "11"]));
        assert_eq!(cube.restrict(&[]).unwrap_err(), Error::EmptySubset);
        assert!(matches!(
            cube.restrict(&[2]),
            Err(Error::PointOutOfRange { .. })
        ));
    }

    #[test]
    fn shatter_examples() {
        let cube = class(&["00", "01", "10", "11"]);
        assert!(cube.shatters(&[0, 1]));
        let s = class(&["000", "100", "010", "001"]);
        for pair in [[0, 1], [0, 2], [1, 2]] {
            assert!(!s.shatters(&pair));
        }
        assert!(s.shatters(&[]));
        assert!(class(&["101"]).shatters(&[]));
    }

    #[test]
    fn vc_examples() {
        assert_eq!(class(&["101"]).vc_dimension(), 0);
        assert_eq!(class(&["00", "01", "10", "11"]).vc_dimension(), 2);
        assert_eq!(class(&["000", "100", "010", "001"]).vc_dimension(), 1);
    }

    #[test]
    fn dual_examples() {
        let c = class(&["01", "10"]);
        assert_eq!(c.dual(), c);
        let c = class(&["00", "01"]);
        assert_eq!(c.dual().len(), 2);
        let dup = class(&["0011", "0101", "1100"]);
        assert!(dup.has_duplicate_columns() || dup.dual().len() == dup.n());
        let dup = class(&["00", "11"]);
        assert_eq!(dup.dual().len(), 1);
    }

    #[test]
    fn sauer_examples() {
        assert_eq!(sauer_bound(5, 1).unwrap(), BigUint::from(6u32));
        assert_eq!(sauer_bound(6, 2).unwrap(), BigUint::from(22u32));
        assert!(sauer_bound(3, 4).is_err());
        assert_eq!(binomial(10, 3), BigUint::from(120u32));
    }

    #[test]
    fn sample_construction() {
        let s = LabeledSample::new(vec![3, 1], vec![true, false]).unwrap();
        assert_eq!(s.points, vec![1, 3]);
        assert_eq!(s.label(3), Some(true));
        assert_eq!(s.label(2), None);
        assert!(LabeledSample::new(vec![1, 1], vec![true, true]).is_err());
    }
}
