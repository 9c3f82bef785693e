//! Rank-based compression with no side information.
//!
//! Distinct rows of `C|_Y` differ on any set of columns spanning the column space, so
//! keeping such a set (at most `rank` points) identifies the sample.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::class::{Concept, ConceptClass, LabeledSample};
use crate::error::{Error, Result};

/// Incremental echelon basis over the integers (fraction-free elimination).
struct Basis {
    /// `(pivot row, vector)`
    vectors: Vec<(usize, Vec<BigInt>)>,
}

impl Basis {
    fn new() -> Self {
        Basis {
            vectors: Vec::new(),
        }
    }

    /// Reduces `v` against the basis; adds it and returns `true` if independent.
    fn insert(&mut self, mut v: Vec<BigInt>) -> bool {
        for (pivot, b) in &self.vectors {
            if v[*pivot].is_zero() {
                continue;
            }
            let scale_v = b[*pivot].clone();
            let scale_b = v[*pivot].clone();
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi = &*vi * &scale_v - bi * &scale_b;
            }
            normalize(&mut v);
        }
        match v.iter().position(|e| !e.is_zero()) {
            Some(pivot) => {
                self.vectors.push((pivot, v));
                true
            }
            None => false,
        }
    }
}

fn normalize(v: &mut [BigInt]) {
    let g = v.iter().fold(BigInt::zero(), |g, e| g.gcd(e));
    if !g.is_zero() && g.abs() != BigInt::from(1) {
        for e in v.iter_mut() {
            *e = &*e / &g;
        }
    }
}

fn column(rows: &[Concept], x: usize) -> Vec<BigInt> {
    rows.iter()
        .map(|r| BigInt::from(u8::from(r.get(x))))
        .collect()
}

/// Points (in domain order) whose columns first extend the span, over `rows`.
fn spanning_points(rows: &[Concept], points: &[usize]) -> Vec<usize> {
    let mut basis = Basis::new();
    points
        .iter()
        .copied()
        .filter(|&x| basis.insert(column(rows, x)))
        .collect()
}

/// Rank of the class matrix over the rationals.
pub fn matrix_rank(class: &ConceptClass) -> usize {
    let points: Vec<usize> = (0..class.n()).collect();
    spanning_points(class.concepts(), &points).len()
}

pub fn rank_compress(class: &ConceptClass, sample: &LabeledSample) -> Result<LabeledSample> {
    if !class.is_realizable(sample) {
        return Err(Error::Unrealizable);
    }
    if sample.is_empty() {
        return Ok(LabeledSample::empty());
    }
    let projected = class.project_unchecked(&sample.points);
    let local: Vec<usize> = (0..sample.len()).collect();
    let keep = spanning_points(projected.concepts(), &local);
    let pairs = keep
        .into_iter()
        .map(|i| (sample.points[i], sample.labels[i]))
        .collect();
    Ok(LabeledSample::from_pairs(pairs))
}

/// First concept of the class consistent with the kept points.
pub fn rank_reconstruct(class: &ConceptClass, kept: &LabeledSample) -> Result<Concept> {
    class
        .consistent(kept)
        .next()
        .cloned()
        .ok_or(Error::Unrealizable)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{full_cube, intervals};

    #[test]
    fn constant_columns_have_rank_one() {
        let c = ConceptClass::from_strs(&["000", "111"]).unwrap();
        assert_eq!(matrix_rank(&c), 1);
        let target = c.concept(1).clone();
        let sample = LabeledSample::from_concept(&target, &[0, 1, 2]);
        let kept = rank_compress(&c, &sample).unwrap();
        assert_eq!(kept.points, vec![0]);
        assert_eq!(rank_reconstruct(&c, &kept).unwrap(), target);
    }

    #[test]
    fn cube_rank_two() {
        let cube = full_cube(2).unwrap();
        assert_eq!(matrix_rank(&cube), 2);
        for t in cube.concepts() {
            let s = LabeledSample::from_concept(t, &[0, 1]);
            let kept = rank_compress(&cube, &s).unwrap();
            assert!(kept.len() <= 2);
            assert_eq!(&rank_reconstruct(&cube, &kept).unwrap(), t);
        }
    }

    #[test]
    fn intervals_round_trip() {
        let iv = intervals(5).unwrap();
        let rank = matrix_rank(&iv);
        assert_eq!(rank, 5);
        for t in iv.concepts() {
            for mask in 1u32..32 {
                let pts: Vec<usize> = (0..5).filter(|i| mask >> i & 1 == 1).collect();
                let s = LabeledSample::from_concept(t, &pts);
                let kept = rank_compress(&iv, &s).unwrap();
                assert!(kept.len() <= rank);
                let h = rank_reconstruct(&iv, &kept).unwrap();
                assert!(h.agrees_with(&s));
            }
        }
    }

    #[test]
    fn dependent_columns_are_skipped() {
        // column 2 = column 0 + column 1 over the rationals
        let c = ConceptClass::from_strs(&["000", "101", "011"]).unwrap();
        assert_eq!(matrix_rank(&c), 2);
        let s = LabeledSample::from_concept(c.concept(2), &[0, 1, 2]);
        assert_eq!(rank_compress(&c, &s).unwrap().points, vec![0, 1]);
    }
}
