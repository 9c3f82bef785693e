//! Majority-halving compression.
//!
//! Both maps walk the same loop over a version space `V` (initially the whole class in
//! canonical order): take the pointwise majority `h` of `V` (ties vote 1), find the smallest
//! point where `h` disagrees with the labels, and keep only the concepts of `V` that agree
//! there. The compressor records those pivots; the reconstructor replays the loop using only
//! the recorded points, visiting the same pivots in the same order.

use crate::class::{Concept, ConceptClass, LabeledSample};
use crate::error::{Error, Result};

fn majority(version: &[&Concept], n: usize) -> Concept {
    Concept::from_bits((0..n).map(|x| {
        let ones = version.iter().filter(|c| c.get(x)).count();
        2 * ones >= version.len()
    }))
}

fn first_disagreement(h: &Concept, sample: &LabeledSample) -> Option<(usize, bool)> {
    sample.iter().find(|&(p, l)| h.get(p) != l)
}

/// Runs the halving loop against `sample`, returning the hypothesis and the pivots in visit order.
fn run(class: &ConceptClass, sample: &LabeledSample) -> Result<(Concept, Vec<(usize, bool)>)> {
    let mut version: Vec<&Concept> = class.concepts().iter().collect();
    let mut pivots = Vec::new();
    loop {
        let h = majority(&version, class.n());
        let Some((x, label)) = first_disagreement(&h, sample) else {
            return Ok((h, pivots));
        };
        version.retain(|c| c.get(x) == label);
        if version.is_empty() {
            return Err(Error::Unrealizable);
        }
        pivots.push((x, label));
    }
}

pub fn base_compress(class: &ConceptClass, sample: &LabeledSample) -> Result<LabeledSample> {
    Ok(base_compress_traced(class, sample)?.0)
}

/// Compression plus the pivot visit order.
pub fn base_compress_traced(
    class: &ConceptClass,
    sample: &LabeledSample,
) -> Result<(LabeledSample, Vec<(usize, bool)>)> {
    if !class.is_realizable(sample) {
        return Err(Error::Unrealizable);
    }
    let (_, pivots) = run(class, sample)?;
    let mut pairs = pivots.clone();
    pairs.sort_unstable_by_key(|&(p, _)| p);
    Ok((LabeledSample::from_pairs(pairs), pivots))
}

pub fn base_reconstruct(class: &ConceptClass, kept: &LabeledSample) -> Result<Concept> {
    Ok(run(class, kept)?.0)
}

/// Reconstruction plus the pivot visit order of the replay.
pub fn base_reconstruct_traced(
    class: &ConceptClass,
    kept: &LabeledSample,
) -> Result<(Concept, Vec<(usize, bool)>)> {
    run(class, kept)
}
