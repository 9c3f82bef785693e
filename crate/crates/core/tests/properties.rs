mod common;

use common::*;
use proptest::prelude::*;
use vclab_core::compression::base::{base_compress, base_compress_traced, base_reconstruct_traced};
use vclab_core::compression::rank::{matrix_rank, rank_compress, rank_reconstruct};
use vclab_core::compression::scheme::{check_level, msw_compress_traced, msw_reconstruct};
use vclab_core::compression::{CompressedSample, SchemeParams};
use vclab_core::teaching::{
    halving_bound, halving_teaching_concept, is_teaching_set, rt_dimension,
};
use vclab_core::{load_class, LabeledSample};

fn points_of(mask: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|i| mask >> i & 1 == 1).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn restriction_never_raises_vc(c in arb_class(7, 20), mask in 1u32..128) {
        let pts = points_of(mask, c.n());
        prop_assume!(!pts.is_empty());
        let r = c.restrict(&pts).unwrap();
        prop_assert!(r.vc_dimension() <= c.vc_dimension());
        prop_assert!(r.len() <= c.len());
    }

    #[test]
    fn shattering_is_monotone(c in arb_class(6, 24)) {
        for k in 1..=c.n() {
            for s in subsets(c.n(), k) {
                if c.shatters(&s) {
                    for drop in 0..s.len() {
                        let mut sub = s.clone();
                        sub.remove(drop);
                        prop_assert!(c.shatters(&sub));
                    }
                }
            }
        }
    }

    #[test]
    fn double_dual_recovers_class(c in arb_class(6, 16)) {
        prop_assume!(!c.has_duplicate_columns());
        let dual = c.dual();
        let dd = dual.dual();
        // point j of dd is column perm[j] of c
        let perm: Vec<usize> = dual
            .concepts()
            .iter()
            .map(|col| (0..c.n()).find(|&x| &c.column(x) == col).unwrap())
            .collect();
        prop_assert_eq!(dd.len(), c.len());
        for row in dd.concepts() {
            let mut back = vclab_core::Concept::zeros(c.n());
            for (j, &x) in perm.iter().enumerate() {
                back.set(x, row.get(j));
            }
            prop_assert!(c.contains(&back));
        }
    }

    #[test]
    fn text_round_trip(c in arb_class(8, 12)) {
        let loaded = load_class(&c.to_text()).unwrap();
        prop_assert_eq!(loaded.class, c);
        prop_assert_eq!(loaded.duplicates_removed, 0);
    }

    #[test]
    fn base_and_rank_schemes_round_trip(c in arb_class(6, 20), target in any::<prop::sample::Index>(), mask in 1u32..64) {
        let pts = points_of(mask, c.n());
        prop_assume!(!pts.is_empty());
        let t = c.concept(target.index(c.len())).clone();
        let sample = LabeledSample::from_concept(&t, &pts);
        let (kept, pivots) = base_compress_traced(&c, &sample).unwrap();
        prop_assert!(kept.len() <= (usize::BITS - 1 - c.len().leading_zeros()) as usize);
        let (h, replay) = base_reconstruct_traced(&c, &kept).unwrap();
        prop_assert!(h.agrees_with(&sample));
        prop_assert_eq!(replay, pivots);
        let kept = rank_compress(&c, &sample).unwrap();
        prop_assert!(kept.len() <= matrix_rank(&c));
        prop_assert!(rank_reconstruct(&c, &kept).unwrap().agrees_with(&sample));
    }

    #[test]
    fn recursive_scheme_round_trips(c in arb_class(7, 30), target in any::<prop::sample::Index>(), mask in 1u32..128, threshold in 2u64..9) {
        let pts = points_of(mask, c.n());
        prop_assume!(!pts.is_empty());
        let t = c.concept(target.index(c.len())).clone();
        let sample = LabeledSample::from_concept(&t, &pts);
        for params in [SchemeParams::default(), SchemeParams::fixed(threshold).unwrap()] {
            let (cs, trace) = msw_compress_traced(&c, &sample, &params).unwrap();
            prop_assert!(cs.kept.iter().all(|(p, l)| sample.label(p) == Some(l)));
            prop_assert!(msw_reconstruct(&c, &cs).unwrap().agrees_with(&sample));
            prop_assert_eq!(CompressedSample::from_json(&cs.to_json()).unwrap(), cs.clone());
            for level in &trace.levels {
                prop_assert!(check_level(level).is_empty());
            }
        }
        let base = base_compress(&c, &sample).unwrap();
        let (cs, _) = msw_compress_traced(&c, &sample, &SchemeParams::default()).unwrap();
        prop_assert_eq!(cs.kept, base);
    }

    #[test]
    fn teaching_bounds(c in arb_class(6, 20)) {
        let r = halving_teaching_concept(&c);
        prop_assert!(r.size() <= halving_bound(&c));
        prop_assert!(is_teaching_set(&c, &r.concept, &r.set).unwrap());
        let (rtd, dec) = rt_dimension(&c);
        prop_assert!(rtd <= halving_bound(&c));
        prop_assert_eq!(dec.layers.iter().map(|l| l.entries.len()).sum::<usize>(), c.len());
        if c.vc_dimension() == 1 {
            prop_assert_eq!(rtd, 1);
        }
    }
}
