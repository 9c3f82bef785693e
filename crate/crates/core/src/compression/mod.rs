//! Sample compression schemes.
//!
//! * [`base`]: majority-halving scheme of size at most `⌊log₂|C|⌋`, no side information.
//! * [`rank`]: keeps a spanning set of columns of `C|_Y`.
//! * [`scheme`]: the recursive scheme over dual approximating sets, carrying `(f, T)`.
//! * [`verify`]: exhaustive or sampled correctness checking.

pub mod base;
pub mod rank;
pub mod scheme;
pub mod verify;

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::class::{binomial, LabeledSample};
use crate::error::{Error, Result};

/// Recursion depth `T` and the partial injection `f : {1..T} → Z`.
///
/// `f(t) = x` records that level `t` (counted from the base, which is level 0) took the
/// unfaithful branch with witness point `x`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SideInfo {
    pub depth: usize,
    pub f: BTreeMap<usize, usize>,
}

/// `((Z, z), (f, T))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CompressedSample {
    pub kept: LabeledSample,
    pub info: SideInfo,
}

#[derive(Serialize, Deserialize)]
struct Wire {
    #[serde(rename = "T")]
    depth: usize,
    #[serde(rename = "Z")]
    kept: Vec<(usize, u8)>,
    f: Vec<(usize, usize)>,
}

impl CompressedSample {
    pub fn base(kept: LabeledSample) -> Self {
        CompressedSample {
            kept,
            info: SideInfo::default(),
        }
    }

    /// Canonical JSON: `{"T": int, "Z": [[point, label], ...], "f": [[t, point], ...]}`.
    pub fn to_json(&self) -> String {
        let wire = Wire {
            depth: self.info.depth,
            kept: self.kept.iter().map(|(p, l)| (p, u8::from(l))).collect(),
            f: self.info.f.iter().map(|(&t, &p)| (t, p)).collect(),
        };
        serde_json::to_string(&wire).expect("plain data serializes")
    }

    pub fn from_json(source: &str) -> Result<Self> {
        let wire: Wire = serde_json::from_str(source).map_err(|e| Error::Json(e.to_string()))?;
        if wire.kept.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::Json(
                "Z must be sorted by point without repeats".into(),
            ));
        }
        if wire.f.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::Json("f must be sorted by t without repeats".into()));
        }
        let mut pairs = Vec::with_capacity(wire.kept.len());
        for (p, l) in wire.kept {
            match l {
                0 | 1 => pairs.push((p, l == 1)),
                _ => return Err(Error::Json(format!("label {l} is not 0/1"))),
            }
        }
        Ok(CompressedSample {
            kept: LabeledSample::from_pairs(pairs),
            info: SideInfo {
                depth: wire.depth,
                f: wire.f.into_iter().collect(),
            },
        })
    }

    /// Structural checks on `(f, T)` against `Z` and a domain of `n` points.
    pub fn validate(&self, n: usize) -> Result<()> {
        if let Some(&p) = self.kept.points.iter().find(|&&p| p >= n) {
            return Err(Error::PointOutOfRange { point: p, n });
        }
        let mut seen = Vec::with_capacity(self.info.f.len());
        for (&t, &x) in &self.info.f {
            if t > self.info.depth {
                return Err(Error::MalformedSideInfo(format!(
                    "f defined at {t} beyond depth {}",
                    self.info.depth
                )));
            }
            if self.kept.label(x).is_none() {
                return Err(Error::MalformedSideInfo(format!(
                    "f({t}) = {x} is not a kept point"
                )));
            }
            if seen.contains(&x) {
                return Err(Error::MalformedSideInfo(format!(
                    "f is not injective at point {x}"
                )));
            }
            seen.push(x);
        }
        Ok(())
    }
}

/// Cutoff below which the base scheme is used.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaseThreshold {
    /// `(4e²)^(d·2^d + 1)` with `d = VC + 2`, clamped to `u64::MAX`.
    Asymptotic,
    Fixed(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SchemeParams {
    pub base_threshold: BaseThreshold,
}

impl Default for SchemeParams {
    fn default() -> Self {
        SchemeParams {
            base_threshold: BaseThreshold::Asymptotic,
        }
    }
}

impl SchemeParams {
    pub fn fixed(threshold: u64) -> Result<Self> {
        if threshold < 2 {
            return Err(Error::InvalidParameter(format!(
                "base threshold must be at least 2 (got {threshold})"
            )));
        }
        Ok(SchemeParams {
            base_threshold: BaseThreshold::Fixed(threshold),
        })
    }

    /// Threshold for a class whose shifted dimension is `d = VC + 2`.
    pub fn threshold_for(&self, d: u32) -> u64 {
        match self.base_threshold {
            BaseThreshold::Fixed(t) => t,
            BaseThreshold::Asymptotic => asymptotic_base_threshold(d),
        }
    }
}

pub fn asymptotic_base_threshold(d: u32) -> u64 {
    let exp = f64::from(d) * 2f64.powi(d as i32) + 1.0;
    let log = exp * (4.0 * std::f64::consts::E.powi(2)).ln();
    if log >= (u64::MAX as f64).ln() {
        u64::MAX
    } else {
        log.exp().floor() as u64
    }
}

/// Upper bound on the number of `(f, T)` values with depth at most `max_depth` and `|Z| ≤ k`:
/// `Σ_{T ≤ max_depth} Σ_{j ≤ min(T, k)} C(T, j) · k!/(k-j)!`.
pub fn side_info_count(k: usize, max_depth: usize) -> BigUint {
    let mut total = BigUint::zero();
    for t in 0..=max_depth {
        for j in 0..=t.min(k) {
            let mut falling = BigUint::one();
            for i in 0..j {
                falling *= BigUint::from(k - i);
            }
            total += binomial(t as u64, j as u64) * falling;
        }
    }
    total
}

/// `⌈log₂ q⌉` for `q ≥ 1`.
pub fn ceil_log2_big(q: &BigUint) -> u64 {
    if q <= &BigUint::one() {
        0
    } else {
        (q - BigUint::one()).bits()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> CompressedSample {
        CompressedSample {
            kept: LabeledSample::new(vec![4, 1, 7], vec![true, false, true]).unwrap(),
            info: SideInfo {
                depth: 3,
                f: [(1, 7), (3, 1)].into_iter().collect(),
            },
        }
    }

    #[test]
    fn wire_format_is_canonical() {
        let s = sample();
        assert_eq!(
            s.to_json(),
            r#"{"T":3,"Z":[[1,0],[4,1],[7,1]],"f":[[1,7],[3,1]]}"#
        );
        assert_eq!(CompressedSample::from_json(&s.to_json()).unwrap(), s);
    }

    #[test]
    fn wire_rejects_noncanonical() {
        assert!(CompressedSample::from_json(r#"{"T":0,"Z":[[4,1],[1,0]],"f":[]}"#).is_err());
        assert!(CompressedSample::from_json(r#"{"T":0,"Z":[[1,2]],"f":[]}"#).is_err());
        assert!(CompressedSample::from_json(r#"{"T":2,"Z":[],"f":[[2,1],[1,1]]}"#).is_err());
    }

    #[test]
    fn validation() {
        assert!(sample().validate(8).is_ok());
        assert!(sample().validate(5).is_err());
        let mut bad = sample();
        bad.info.f.insert(2, 5);
        assert!(matches!(bad.validate(8), Err(Error::MalformedSideInfo(_))));
        let mut bad = sample();
        bad.info.f.insert(2, 7);
        assert!(matches!(bad.validate(8), Err(Error::MalformedSideInfo(_))));
        let mut bad = sample();
        bad.info.depth = 2;
        assert!(matches!(bad.validate(8), Err(Error::MalformedSideInfo(_))));
    }

    #[test]
    fn side_info_counting() {
        assert_eq!(side_info_count(5, 0), BigUint::from(1u32));
        // T=1: f empty or f(1) ∈ Z (3 choices) -> 1 + 1 + 3
        assert_eq!(side_info_count(3, 1), BigUint::from(5u32));
        assert_eq!(ceil_log2_big(&BigUint::from(5u32)), 3);
        assert_eq!(ceil_log2_big(&BigUint::from(1u32)), 0);
        assert_eq!(ceil_log2_big(&BigUint::from(8u32)), 3);
    }

    #[test]
    fn asymptotic_threshold_is_huge() {
        // (4e²)^9 ≈ 1.72e13 at d = 2
        let t = asymptotic_base_threshold(2);
        assert!(t > 17_000_000_000_000 && t < 17_500_000_000_000, "{t}");
        assert_eq!(asymptotic_base_threshold(4), u64::MAX);
        assert!(SchemeParams::fixed(1).is_err());
    }
}
