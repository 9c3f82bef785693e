//! Distribution-induced distances, ε-separated sets and greedy packings.
//!
//! Every decision of the form `dist > ε` is made in exact integer arithmetic.
//! Floating point only appears in [`haussler_bound`], which is for reporting.

use std::fmt;

use num_bigint::BigUint;
use num_rational::Ratio;
use serde::Deserialize;

use crate::class::{Concept, ConceptClass};
use crate::error::{Error, Result};

/// Integer weights per domain point; probabilities are `weight / total`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Distribution {
    weights: Vec<u64>,
    total: u64,
}

#[derive(Deserialize)]
struct JsonDistribution {
    weights: Vec<u64>,
}

impl Distribution {
    pub fn new(weights: Vec<u64>) -> Result<Self> {
        let total = weights
            .iter()
            .try_fold(0u64, |acc, &w| acc.checked_add(w))
            .ok_or_else(|| Error::InvalidParameter("distribution weights overflow".into()))?;
        if total == 0 {
            return Err(Error::InvalidParameter(
                "distribution needs positive total weight".into(),
            ));
        }
        Ok(Distribution { weights, total })
    }

    pub fn uniform(n: usize) -> Self {
        Distribution {
            weights: vec![1; n],
            total: n as u64,
        }
    }

    /// Parses `{"weights": [int, ...]}`.
    pub fn from_json(source: &str) -> Result<Self> {
        let parsed: JsonDistribution =
            serde_json::from_str(source).map_err(|e| Error::Json(e.to_string()))?;
        Self::new(parsed.weights)
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn weight(&self, x: usize) -> u64 {
        self.weights[x]
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn has_full_support(&self) -> bool {
        self.weights.iter().all(|&w| w > 0)
    }

    /// Weight of the disagreement set, as an unreduced numerator over [`Self::total`].
    pub fn disagreement_weight(&self, a: &Concept, b: &Concept) -> u64 {
        a.disagreements(b)
            .into_iter()
            .map(|x| self.weights[x])
            .sum()
    }
}

/// A separation parameter: an exact rational, or `base^(-1/s)` kept symbolic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EpsilonSpec {
    Rational(Ratio<u64>),
    Root { base: u64, s: u32 },
}

impl EpsilonSpec {
    pub fn rational(num: u64, den: u64) -> Result<Self> {
        if den == 0 || num == 0 || num > den {
            return Err(Error::InvalidParameter(format!(
                "epsilon {num}/{den} must lie in (0, 1]"
            )));
        }
        Ok(EpsilonSpec::Rational(Ratio::new(num, den)))
    }

    pub fn root(base: u64, s: u32) -> Result<Self> {
        if base == 0 || s == 0 {
            return Err(Error::InvalidParameter(
                "symbolic epsilon needs base >= 1 and s >= 1".into(),
            ));
        }
        Ok(EpsilonSpec::Root { base, s })
    }

    /// Decides `num / den > ε` exactly.
    pub fn is_exceeded_by(&self, num: u64, den: u64) -> bool {
        debug_assert!(den > 0);
        match *self {
            EpsilonSpec::Rational(r) => {
                u128::from(num) * u128::from(*r.denom()) > u128::from(*r.numer()) * u128::from(den)
            }
            EpsilonSpec::Root { base, s } => {
                // num/den > base^(-1/s)  <=>  num^s * base > den^s
                if num == 0 {
                    return false;
                }
                let lhs = BigUint::from(num).pow(s) * BigUint::from(base);
                let rhs = BigUint::from(den).pow(s);
                lhs > rhs
            }
        }
    }

    pub fn to_f64(&self) -> f64 {
        match *self {
            EpsilonSpec::Rational(r) => *r.numer() as f64 / *r.denom() as f64,
            EpsilonSpec::Root { base, s } => (base as f64).powf(-1.0 / s as f64),
        }
    }
}

impl fmt::Display for EpsilonSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EpsilonSpec::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            EpsilonSpec::Root { base, s } => write!(f, "{base}^(-1/{s})"),
        }
    }
}

/// `dist_μ(c, c2)`: the μ-mass of the points where the two concepts differ.
pub fn dist(c: &Concept, c2: &Concept, mu: &Distribution) -> Result<Ratio<u64>> {
    if c.len() != mu.n() || c2.len() != mu.n() {
        return Err(Error::LengthMismatch {
            expected: mu.n(),
            found: if c.len() != mu.n() { c.len() } else { c2.len() },
        });
    }
    Ok(Ratio::new(mu.disagreement_weight(c, c2), mu.total()))
}

/// Strict separation: every pair sits at distance `> ε`.
pub fn is_separated(set: &[Concept], mu: &Distribution, eps: &EpsilonSpec) -> bool {
    set.iter().enumerate().all(|(i, a)| {
        set[i + 1..]
            .iter()
            .all(|b| eps.is_exceeded_by(mu.disagreement_weight(a, b), mu.total()))
    })
}

/// A maximal ε-separated subset of a class, with each concept's rounding.
#[derive(Clone, Debug)]
pub struct Packing {
    /// Concept indices into the class, in insertion order.
    pub members: Vec<usize>,
    pub epsilon: EpsilonSpec,
    pub mu: Distribution,
    /// For each concept of the class, the position in `members` of its rounding.
    pub rounding: Vec<usize>,
}

impl Packing {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Concept index of the rounding of concept `i`.
    pub fn round(&self, i: usize) -> usize {
        self.members[self.rounding[i]]
    }
}

/// Greedy packing scanning concepts in canonical order.
pub fn greedy_packing(
    class: &ConceptClass,
    mu: &Distribution,
    eps: EpsilonSpec,
) -> Result<Packing> {
    let order: Vec<usize> = (0..class.len()).collect();
    greedy_packing_in_order(class, mu, eps, &order)
}

/// Greedy packing over an explicit scan order (a permutation of the concept indices).
///
/// A concept joins when its distance to every current member is `> ε`. Afterwards
/// each concept is rounded to the earliest-inserted member within distance `≤ ε`.
pub fn greedy_packing_in_order(
    class: &ConceptClass,
    mu: &Distribution,
    eps: EpsilonSpec,
    order: &[usize],
) -> Result<Packing> {
    if mu.n() != class.n() {
        return Err(Error::LengthMismatch {
            expected: class.n(),
            found: mu.n(),
        });
    }
    let separated = |a: usize, b: usize| {
        eps.is_exceeded_by(
            mu.disagreement_weight(class.concept(a), class.concept(b)),
            mu.total(),
        )
    };
    let mut members: Vec<usize> = Vec::new();
    for &i in order {
        if members.iter().all(|&m| separated(m, i)) {
            members.push(i);
        }
    }
    let rounding = (0..class.len())
        .map(|i| {
            members
                .iter()
                .position(|&m| !separated(m, i))
                .expect("greedy packing is maximal")
        })
        .collect();
    Ok(Packing {
        members,
        epsilon: eps,
        mu: mu.clone(),
        rounding,
    })
}

/// The dual approximating set `A*(C, ε)` viewed both as a packing of `C*` and as domain points.
#[derive(Clone, Debug)]
pub struct DualApprox {
    pub dual: ConceptClass,
    /// Packing of `dual` under the uniform distribution on the concepts of `C`.
    pub packing: Packing,
    /// Domain points realizing the packing (first point of each selected column), ascending.
    pub points: Vec<usize>,
    /// `r(x)` for every domain point `x`; always an element of `points`.
    pub rounding: Vec<usize>,
}

impl DualApprox {
    pub fn r(&self, x: usize) -> usize {
        self.rounding[x]
    }

    pub fn contains(&self, x: usize) -> bool {
        self.points.binary_search(&x).is_ok()
    }
}

/// Builds `A*(C, ε)`: greedily packs the distinct columns of `C`, visited in domain order.
pub fn dual_approx_set(class: &ConceptClass, eps: EpsilonSpec) -> DualApprox {
    let dual = class.dual();
    let column_of: Vec<usize> = (0..class.n())
        .map(|x| {
            dual.index_of(&class.column(x))
                .expect("column present in dual")
        })
        .collect();
    let mut first_point = vec![usize::MAX; dual.len()];
    let mut order = Vec::with_capacity(dual.len());
    for (x, &j) in column_of.iter().enumerate() {
        if first_point[j] == usize::MAX {
            first_point[j] = x;
            order.push(j);
        }
    }
    let mu = Distribution::uniform(class.len());
    let packing = greedy_packing_in_order(&dual, &mu, eps, &order).expect("uniform over concepts");
    let mut points: Vec<usize> = packing.members.iter().map(|&j| first_point[j]).collect();
    points.sort_unstable();
    let rounding = column_of
        .iter()
        .map(|&j| first_point[packing.round(j)])
        .collect();
    DualApprox {
        dual,
        packing,
        points,
        rounding,
    }
}

/// `ε = |C|^(-1/(d·2^d + 1))`, the solution of `ε|C| = (1/ε)^(d·2^d)`.
pub fn epsilon_of(size: u64, d: u32) -> Result<EpsilonSpec> {
    if size < 2 {
        return Err(Error::InvalidParameter(format!(
            "epsilon_of needs |C| >= 2 (got {size})"
        )));
    }
    if d < 2 {
        return Err(Error::InvalidParameter(format!(
            "epsilon_of needs d >= 2 (got {d})"
        )));
    }
    let s = 1u32
        .checked_shl(d)
        .and_then(|p| p.checked_mul(d))
        .and_then(|v| v.checked_add(1))
        .ok_or_else(|| Error::InvalidParameter(format!("d = {d} too large")))?;
    EpsilonSpec::root(size, s)
}

/// Haussler's packing bound in its tight and weak forms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HausslerBound {
    /// `e(d+1)(2e/ε)^d`
    pub tight: f64,
    /// `(4e²/ε)^d`
    pub weak: f64,
}

pub fn haussler_bound(d: u32, eps: f64) -> Result<HausslerBound> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon {eps} outside (0, 1]"
        )));
    }
    let e = std::f64::consts::E;
    let d_f = f64::from(d);
    Ok(HausslerBound {
        tight: e * (d_f + 1.0) * (2.0 * e / eps).powf(d_f),
        weak: (4.0 * e * e / eps).powf(d_f),
    })
}

/// `(30·d·ln(2d/ε)/ε)^d`, the bound reached by the sampling argument; needs `d ≥ 1`.
pub fn sampling_packing_bound(d: u32, eps: f64) -> Result<f64> {
    if d == 0 {
        return Err(Error::InvalidParameter(
            "sampling bound needs d >= 1".into(),
        ));
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon {eps} outside (0, 1]"
        )));
    }
    let d_f = f64::from(d);
    Ok((30.0 * d_f * (2.0 * d_f / eps).ln() / eps).powf(d_f))
}

/// Rounds a floating bound up for comparisons against integer sizes.
pub fn bound_admits(size: usize, bound: f64) -> bool {
    (size as f64) <= bound * (1.0 + 1e-12)
}

/// `|C'| ≤ ε|C|` decided exactly.
pub fn within_fraction(part: u64, whole: u64, eps: &EpsilonSpec) -> bool {
    !eps.is_exceeded_by(part, whole)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> Concept {
        Concept::parse(s).unwrap()
    }

    fn class(rows: &[&str]) -> ConceptClass {
        ConceptClass::from_strs(rows).unwrap()
    }

    #[test]
    fn dist_examples() {
        let u3 = Distribution::uniform(3);
        assert_eq!(dist(&c("010"), &c("010"), &u3).unwrap(), Ratio::new(0, 1));
        assert_eq!(dist(&c("000"), &c("111"), &u3).unwrap(), Ratio::new(1, 1));
        let w = Distribution::new(vec![1, 2, 3, 4]).unwrap();
        assert_eq!(dist(&c("0101"), &c("0011"), &w).unwrap(), Ratio::new(1, 2));
        assert!(dist(&c("01"), &c("011"), &u3).is_err());
    }

    #[test]
    fn distribution_parsing() {
        let d = Distribution::from_json(r#"{"weights": [1, 0, 3]}"#).unwrap();
        assert_eq!(d.total(), 4);
        assert!(!d.has_full_support());
        assert!(Distribution::from_json(r#"{"weights": [0, 0]}"#).is_err());
        assert!(Distribution::from_json("[1,2]").is_err());
    }

    #[test]
    fn separation_is_strict() {
        let u2 = Distribution::uniform(2);
        let half = EpsilonSpec::rational(1, 2).unwrap();
        assert!(is_separated(&[c("01")], &u2, &half));
        assert!(is_separated(&[c("00"), c("11")], &u2, &half));
        assert!(!is_separated(&[c("00"), c("01")], &u2, &half));
    }

    #[test]
    fn greedy_examples() {
        let cl = class(&["000", "001", "011", "111"]);
        let u = Distribution::uniform(3);
        let p = greedy_packing(&cl, &u, EpsilonSpec::rational(1, 3).unwrap()).unwrap();
        let members: Vec<String> = p
            .members
            .iter()
            .map(|&i| cl.concept(i).to_string())
            .collect();
        assert_eq!(members, ["000", "011"]);
        assert_eq!(p.rounding, vec![0, 0, 1, 1]);

        let p = greedy_packing(&cl, &u, EpsilonSpec::rational(1, 1).unwrap()).unwrap();
        assert_eq!(p.members, vec![0]);

        let p = greedy_packing(&cl, &u, EpsilonSpec::rational(1, 4).unwrap()).unwrap();
        assert_eq!(p.members, vec![0, 1, 2, 3]);
    }

    #[test]
    fn dual_approx_degenerate() {
        let cl = class(&["000", "111", "000"]);
        let a = dual_approx_set(&cl, EpsilonSpec::rational(1, 4).unwrap());
        assert_eq!(a.points, vec![0]);
        assert_eq!(a.rounding, vec![0, 0, 0]);
    }

    #[test]
    fn dual_approx_tiny_epsilon_keeps_all_columns() {
        let cl = class(&["0110", "1010", "0011", "1111"]);
        // columns 0..3 are distinct
        let a = dual_approx_set(&cl, EpsilonSpec::rational(1, 5).unwrap());
        assert_eq!(a.points, vec![0, 1, 2, 3]);
        assert_eq!(a.rounding, vec![0, 1, 2, 3]);
    }

    #[test]
    fn duplicate_columns_round_to_first_occurrence() {
        let cl = class(&["0101", "1010"]);
        let a = dual_approx_set(&cl, EpsilonSpec::rational(1, 4).unwrap());
        assert_eq!(a.points, vec![0, 1]);
        assert_eq!(a.rounding, vec![0, 1, 0, 1]);
    }

    #[test]
    fn epsilon_of_exact_power() {
        // |C| = 2^9 with d = 2 (s = 9) gives ε = 1/2 exactly
        let eps = epsilon_of(512, 2).unwrap();
        assert_eq!(eps, EpsilonSpec::Root { base: 512, s: 9 });
        assert!(!eps.is_exceeded_by(1, 3));
        assert!(!eps.is_exceeded_by(1, 2));
        assert!(eps.is_exceeded_by(500_001, 1_000_000));
        assert!((eps.to_f64() - 0.5).abs() < 1e-12);
        assert!(epsilon_of(1, 2).is_err());
        assert!(epsilon_of(10, 1).is_err());
    }

    #[test]
    fn epsilon_of_balances_recursion() {
        // ε|C| = (1/ε)^8 for |C| = 1024, s = 9: both sides equal 1024^(8/9).
        let eps = epsilon_of(1024, 2).unwrap();
        let EpsilonSpec::Root { base, s } = eps else {
            panic!()
        };
        assert_eq!((base, s), (1024, 9));
        let lhs = eps.to_f64() * 1024.0;
        let rhs = (1.0 / eps.to_f64()).powi(8);
        assert!((lhs - rhs).abs() / lhs < 1e-12);
    }

    #[test]
    fn haussler_examples() {
        let e = std::f64::consts::E;
        let b0 = haussler_bound(0, 0.3).unwrap();
        assert!((b0.tight - e).abs() < 1e-12);
        let b1 = haussler_bound(1, 0.5).unwrap();
        assert!((b1.tight - 8.0 * e * e).abs() < 1e-9);
        assert!((b1.tight - 59.11).abs() < 0.01);
        // at d = 0 the weak form (= 1) sits below the tight form (= e)
        assert!(b0.weak < b0.tight);
        for d in 1..=6 {
            for eps in [0.125, 0.25, 0.5, 1.0] {
                let b = haussler_bound(d, eps).unwrap();
                assert!(b.weak >= b.tight * (1.0 - 1e-12), "d={d} eps={eps}");
            }
        }
        assert!(haussler_bound(1, 0.0).is_err());
        assert!(haussler_bound(1, 1.5).is_err());
    }
}
