//! Monte-Carlo checks of two PAC bounds: the double-sampling bound for consistent
//! learners and the compression-to-PAC bound, with the recursive scheme as the learner.
//!
//! Trial `t` draws its sample from `ChaCha8Rng::seed_from_u64(seed)` switched to stream `t`;
//! each point is `weights`-distributed via `random_range(0..total)` over the cumulative
//! weights. Samples are multisets; the compression learner sees their labelled support.

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::class::{Concept, ConceptClass, LabeledSample};
use crate::compression::scheme::{msw_compress, msw_reconstruct};
use crate::compression::{side_info_count, SchemeParams};
use crate::error::{Error, Result};
use crate::metric::{Distribution, EpsilonSpec};

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "epsilon {eps} outside (0, 1]"
        )))
    }
}

/// `2(2m+1)^d (1 − ε/4)^m`
pub fn ds_bound(m: u64, d: u32, eps: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    check_eps(eps)?;
    let m_f = m as f64;
    let log = 2f64.ln() + f64::from(d) * (2.0 * m_f + 1.0).ln() + m_f * (-eps / 4.0).ln_1p();
    Ok(log.exp())
}

/// Smallest `m ≥ 1` with `ds_bound(m, d, ε) < target`, scanning up to `limit`.
pub fn smallest_m_for_ds(d: u32, eps: f64, target: f64, limit: u64) -> Result<u64> {
    for m in 1..=limit {
        if ds_bound(m, d, eps)? < target {
            return Ok(m);
        }
    }
    Err(Error::InvalidParameter(format!(
        "ds bound stays above {target} for m <= {limit}"
    )))
}

/// `|Q| Σ_{j=0}^{k} C(m, j) (1 − ε)^{m−j}`, summed in log space.
pub fn lw_bound(m: u64, k: u64, qsize: f64, eps: f64) -> Result<f64> {
    if k > m {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds m = {m}")));
    }
    if qsize.is_nan() || qsize < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "|Q| = {qsize} must be at least 1"
        )));
    }
    check_eps(eps)?;
    if eps == 1.0 {
        // only the j = m term survives, as 0^0 = 1
        return Ok(if k == m { qsize } else { 0.0 });
    }
    let log_keep = (-eps).ln_1p();
    let mut log_binom = 0.0;
    let mut logs = Vec::with_capacity(k as usize + 1);
    for j in 0..=k {
        if j > 0 {
            log_binom += ((m - j + 1) as f64).ln() - (j as f64).ln();
        }
        logs.push(log_binom + (m - j) as f64 * log_keep);
    }
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = logs.iter().map(|l| (l - top).exp()).sum();
    Ok(qsize * (top + sum.ln()).exp())
}

/// Parses `p/q`, a decimal such as `0.3`, or an integer, as an exact rational.
pub fn parse_rational(text: &str) -> Result<Ratio<u64>> {
    let bad = || Error::InvalidParameter(format!("cannot parse {text:?} as a rational"));
    let text = text.trim();
    if let Some((p, q)) = text.split_once('/') {
        let p: u64 = p.trim().parse().map_err(|_| bad())?;
        let q: u64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(p, q));
    }
    let (whole, frac) = text.split_once('.').unwrap_or((text, ""));
    if frac.len() > 18 || !frac.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let whole: u64 = if whole.is_empty() {
        0
    } else {
        whole.parse().map_err(|_| bad())?
    };
    let den = 10u64.pow(frac.len() as u32);
    let frac: u64 = if frac.is_empty() {
        0
    } else {
        frac.parse().map_err(|_| bad())?
    };
    let num = whole
        .checked_mul(den)
        .and_then(|w| w.checked_add(frac))
        .ok_or_else(bad)?;
    Ok(Ratio::new(num, den))
}

#[derive(Clone, Debug)]
pub struct PacExperiment {
    pub class: ConceptClass,
    pub target: usize,
    pub mu: Distribution,
    pub m: usize,
    pub eps: Ratio<u64>,
    pub trials: u64,
    pub seed: u64,
}

impl PacExperiment {
    fn validate(&self) -> Result<EpsilonSpec> {
        self.class.get(self.target)?;
        if self.mu.n() != self.class.n() {
            return Err(Error::LengthMismatch {
                expected: self.class.n(),
                found: self.mu.n(),
            });
        }
        if self.m == 0 {
            return Err(Error::InvalidParameter("m must be at least 1".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        EpsilonSpec::rational(*self.eps.numer(), *self.eps.denom())
    }

    fn target_concept(&self) -> &Concept {
        self.class.concept(self.target)
    }

    /// The `m` draws of trial `t`, in draw order.
    pub fn draw(&self, trial: u64) -> Vec<usize> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial);
        let cumulative: Vec<u64> = self
            .mu
            .weights()
            .iter()
            .scan(0u64, |acc, &w| {
                *acc += w;
                Some(*acc)
            })
            .collect();
        (0..self.m)
            .map(|_| {
                let u = rng.random_range(0..self.mu.total());
                cumulative.partition_point(|&c| c <= u)
            })
            .collect()
    }

    /// The labelled support of trial `t`'s draws.
    pub fn labelled_support(&self, trial: u64) -> LabeledSample {
        let mut points = self.draw(trial);
        points.sort_unstable();
        points.dedup();
        LabeledSample::from_concept(self.target_concept(), &points)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub learner: &'static str,
    pub m: usize,
    pub eps: String,
    pub trials: u64,
    pub failures: u64,
    pub rate: f64,
    pub std_err: f64,
    /// `rate ± 3·std_err`, clipped to `[0, 1]`.
    pub ci_low: f64,
    pub ci_high: f64,
    pub bound: f64,
    /// `bound` rounded up, used for the verdict.
    pub bound_up: f64,
    pub verdict: Verdict,
    /// VC-dimension for the double-sampling bound.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vc: Option<usize>,
    /// Largest kept size, depth and side-information count observed by the compression learner.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_size: Option<String>,
}

fn round_up(x: f64) -> f64 {
    if x.is_finite() {
        x * (1.0 + 1e-12) + f64::MIN_POSITIVE
    } else {
        x
    }
}

fn report(learner: &'static str, exp: &PacExperiment, failures: u64, bound: f64) -> BoundReport {
    let trials = exp.trials as f64;
    let rate = failures as f64 / trials;
    let std_err = (rate * (1.0 - rate) / trials).sqrt();
    let bound_up = round_up(bound);
    let verdict = if rate - 3.0 * std_err <= bound_up {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    BoundReport {
        learner,
        m: exp.m,
        eps: format!("{}/{}", exp.eps.numer(), exp.eps.denom()),
        trials: exp.trials,
        failures,
        rate,
        std_err,
        ci_low: (rate - 3.0 * std_err).max(0.0),
        ci_high: (rate + 3.0 * std_err).min(1.0),
        bound,
        bound_up,
        verdict,
        vc: None,
        k_max: None,
        depth_max: None,
        q_size: None,
    }
}

/// Frequency of samples leaving some consistent concept at distance `> ε` from the target.
pub fn simulate_consistency_failure(exp: &PacExperiment) -> Result<BoundReport> {
    let eps = exp.validate()?;
    let c = exp.target_concept();
    let total = exp.mu.total();
    let failures = (0..exp.trials)
        .into_par_iter()
        .filter(|&t| {
            let sample = exp.labelled_support(t);
            let bad = exp
                .class
                .consistent(&sample)
                .any(|other| eps.is_exceeded_by(exp.mu.disagreement_weight(c, other), total));
            bad
        })
        .count() as u64;
    let vc = exp.class.vc_dimension();
    let bound = ds_bound(exp.m as u64, vc as u32, eps.to_f64())?;
    let mut r = report("consistent", exp, failures, bound);
    r.vc = Some(vc);
    Ok(r)
}

/// Frequency of `dist(ρ(κ(sample)), c) > ε` for the recursive scheme.
pub fn simulate_compression_learner(
    exp: &PacExperiment,
    params: &SchemeParams,
) -> Result<BoundReport> {
    let eps = exp.validate()?;
    let c = exp.target_concept();
    let total = exp.mu.total();
    let outcomes: Vec<(bool, usize, usize)> = (0..exp.trials)
        .into_par_iter()
        .map(|t| {
            let sample = exp.labelled_support(t);
            let cs = msw_compress(&exp.class, &sample, params)?;
            let h = msw_reconstruct(&exp.class, &cs)?;
            let bad = eps.is_exceeded_by(exp.mu.disagreement_weight(c, &h), total);
            Ok((bad, cs.kept.len(), cs.info.depth))
        })
        .collect::<Result<_>>()?;
    let failures = outcomes.iter().filter(|o| o.0).count() as u64;
    let k_max = outcomes.iter().map(|o| o.1).max().unwrap_or(0);
    let depth_max = outcomes.iter().map(|o| o.2).max().unwrap_or(0);
    let q: BigUint = side_info_count(k_max, depth_max);
    let k = (k_max as u64).min(exp.m as u64);
    let bound = lw_bound(
        exp.m as u64,
        k,
        q.to_f64().unwrap_or(f64::INFINITY),
        eps.to_f64(),
    )?;
    let mut r = report("compression", exp, failures, bound);
    r.k_max = Some(k_max);
    r.depth_max = Some(depth_max);
    r.q_size = Some(q.to_string());
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{intervals, singletons_with_empty};

    fn experiment(class: ConceptClass, m: usize, eps: Ratio<u64>, trials: u64) -> PacExperiment {
        let mu = Distribution::uniform(class.n());
        PacExperiment {
            class,
            target: 0,
            mu,
            m,
            eps,
            trials,
            seed: 42,
        }
    }

    #[test]
    fn ds_bound_values() {
        assert!((ds_bound(1, 0, 1.0).unwrap() - 1.5).abs() < 1e-15);
        assert!(ds_bound(0, 1, 0.5).is_err());
        assert!(ds_bound(5, 1, 1.5).is_err());
    }

    #[test]
    fn ds_bound_decreases_after_crossover() {
        let m0 = smallest_m_for_ds(2, 0.5, 0.1, 100_000).unwrap();
        let mut prev = ds_bound(m0, 2, 0.5).unwrap();
        assert!(prev < 0.1 && ds_bound(m0 - 1, 2, 0.5).unwrap() >= 0.1);
        for m in m0 + 1..10_000 {
            let b = ds_bound(m, 2, 0.5).unwrap();
            assert!(b <= prev);
            prev = b;
        }
    }

    #[test]
    fn lw_bound_values() {
        let eps: f64 = 0.25;
        let single = lw_bound(10, 0, 1.0, eps).unwrap();
        assert!((single - 0.75f64.powi(10)).abs() < 1e-15);
        let full = lw_bound(6, 6, 3.0, 0.5).unwrap();
        // Σ C(6,j) 0.5^(6-j) = 1.5^6
        assert!((full - 3.0 * 1.5f64.powi(6)).abs() < 1e-12);
        assert!(lw_bound(3, 4, 1.0, 0.5).is_err());
        assert_eq!(lw_bound(4, 4, 2.0, 1.0).unwrap(), 2.0);
        assert_eq!(lw_bound(4, 3, 2.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("1/4").unwrap(), Ratio::new(1, 4));
        assert_eq!(parse_rational("0.3").unwrap(), Ratio::new(3, 10));
        assert_eq!(parse_rational("1").unwrap(), Ratio::new(1, 1));
        assert_eq!(parse_rational(".25").unwrap(), Ratio::new(1, 4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn draws_follow_weights() {
        let class = singletons_with_empty(3).unwrap();
        let mut exp = experiment(class, 200, Ratio::new(1, 2), 1);
        exp.mu = Distribution::new(vec![0, 1, 0]).unwrap();
        assert!(exp.draw(0).iter().all(|&p| p == 1));
        exp.mu = Distribution::uniform(3);
        assert_eq!(exp.draw(3), exp.draw(3));
        assert_ne!(exp.draw(3), exp.draw(4));
    }

    #[test]
    fn single_concept_never_fails() {
        let class = ConceptClass::from_strs(&["0110"]).unwrap();
        let r = simulate_consistency_failure(&experiment(class, 3, Ratio::new(1, 10), 50)).unwrap();
        assert_eq!(r.failures, 0);
        assert_eq!(r.verdict, Verdict::Pass);
    }

    #[test]
    fn eps_one_is_vacuous() {
        let r = simulate_consistency_failure(&experiment(
            intervals(6).unwrap(),
            2,
            Ratio::new(1, 1),
            50,
        ))
        .unwrap();
        assert_eq!(r.failures, 0);
    }

    #[test]
    fn full_coverage_has_no_failures() {
        let class = intervals(4).unwrap();
        let mut exp = experiment(class, 4, Ratio::new(1, 10), 1);
        // search for a trial whose draws cover the domain
        let t = (0..1000)
            .find(|&t| exp.labelled_support(t).len() == 4)
            .unwrap();
        exp.seed = 42;
        let sample = exp.labelled_support(t);
        let cs = msw_compress(&exp.class, &sample, &SchemeParams::default()).unwrap();
        let h = msw_reconstruct(&exp.class, &cs).unwrap();
        assert_eq!(&h, exp.class.concept(0));
    }

    #[test]
    fn compression_learner_reports_side_info() {
        let class = singletons_with_empty(12).unwrap();
        let r = simulate_compression_learner(
            &experiment(class, 40, Ratio::new(3, 10), 200),
            &SchemeParams::default(),
        )
        .unwrap();
        assert_eq!(r.depth_max, Some(0));
        assert_eq!(r.q_size.as_deref(), Some("1"));
        assert_eq!(r.verdict, Verdict::Pass);
    }
}
