//! One function per subcommand, each returning its report body.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use vclab_core::compression::scheme::{msw_compress_traced, msw_reconstruct, size_report};
use vclab_core::compression::verify::{verify_scheme, VerifyReport};
use vclab_core::generators;
use vclab_core::metric::{
    bound_admits, dual_approx_set, greedy_packing, haussler_bound, Distribution, EpsilonSpec,
};
use vclab_core::pac::{
    parse_rational, simulate_compression_learner, simulate_consistency_failure, BoundReport,
    PacExperiment, Verdict,
};
use vclab_core::teaching::{
    halving_teaching_concept, is_teaching_set, lemma36_teaching, min_teaching_set, rt_dimension,
    thm14_default_threshold, thm14_teaching_concept, TeachingMethod, TeachingReport,
};
use vclab_core::{
    load_class, sauer_bound, CompressedSample, ConceptClass, LabeledSample, SchemeParams,
};

use crate::{
    suite, Cli, Command, Family, Learner, Outcome, TeachMethod, UsageError, EXIT_CHECK_FAILED,
    EXIT_OK,
};

type CmdResult = Result<Outcome, UsageError>;

/// Pretty-printed JSON; object keys come out sorted.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let value = serde_json::to_value(value).expect("reports serialize");
    serde_json::to_string_pretty(&value).expect("values serialize")
}

fn ok(body: String) -> CmdResult {
    Ok(Outcome {
        body,
        code: EXIT_OK,
    })
}

fn checked(body: String, passed: bool) -> CmdResult {
    Ok(Outcome {
        body,
        code: if passed { EXIT_OK } else { EXIT_CHECK_FAILED },
    })
}

pub fn read_class(path: &Path, err: &mut dyn Write) -> Result<ConceptClass, UsageError> {
    let source = fs::read_to_string(path)
        .map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))?;
    let loaded = load_class(&source).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    if loaded.duplicates_removed > 0 {
        let _ = writeln!(
            err,
            "note: {} duplicate row(s) removed from {}",
            loaded.duplicates_removed,
            path.display()
        );
    }
    Ok(loaded.class)
}

fn read_dist(path: Option<&Path>, n: usize) -> Result<Distribution, UsageError> {
    let Some(path) = path else {
        return Ok(Distribution::uniform(n));
    };
    let source = fs::read_to_string(path)
        .map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))?;
    let mu = Distribution::from_json(&source)?;
    if mu.n() != n {
        return Err(UsageError(format!(
            "distribution has {} weights for {n} points",
            mu.n()
        )));
    }
    Ok(mu)
}

fn parse_eps(text: &str) -> Result<EpsilonSpec, UsageError> {
    let r = parse_rational(text)?;
    Ok(EpsilonSpec::rational(*r.numer(), *r.denom())?)
}

pub fn parse_points(text: &str) -> Result<Vec<usize>, UsageError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| UsageError(format!("bad point {s:?}")))
        })
        .collect()
}

fn params(base_threshold: Option<u64>) -> Result<SchemeParams, UsageError> {
    Ok(match base_threshold {
        Some(t) => SchemeParams::fixed(t)?,
        None => SchemeParams::default(),
    })
}

fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let widths: Vec<usize> = (0..header.len())
        .map(|i| {
            rows.iter()
                .map(|r| r[i].len())
                .chain([header[i].len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |cells: Vec<&str>| -> String {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let mut out = vec![line(header.to_vec())];
    out.extend(
        rows.iter()
            .map(|r| line(r.iter().map(String::as_str).collect())),
    );
    out.join("\n")
}

pub fn execute(cli: &Cli, err: &mut dyn Write) -> CmdResult {
    match &cli.command {
        Command::Vc { class } => vc(&read_class(&class.class, err)?, cli.pretty),
        Command::Dual { class, text } => dual(&read_class(&class.class, err)?, *text),
        Command::Teach {
            class,
            method,
            target,
            threshold,
        } => teach(
            &read_class(&class.class, err)?,
            *method,
            *target,
            *threshold,
            cli.pretty,
        ),
        Command::Rtd { class } => rtd(&read_class(&class.class, err)?, cli.pretty),
        Command::Pack {
            class,
            eps,
            dist,
            dual,
        } => {
            let c = read_class(&class.class, err)?;
            pack(&c, eps, dist.as_deref(), *dual)
        }
        Command::Compress {
            class,
            target,
            points,
            base_threshold,
            report,
        } => compress(
            &read_class(&class.class, err)?,
            *target,
            points,
            *base_threshold,
            *report,
        ),
        Command::Decompress { class, input } => decompress(&read_class(&class.class, err)?, input),
        Command::Verify {
            class,
            budget,
            seed,
            samples,
            base_threshold,
        } => {
            let c = read_class(&class.class, err)?;
            let report = verify_scheme(&c, &params(*base_threshold)?, *budget, *samples, *seed);
            checked(to_json(&report), report.passed())
        }
        Command::Pac {
            class,
            target,
            dist,
            m,
            eps,
            trials,
            seed,
            learner,
            base_threshold,
            csv,
        } => {
            let c = read_class(&class.class, err)?;
            let mu = read_dist(dist.as_deref(), c.n())?;
            let grid = parse_points(m)?;
            if grid.is_empty() {
                return Err(UsageError("--m needs at least one value".into()));
            }
            let mut reports = Vec::new();
            for &m in &grid {
                let exp = PacExperiment {
                    class: c.clone(),
                    target: *target,
                    mu: mu.clone(),
                    m,
                    eps: parse_rational(eps)?,
                    trials: *trials,
                    seed: *seed,
                };
                reports.push(match learner {
                    Learner::Consistent => simulate_consistency_failure(&exp)?,
                    Learner::Compression => {
                        simulate_compression_learner(&exp, &params(*base_threshold)?)?
                    }
                });
            }
            if let Some(path) = csv {
                write_csv(path, &reports)?;
            }
            let passed = reports.iter().all(|r| r.verdict == Verdict::Pass);
            let body = if reports.len() == 1 {
                to_json(&reports[0])
            } else {
                to_json(&reports)
            };
            checked(body, passed)
        }
        Command::Gen {
            family,
            n,
            d,
            size,
            seed,
        } => ok(generate(*family, *n, *d, *size, *seed)?.to_text()),
        Command::Analyze {
            class,
            eps,
            budget,
            rtd_budget,
        } => analyze(&read_class(&class.class, err)?, eps, *budget, *rtd_budget),
        Command::Suite { level: _, only } => {
            if let Some(id) = only.iter().find(|id| !suite::CRITERIA.contains(id)) {
                return Err(UsageError(format!(
                    "no criterion {id} (criteria are 1 to 8)"
                )));
            }
            let results = suite::run_all(only);
            let passed = results.iter().all(|r| r.passed);
            let body = if cli.pretty {
                results
                    .iter()
                    .map(suite::CriterionResult::line)
                    .collect::<Vec<_>>()
                    .join("\n")
            } else {
                to_json(&json!({ "criteria": results, "passed": passed }))
            };
            checked(body, passed)
        }
    }
}

fn vc(c: &ConceptClass, pretty: bool) -> CmdResult {
    let vc = c.vc_dimension();
    let witness = c
        .shattered_sets_by_size()
        .get(vc)
        .and_then(|sets| sets.first().cloned())
        .unwrap_or_default();
    let sauer = sauer_bound(c.n() as u64, vc as u64)?;
    if pretty {
        return ok(table(
            &["n", "size", "vc", "shattered", "sauer"],
            &[vec![
                c.n().to_string(),
                c.len().to_string(),
                vc.to_string(),
                format!("{witness:?}"),
                sauer.to_string(),
            ]],
        ));
    }
    ok(to_json(&json!({
        "n": c.n(),
        "size": c.len(),
        "vc": vc,
        "shattered": witness,
        "sauer_bound": sauer.to_string(),
    })))
}

fn dual(c: &ConceptClass, text: bool) -> CmdResult {
    let d = c.dual();
    if text {
        return ok(d.to_text());
    }
    ok(to_json(&json!({
        "n": d.n(),
        "size": d.len(),
        "vc": d.vc_dimension(),
        "concepts": d.concepts().iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "duplicate_columns": c.has_duplicate_columns(),
    })))
}

fn teaching_json(c: &ConceptClass, r: &TeachingReport) -> Value {
    json!({
        "concept": r.concept.to_string(),
        "index": c.index_of(&r.concept),
        "set": r.set,
        "size": r.size(),
        "method": r.method,
        "valid": is_teaching_set(c, &r.concept, &r.set).unwrap_or(false),
    })
}

fn teach(
    c: &ConceptClass,
    method: TeachMethod,
    target: Option<usize>,
    threshold: Option<u64>,
    pretty: bool,
) -> CmdResult {
    let mut extra = None;
    let report = match method {
        TeachMethod::Exact => {
            let t = target.ok_or_else(|| UsageError("--target is required for exact".into()))?;
            let concept = c.get(t)?.clone();
            let set = min_teaching_set(c, &concept, None)?.expect("no cap given");
            TeachingReport {
                concept,
                set,
                method: TeachingMethod::Exact,
            }
        }
        TeachMethod::Halving => halving_teaching_concept(c),
        TeachMethod::Thm14 => {
            let t = threshold.unwrap_or_else(|| thm14_default_threshold(c.vc_dimension()));
            let r = thm14_teaching_concept(c, t);
            extra = Some(
                json!({ "threshold": t, "steps": r.steps, "halving_points": r.halving_points }),
            );
            r.report
        }
        TeachMethod::Lemma36 => lemma36_teaching(c)?,
    };
    if pretty {
        return ok(table(
            &["concept", "method", "size", "set"],
            &[vec![
                report.concept.to_string(),
                format!("{:?}", report.method).to_lowercase(),
                report.size().to_string(),
                format!("{:?}", report.set),
            ]],
        ));
    }
    let mut value = teaching_json(c, &report);
    if let Some(Value::Object(more)) = extra {
        value.as_object_mut().expect("object").extend(more);
    }
    let valid = value["valid"].as_bool() == Some(true);
    checked(to_json(&value), valid)
}

fn rtd_json(c: &ConceptClass) -> (usize, Value) {
    let (rtd, dec) = rt_dimension(c);
    let layers: Vec<Value> = dec
        .layers
        .iter()
        .map(|l| {
            json!({
                "size": l.size,
                "entries": l.entries.iter().map(|(i, set)| json!({
                    "index": i,
                    "concept": c.concept(*i).to_string(),
                    "set": set,
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    (rtd, json!({ "rtd": rtd, "layers": layers }))
}

fn rtd(c: &ConceptClass, pretty: bool) -> CmdResult {
    let (rtd, value) = rtd_json(c);
    if pretty {
        let mut rows = Vec::new();
        for (depth, layer) in value["layers"]
            .as_array()
            .expect("array")
            .iter()
            .enumerate()
        {
            for e in layer["entries"].as_array().expect("array") {
                rows.push(vec![
                    depth.to_string(),
                    e["concept"].as_str().unwrap_or_default().to_string(),
                    layer["size"].to_string(),
                    e["set"].to_string(),
                ]);
            }
        }
        return ok(format!(
            "rtd = {rtd}\n{}",
            table(&["layer", "concept", "size", "set"], &rows)
        ));
    }
    ok(to_json(&value))
}

fn packing_json(c: &ConceptClass, eps: EpsilonSpec, mu: &Distribution, dual: bool) -> CmdResult {
    let d = c.vc_dimension() as u32;
    let e = eps.to_f64();
    if dual {
        let a = dual_approx_set(c, eps);
        let bound = haussler_bound(1 << (d + 1), e)?;
        return ok(to_json(&json!({
            "eps": eps.to_string(),
            "points": a.points,
            "rounding": a.rounding,
            "size": a.points.len(),
            "dual_vc_bound": 1u64 << (d + 1),
            "haussler_tight": bound.tight,
            "within_bound": bound_admits(a.points.len(), bound.tight),
        })));
    }
    let p = greedy_packing(c, mu, eps)?;
    let bound = haussler_bound(d, e)?;
    ok(to_json(&json!({
        "eps": eps.to_string(),
        "members": p.members.iter().map(|&i| c.concept(i).to_string()).collect::<Vec<_>>(),
        "member_indices": p.members,
        "rounding": (0..c.len()).map(|i| p.round(i)).collect::<Vec<_>>(),
        "size": p.len(),
        "vc": d,
        "haussler_tight": bound.tight,
        "haussler_weak": bound.weak,
        "within_bound": bound_admits(p.len(), bound.tight),
    })))
}

fn pack(c: &ConceptClass, eps: &str, dist: Option<&Path>, dual: bool) -> CmdResult {
    let mu = read_dist(dist, c.n())?;
    packing_json(c, parse_eps(eps)?, &mu, dual)
}

fn compress(
    c: &ConceptClass,
    target: usize,
    points: &str,
    base_threshold: Option<u64>,
    report: bool,
) -> CmdResult {
    let concept = c.get(target)?;
    let points = c.normalize_points(&parse_points(points)?)?;
    let sample = LabeledSample::from_concept(concept, &points);
    let (cs, trace) = msw_compress_traced(c, &sample, &params(base_threshold)?)?;
    if !report {
        return ok(cs.to_json());
    }
    let compressed: Value = serde_json::from_str(&cs.to_json()).expect("wire form is JSON");
    ok(to_json(&json!({
        "compressed": compressed,
        "size_report": size_report(&cs, &trace),
    })))
}

fn decompress(c: &ConceptClass, input: &Path) -> CmdResult {
    let source = fs::read_to_string(input)
        .map_err(|e| UsageError(format!("cannot read {}: {e}", input.display())))?;
    let cs = CompressedSample::from_json(source.trim())?;
    let h = msw_reconstruct(c, &cs)?;
    ok(to_json(&json!({
        "hypothesis": h.to_string(),
        "index": c.index_of(&h),
    })))
}

fn write_csv(path: &Path, reports: &[BoundReport]) -> Result<(), UsageError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "learner", "m", "eps", "trials", "failures", "rate", "std_err", "bound", "verdict",
    ])?;
    for r in reports {
        w.write_record([
            r.learner.to_string(),
            r.m.to_string(),
            r.eps.clone(),
            r.trials.to_string(),
            r.failures.to_string(),
            r.rate.to_string(),
            r.std_err.to_string(),
            r.bound.to_string(),
            format!("{:?}", r.verdict).to_lowercase(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn generate(
    family: Family,
    n: usize,
    d: Option<usize>,
    size: Option<usize>,
    seed: u64,
) -> Result<ConceptClass, UsageError> {
    let need = |v: Option<usize>, flag: &str| {
        v.ok_or_else(|| UsageError(format!("--{flag} is required for this family")))
    };
    Ok(match family {
        Family::Singletons => generators::singletons_with_empty(n)?,
        Family::Intervals => generators::intervals(n)?,
        Family::Cube => generators::full_cube(n)?,
        Family::Hamming => generators::hamming_ball(n, need(d, "d")?)?,
        Family::Random => generators::random_class(n, need(size, "size")?, seed)?,
        Family::VcBounded => {
            generators::random_vc_bounded(n, need(d, "d")?, need(size, "size")?, seed)?
        }
        Family::ThirtySix => generators::random_36(n, need(size, "size")?, seed)?,
    })
}

#[derive(Serialize)]
struct PackingEntry {
    eps: String,
    size: usize,
    haussler_tight: f64,
    margin: f64,
    dual_size: usize,
    dual_bound: f64,
    dual_margin: f64,
}

fn analyze(c: &ConceptClass, eps: &[String], budget: u64, rtd_budget: usize) -> CmdResult {
    let vc = c.vc_dimension();
    let dual_vc = c.dual().vc_dimension();
    let sauer = sauer_bound(c.n() as u64, vc as u64)?;
    let mu = Distribution::uniform(c.n());
    let mut packings = Vec::new();
    let mut bounds_ok = true;
    for text in eps {
        let e = parse_eps(text)?;
        let p = greedy_packing(c, &mu, e)?;
        let tight = haussler_bound(vc as u32, e.to_f64())?.tight;
        let a = dual_approx_set(c, e);
        let dual_bound = haussler_bound(1 << (vc + 1), e.to_f64())?.tight;
        bounds_ok &= bound_admits(p.len(), tight) && bound_admits(a.points.len(), dual_bound);
        packings.push(PackingEntry {
            eps: e.to_string(),
            size: p.len(),
            haussler_tight: tight,
            margin: tight - p.len() as f64,
            dual_size: a.points.len(),
            dual_bound,
            dual_margin: dual_bound - a.points.len() as f64,
        });
    }
    let rtd = (c.len() <= rtd_budget).then(|| rt_dimension(c).0);
    let compression: VerifyReport = verify_scheme(c, &SchemeParams::default(), budget, 1000, 0);
    let sauer_ok = num_bigint::BigUint::from(c.len()) <= sauer;
    let dual_ok = vc > 3 || dual_vc <= 1 << (vc + 1);
    let passed = bounds_ok && sauer_ok && dual_ok && compression.passed();
    let body = to_json(&json!({
        "n": c.n(),
        "size": c.len(),
        "vc": vc,
        "dual_vc": dual_vc,
        "sauer_bound": sauer.to_string(),
        "rtd": rtd,
        "halving_size": halving_teaching_concept(c).size(),
        "packings": packings,
        "compression": {
            "mode": compression.mode,
            "pairs": compression.pairs,
            "max_kept": compression.max_kept,
            "max_depth": compression.max_depth,
            "failures": compression.failure_count,
        },
        "checks": {
            "sauer": sauer_ok,
            "dual_vc": dual_ok,
            "packing_bounds": bounds_ok,
            "compression": compression.passed(),
        },
    }));
    checked(body, passed)
}
