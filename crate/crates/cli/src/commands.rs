use std::collections::BTreeMap;
use std::io::Write;

use eschlab_core::eschenburg::verify_case;
use eschlab_core::suite::{run_suite, Level, SuiteConfig, CRITERIA};
use eschlab_core::triples::{
    canonical_form, classify, is_admissible, is_exceptional, six_products, wilking_candidate_filter,
    CandidateVerdict, CurvatureClass, MoveSet, PQPair, Triple,
};
use eschlab_core::wilking::{almpos_case_engine, applicable_cases, hg_values, domain_flags};
use eschlab_core::Error;
use serde_json::{json, Value};

use crate::config::{parse_seed, parse_t, apply_tolerance, Format, RunConfig, SEED_VAR};
use crate::output::{csv_preamble, envelope, render, sci};
use crate::{Cli, Command, WilkingMode};

/// Largest `--max-abs` accepted by `enumerate`.
pub const ENUMERATE_MAX_ABS: i64 = 8;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError { code: 1, message: message.into() }
    }

    fn domain(message: impl Into<String>) -> Self {
        CliError { code: 2, message: message.into() }
    }

    fn suite(message: impl Into<String>) -> Self {
        CliError { code: 3, message: message.into() }
    }

    fn io(message: impl Into<String>) -> Self {
        CliError { code: 1, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::domain(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

pub fn parse_triple(s: &str) -> CliResult<Triple> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(CliError::usage(format!("expected three comma-separated integers, got {s:?}")));
    }
    let mut out = [0i64; 3];
    for (slot, part) in out.iter_mut().zip(&parts) {
        *slot = part
            .parse()
            .map_err(|_| CliError::usage(format!("invalid integer {part:?} in {s:?}")))?;
    }
    Ok(out)
}

fn parse_pair(p: &str, q: &str) -> CliResult<PQPair> {
    let (p, q) = (parse_triple(p)?, parse_triple(q)?);
    Ok(PQPair::new(p, q)?)
}

fn resolve_config(cli: &Cli) -> CliResult<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        cfg.apply_file(path).map_err(|e| CliError::usage(format!("{e:#}")))?;
    }
    if let Ok(s) = std::env::var(SEED_VAR) {
        cfg.seed = parse_seed(&s).map_err(|e| CliError::usage(format!("{SEED_VAR}: {e:#}")))?;
    }
    if let Some(s) = &cli.seed {
        cfg.seed = parse_seed(s).map_err(|e| CliError::usage(format!("{e:#}")))?;
    }
    if let Some(s) = &cli.t {
        cfg.t = parse_t(s).map_err(|e| CliError::usage(format!("{e:#}")))?;
    }
    if let Some(f) = cli.format {
        cfg.format = Some(f);
    }
    for spec in &cli.tol {
        apply_tolerance(&mut cfg.tolerances, spec).map_err(|e| CliError::usage(format!("{e:#}")))?;
    }
    Ok(cfg)
}

fn emit(text: &str) -> CliResult<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| CliError::io(format!("writing output: {e}")))
}

fn print_doc(cfg: &RunConfig, command: &str, result: Value) -> CliResult<()> {
    let doc = envelope(command, cfg, result);
    emit(&render(cfg.format.unwrap_or(Format::Json), &doc))
}

pub fn run(cli: Cli) -> CliResult<()> {
    let mut cfg = resolve_config(&cli)?;
    match cli.command {
        Command::Classify { p, q } => cmd_classify(&cfg, &p, &q),
        Command::Enumerate { max_abs, filter, out } => cmd_enumerate(&cfg, max_abs, filter.as_deref(), out.as_deref()),
        Command::ScanEsch { p, q, samples } => {
            if let Some(n) = samples {
                cfg.samples = n;
            }
            cmd_scan_esch(&cfg, &p, &q)
        }
        Command::Wilking { mode } => match mode {
            WilkingMode::Analyze { q } => cmd_wilking_analyze(&cfg, &q),
            WilkingMode::Certify { q } => cmd_wilking_certify(&cfg, &q),
            WilkingMode::Sweep { q, theta_min, theta_max, steps } => {
                cmd_wilking_sweep(&cfg, &q, theta_min, theta_max, steps)
            }
        },
        Command::VerifyPaper { level, criteria } => cmd_verify_paper(&cfg, &level, criteria.as_deref()),
    }
}

fn classification_json(pair: &PQPair) -> CliResult<Value> {
    let c = classify(pair)?;
    let canon = canonical_form(pair, MoveSet::AllDiffeos)?;
    Ok(json!({
        "p": pair.p(),
        "q": pair.q(),
        "admissible": true,
        "class": c.class,
        "products": c.products,
        "canonical_p": canon.p(),
        "canonical_q": canon.q(),
    }))
}

fn cmd_classify(cfg: &RunConfig, p: &str, q: &str) -> CliResult<()> {
    let pair = parse_pair(p, q)?;
    if !is_admissible(&pair) {
        let products = six_products(&pair);
        return Err(CliError::domain(format!(
            "{pair} is not admissible: some gcd(p_s(1)-q1, p_s(2)-q2) differs from 1 (six products {products:?})"
        )));
    }
    let mut result = classification_json(&pair)?;
    let esch = canonical_form(&pair, MoveSet::EschenburgIsometries)?;
    let wilk = canonical_form(&pair, MoveSet::WilkingIsometries)?;
    result["canonical"] = json!({
        "eschenburg_isometries": esch,
        "wilking_isometries": wilk,
        "all_diffeos": canonical_form(&pair, MoveSet::AllDiffeos)?,
    });
    result["exceptional"] = json!(is_exceptional(&pair)?);
    result["product_order"] = json!(["id", "(12)", "(13)", "(23)", "(123)", "(132)"]);
    print_doc(cfg, "classify", result)
}

/// One catalog line per Eschenburg-isometry class met in the box, keyed and
/// ordered by its canonical representative.
pub fn catalog(max_abs: i64, filter: Option<CurvatureClass>) -> CliResult<(Vec<Value>, BTreeMap<String, usize>)> {
    let mut classes: BTreeMap<PQPair, usize> = BTreeMap::new();
    let r = -max_abs..=max_abs;
    for p1 in r.clone() {
        for p2 in r.clone() {
            for p3 in r.clone() {
                for q1 in r.clone() {
                    for q2 in r.clone() {
                        let q3 = p1 + p2 + p3 - q1 - q2;
                        if q3.abs() > max_abs {
                            continue;
                        }
                        let pair = PQPair::new([p1, p2, p3], [q1, q2, q3])?;
                        if !is_admissible(&pair) {
                            continue;
                        }
                        let canon = canonical_form(&pair, MoveSet::EschenburgIsometries)?;
                        *classes.entry(canon).or_default() += 1;
                    }
                }
            }
        }
    }
    let mut lines = Vec::new();
    let mut counts = BTreeMap::new();
    for (canon, members) in classes {
        let class = classify(&canon)?.class;
        if filter.is_some_and(|f| f != class) {
            continue;
        }
        *counts.entry(class.name().to_string()).or_default() += 1;
        let mut line = classification_json(&canon)?;
        line["members_in_box"] = json!(members);
        lines.push(line);
    }
    Ok((lines, counts))
}

fn cmd_enumerate(
    cfg: &RunConfig,
    max_abs: i64,
    filter: Option<&str>,
    out: Option<&std::path::Path>,
) -> CliResult<()> {
    if !(0..=ENUMERATE_MAX_ABS).contains(&max_abs) {
        return Err(CliError::domain(format!(
            "--max-abs must lie in [0, {ENUMERATE_MAX_ABS}], got {max_abs}"
        )));
    }
    let filter = filter
        .map(|f| f.parse::<CurvatureClass>().map_err(|e| CliError::usage(e.to_string())))
        .transpose()?;
    let (lines, counts) = catalog(max_abs, filter)?;
    let summary = json!({
        "max_abs": max_abs,
        "filter": filter,
        "move_set": "EschenburgIsometries",
        "entries": lines.len(),
        "class_counts": counts,
    });
    let meta = envelope("enumerate", cfg, summary.clone());
    let mut text = serde_json::to_string(&meta).expect("json values serialize");
    text.push('\n');
    for line in &lines {
        text.push_str(&serde_json::to_string(line).expect("json values serialize"));
        text.push('\n');
    }
    match out {
        None => emit(&text),
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| CliError::io(format!("writing {}: {e}", path.display())))?;
            let mut result = summary;
            result["path"] = json!(path.display().to_string());
            print_doc(cfg, "enumerate", result)
        }
    }
}

fn cmd_scan_esch(cfg: &RunConfig, p: &str, q: &str) -> CliResult<()> {
    let pair = parse_pair(p, q)?;
    let report = verify_case(&pair, cfg.samples, cfg.seed, cfg.t, &cfg.tolerances)?;
    let result = serde_json::to_value(&report).expect("reports serialize");
    print_doc(cfg, "scan-esch", result)
}

fn candidate(q: &str) -> CliResult<eschlab_core::triples::CandidateReport> {
    let q = parse_triple(q)?;
    wilking_candidate_filter(q).map_err(|e| CliError::domain(format!("rejected by the candidate filter: {e}")))
}

fn cmd_wilking_analyze(cfg: &RunConfig, q: &str) -> CliResult<()> {
    let report = candidate(q)?;
    let cases = if report.verdict == CandidateVerdict::NewCandidate {
        applicable_cases(report.q)
    } else {
        Vec::new()
    };
    let result = json!({
        "candidate": report,
        "applicable_cases": cases,
        "case": cases.first(),
    });
    print_doc(cfg, "wilking analyze", result)
}

fn cmd_wilking_certify(cfg: &RunConfig, q: &str) -> CliResult<()> {
    let report = candidate(q)?;
    if report.verdict != CandidateVerdict::NewCandidate {
        return Err(CliError::domain(format!(
            "q = {:?} is not a new candidate ({:?}, rule: {})",
            report.input_q, report.verdict, report.rule
        )));
    }
    let engine = almpos_case_engine(report.input_q, cfg.t)?;
    let a = &engine.analysis;
    let passed = a.certificate.passes(&cfg.tolerances);
    let result = json!({
        "candidate": engine.candidate,
        "case": a.case,
        "theta_center": a.theta_center,
        "theta": a.theta,
        "alpha": a.alpha,
        "h": a.hg.h,
        "g": a.hg.g,
        "open_set": a.open_set,
        "certificate": a.certificate,
        "passed": passed,
    });
    print_doc(cfg, "wilking certify", result)?;
    if passed {
        Ok(())
    } else {
        Err(CliError::suite("certificate residuals exceed the tolerances"))
    }
}

fn cmd_wilking_sweep(cfg: &RunConfig, q: &str, lo: f64, hi: f64, steps: usize) -> CliResult<()> {
    let report = candidate(q)?;
    let nq = report.q;
    if nq[0] == nq[1] {
        return Err(CliError::domain(format!("h and g are undefined for q1 = q2 (normalized q = {nq:?})")));
    }
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) || steps < 2 {
        return Err(CliError::usage("sweep needs finite theta_min <= theta_max and at least 2 steps"));
    }
    let rows: Vec<(f64, Option<f64>, Option<f64>, eschlab_core::wilking::DomainFlags)> = (0..steps)
        .map(|i| {
            let theta = lo + (hi - lo) * i as f64 / (steps - 1) as f64;
            match hg_values(theta, nq) {
                Ok(v) => (theta, v.h, Some(v.g), v.flags),
                Err(_) => (theta, None, None, domain_flags(theta, nq)),
            }
        })
        .collect();
    let doc = envelope(
        "wilking sweep",
        cfg,
        json!({ "q": nq, "input_q": report.input_q, "steps": steps, "theta_min": lo, "theta_max": hi }),
    );
    match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let cell = |x: Option<f64>| x.map(sci).unwrap_or_default();
            let mut s = csv_preamble(&doc);
            s.push_str("theta,h,g,sin_theta_zero,plus_zero,minus_zero\n");
            for (theta, h, g, f) in &rows {
                s.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    sci(*theta),
                    cell(*h),
                    cell(*g),
                    f.sin_theta_zero,
                    f.plus_zero,
                    f.minus_zero
                ));
            }
            emit(&s)
        }
        fmt => {
            let mut doc = doc;
            doc["result"]["rows"] = rows
                .iter()
                .map(|(theta, h, g, f)| json!({ "theta": theta, "h": h, "g": g, "flags": f }))
                .collect();
            emit(&render(fmt, &doc))
        }
    }
}

fn parse_criteria(list: &str) -> CliResult<Vec<u8>> {
    let mut out = Vec::new();
    for part in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let id: u8 = part
            .parse()
            .ok()
            .filter(|id| (1..=CRITERIA.len() as u8).contains(id))
            .ok_or_else(|| CliError::usage(format!("unknown criterion {part:?} (expected 1-{})", CRITERIA.len())))?;
        if !out.contains(&id) {
            out.push(id);
        }
    }
    out.sort_unstable();
    Ok(out)
}

fn cmd_verify_paper(cfg: &RunConfig, level: &str, criteria: Option<&str>) -> CliResult<()> {
    let level: Level = level.parse().map_err(CliError::usage)?;
    let mut suite = SuiteConfig::new(level, cfg.seed);
    suite.t = cfg.t;
    suite.tolerances = cfg.tolerances;
    if let Some(list) = criteria {
        suite.only = parse_criteria(list)?;
    }
    let report = run_suite(&suite);
    let failed: Vec<u8> = report.criteria.iter().filter(|c| !c.passed).map(|c| c.id).collect();
    let passed = report.passed;
    print_doc(cfg, "verify-paper", serde_json::to_value(&report).expect("reports serialize"))?;
    if passed {
        Ok(())
    } else {
        Err(CliError::suite(format!("suite failed; failing criteria: {failed:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triples_parse() {
        assert_eq!(parse_triple("0,-1, 2").unwrap(), [0, -1, 2]);
        assert_eq!(parse_triple("1,2").unwrap_err().code, 1);
        assert_eq!(parse_triple("1,x,2").unwrap_err().code, 1);
    }

    #[test]
    fn criteria_parse() {
        assert_eq!(parse_criteria("3,1,3").unwrap(), vec![1, 3]);
        assert!(parse_criteria("10").is_err());
    }

    #[test]
    fn small_catalog() {
        let kerin = PQPair::new([0, 1, 1], [0, 0, 2]).unwrap();
        let key = canonical_form(&kerin, MoveSet::EschenburgIsometries).unwrap();
        let all = canonical_form(&kerin, MoveSet::AllDiffeos).unwrap();
        let (lines, counts) = catalog(2, None).unwrap();
        let hits = lines
            .iter()
            .filter(|l| l["p"] == json!(key.p()) && l["q"] == json!(key.q()))
            .count();
        assert_eq!(hits, 1);
        for l in lines.iter().filter(|l| l["class"] == "AlmostPositive") {
            assert_eq!(l["canonical_p"], json!(all.p()));
            assert_eq!(l["canonical_q"], json!(all.q()));
        }
        assert_eq!(counts.values().sum::<usize>(), lines.len());

        let (flat, _) = catalog(2, Some(CurvatureClass::FlatPlaneEverywhere)).unwrap();
        assert!(!flat.is_empty());
        for l in &flat {
            assert!(l["products"].as_array().unwrap().iter().all(|x| x.as_i64().unwrap() <= 0));
        }
        let (empty, _) = catalog(0, None).unwrap();
        assert!(empty.iter().all(|l| l["class"] != "AlmostPositive"));
    }
}
