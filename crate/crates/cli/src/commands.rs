use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use padic_ds::constructions::{spectrum_membership, spectrum_value, SpectrumDigits};
use padic_ds::ds_sets::real::real_tail_union;
use padic_ds::ds_sets::{stage_set, FamilyTag, TailAccumulator};
use padic_ds::rational::{self, Rational};
use padic_ds::verification::{self, lemma_haynes_check, shell_report, CheckReport, VerifyConfig, CHECK_NAMES};

use crate::rule::{build, parse_rational};
use crate::{ConstructArgs, Format, MeasureArgs, Place, SpectrumArgs, VerifyArgs};

fn frac(q: &Rational) -> String {
    rational::to_fraction(q)
}

fn print_json(value: &impl Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn pool(threads: usize) -> Result<rayon::ThreadPool> {
    if threads == 0 {
        bail!("--parallel must be at least 1");
    }
    Ok(rayon::ThreadPoolBuilder::new().num_threads(threads).build()?)
}

fn place_json(p: Place) -> Value {
    match p {
        Place::Prime(p) => json!(p),
        Place::Infinite => json!("inf"),
    }
}

/// Key-value lines for flat objects; nested values stay JSON.
fn print_table(value: &Value) {
    let Value::Object(map) = value else {
        println!("{value}");
        return;
    };
    let width = map.keys().map(String::len).max().unwrap_or(0);
    for (k, v) in map {
        let shown = match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        println!("{k:<width$}  {shown}");
    }
}

#[derive(Serialize)]
struct Row {
    n: u64,
    psi: String,
    rule_part: String,
}

pub fn construct(args: ConstructArgs) -> Result<ExitCode> {
    let rule = build(&args.rule)?;
    let rows: Vec<Row> = rule
        .construction_support(1, args.cap.max(1))?
        .into_iter()
        .map(|(n, v, part)| Row { n, psi: frac(&v), rule_part: part.to_string() })
        .collect();
    match args.format {
        Format::Csv => {
            let mut out = String::from("n,psi_num,psi_den,rule_part\n");
            for r in &rows {
                let (num, den) = r.psi.split_once('/').expect("fraction");
                writeln!(out, "{},{num},{den},{}", r.n, r.rule_part)?;
            }
            print!("{out}");
        }
        Format::Json => print_json(&rows)?,
        Format::Table => {
            println!("{:>10}  {:>16}  rule_part", "n", "psi");
            for r in &rows {
                println!("{:>10}  {:>16}  {}", r.n, r.psi, r.rule_part);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct Shell {
    k: u32,
    measure: String,
}

#[derive(Serialize)]
struct MeasureOutput {
    family: FamilyTag,
    p: Value,
    rule: &'static str,
    range: (u64, u64),
    stages: usize,
    measure: String,
    series: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    shells: Option<Vec<Shell>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    classes: Option<Vec<(String, u32)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    approx: Option<BTreeMap<&'static str, String>>,
}

pub fn measure(args: MeasureArgs) -> Result<ExitCode> {
    if args.format == Format::Csv {
        bail!("measure supports --format json or table");
    }
    let rule = build(&args.rule)?;
    let (lo, hi) = args.range;
    let support = rule.support(lo, hi)?;
    let approx = |m: &Rational, s: &Rational| {
        args.approx.then(|| BTreeMap::from([("measure", rational::approx(m, 12)), ("series", rational::approx(s, 12))]))
    };
    let out = match args.rule.p {
        Place::Infinite => {
            let report = real_tail_union(args.family, &rule, lo, hi)?;
            MeasureOutput {
                family: args.family,
                p: place_json(args.rule.p),
                rule: rule.name(),
                range: (lo, hi),
                stages: support.len(),
                approx: approx(&report.measure, &report.series),
                measure: frac(&report.measure),
                series: frac(&report.series),
                shells: None,
                residual: None,
                classes: None,
            }
        }
        Place::Prime(p) => {
            let chunk = support.len().div_ceil(args.parallel.max(1)).max(1);
            let family = args.family;
            let partials: Vec<TailAccumulator> = pool(args.parallel)?.install(|| {
                support
                    .par_chunks(chunk)
                    .map(|part| -> padic_ds::Result<TailAccumulator> {
                        let mut acc = TailAccumulator::new(p);
                        for (n, v) in part {
                            acc.add(&stage_set(family, p, *n, v)?)?;
                        }
                        Ok(acc)
                    })
                    .collect::<padic_ds::Result<_>>()
            })?;
            let mut acc = TailAccumulator::new(p);
            for part in partials {
                acc = acc.merge(part)?;
            }
            let report = acc.finish(family, (lo, hi));
            let shells = shell_report(&report.union, args.k_max)?;
            MeasureOutput {
                family,
                p: place_json(args.rule.p),
                rule: rule.name(),
                range: (lo, hi),
                stages: support.len(),
                approx: approx(&report.measure, &report.series),
                measure: frac(&report.measure),
                series: frac(&report.series),
                shells: Some(shells.shells.iter().map(|s| Shell { k: s.k, measure: frac(&s.measure) }).collect()),
                residual: Some(frac(&shells.residual)),
                classes: args
                    .classes
                    .then(|| report.union.classes().into_iter().map(|(c, d)| (c.to_string(), d)).collect()),
            }
        }
    };
    match args.format {
        Format::Table => print_table(&serde_json::to_value(&out)?),
        _ => print_json(&out)?,
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct VerifyOutput {
    passed: bool,
    reports: Vec<CheckReport>,
}

pub fn verify(args: VerifyArgs) -> Result<ExitCode> {
    let mut config =
        VerifyConfig { depth: args.depth, prime_cap: args.prime_cap, seed: args.seed, ..VerifyConfig::default() };
    let single_lemma = args.check == "lemma-haynes" && (args.n.is_some() || args.psi.is_some());
    let reports = if single_lemma {
        let p = match args.p {
            Some(Place::Prime(p)) => p,
            _ => bail!("lemma-haynes with --n needs a finite --p"),
        };
        let n = args.n.context("--n is required with --psi")?;
        let psi = parse_rational(args.psi.as_deref().context("--psi is required with --n")?)?;
        vec![lemma_haynes_check(p, n, &psi)?]
    } else {
        if let Some(max_n) = args.max_n {
            match args.check.as_str() {
                "lemma-haynes" => config.lemma_max_n = max_n,
                "moebius-count" => config.moebius_max_n = max_n,
                "arithmetic" => config.arith_max_n = max_n,
                other => bail!("--max-n does not apply to check {other:?}"),
            }
        }
        let names: Vec<&str> = match args.check.as_str() {
            "all" => CHECK_NAMES.to_vec(),
            name if CHECK_NAMES.contains(&name) => vec![name],
            other => bail!("unknown check {other:?}; expected all or one of {}", CHECK_NAMES.join(", ")),
        };
        let batches: Vec<Vec<CheckReport>> = pool(args.parallel)?.install(|| {
            names.par_iter().map(|name| verification::run_check(name, &config)).collect::<padic_ds::Result<_>>()
        })?;
        batches.into_iter().flatten().collect()
    };
    let passed = reports.iter().all(|r| r.passed);
    let out = VerifyOutput { passed, reports };
    match args.format {
        Format::Table => {
            for r in &out.reports {
                println!("{:<4}  {:<18}  {}", if r.passed { "pass" } else { "FAIL" }, r.name, r.params);
            }
        }
        _ => print_json(&out)?,
    }
    Ok(if passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

pub fn spectrum(args: SpectrumArgs) -> Result<ExitCode> {
    let Place::Prime(p) = args.p else {
        bail!("the spectrum is defined for finite primes");
    };
    let out = match (&args.x, &args.digits) {
        (Some(x), _) => {
            let x = parse_rational(x)?;
            let m = spectrum_membership(p, &x, args.family)?;
            let mut out = json!({
                "p": p,
                "family": args.family,
                "x": frac(&x),
                "member": m.member,
                "digits": m.digits,
            });
            if args.approx {
                out["approx"] = json!({ "x": rational::approx(&x, 12) });
            }
            out
        }
        (None, Some(d)) => {
            let digits = SpectrumDigits::parse(p, d)?;
            let value = spectrum_value(&digits, args.family)?;
            let mut out = json!({ "p": p, "family": args.family, "digits": d, "value": frac(&value) });
            if args.approx {
                out["approx"] = json!({ "value": rational::approx(&value, 12) });
            }
            out
        }
        (None, None) => bail!("spectrum needs --x or --digits"),
    };
    print_json(&out)?;
    Ok(ExitCode::SUCCESS)
}
