//! Command-line front end: argument types, command dispatch and exit codes.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::ops::RangeInclusive;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::caps::Caps;
use crate::cert_measure::{matrix_check_measure, slackness_check_measure, DualCertificateMeasure};
use crate::cert_uniform::{matrix_check_uniform, slackness_check_uniform, DualCertificateUniform};
use crate::error::Error;
use crate::exactnum::{binom_q, format_rational, parse_rational, pow, rat, Rational};
use crate::hamming::verify_fact31;
use crate::oracle::{max_product_measure, max_product_uniform, ExtremalReport, MEASURE_MAX_N};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MATH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "cross-sdp", version, about = "Exact SDP certificates for cross 2-intersecting families")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build and check the k-uniform certificate.
    VerifyUniform {
        /// Ground set size.
        #[arg(long)]
        n: u32,
        /// Set size.
        #[arg(long)]
        k: u32,
        /// Override eps1 ("num/den").
        #[arg(long, value_parser = rational_arg)]
        eps1: Option<Rational>,
        /// Write JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build and check the p-biased certificate.
    VerifyMeasure {
        /// Ground set size.
        #[arg(long)]
        n: u32,
        /// Bias ("num/den").
        #[arg(long, value_parser = rational_arg)]
        p: Rational,
        /// Override eps1 ("num/den").
        #[arg(long, value_parser = rational_arg)]
        eps1: Option<Rational>,
        /// Write JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check certificates over a parameter grid, one JSON line per instance.
    Scan(ScanArgs),
    /// Exhaustive optimum over cross t-intersecting pairs.
    Oracle {
        #[command(flatten)]
        setting: Setting,
        /// Required intersection size.
        #[arg(long, default_value_t = 2)]
        t: u32,
        /// Write JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Matrix-level checks and slackness against the oracle optima.
    Crosscheck {
        #[command(flatten)]
        setting: Setting,
        /// Write JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the certificate document.
    EmitCert {
        #[command(flatten)]
        setting: Setting,
        /// Override eps1 ("num/den").
        #[arg(long, value_parser = rational_arg)]
        eps1: Option<Rational>,
        /// Write JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false, id = "mode")]
pub struct Mode {
    /// k-uniform families.
    #[arg(long)]
    pub uniform: bool,
    /// p-biased families.
    #[arg(long)]
    pub measure: bool,
}

#[derive(Debug, Args)]
pub struct Setting {
    #[command(flatten)]
    pub mode: Mode,
    /// Ground set size.
    #[arg(long)]
    pub n: u32,
    /// Set size (uniform).
    #[arg(long)]
    pub k: Option<u32>,
    /// Bias ("num/den", measure).
    #[arg(long, value_parser = rational_arg)]
    pub p: Option<Rational>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub mode: Mode,
    /// Inclusive range "a..b" of k (uniform).
    #[arg(long, value_parser = range_arg)]
    pub k: Option<RangeInclusive<u32>>,
    /// Inclusive range of n - 3(k-1) (uniform).
    #[arg(long, value_parser = range_arg)]
    pub n_extra: Option<RangeInclusive<u32>>,
    /// Comma-separated list of p values (measure).
    #[arg(long, value_delimiter = ',', value_parser = rational_arg)]
    pub p: Vec<Rational>,
    /// Inclusive range of n (measure).
    #[arg(long, value_parser = range_arg)]
    pub n: Option<RangeInclusive<u32>>,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Write JSON here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

/// Parses `a..b` (inclusive) or a single integer.
pub fn range_arg(s: &str) -> Result<RangeInclusive<u32>, String> {
    let parse = |x: &str| x.trim().parse::<u32>().map_err(|e| format!("{x:?}: {e}"));
    match s.split_once("..") {
        Some((a, b)) => Ok(parse(a)?..=parse(b.trim_start_matches('='))?),
        None => {
            let v = parse(s)?;
            Ok(v..=v)
        }
    }
}

/// A command failure mapped to an exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::EmptyWindow(_)
            | Error::RadicandMismatch { .. }
            | Error::DimensionMismatch(_)
            | Error::InvalidRadicand(_) => EXIT_MATH,
            Error::CapExceeded { .. }
            | Error::DegenerateDenominator(_)
            | Error::OutOfRange(_)
            | Error::Unsupported(_)
            | Error::ParseRational(_) => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: e.to_string(),
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: msg.into(),
    }
}

type Outcome = Result<i32, Failure>;

fn sink(out: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit(out: &Option<PathBuf>, value: &Value, pretty: bool) -> io::Result<()> {
    let mut w = sink(out)?;
    if pretty {
        serde_json::to_writer_pretty(&mut w, value)?;
    } else {
        serde_json::to_writer(&mut w, value)?;
    }
    writeln!(w)?;
    w.flush()
}

fn exit_for(ok: bool) -> i32 {
    if ok {
        EXIT_OK
    } else {
        EXIT_MATH
    }
}

pub fn run(cli: Cli) -> Outcome {
    let caps = Caps::from_env();
    match cli.command {
        Command::VerifyUniform { n, k, eps1, out } => {
            let cert = uniform_cert(n, k, eps1)?;
            emit(&out, &serde_json::to_value(&cert).expect("serializes"), false)?;
            Ok(exit_for(cert.feasible))
        }
        Command::VerifyMeasure { n, p, eps1, out } => {
            let cert = measure_cert(n, &p, eps1)?;
            emit(&out, &serde_json::to_value(&cert).expect("serializes"), false)?;
            Ok(exit_for(cert.feasible))
        }
        Command::EmitCert { setting, eps1, out } => {
            let value = if setting.mode.uniform {
                let k = setting.k.ok_or_else(|| usage("--k is required with --uniform"))?;
                serde_json::to_value(uniform_cert(setting.n, k, eps1)?)
            } else {
                let p = setting.p.ok_or_else(|| usage("--p is required with --measure"))?;
                serde_json::to_value(measure_cert(setting.n, &p, eps1)?)
            };
            emit(&out, &value.expect("serializes"), true)?;
            Ok(EXIT_OK)
        }
        Command::Scan(args) => scan(args),
        Command::Oracle { setting, t, out } => {
            let report = if setting.mode.uniform {
                let k = setting.k.ok_or_else(|| usage("--k is required with --uniform"))?;
                max_product_uniform(setting.n, k, t)?
            } else {
                let p = setting.p.ok_or_else(|| usage("--p is required with --measure"))?;
                max_product_measure(setting.n, &p, t)?
            };
            let verdict = matches_theorem(&report);
            let mut value = report.to_json();
            value["matches_theorem"] = json!(verdict);
            emit(&out, &value, false)?;
            Ok(exit_for(verdict != Some(false)))
        }
        Command::Crosscheck { setting, out } => {
            let (value, ok) = if setting.mode.uniform {
                let k = setting.k.ok_or_else(|| usage("--k is required with --uniform"))?;
                crosscheck_uniform(setting.n, k, &caps)?
            } else {
                let p = setting.p.ok_or_else(|| usage("--p is required with --measure"))?;
                crosscheck_measure(setting.n, &p, &caps)?
            };
            emit(&out, &value, false)?;
            Ok(exit_for(ok))
        }
    }
}

fn uniform_cert(n: u32, k: u32, eps1: Option<Rational>) -> Result<DualCertificateUniform, Failure> {
    Ok(match eps1 {
        Some(e) => DualCertificateUniform::with_eps1(n, k, e)?,
        None => DualCertificateUniform::construct(n, k)?,
    })
}

fn measure_cert(n: u32, p: &Rational, eps1: Option<Rational>) -> Result<DualCertificateMeasure, Failure> {
    Ok(match eps1 {
        Some(e) => DualCertificateMeasure::with_eps1(p, n, e)?,
        None => DualCertificateMeasure::construct(p, n)?,
    })
}

/// Compares an oracle optimum with the applicable theorem; `None` when no
/// statement covers the parameters.
pub fn matches_theorem(r: &ExtremalReport) -> Option<bool> {
    let n = r.n as i64;
    let stars_only = || r.all_f_equals_g() && r.count("star_pair") == r.pairs.len();
    match (r.setting, r.k, &r.p, r.t) {
        ("uniform", Some(k), _, 2) if k >= 2 && n >= 3 * (k as i64 - 1) => {
            let alpha = binom_q(n - 2, k as i64 - 2);
            let allowed = |kind: &str| kind == "star_pair" || (kind == "kneser_type" && n == 3 * (k as i64 - 1));
            let shapes = r.all_f_equals_g() && r.classes.iter().all(|c| allowed(c.kind()));
            Some(r.optimum == &alpha * &alpha && shapes)
        }
        ("uniform", Some(k), _, 1) if n >= 2 * k as i64 => {
            let bound = binom_q(n - 1, k as i64 - 1);
            Some(r.optimum == &bound * &bound)
        }
        ("measure", _, Some(p), 2) if p <= &rat(1, 3) => {
            let bound = pow(p, 4);
            if n < 2 {
                return Some(r.optimum <= bound);
            }
            let unique = p == &rat(1, 3) || stars_only();
            Some(r.optimum == bound && unique)
        }
        ("measure", _, Some(p), 1) if p <= &rat(1, 2) => Some(r.optimum == p * p),
        _ => None,
    }
}

fn slackness_summary(reports: &[crate::certificate::SlacknessReport], need_strict: bool) -> (Value, bool) {
    let tight = reports.iter().all(|s| s.is_tight() && s.attains_bound());
    let identity = reports.iter().all(|s| s.duality_gap_identity);
    let strict = reports.iter().all(|s| s.z_strict);
    let ok = tight && identity && (strict || !need_strict);
    (
        json!({
            "pairs": reports.len(),
            "all_tight": tight,
            "duality_gap_identity": identity,
            "z_strict": strict,
        }),
        ok,
    )
}

/// Largest uniform conflict graph `crosscheck` hands to the oracle; the search
/// still accepts up to 128 vertices but takes minutes past this size.
pub const CROSSCHECK_VERTICES: usize = 84;

pub fn crosscheck_uniform(n: u32, k: u32, caps: &Caps) -> Result<(Value, bool), Failure> {
    let cert = DualCertificateUniform::construct(n, k)?;
    let matrix = matrix_check_uniform(&cert, caps.uniform)?;
    let mut ok = cert.feasible && matrix.psd && matrix.consistent() && matrix.z_support_exact;
    let mut notes: Vec<String> = Vec::new();
    let mut value = json!({
        "setting": "uniform",
        "n": n,
        "k": k,
        "certificate_feasible": cert.feasible,
        "matrix": matrix,
    });
    let vertices = crate::johnson::small_binom(n, k) as usize;
    if vertices <= CROSSCHECK_VERTICES {
        let report = max_product_uniform(n, k, 2)?;
        let slack: Vec<_> = report
            .pairs
            .iter()
            .map(|pr| {
                let (f, g) = report.family_masks(pr);
                slackness_check_uniform(&cert, &f, &g)
            })
            .collect();
        let (summary, slack_ok) = slackness_summary(&slack, true);
        let optimum_ok = report.optimum == &cert.alpha * &cert.alpha;
        ok &= slack_ok && optimum_ok;
        value["oracle_optimum"] = json!(format_rational(&report.optimum));
        value["alpha_squared"] = json!(format_rational(&(&cert.alpha * &cert.alpha)));
        value["slackness"] = summary;
    } else {
        notes.push(format!("oracle skipped: C({n},{k}) exceeds {CROSSCHECK_VERTICES}"));
    }
    value["notes"] = json!(notes);
    value["pass"] = json!(ok);
    Ok((value, ok))
}

pub fn crosscheck_measure(n: u32, p: &Rational, caps: &Caps) -> Result<(Value, bool), Failure> {
    let cert = DualCertificateMeasure::construct(p, n)?;
    let fact = verify_fact31(p, n, caps.measure)?;
    let matrix = matrix_check_measure(&cert, caps.measure)?;
    let mut ok = cert.feasible && fact.all_passed() && matrix.psd && matrix.consistent();
    let mut notes: Vec<String> = Vec::new();
    if cert.strict {
        ok &= matrix.z_support_exact;
    } else {
        notes.push("slackness positivity not strict (eps1=0)".into());
    }
    let mut value = json!({
        "setting": "measure",
        "n": n,
        "p": format_rational(p),
        "certificate_feasible": cert.feasible,
        "strict": cert.strict,
        "fact_items_passed": fact.all_passed(),
        "matrix": matrix,
    });
    if n <= MEASURE_MAX_N {
        let report = max_product_measure(n, p, 2)?;
        let slack = report
            .pairs
            .iter()
            .map(|pr| {
                let (f, g) = report.family_masks(pr);
                slackness_check_measure(&cert, &f, &g)
            })
            .collect::<crate::error::Result<Vec<_>>>()?;
        let attained = report.optimum == &cert.alpha * &cert.alpha;
        if attained {
            let (summary, slack_ok) = slackness_summary(&slack, cert.strict);
            ok &= slack_ok;
            value["slackness"] = summary;
        } else {
            ok &= report.optimum < &cert.alpha * &cert.alpha && !report.optimum.is_negative();
            notes.push("bound not attained at this n; slackness not applicable".into());
        }
        value["oracle_optimum"] = json!(format_rational(&report.optimum));
        value["alpha_squared"] = json!(format_rational(&(&cert.alpha * &cert.alpha)));
    } else {
        notes.push(format!("oracle skipped: n exceeds {MEASURE_MAX_N}"));
    }
    value["notes"] = json!(notes);
    value["pass"] = json!(ok);
    Ok((value, ok))
}

fn uniform_row(n: u32, k: u32) -> (Value, bool) {
    match DualCertificateUniform::construct(n, k) {
        Ok(c) => {
            let ok = c.feasible
                && c.blocks[0].u.is_zero()
                && c.blocks[0].v.is_zero()
                && c.blocks[1].margin_plus.is_zero();
            let row = json!({
                "setting": "uniform",
                "n": n,
                "k": k,
                "eps1_upper": c.eps1_window.upper.as_ref().map(format_rational),
                "eps1": format_rational(&c.eps1),
                "min_margin": format_rational(&c.min_margin()),
                "feasible": ok,
            });
            (row, ok)
        }
        Err(e) => (json!({"setting": "uniform", "n": n, "k": k, "error": e.to_string(), "feasible": false}), false),
    }
}

fn measure_row(n: u32, p: &Rational) -> (Value, bool) {
    match DualCertificateMeasure::construct(p, n) {
        Ok(c) => {
            let ok = c.feasible && c.blocks[0].u.is_zero() && c.blocks[0].v.is_zero();
            let row = json!({
                "setting": "measure",
                "n": n,
                "p": format_rational(p),
                "eps1_upper": c.eps1_window.upper.as_ref().map(format_rational),
                "window_is_point": c.eps1_window.is_point(),
                "eps1": format_rational(&c.eps1),
                "strict": c.strict,
                "min_margin": format_rational(&c.min_margin()),
                "feasible": ok,
            });
            (row, ok)
        }
        Err(e) => (
            json!({"setting": "measure", "n": n, "p": format_rational(p), "error": e.to_string(), "feasible": false}),
            false,
        ),
    }
}

enum Task {
    Uniform(u32, u32),
    Measure(u32, Rational),
}

fn scan(args: ScanArgs) -> Outcome {
    let tasks: Vec<Task> = if args.mode.uniform {
        let ks = args.k.clone().ok_or_else(|| usage("--k a..b is required with --uniform"))?;
        let extras = args.n_extra.clone().unwrap_or(0..=0);
        if ks.clone().any(|k| k < 3) {
            return Err(usage("uniform scans need k >= 3"));
        }
        ks.flat_map(|k| extras.clone().map(move |e| Task::Uniform(3 * (k - 1) + e, k)))
            .collect()
    } else {
        let ns = args.n.clone().ok_or_else(|| usage("--n a..b is required with --measure"))?;
        if args.p.is_empty() {
            return Err(usage("--p is required with --measure"));
        }
        if ns.contains(&0) {
            return Err(usage("n must be >= 1"));
        }
        for p in &args.p {
            if !p.is_positive() || p > &rat(1, 3) {
                return Err(usage(format!("p must lie in (0, 1/3], got {}", format_rational(p))));
            }
        }
        args.p
            .iter()
            .flat_map(|p| ns.clone().map(move |n| Task::Measure(n, p.clone())))
            .collect()
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = args.jobs {
        if j == 0 {
            return Err(usage("--jobs must be >= 1"));
        }
        builder = builder.num_threads(j);
    }
    let pool = builder.build().map_err(|e| usage(e.to_string()))?;
    let chunk = pool.current_num_threads() * 4;
    let mut w = sink(&args.out)?;
    let mut all_ok = true;
    for batch in tasks.chunks(chunk.max(1)) {
        let rows: Vec<(Value, bool)> = pool.install(|| {
            batch
                .par_iter()
                .map(|t| match t {
                    Task::Uniform(n, k) => uniform_row(*n, *k),
                    Task::Measure(n, p) => measure_row(*n, p),
                })
                .collect()
        });
        for (row, ok) in rows {
            all_ok &= ok;
            serde_json::to_writer(&mut w, &row).map_err(io::Error::from)?;
            writeln!(w)?;
        }
        w.flush()?;
    }
    Ok(exit_for(all_ok))
}
