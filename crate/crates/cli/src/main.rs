//! Command-line surface: compute metrics between distribution files,
//! regularize a law, run bound suites, and estimate empirical constants.
//!
//! Exit codes: 0 = success / all satisfied, 1 = at least one explicit-bound
//! violation, 2 = usage or input error.

use clap::{Parser, Subcommand, ValueEnum};
use cramer_core::bounds;
use cramer_core::harness::{self, SuiteConfig, SuiteReport};
use cramer_core::metrics;
use cramer_core::regularize::{regularize, RegularizationParams};
use cramer_core::{Distribution, Tolerances};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "cramer",
    version,
    about = "Probability metrics, entropic distance to normality, Gaussian regularization, and stability-inequality suites for one-dimensional laws"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MetricName {
    Levy,
    Kolmogorov,
    W1,
    Tv,
    Entropic,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a distance between two distribution files (entropic is unary).
    Metric {
        #[arg(long = "dist-a")]
        dist_a: PathBuf,
        #[arg(long = "dist-b")]
        dist_b: Option<PathBuf>,
        #[arg(long, value_enum)]
        metric: MetricName,
        /// Tolerance overrides, KEY=VAL (quad_abs_tol, root_tol, sup_grid_points, tail_cutoff).
        #[arg(long = "tol")]
        tol: Vec<String>,
    },
    /// Write the Gaussian regularization X + sigma Z of a distribution.
    Regularize {
        #[arg(long = "dist-a")]
        dist_a: PathBuf,
        #[arg(long)]
        sigma: f64,
        /// Output path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an inequality suite from a config file and write the report.
    Check {
        #[arg(long)]
        suite: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Override the family rng seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long = "tol")]
        tol: Vec<String>,
    },
    /// Estimate the empirical constant of a constant-mode bound.
    Estimate {
        #[arg(long)]
        bound: String,
        #[arg(long)]
        suite: PathBuf,
        #[arg(long, default_value_t = 2)]
        levels: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long = "tol")]
        tol: Vec<String>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Metric { dist_a, dist_b, metric, tol } => {
            cmd_metric(&dist_a, dist_b.as_deref(), metric, &tol)
        }
        Command::Regularize { dist_a, sigma, out } => cmd_regularize(&dist_a, sigma, out.as_deref()),
        Command::Check { suite, out, format, seed, tol } => {
            cmd_check(&suite, &out, format, seed, &tol)
        }
        Command::Estimate { bound, suite, levels, out, seed, tol } => {
            cmd_estimate(&bound, &suite, levels, out.as_deref(), seed, &tol)
        }
    }
}

fn load_distribution(path: &Path) -> Result<Distribution, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| fail(2, format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| fail(2, format!("{} is not a valid distribution: {e}", path.display())))
}

fn apply_tol_overrides(mut tol: Tolerances, overrides: &[String]) -> Result<Tolerances, Failure> {
    for kv in overrides {
        let (key, val) = kv
            .split_once('=')
            .ok_or_else(|| fail(2, format!("--tol expects KEY=VAL, got `{kv}`")))?;
        let parse = |v: &str| {
            v.parse::<f64>()
                .map_err(|_| fail(2, format!("--tol {key}: `{v}` is not a number")))
        };
        match key {
            "quad_abs_tol" => tol.quad_abs_tol = parse(val)?,
            "root_tol" => tol.root_tol = parse(val)?,
            "tail_cutoff" => tol.tail_cutoff = parse(val)?,
            "sup_grid_points" => {
                tol.sup_grid_points = val
                    .parse::<usize>()
                    .map_err(|_| fail(2, format!("--tol sup_grid_points: `{val}` is not an integer")))?
            }
            other => {
                return Err(fail(
                    2,
                    format!("unknown tolerance key `{other}` (expected quad_abs_tol, root_tol, sup_grid_points, tail_cutoff)"),
                ))
            }
        }
    }
    Tolerances::new(tol.quad_abs_tol, tol.root_tol, tol.sup_grid_points, tol.tail_cutoff)
        .map_err(|e| fail(2, e.to_string()))
}

fn cmd_metric(
    dist_a: &Path,
    dist_b: Option<&Path>,
    metric: MetricName,
    tol_overrides: &[String],
) -> Result<u8, Failure> {
    let tol = apply_tol_overrides(Tolerances::default(), tol_overrides)?;
    let a = load_distribution(dist_a)?;
    let out = match metric {
        MetricName::Entropic => {
            let e = metrics::entropic_distance(&a, &tol).map_err(|e| fail(2, e.to_string()))?;
            let value = if e.value.is_finite() {
                serde_json::json!(e.value)
            } else {
                serde_json::json!("infinity")
            };
            serde_json::json!({
                "value": value,
                "err_estimate": e.err_estimate,
                "method": "quadrature",
                "centering": [e.centering.0, e.centering.1],
            })
        }
        name => {
            let b_path = dist_b.ok_or_else(|| fail(2, "--dist-b is required for two-input metrics"))?;
            let b = load_distribution(b_path)?;
            let m = match name {
                MetricName::Levy => metrics::levy(&a, &b, &tol),
                MetricName::Kolmogorov => metrics::kolmogorov(&a, &b, &tol),
                MetricName::W1 => metrics::w1(&a, &b, &tol),
                MetricName::Tv => metrics::tv(&a, &b, &tol),
                MetricName::Entropic => unreachable!(),
            };
            serde_json::to_value(m).expect("metric value serializes")
        }
    };
    println!("{}", serde_json::to_string_pretty(&out).expect("json"));
    Ok(0)
}

fn cmd_regularize(dist_a: &Path, sigma: f64, out: Option<&Path>) -> Result<u8, Failure> {
    let a = load_distribution(dist_a)?;
    let params = RegularizationParams::new(sigma)
        .or_else(|_| RegularizationParams::with_override(sigma))
        .map_err(|e| fail(2, e.to_string()))?;
    if params.override_used() {
        eprintln!("note: sigma > 1 override in effect");
    }
    let r = regularize(&a, &params).map_err(|e| fail(2, e.to_string()))?;
    let text = serde_json::to_string_pretty(&r).expect("distribution serializes");
    match out {
        Some(p) => std::fs::write(p, text.as_bytes())
            .map_err(|e| fail(2, format!("cannot write {}: {e}", p.display())))?,
        None => println!("{text}"),
    }
    Ok(0)
}

fn load_suite(path: &Path, seed: Option<u64>) -> Result<SuiteConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| fail(2, format!("cannot read {}: {e}", path.display())))?;
    let mut config: SuiteConfig = serde_json::from_str(&text)
        .map_err(|e| fail(2, format!("{} is not a valid suite config: {e}", path.display())))?;
    if let Some(seed) = seed {
        config.family.rng_seed = seed;
    }
    Ok(config)
}

/// Fixed 12 significant digits, '.' decimal separator.
fn sig12(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.11e}")
    } else {
        x.to_string()
    }
}

fn report_to_csv(report: &SuiteReport) -> String {
    let mut s = String::from("bound_id,input_descriptor,lhs,rhs,ratio,satisfied,err_budget\n");
    for r in &report.reports {
        s.push_str(&format!(
            "{},\"{}\",{},{},{},{},{}\n",
            r.bound_id,
            r.input_descriptor,
            sig12(r.lhs),
            sig12(r.rhs),
            r.ratio.map(sig12).unwrap_or_default(),
            r.satisfied.map(|b| b.to_string()).unwrap_or_default(),
            sig12(r.err_budget),
        ));
    }
    for sk in &report.skipped {
        s.push_str(&format!("{},\"{}\",,,,skipped: {},\n", sk.bound_id, sk.input_descriptor, sk.reason));
    }
    s
}

fn cmd_check(
    suite: &Path,
    out: &Path,
    format: Format,
    seed: Option<u64>,
    tol_overrides: &[String],
) -> Result<u8, Failure> {
    let config = load_suite(suite, seed)?;
    let tol = apply_tol_overrides(config.tolerances.unwrap_or_default(), tol_overrides)?;
    let bound_ids: Vec<String> = match &config.bounds {
        Some(ids) => ids.clone(),
        None => bounds::valid_ids().iter().map(|s| s.to_string()).collect(),
    };
    let started = Instant::now();
    let report = harness::run_suite(&bound_ids, &config.family, &tol).map_err(|e| match e {
        cramer_core::Error::UnknownBound { .. } | cramer_core::Error::Config(_) => {
            fail(2, e.to_string())
        }
        other => fail(2, other.to_string()),
    })?;
    let text = match format {
        Format::Json => {
            let mut t = serde_json::to_string_pretty(&report).expect("report serializes");
            t.push('\n');
            t
        }
        Format::Csv => report_to_csv(&report),
    };
    std::fs::write(out, text.as_bytes())
        .map_err(|e| fail(2, format!("cannot write {}: {e}", out.display())))?;
    eprintln!(
        "checked {} combinations ({} skipped) in {:.1}s: {} violation(s)",
        report.reports.len(),
        report.skipped.len(),
        started.elapsed().as_secs_f64(),
        report.violations.len()
    );
    for v in &report.violations {
        eprintln!("violation: {} on {} (lhs {} > rhs {})", v.bound_id, v.input_descriptor, v.lhs, v.rhs);
    }
    Ok(if report.has_violations() { 1 } else { 0 })
}

fn cmd_estimate(
    bound: &str,
    suite: &Path,
    levels: usize,
    out: Option<&Path>,
    seed: Option<u64>,
    tol_overrides: &[String],
) -> Result<u8, Failure> {
    let config = load_suite(suite, seed)?;
    let tol = apply_tol_overrides(config.tolerances.unwrap_or_default(), tol_overrides)?;
    let started = Instant::now();
    let est = harness::estimate_constant(bound, &config.family, levels, &tol)
        .map_err(|e| fail(2, e.to_string()))?;
    let mut csv = String::from("bound_id,family_member,ratio,level\n");
    for r in &est.records {
        csv.push_str(&format!(
            "{},\"{}\",{},{}\n",
            r.bound_id,
            r.family_member,
            sig12(r.ratio),
            r.level
        ));
    }
    match out {
        Some(p) => std::fs::write(p, csv.as_bytes())
            .map_err(|e| fail(2, format!("cannot write {}: {e}", p.display())))?,
        None => print!("{csv}"),
    }
    eprintln!(
        "empirical constant for {}: {:.6e} (stability {:.3e}) in {:.1}s",
        est.bound_id,
        est.empirical_c,
        est.stability,
        started.elapsed().as_secs_f64()
    );
    Ok(0)
}
