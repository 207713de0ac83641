//! Command-line front end.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use ndspressure::pressure::DepthScheme;
use ndspressure::NdsError;

use crate::config::{self, ConfigError, MeasureSpec, PotentialSpec, SystemFile};
use crate::harness::{Harness, HarnessConfig, Suite};
use crate::instance::{estimate_quantity, integrated_measure, Instance, QuantityKind};
use crate::output::{estimate_rows, summary, write_csv, write_csv_file, Row};
use crate::zoo;

/// Every check passed.
pub const EXIT_OK: i32 = 0;
/// A check failed, or a run error other than the two below.
pub const EXIT_FAILED: i32 = 1;
/// Malformed configuration or arguments.
pub const EXIT_CONFIG: i32 = 2;
/// No admissible cover family exists for a requested estimate.
pub const EXIT_INFEASIBLE: i32 = 3;

/// Pressures and entropies of nonautonomous systems on finite carriers.
#[derive(Debug, Parser)]
#[command(name = "ndspressure", version)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate quantities on one system.
    Estimate(EstimateArgs),
    /// Run check suites over the built-in zoo.
    Verify(VerifyArgs),
    /// Per-radius and per-depth critical exponents.
    Sweep(EstimateArgs),
    /// Write the configuration of a zoo instance.
    Define(DefineArgs),
}

#[derive(Debug, Args)]
struct EstimateArgs {
    /// System file, or the name of a zoo instance.
    #[arg(long)]
    system: String,
    /// Comma-separated quantities.
    #[arg(long, default_value = "bowen-entropy", value_delimiter = ',')]
    quantity: Vec<QuantityKind>,
    /// Potential file.
    #[arg(long)]
    potential: Option<PathBuf>,
    /// Measure file; adds integrated local pressures.
    #[arg(long)]
    measure: Option<PathBuf>,
    /// Comma-separated radii, overriding the system file.
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    /// Largest depth, overriding the system file.
    #[arg(long)]
    nmax: Option<usize>,
    /// Seed for measure sampling.
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    /// Monte Carlo points for product measures.
    #[arg(long, default_value_t = 500)]
    samples: usize,
    /// Directory for the CSV output (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Suite name, or `all`.
    #[arg(long, default_value = "all")]
    suite: String,
    /// Tolerance of grid-backed checks.
    #[arg(long)]
    tol: Option<f64>,
    /// Seed for every random choice.
    #[arg(long, default_value_t = HarnessConfig::default().seed)]
    seed: u64,
    /// Directory for one CSV per suite and a summary.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DefineArgs {
    /// Zoo instance name; omit to list the names.
    name: Option<String>,
    /// Output file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Load a system by path, or by zoo name when no such file exists.
pub fn resolve_system(arg: &str) -> Result<SystemFile, ConfigError> {
    let path = Path::new(arg);
    if path.exists() {
        return config::load_system(path);
    }
    zoo::get(arg).ok_or_else(|| ConfigError(format!("`{arg}` is neither a file nor a zoo instance ({})", zoo::NAMES.join(", "))))
}

fn load_instance(a: &EstimateArgs) -> Result<(Instance, PotentialSpec, Option<MeasureSpec>), ConfigError> {
    let mut file = resolve_system(&a.system)?;
    if let Some(eps) = &a.eps {
        file.estimator.eps = eps.clone();
    }
    if let Some(n) = a.nmax {
        file.estimator.n_max = n;
        if let config::SchemeSpec::Window { hi, .. } = &mut file.estimator.scheme {
            *hi = (*hi).min(n);
        }
    }
    let potential = a.potential.as_deref().map(config::load).transpose()?.unwrap_or_default();
    let measure = a.measure.as_deref().map(config::load).transpose()?;
    Ok((Instance::build(file)?, potential, measure))
}

fn emit(out: Option<&Path>, name: &str, rows: &[Row]) -> anyhow::Result<()> {
    match out {
        Some(dir) => write_csv_file(&dir.join(name), rows),
        None => Ok(write_csv(std::io::stdout().lock(), rows)?),
    }
}

fn measure_rows(inst: &Instance, potential: &PotentialSpec, measure: &MeasureSpec, a: &EstimateArgs) -> anyhow::Result<Vec<Row>> {
    let t = Instant::now();
    let cfg = inst.config();
    let r = integrated_measure(inst, potential, measure, &cfg, a.samples, a.seed)?;
    let ms = t.elapsed().as_millis();
    let note = format!("{} points, stderr {:.2e}/{:.2e}, excluded mass {}", r.samples, r.lower_stderr, r.upper_stderr, r.excluded_mass);
    Ok([("integrated-lower", r.lower), ("integrated-upper", r.upper)]
        .into_iter()
        .map(|(q, v)| Row {
            instance: inst.label().into(),
            quantity: q.into(),
            eps: cfg.eps_schedule.last().copied(),
            n: None,
            n_max: Some(cfg.n_max),
            s_star: None,
            value: v,
            lower: None,
            upper: None,
            pass: None,
            runtime_ms: ms,
            suite: String::new(),
            check: String::new(),
            informative: None,
            diagnostics: note.clone(),
        })
        .collect())
}

fn run_estimate(a: &EstimateArgs) -> anyhow::Result<i32> {
    let (inst, potential, measure) = load_instance(a)?;
    let cfg = inst.config();
    let mut rows = Vec::new();
    for &q in &a.quantity {
        let t = Instant::now();
        let e = estimate_quantity(&inst, &potential, q, &cfg)?;
        rows.extend(estimate_rows(inst.label(), &q.to_string(), &e, t.elapsed().as_millis()));
    }
    if let Some(m) = &measure {
        rows.extend(measure_rows(&inst, &potential, m, a)?);
    }
    emit(a.out.as_deref(), "estimate.csv", &rows)?;
    Ok(EXIT_OK)
}

fn run_sweep(a: &EstimateArgs) -> anyhow::Result<i32> {
    let (inst, potential, _) = load_instance(a)?;
    let base = inst.config();
    let mut rows = Vec::new();
    for &q in &a.quantity {
        for &eps in &base.eps_schedule {
            let single = ndspressure::pressure::EstimatorConfig { eps_schedule: vec![eps], ..base.clone() };
            let t = Instant::now();
            let e = estimate_quantity(&inst, &potential, q, &single)?;
            let mut r = estimate_rows(inst.label(), &q.to_string(), &e, t.elapsed().as_millis());
            r.iter_mut().for_each(|row| row.check = "critical-exponent".into());
            rows.extend(r);
            // Fixed-depth crossings s_N.
            let top = e.per_eps.last().map_or(base.n_max, |p| p.resolved_depth.max(1));
            let lo = match base.scheme {
                DepthScheme::Window { lo, .. } => lo,
                _ => 1,
            };
            for n in lo..=top {
                let fixed = ndspressure::pressure::EstimatorConfig { scheme: DepthScheme::Window { lo: n, hi: n }, ..single.clone() };
                let t = Instant::now();
                let e = estimate_quantity(&inst, &potential, q, &fixed)?;
                let mut r = estimate_rows(inst.label(), &q.to_string(), &e, t.elapsed().as_millis());
                r.iter_mut().for_each(|row| {
                    row.check = "fixed-depth".into();
                    row.n = Some(n);
                });
                rows.extend(r);
            }
        }
    }
    emit(a.out.as_deref(), "sweep.csv", &rows)?;
    Ok(EXIT_OK)
}

fn run_verify(a: &VerifyArgs) -> anyhow::Result<i32> {
    let suites: Vec<Suite> = if a.suite == "all" {
        Suite::ALL.to_vec()
    } else {
        a.suite.split(',').map(|s| s.trim().parse::<Suite>().map_err(ConfigError)).collect::<Result<_, _>>()?
    };
    let mut cfg = HarnessConfig { seed: a.seed, ..HarnessConfig::default() };
    if let Some(tol) = a.tol {
        if !(tol > 0.0) {
            return Err(ConfigError("--tol must be positive".into()).into());
        }
        cfg.grid_tol = tol;
    }
    let harness = Harness::new(cfg)?;
    let results = harness.run_all(&suites)?;
    let mut all = Vec::new();
    for (suite, reports) in &results {
        if let Some(dir) = &a.out {
            let rows: Vec<Row> = reports.iter().map(Row::from).collect();
            write_csv_file(&dir.join(format!("{suite}.csv")), &rows)?;
        }
        all.extend(reports.iter().cloned());
    }
    let text = summary(&all);
    if let Some(dir) = &a.out {
        std::fs::write(dir.join("summary.txt"), &text)?;
    }
    std::io::stdout().lock().write_all(text.as_bytes())?;
    Ok(if all.iter().any(|r| r.failed()) { EXIT_FAILED } else { EXIT_OK })
}

fn run_define(a: &DefineArgs) -> anyhow::Result<i32> {
    let Some(name) = &a.name else {
        println!("{}", zoo::NAMES.join("\n"));
        return Ok(EXIT_OK);
    };
    let file = zoo::get(name).ok_or_else(|| ConfigError(format!("no zoo instance `{name}` ({})", zoo::NAMES.join(", "))))?;
    let text = config::to_toml(&file)?;
    match &a.out {
        Some(p) => std::fs::write(p, text).with_context(|| p.display().to_string())?,
        None => print!("{text}"),
    }
    Ok(EXIT_OK)
}

/// Exit code for an error: configuration problems and infeasible
/// estimates get their own codes.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if cause.downcast_ref::<ConfigError>().is_some() {
            return EXIT_CONFIG;
        }
        if let Some(NdsError::Infeasible { .. }) = cause.downcast_ref::<NdsError>() {
            return EXIT_INFEASIBLE;
        }
    }
    EXIT_FAILED
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Estimate(a) => run_estimate(a),
        Command::Verify(a) => run_verify(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Define(a) => run_define(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}
