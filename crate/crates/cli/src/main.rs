//! `nbgeo`: analysis runs, theorem verification, identity checks and
//! oracle comparisons for normal bundles of surfaces in R³.
//!
//! Exit codes: 0 success, 1 criterion failure, 2 usage or configuration
//! error, 3 numerical failure.

use clap::{Args, Parser, Subcommand, ValueEnum};
use nbgeo::classify::{sample_and_verify, ResidualReport, SampleOptions, DEFAULT_T_SET, DEFAULT_TOL};
use nbgeo::par::{self, Execution};
use nbgeo::report;
use nbgeo::surface::{catalog_surface, SurfaceChart, SurfaceDoc};
use nbgeo::verify::{self, IdentityErrors, OracleErrors, VerifyConfig, VerifySummary};
use nbgeo::Error;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "nbgeo", version, about = "Geometry of normal bundles of surfaces immersed in C^3")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample residuals over a grid and report a verdict.
    Analyze(AnalyzeArgs),
    /// Run the acceptance matrix; exit 0 only if every criterion passes.
    VerifyTheorem(VerifyArgs),
    /// Compare extracted polynomial coefficients with their closed forms.
    Identities(IdentityArgs),
    /// Compare closed-form and brute-force H and F_ij on random points.
    OracleCompare(OracleArgs),
}

#[derive(Args, Debug)]
struct SurfaceArgs {
    /// Catalog surface: sphere, cylinder, cone, plane, ellipsoid, torus, catenoid, graph.
    #[arg(long, conflicts_with = "surface_file")]
    surface: Option<String>,
    /// JSON surface definition.
    #[arg(long)]
    surface_file: Option<PathBuf>,
    /// Surface parameter, repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE", value_parser = parse_param)]
    params: Vec<(String, f64)>,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[command(flatten)]
    surface: SurfaceArgs,
    /// Grid size.
    #[arg(long, default_value = "32x32", value_parser = parse_grid)]
    grid: (usize, usize),
    /// Comma-separated fibre coordinates.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = DEFAULT_T_SET)]
    t_samples: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Skip the finite-difference field residuals.
    #[arg(long)]
    no_fields: bool,
    /// Compare with the oracle on every n-th grid point (0: off).
    #[arg(long, default_value_t = 0)]
    oracle_stride: usize,
    #[arg(long)]
    sequential: bool,
    #[command(flatten)]
    output: OutputArgs,
    #[arg(long, hide = true)]
    inject_sign_error: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Comma-separated criterion numbers or names.
    #[arg(long, value_delimiter = ',')]
    only: Vec<String>,
    #[arg(long, default_value = "32x32", value_parser = parse_grid)]
    grid: (usize, usize),
    /// Random trials for the identity criterion.
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long)]
    sequential: bool,
    /// Write the outcome table as JSON.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, hide = true)]
    inject_sign_error: bool,
}

#[derive(Args, Debug)]
struct IdentityArgs {
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OracleArgs {
    /// Restrict to one surface; default is the whole catalog plus the cone with r=2.
    #[command(flatten)]
    surface: SurfaceArgs,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    sequential: bool,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, hide = true)]
    inject_sign_error: bool,
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected KEY=VALUE, got `{s}`"))?;
    let v: f64 = v.trim().parse().map_err(|_| format!("`{v}` is not a number"))?;
    Ok((k.trim().to_string(), v))
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected NUxNV, got `{s}`"))?;
    let nu: usize = a.trim().parse().map_err(|_| format!("bad grid size `{a}`"))?;
    let nv: usize = b.trim().parse().map_err(|_| format!("bad grid size `{b}`"))?;
    if nu < 2 || nv < 2 {
        return Err(format!("grid dimensions must be at least 2, got {nu}x{nv}"));
    }
    Ok((nu, nv))
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: if e.is_numerical() { 3 } else { 2 }, message: e.to_string() }
    }
}

fn config(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn load_surface(args: &SurfaceArgs) -> Result<Option<SurfaceChart>, Failure> {
    let params: BTreeMap<String, f64> = args.params.iter().cloned().collect();
    if let Some(path) = &args.surface_file {
        if !params.is_empty() {
            return Err(config("--param cannot be combined with --surface-file"));
        }
        let text = std::fs::read_to_string(path).map_err(|e| config(format!("{}: {e}", path.display())))?;
        let doc = SurfaceDoc::from_json(&text).map_err(|e| config(format!("{}: {e}", path.display())))?;
        return Ok(Some(doc.to_chart()?));
    }
    match &args.surface {
        Some(name) => Ok(Some(catalog_surface(name, &params)?)),
        None if params.is_empty() => Ok(None),
        None => Err(config("--param requires --surface")),
    }
}

fn write_text(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| config(format!("{}: {e}", p.display()))),
        None => {
            use std::io::Write;
            match std::io::stdout().lock().write_all(text.as_bytes()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(config(format!("stdout: {e}"))),
                _ => Ok(()),
            }
        }
    }
}

fn write_json<T: Serialize>(path: Option<&Path>, body: &T) -> Result<(), Failure> {
    write_text(path, &report::to_json(body)?)
}

fn write_report(out: &OutputArgs, r: &ResidualReport) -> Result<(), Failure> {
    match out.format {
        Format::Json => {
            write_json(out.output.as_deref(), r)?;
            if let Some(p) = &out.output {
                write_text(Some(&p.with_extension("csv")), &report::to_csv(r)?)?;
            }
            Ok(())
        }
        Format::Csv => write_text(out.output.as_deref(), &report::to_csv(r)?),
    }
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<u8, Failure> {
    let chart = load_surface(&args.surface)?.ok_or_else(|| config("analyze needs --surface or --surface-file"))?;
    let opts = SampleOptions {
        execution: execution(args.sequential),
        fields: !args.no_fields,
        oracle_stride: args.oracle_stride,
        inject_sign_error: args.inject_sign_error,
    };
    let r = sample_and_verify(&chart, args.grid, &args.t_samples, args.tol, &opts)?;
    write_report(&args.output, &r)?;
    let shape = r.shape.map(|s| format!("{:?}", s.shape)).unwrap_or_else(|| "n/a".into());
    let fhat = match r.aggregates.fhat.count {
        0 => "n/a".to_string(),
        _ => format!("{:.3e}", r.aggregates.fhat.max),
    };
    eprintln!("{}: verdict {:?}, shape {shape}, max F̂ {fhat}, {} samples", chart.name(), r.verdict, r.samples.len());
    Ok(0)
}

fn cmd_verify(args: &VerifyArgs) -> Result<u8, Failure> {
    let mut only = Vec::new();
    for s in &args.only {
        let id = verify::parse_criterion(s).ok_or_else(|| {
            config(format!("unknown criterion `{s}` (use 1-9 or one of {:?})", verify::CRITERIA))
        })?;
        only.push(id);
    }
    let cfg = VerifyConfig {
        seed: args.seed,
        grid: args.grid,
        identity_trials: args.trials,
        only,
        inject_sign_error: args.inject_sign_error,
        execution: execution(args.sequential),
        ..VerifyConfig::default()
    };
    let outcomes = verify::run(&cfg);
    for o in &outcomes {
        println!("{}", o.line());
    }
    let summary = VerifySummary::new(args.seed, outcomes);
    let failed = summary.criteria.iter().filter(|c| !c.passed).count();
    println!("{} of {} criteria passed", summary.criteria.len() - failed, summary.criteria.len());
    if let Some(p) = &args.output {
        write_json(Some(p), &summary)?;
    }
    Ok(if summary.passed { 0 } else { 1 })
}

#[derive(Serialize)]
struct IdentityReport {
    seed: u64,
    passed: bool,
    errors: IdentityErrors,
}

fn cmd_identities(args: &IdentityArgs) -> Result<u8, Failure> {
    if args.trials == 0 {
        return Err(config("--trials must be positive"));
    }
    let errors = verify::identity_errors(args.trials, args.seed)?;
    let passed = errors.within_tolerance();
    println!("trials per family    {}", errors.trials);
    println!("f1/g1 max rel error  {:.3e}", errors.first_order);
    println!("f3/g3 max rel error  {:.3e}", errors.third_order);
    println!("isoparametric max    {:.3e}", errors.isoparametric);
    println!("max condition number {:.3e}", errors.max_condition);
    println!("{}", if passed { "PASS" } else { "FAIL" });
    if let Some(p) = &args.output {
        write_json(Some(p), &IdentityReport { seed: args.seed, passed, errors })?;
    }
    Ok(if passed { 0 } else { 1 })
}

#[derive(Serialize)]
struct OracleRow {
    surface: String,
    params: BTreeMap<String, f64>,
    passed: bool,
    errors: OracleErrors,
}

#[derive(Serialize)]
struct OracleReport {
    seed: u64,
    passed: bool,
    surfaces: Vec<OracleRow>,
}

fn cmd_oracle(args: &OracleArgs) -> Result<u8, Failure> {
    if args.trials == 0 {
        return Err(config("--trials must be positive"));
    }
    let charts = match load_surface(&args.surface)? {
        Some(c) => vec![c],
        None => verify::oracle_surfaces()?,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut rows = Vec::new();
    println!("{:<28} {:>12} {:>12} {:>8}", "surface", "max dH", "max dF", "status");
    for c in &charts {
        let errors = verify::oracle_errors(c, args.trials, &mut rng, execution(args.sequential), args.inject_sign_error)?;
        let passed = errors.within_tolerance();
        let ps: Vec<String> = c.params().iter().map(|(k, v)| format!("{k}={v}")).collect();
        println!(
            "{:<28} {:>12.3e} {:>12.3e} {:>8}",
            format!("{} {}", c.name(), ps.join(",")),
            errors.h,
            errors.f,
            if passed { "PASS" } else { "FAIL" }
        );
        rows.push(OracleRow { surface: c.name().to_string(), params: c.params().clone(), passed, errors });
    }
    let passed = rows.iter().all(|r| r.passed);
    if let Some(p) = &args.output {
        write_json(Some(p), &OracleReport { seed: args.seed, passed, surfaces: rows })?;
    }
    Ok(if passed { 0 } else { 1 })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Ok(v) = std::env::var("NBGEO_THREADS") {
        match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => {
                par::configure_threads(n);
            }
            _ => {
                eprintln!("error: NBGEO_THREADS must be a positive integer, got `{v}`");
                return ExitCode::from(2);
            }
        }
    }
    let result = match &cli.command {
        Command::Analyze(a) => cmd_analyze(a),
        Command::VerifyTheorem(a) => cmd_verify(a),
        Command::Identities(a) => cmd_identities(a),
        Command::OracleCompare(a) => cmd_oracle(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_and_param_parsing() {
        assert_eq!(parse_grid("32x16"), Ok((32, 16)));
        assert_eq!(parse_grid("8X8"), Ok((8, 8)));
        assert!(parse_grid("8").is_err());
        assert!(parse_grid("1x8").is_err());
        assert_eq!(parse_param("r=2.5"), Ok(("r".to_string(), 2.5)));
        assert!(parse_param("r").is_err());
        assert!(parse_param("r=x").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
