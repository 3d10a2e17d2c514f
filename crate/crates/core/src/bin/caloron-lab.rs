//! Runs verification suites and writes a JSON report.

use std::path::PathBuf;
use std::process::ExitCode;

use caloron_core::cli::{parse_grid, parse_tol, run_checks, plan, ConfigLayer, GridField, SuiteField};
use clap::Parser;

/// Numerical verification suites for the caloron correspondence.
#[derive(Debug, Parser)]
#[command(name = "caloron-lab", version)]
struct Args {
    /// Suite name or `all`; repeat or comma-separate for several.
    #[arg(long, value_delimiter = ',')]
    suite: Vec<String>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Grid sizes `nx,ny,nt`.
    #[arg(long, value_parser = grid_arg)]
    grid: Option<String>,
    /// Degree of the twisted bundle (nonzero).
    #[arg(long, allow_negative_numbers = true)]
    degree: Option<i64>,
    /// Level-dependent checks run at levels 1..=k.
    #[arg(long)]
    level: Option<i64>,
    /// n of su(n).
    #[arg(long)]
    rank: Option<usize>,
    /// Report path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Tolerance override `check_id=value`; repeatable.
    #[arg(long, value_parser = tol_arg)]
    tol: Vec<(String, f64)>,
    /// JSON config file with the same keys; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// List the registered check ids and exit.
    #[arg(long)]
    list: bool,
}

fn grid_arg(s: &str) -> Result<String, String> {
    parse_grid(s).map(|_| s.to_string()).map_err(|e| e.to_string())
}

fn tol_arg(s: &str) -> Result<(String, f64), String> {
    parse_tol(s).map_err(|e| e.to_string())
}

fn run(args: Args) -> caloron_core::Result<bool> {
    let file = match &args.config {
        Some(p) => ConfigLayer::from_json(&std::fs::read_to_string(p)?)?,
        None => ConfigLayer::default(),
    };
    let flags = ConfigLayer {
        suite: (!args.suite.is_empty()).then_some(SuiteField::Many(args.suite)),
        seed: args.seed,
        grid: args.grid.map(GridField::Text),
        degree: args.degree,
        level: args.level,
        rank: args.rank,
        out: args.out,
        tol: (!args.tol.is_empty()).then(|| args.tol.into_iter().collect()),
    };
    let cfg = flags.over(file).resolve()?;
    let checks = plan(&cfg)?;
    if args.list {
        for c in &checks {
            println!("{}\t{:e}", c.id, c.tolerance);
        }
        return Ok(true);
    }
    let doc = run_checks(&cfg, &checks);
    let json = doc.to_json()?;
    match &cfg.out {
        Some(p) => std::fs::write(p, json)?,
        None => print!("{json}"),
    }
    for c in doc.checks.iter().filter(|c| !c.passed) {
        eprintln!("FAIL {} error {:e} > {:e}", c.check_id, c.error_norm, c.tolerance);
    }
    eprintln!(
        "{} checks, {} passed, {} failed",
        doc.summary.total, doc.summary.passed, doc.summary.failed
    );
    Ok(doc.all_passed())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("caloron-lab: {e}");
            ExitCode::from(2)
        }
    }
}
