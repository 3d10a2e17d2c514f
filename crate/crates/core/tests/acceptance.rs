//! Acceptance run: executes every suite at the default configuration and
//! prints one line per criterion.

use std::process::ExitCode;
use std::time::Instant;

use caloron_core::cli::{plan, run_checks, CheckReport, ReportDocument, SuiteConfig};

struct Criterion {
    id: u32,
    name: &'static str,
    prefixes: &'static [&'static str],
    /// Wall-clock budget for the matched checks, in seconds.
    budget: Option<f64>,
    min_instances: usize,
}

const CRITERIA: &[Criterion] = &[
    Criterion { id: 1, name: "algebra identities", prefixes: &["algebra."], budget: Some(30.0), min_instances: 100 },
    Criterion { id: 2, name: "caloron bijection", prefixes: &["caloron.roundtrip", "caloron.equivariance"], budget: Some(10.0), min_instances: 1 },
    Criterion { id: 3, name: "curvature identity", prefixes: &["caloron.curvature"], budget: None, min_instances: 1 },
    Criterion { id: 4, name: "equations of motion", prefixes: &["functionals.bf_pure_gauge", "functionals.eom_flow"], budget: None, min_instances: 1 },
    Criterion { id: 5, name: "CS quantization", prefixes: &["functionals.cs_"], budget: None, min_instances: 1 },
    Criterion { id: 6, name: "BF quantization", prefixes: &["gauge.lift_twist", "gauge.composite_mod_z"], budget: None, min_instances: 1 },
    Criterion { id: 7, name: "moment map ratio", prefixes: &["functionals.bw_ratio"], budget: None, min_instances: 20 },
    Criterion { id: 8, name: "MSV identity", prefixes: &["functionals.msv"], budget: None, min_instances: 1 },
    Criterion { id: 9, name: "Wilson orbit", prefixes: &["functionals.wilson_orbit"], budget: None, min_instances: 50 },
    Criterion { id: 10, name: "localization", prefixes: &["localization."], budget: Some(60.0), min_instances: 1 },
    Criterion { id: 11, name: "gerbe", prefixes: &["gerbe.lemma.torus", "gerbe.heisenberg"], budget: None, min_instances: 1 },
];

fn matched<'a>(doc: &'a ReportDocument, prefixes: &[&str]) -> Vec<&'a CheckReport> {
    doc.checks
        .iter()
        .filter(|c| prefixes.iter().any(|p| c.check_id.starts_with(p)))
        .collect()
}

fn main() -> ExitCode {
    let cfg = SuiteConfig::default();
    let checks = match plan(&cfg) {
        Ok(c) => c,
        Err(e) => {
            println!("FAIL planning: {e}");
            return ExitCode::FAILURE;
        }
    };
    let start = Instant::now();
    let doc = run_checks(&cfg, &checks);
    let total = start.elapsed().as_secs_f64();

    let mut ok = true;
    for c in CRITERIA {
        let hits = matched(&doc, c.prefixes);
        let failed: Vec<_> = hits.iter().filter(|r| !r.passed).collect();
        let secs = hits.iter().map(|r| r.runtime_ms).sum::<u64>() as f64 / 1e3;
        let instances: usize = hits.iter().map(|r| r.config.instances).sum();
        let worst = hits
            .iter()
            .map(|r| r.error_norm / r.tolerance)
            .fold(0.0f64, |m, v| if v.is_nan() { f64::INFINITY } else { m.max(v) });
        let in_budget = c.budget.is_none_or(|b| secs < b);
        let pass = !hits.is_empty() && failed.is_empty() && in_budget && instances >= c.min_instances;
        ok &= pass;
        println!(
            "{} criterion {:>2} {:<22} checks {:>3} instances {:>4} worst error/tol {:.2e} time {:.1}s{}",
            if pass { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            hits.len(),
            instances,
            worst,
            secs,
            c.budget.map(|b| format!(" (budget {b}s)")).unwrap_or_default(),
        );
        for r in failed {
            println!("     {} error {:e} > {:e}", r.check_id, r.error_norm, r.tolerance);
        }
    }
    let pass = doc.all_passed() && total < 600.0;
    ok &= pass;
    println!(
        "{} criterion 12 {:<22} checks {:>3} failed {} time {:.1}s (budget 600s)",
        if pass { "PASS" } else { "FAIL" },
        "full run",
        doc.summary.total,
        doc.summary.failed,
        total,
    );
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
