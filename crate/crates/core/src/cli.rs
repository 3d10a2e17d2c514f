//! Batch driver: suite configuration, the check runner and the JSON report.
//!
//! Every check draws from its own ChaCha8 stream seeded by
//! `SHA-256(seed_le ‖ check_id)`, so results do not depend on which other
//! checks run or in which order.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::manifold::GeometrySpec;
use crate::suites::{self, Check, CheckEcho};

/// Version of the report document layout.
pub const SCHEMA_VERSION: u32 = 1;

/// Registered suite names, in execution order for `all`.
pub const SUITES: &[&str] = &[
    "algebra",
    "manifold",
    "caloron",
    "functionals",
    "gauge",
    "gerbe",
    "localization",
];

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteConfig {
    /// Suite names; `all` expands to [`SUITES`].
    pub suites: Vec<String>,
    /// Grid, bundle degree of the twisted checks, top level and group rank.
    pub geometry: GeometrySpec,
    /// Master seed.
    pub seed: u64,
    /// Per-check tolerance overrides.
    pub tolerances: BTreeMap<String, f64>,
    /// Report destination; stdout when absent.
    pub out: Option<PathBuf>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            suites: vec!["all".into()],
            geometry: GeometrySpec {
                degree: 1,
                level: 3,
                ..GeometrySpec::default()
            },
            seed: 0,
            tolerances: BTreeMap::new(),
            out: None,
        }
    }
}

impl SuiteConfig {
    /// Checks suite names, geometry and tolerance values.
    pub fn validate(&self) -> Result<()> {
        if self.suites.is_empty() {
            return Err(Error::Config("no suite selected".into()));
        }
        for s in &self.suites {
            if s != "all" && !SUITES.contains(&s.as_str()) {
                return Err(Error::Config(format!(
                    "unknown suite {s:?}; expected one of all, {}",
                    SUITES.join(", ")
                )));
            }
        }
        self.geometry.validate()?;
        if self.geometry.degree == 0 {
            return Err(Error::Config(
                "degree selects the twisted bundle and must be nonzero; torus checks always run".into(),
            ));
        }
        if !(1..=16).contains(&self.geometry.level) {
            return Err(Error::Config(format!("level {} outside 1..=16", self.geometry.level)));
        }
        if self.geometry.group_rank > 8 {
            return Err(Error::Config(format!("rank {} above 8", self.geometry.group_rank)));
        }
        for (id, t) in &self.tolerances {
            if !(t.is_finite() && *t > 0.0) {
                return Err(Error::Config(format!("tolerance for {id} must be positive, got {t}")));
            }
        }
        Ok(())
    }

    /// Selected suites with `all` expanded and duplicates removed.
    pub fn suite_names(&self) -> Vec<&'static str> {
        SUITES
            .iter()
            .copied()
            .filter(|s| self.suites.iter().any(|n| n == "all" || n == s))
            .collect()
    }
}

/// `suite` may be one name or a list.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum SuiteField {
    One(String),
    Many(Vec<String>),
}

/// `grid` may be `"nx,ny,nt"` or `[nx, ny, nt]`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum GridField {
    Text(String),
    Triple([usize; 3]),
}

/// One layer of settings: a config file or the command line.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigLayer {
    pub suite: Option<SuiteField>,
    pub seed: Option<u64>,
    pub grid: Option<GridField>,
    pub degree: Option<i64>,
    pub level: Option<i64>,
    pub rank: Option<usize>,
    pub out: Option<PathBuf>,
    pub tol: Option<BTreeMap<String, f64>>,
}

impl ConfigLayer {
    /// Parses a JSON config file body.
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    /// Fields set in `self` win over `base`; tolerance maps are merged.
    pub fn over(self, base: ConfigLayer) -> ConfigLayer {
        let tol = match (base.tol, self.tol) {
            (Some(mut b), Some(t)) => {
                b.extend(t);
                Some(b)
            }
            (b, t) => t.or(b),
        };
        ConfigLayer {
            suite: self.suite.or(base.suite),
            seed: self.seed.or(base.seed),
            grid: self.grid.or(base.grid),
            degree: self.degree.or(base.degree),
            level: self.level.or(base.level),
            rank: self.rank.or(base.rank),
            out: self.out.or(base.out),
            tol,
        }
    }

    /// Applies the layer to the defaults and validates the result.
    pub fn resolve(self) -> Result<SuiteConfig> {
        let mut cfg = SuiteConfig::default();
        match self.suite {
            Some(SuiteField::One(s)) => cfg.suites = split_list(&s),
            Some(SuiteField::Many(v)) => cfg.suites = v,
            None => {}
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(g) = self.grid {
            let [nx, ny, nt] = match g {
                GridField::Text(s) => parse_grid(&s)?,
                GridField::Triple(t) => t,
            };
            cfg.geometry.n_x = nx;
            cfg.geometry.n_y = ny;
            cfg.geometry.n_theta = nt;
        }
        if let Some(d) = self.degree {
            cfg.geometry.degree = d;
        }
        if let Some(k) = self.level {
            cfg.geometry.level = k;
        }
        if let Some(n) = self.rank {
            cfg.geometry.group_rank = n;
        }
        cfg.out = self.out;
        cfg.tolerances = self.tol.unwrap_or_default();
        cfg.validate()?;
        Ok(cfg)
    }
}

fn split_list(s: &str) -> Vec<String> {
    s.split(',').map(|p| p.trim().to_string()).filter(|p| !p.is_empty()).collect()
}

/// Largest accepted grid size per axis.
pub const MAX_GRID: usize = 512;

/// Parses `nx,ny,nt`.
pub fn parse_grid(s: &str) -> Result<[usize; 3]> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(Error::Config(format!("grid {s:?} is not nx,ny,nt")));
    }
    let mut out = [0usize; 3];
    for (o, p) in out.iter_mut().zip(&parts) {
        let n: usize = p
            .parse()
            .map_err(|_| Error::Config(format!("grid size {p:?} is not a positive integer")))?;
        if !(4..=MAX_GRID).contains(&n) {
            return Err(Error::Config(format!("grid size {n} outside 4..={MAX_GRID}")));
        }
        *o = n;
    }
    Ok(out)
}

/// Parses `check_id=value` with a positive finite value.
pub fn parse_tol(s: &str) -> Result<(String, f64)> {
    let (id, v) = s
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("tolerance {s:?} is not id=value")))?;
    let id = id.trim();
    if id.is_empty() || !id.chars().all(|c| c.is_ascii_alphanumeric() || "._-".contains(c)) {
        return Err(Error::Config(format!("bad check id {id:?}")));
    }
    let t: f64 = v
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("tolerance {v:?} is not a number")))?;
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::Config(format!("tolerance for {id} must be positive, got {t}")));
    }
    Ok((id.to_string(), t))
}

/// Result of one check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub check_id: String,
    /// Short name of the identity being verified, or `plumbing`.
    pub anchor: String,
    /// `null` in JSON when the check errored.
    pub error_norm: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub runtime_ms: u64,
    pub config: CheckEcho,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportMeta {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub suites: Vec<String>,
    pub geometry: GeometrySpec,
    pub levels: Vec<i64>,
    pub conventions: BTreeMap<String, String>,
}

/// The report document written by [`run_suites`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportDocument {
    pub schema: u32,
    pub meta: ReportMeta,
    pub checks: Vec<CheckReport>,
    pub summary: Summary,
}

impl ReportDocument {
    /// True when every check passed.
    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    /// Reports whose id starts with `prefix`.
    pub fn matching<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a CheckReport> + 'a {
        self.checks.iter().filter(move |c| c.check_id.starts_with(prefix))
    }
}

/// RNG stream for one check.
pub fn check_rng(seed: u64, check_id: &str) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(check_id.as_bytes());
    let digest = h.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    ChaCha8Rng::from_seed(key)
}

/// Registered checks for the configuration, with tolerance overrides applied.
pub fn plan(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    cfg.validate()?;
    let ctx = suites::Context::new(&cfg.geometry)?;
    let mut checks = Vec::new();
    for name in cfg.suite_names() {
        checks.extend(suites::register(name, &ctx)?);
    }
    for (id, t) in &cfg.tolerances {
        let c = checks
            .iter_mut()
            .find(|c| &c.id == id)
            .ok_or_else(|| Error::Config(format!("tolerance override for unknown check {id:?}")))?;
        c.tolerance = *t;
    }
    Ok(checks)
}

fn meta(cfg: &SuiteConfig) -> ReportMeta {
    let conventions = [
        ("fiber_measure", "normalized, theta of period 1"),
        ("loop_derivative", "D = -d/dtheta"),
        ("level_weight", "k/(8 pi^2)"),
        ("pairing", "<X,Y> = -2 Re Tr(XY)"),
        ("rng", "ChaCha8 seeded by SHA-256(seed_le || check_id)"),
    ]
    .into_iter()
    .map(|(a, b)| (a.to_string(), b.to_string()))
    .collect();
    ReportMeta {
        tool: "caloron-lab".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        seed: cfg.seed,
        suites: cfg.suite_names().iter().map(|s| s.to_string()).collect(),
        geometry: cfg.geometry,
        levels: (1..=cfg.geometry.level).collect(),
        conventions,
    }
}

/// Runs planned checks in order and assembles the document.
pub fn run_checks(cfg: &SuiteConfig, checks: &[Check]) -> ReportDocument {
    let mut reports = Vec::with_capacity(checks.len());
    for c in checks {
        let mut rng = check_rng(cfg.seed, &c.id);
        let t = Instant::now();
        let (error_norm, note) = match c.run(&mut rng) {
            Ok(e) => (e, None),
            Err(err) => (f64::NAN, Some(err.to_string())),
        };
        let runtime_ms = t.elapsed().as_millis() as u64;
        reports.push(CheckReport {
            check_id: c.id.clone(),
            anchor: c.anchor.to_string(),
            error_norm,
            tolerance: c.tolerance,
            passed: error_norm <= c.tolerance,
            runtime_ms,
            config: c.echo,
            note,
        });
    }
    let passed = reports.iter().filter(|r| r.passed).count();
    ReportDocument {
        schema: SCHEMA_VERSION,
        meta: meta(cfg),
        summary: Summary {
            total: reports.len(),
            passed,
            failed: reports.len() - passed,
        },
        checks: reports,
    }
}

/// Validates, runs every selected suite and writes the report to `cfg.out`
/// if set. Configuration errors surface before any check runs.
pub fn run_suites(cfg: &SuiteConfig) -> Result<ReportDocument> {
    let checks = plan(cfg)?;
    let doc = run_checks(cfg, &checks);
    if let Some(path) = &cfg.out {
        std::fs::write(path, doc.to_json()?)?;
    }
    Ok(doc)
}
