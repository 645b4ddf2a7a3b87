//! Named, reproducible experiments over the qha toolkit.
//!
//! Each experiment runs at a base truncation N and again at 2N, and reports
//! every number with its N-vs-2N relative change. Numerical validation gates
//! run first; a failing gate stops the experiment.

mod config;
mod experiments;
mod plot;
mod report;

pub use config::{ExperimentConfig, GATE_TOLERANCE, GLOBAL_KEYS};
pub use plot::{render_plot, write_plot, PlotKind};
pub use report::{Check, Metric, Report, SCHEMA};

use qha_core::hermite_rep::{GateReport, HermiteBasis, LineGrid};
use qha_core::QhaError;
use serde_json::Value;
use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Gate(String),
    #[error("{0}")]
    Numeric(QhaError),
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Gate(_) => 2,
            _ => 1,
        }
    }
}

impl From<QhaError> for CliError {
    fn from(e: QhaError) -> Self {
        match e {
            QhaError::Gate(m) => CliError::Gate(m),
            QhaError::InvalidArgument(m) => CliError::Usage(m),
            other => CliError::Numeric(other),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Gate {
    /// Laguerre form of the Hermite ambiguity matrix vs quadrature.
    Displacement,
    /// Circle spectrum closed form vs the quadrature diagonal.
    Circle,
}

/// One registry entry.
pub struct ExperimentSpec {
    pub name: &'static str,
    pub description: &'static str,
    /// The claim the experiment checks.
    pub anchor: &'static str,
    pub(crate) gates: &'static [Gate],
    pub(crate) defaults: fn() -> Vec<(String, Value)>,
    pub(crate) base_n: fn(&ExperimentConfig) -> usize,
    pub(crate) run: fn(&ExperimentConfig, usize) -> Result<Level, CliError>,
}

/// Output of one truncation.
#[derive(Default)]
pub(crate) struct Level {
    pub metrics: BTreeMap<String, Option<f64>>,
    pub checks: Vec<Check>,
    pub details: Value,
    pub artifacts: Vec<Artifact>,
}

impl Level {
    pub fn metric(&mut self, name: &str, v: Option<f64>) {
        self.metrics.insert(name.to_string(), v);
    }
}

/// A file written next to report.json.
#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

pub struct RunOutput {
    pub report: Report,
    pub artifacts: Vec<Artifact>,
}

pub fn registry() -> &'static [ExperimentSpec] {
    experiments::REGISTRY
}

/// (name, one-line description, claim anchor) for every experiment.
pub fn list_experiments() -> Vec<(&'static str, &'static str, &'static str)> {
    registry().iter().map(|e| (e.name, e.description, e.anchor)).collect()
}

pub fn registry_listing() -> String {
    let mut s = String::from("experiments:\n");
    for (name, desc, anchor) in list_experiments() {
        s.push_str(&format!("  {name:<20} {desc} [{anchor}]\n"));
    }
    s
}

pub(crate) fn find(name: &str) -> Result<&'static ExperimentSpec, CliError> {
    registry().iter().find(|e| e.name == name).ok_or_else(|| CliError::Usage(format!("unknown experiment \"{name}\"\n{}", registry_listing())))
}

/// Hermite basis of size `n` on the default grid, through the on-disk cache
/// in `$QHA_CACHE_DIR` when that is set.
pub(crate) fn basis(n: usize) -> Result<HermiteBasis, CliError> {
    match std::env::var_os("QHA_CACHE_DIR") {
        Some(dir) if !dir.is_empty() => Ok(HermiteBasis::load_or_build(n, LineGrid::for_hermite(n), Path::new(&dir))?),
        _ => Ok(HermiteBasis::with_default_grid(n)?),
    }
}

fn run_gates(spec: &ExperimentSpec, tol: f64) -> Result<Vec<GateReport>, CliError> {
    let mut out = Vec::new();
    for g in spec.gates {
        let mut r = match g {
            Gate::Displacement => qha_core::hermite_rep::validate_displacement(64, 4.0)?,
            Gate::Circle => qha_core::hermite_rep::validate_circle_closed_form(1.0, 1.0, 256)?,
        };
        r.tolerance = tol;
        r.passed = r.max_error < tol;
        out.push(r);
    }
    Ok(out)
}

/// Runs the gates, then the experiment at N and 2N. Checks are judged at N;
/// the 2N run supplies the truncation deltas.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let spec = find(&cfg.experiment)?;
    let n = cfg.n.unwrap_or_else(|| (spec.base_n)(cfg));
    if n == 0 {
        return Err(CliError::Usage("N must be positive".into()));
    }
    let gates = run_gates(spec, cfg.gate_tolerance)?;
    let gates_passed = gates.iter().all(|g| g.passed);
    let mut report = Report {
        schema: SCHEMA,
        experiment: spec.name.to_string(),
        config: cfg.echo(),
        n,
        n_2n: 2 * n,
        gates,
        gates_passed,
        results: BTreeMap::new(),
        checks: Vec::new(),
        passed: false,
        details: Value::Null,
    };
    if !gates_passed {
        return Ok(RunOutput { report, artifacts: Vec::new() });
    }
    let base = (spec.run)(cfg, n)?;
    let twice = (spec.run)(cfg, 2 * n)?;
    for (k, v) in &base.metrics {
        let v2 = twice.metrics.get(k).copied().flatten();
        report.results.insert(k.clone(), Metric::pair(*v, v2));
    }
    report.passed = base.checks.iter().all(|c| c.passed);
    report.checks = base.checks;
    report.details = serde_json::json!({ "N": base.details, "2N": twice.details });
    Ok(RunOutput { report, artifacts: base.artifacts })
}

/// Metrics and checks of a single truncation level.
#[derive(Clone, Debug)]
pub struct LevelOutcome {
    pub n: usize,
    pub metrics: BTreeMap<String, Option<f64>>,
    pub checks: Vec<Check>,
    pub details: Value,
}

impl LevelOutcome {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.get(name).copied().flatten()
    }
}

/// Runs the experiment once at `N` (the config's or the default), without
/// gates and without the 2N companion run.
pub fn run_at(cfg: &ExperimentConfig) -> Result<LevelOutcome, CliError> {
    let spec = find(&cfg.experiment)?;
    let n = cfg.n.unwrap_or_else(|| (spec.base_n)(cfg));
    if n == 0 {
        return Err(CliError::Usage("N must be positive".into()));
    }
    let level = (spec.run)(cfg, n)?;
    Ok(LevelOutcome { n, metrics: level.metrics, checks: level.checks, details: level.details })
}

/// Writes report.json, report.meta.json and the artifacts into `dir`.
pub fn write_outputs(out: &RunOutput, dir: &Path, meta: &Value) -> Result<(), CliError> {
    let io = |p: &Path, e: std::io::Error| CliError::Io(format!("{}: {e}", p.display()));
    std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let write = |name: &str, bytes: &[u8]| {
        let p = dir.join(name);
        std::fs::write(&p, bytes).map_err(|e| io(&p, e))
    };
    write("report.json", out.report.to_json().as_bytes())?;
    let mut m = serde_json::to_string_pretty(meta).expect("meta serializes");
    m.push('\n');
    write("report.meta.json", m.as_bytes())?;
    for a in &out.artifacts {
        write(&a.name, &a.bytes)?;
    }
    // Plots are rendered from the CSV files as written.
    for (csv, svg, kind) in [("spectrum.csv", "plot.svg", PlotKind::LoglogSpectrum), ("ratios.csv", "ratios.svg", PlotKind::RatioCurve)] {
        if out.artifacts.iter().any(|a| a.name == csv) {
            write_plot(&dir.join(csv), kind, &dir.join(svg))?;
        }
    }
    Ok(())
}
