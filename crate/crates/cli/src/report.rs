use qha_core::hermite_rep::GateReport;
use serde::Serialize;
use serde_json::Value;
use std::collections::BTreeMap;

pub const SCHEMA: &str = "qha-report/1";

/// A number measured at the base truncation N and again at 2N.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Metric {
    pub value: Option<f64>,
    pub value_2n: Option<f64>,
    /// `|value_2n − value| / |value|`, absolute when `value` is zero.
    pub delta: Option<f64>,
}

impl Metric {
    pub fn pair(value: Option<f64>, value_2n: Option<f64>) -> Self {
        let delta = match (value, value_2n) {
            (Some(a), Some(b)) if a != 0.0 => Some(((b - a) / a).abs()),
            (Some(a), Some(b)) => Some((b - a).abs()),
            _ => None,
        };
        Self { value, value_2n, delta }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.to_string(), passed, detail: detail.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub experiment: String,
    pub config: Value,
    /// Truncations used for `value` and `value_2n`.
    pub n: usize,
    pub n_2n: usize,
    pub gates: Vec<GateReport>,
    pub gates_passed: bool,
    pub results: BTreeMap<String, Metric>,
    pub checks: Vec<Check>,
    pub passed: bool,
    /// Experiment-specific detail, e.g. full module reports.
    pub details: Value,
}

impl Report {
    /// 0 when every gate and check passed, 2 on a gate failure and 3 when a
    /// check failed behind passing gates.
    pub fn exit_code(&self) -> i32 {
        if !self.gates_passed {
            2
        } else if !self.passed {
            3
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}
