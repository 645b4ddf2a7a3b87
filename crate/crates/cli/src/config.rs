use crate::CliError;
use serde_json::{Map, Value};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// Keys every experiment accepts on top of its own parameters.
pub const GLOBAL_KEYS: &[&str] = &["seed", "N", "gate_tolerance"];

/// Default tolerance of the validation gates.
pub const GATE_TOLERANCE: f64 = 1e-8;

/// Effective configuration of one run: defaults, then the config file, then
/// flat overrides, each layer validated against the experiment's keys.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub params: BTreeMap<String, Value>,
    pub seed: u64,
    /// `None` picks the experiment's own base truncation.
    pub n: Option<usize>,
    pub gate_tolerance: f64,
    pub out: PathBuf,
}

impl ExperimentConfig {
    /// Defaults only.
    pub fn new(experiment: &str) -> Result<Self, CliError> {
        let spec = crate::find(experiment)?;
        Ok(Self {
            experiment: spec.name.to_string(),
            params: (spec.defaults)().into_iter().collect(),
            seed: 0,
            n: None,
            gate_tolerance: GATE_TOLERANCE,
            out: PathBuf::from("qha-out").join(spec.name),
        })
    }

    pub fn valid_keys(&self) -> Vec<String> {
        let mut keys: Vec<String> = GLOBAL_KEYS.iter().map(|s| s.to_string()).collect();
        keys.extend(self.params.keys().cloned());
        keys
    }

    /// Sets one key, checking it exists and that the value has the type of
    /// its default. Integers given as floats (`1e6`) are accepted when exact.
    pub fn set(&mut self, key: &str, value: Value) -> Result<(), CliError> {
        match key {
            "seed" => self.seed = as_u64(key, &value)?,
            "N" => self.n = Some(as_u64(key, &value)? as usize),
            "gate_tolerance" => self.gate_tolerance = as_f64(key, &value)?,
            _ => {
                let Some(old) = self.params.get(key) else {
                    return Err(CliError::Usage(format!(
                        "unknown key \"{key}\" for {}; valid keys: {}",
                        self.experiment,
                        self.valid_keys().join(", ")
                    )));
                };
                let value = match old {
                    Value::Number(n) if n.is_u64() => Value::from(as_u64(key, &value)?),
                    Value::Number(_) => Value::from(as_f64(key, &value)?),
                    Value::String(_) if value.is_string() => value,
                    Value::Bool(_) if value.is_boolean() => value,
                    _ => return Err(CliError::Usage(format!("key \"{key}\" expects a value like {old}, got {value}"))),
                };
                self.params.insert(key.to_string(), value);
            }
        }
        Ok(())
    }

    pub fn merge_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let v: Value = serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config {} is not valid JSON: {e}", path.display())))?;
        let Value::Object(map) = v else {
            return Err(CliError::Usage("config file must hold a JSON object".into()));
        };
        self.merge(map)
    }

    pub fn merge(&mut self, map: Map<String, Value>) -> Result<(), CliError> {
        for (k, v) in map {
            if k == "experiment" {
                if v.as_str() != Some(self.experiment.as_str()) {
                    return Err(CliError::Usage(format!("config is for {v}, not {}", self.experiment)));
                }
                continue;
            }
            self.set(&k, v)?;
        }
        Ok(())
    }

    /// Parses a `key=value` override; the value is JSON when it parses as
    /// JSON and a plain string otherwise.
    pub fn apply_override(&mut self, text: &str) -> Result<(), CliError> {
        let (k, v) = text.split_once('=').ok_or_else(|| CliError::Usage(format!("override \"{text}\" is not of the form key=value")))?;
        let value = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
        self.set(k, value)
    }

    /// Echo written into report.json. The output directory and worker count
    /// are left out since neither may change a reported value.
    pub fn echo(&self) -> Value {
        let mut m = Map::new();
        m.insert("experiment".into(), Value::from(self.experiment.clone()));
        m.insert("seed".into(), Value::from(self.seed));
        m.insert("N".into(), self.n.map_or(Value::Null, Value::from));
        m.insert("gate_tolerance".into(), Value::from(self.gate_tolerance));
        m.insert("params".into(), Value::Object(self.params.clone().into_iter().collect()));
        Value::Object(m)
    }

    pub(crate) fn f64(&self, key: &str) -> f64 {
        self.params[key].as_f64().expect("typed at set time")
    }

    pub(crate) fn usize(&self, key: &str) -> usize {
        self.params[key].as_u64().expect("typed at set time") as usize
    }

    pub(crate) fn str(&self, key: &str) -> &str {
        self.params[key].as_str().expect("typed at set time")
    }
}

fn as_f64(key: &str, v: &Value) -> Result<f64, CliError> {
    v.as_f64().ok_or_else(|| CliError::Usage(format!("key \"{key}\" expects a number, got {v}")))
}

fn as_u64(key: &str, v: &Value) -> Result<u64, CliError> {
    if let Some(u) = v.as_u64() {
        return Ok(u);
    }
    match v.as_f64() {
        Some(f) if f >= 0.0 && f.fract() == 0.0 && f < 2f64.powi(53) => Ok(f as u64),
        _ => Err(CliError::Usage(format!("key \"{key}\" expects a non-negative integer, got {v}"))),
    }
}
