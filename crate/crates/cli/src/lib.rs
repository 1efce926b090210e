//! Orchestration behind the `sepint` binary: a [`RunConfig`] names one
//! subcommand and its parameters, [`dispatch`] runs it and writes a
//! versioned JSON report.

pub mod commands;
pub mod criteria;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

pub const SCHEMA: u32 = 1;

/// Environment variable overriding the output directory.
pub const OUT_ENV: &str = "SEPINT_OUT";

pub const COMMANDS: [&str; 8] = [
    "lcc-check",
    "radial-scan",
    "construct",
    "orbit",
    "p6",
    "dependence",
    "suite",
    "report",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: String,
    #[serde(default)]
    pub params: Map<String, Value>,
    #[serde(default = "default_out")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    /// Worker threads for batch parallelism; `None` uses every core.
    #[serde(default)]
    pub jobs: Option<usize>,
}

fn default_out() -> PathBuf {
    PathBuf::from("sepint-out")
}

impl RunConfig {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.into(),
            params: Map::new(),
            output_dir: default_out(),
            seed: 0,
            tolerances: BTreeMap::new(),
            jobs: None,
        }
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let raw = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&raw)?)
    }

    /// Parameters as a typed struct; unknown keys are rejected by the
    /// target's `deny_unknown_fields`.
    pub fn params<T: serde::de::DeserializeOwned>(&self) -> anyhow::Result<T> {
        serde_json::from_value(Value::Object(self.params.clone()))
            .map_err(|e| anyhow::anyhow!("parameters of {}: {e}", self.command))
    }
}

/// Named tolerances with their defaults; overrides must name a known key.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tolerances(BTreeMap<String, f64>);

impl Tolerances {
    pub fn defaults() -> Self {
        let pairs: [(&str, f64); 20] = [
            ("poisson_relative", 1e-9),
            ("poisson_seconds", 30.0),
            ("f_poly_abs", 1e-12),
            ("roundtrip", 1e-10),
            ("lcc_relative", 1e-8),
            ("rank_relative", 1e-8),
            ("rank_gap", 1e2),
            ("radial_seconds", 120.0),
            ("ttw_profile", 1e-6),
            ("closure", 1e-5),
            ("precession", 1e-2),
            ("orbit_drift", 1e-8),
            ("p6_constant", 1e-10),
            ("p6_residual", 1e-7),
            ("w_zero", 1e-12),
            ("quantum_t", 1e-9),
            ("closed_form", 1e-6),
            ("syzygy_coefficients", 1e-8),
            ("independence", 1e-4),
            ("rational", 1e-6),
        ];
        Self(pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect())
    }

    pub fn with_overrides(overrides: &BTreeMap<String, f64>) -> anyhow::Result<Self> {
        let mut t = Self::defaults();
        for (k, v) in overrides {
            match t.0.get_mut(k) {
                Some(slot) => *slot = *v,
                None => anyhow::bail!("unknown tolerance {k:?}"),
            }
        }
        Ok(t)
    }

    pub fn get(&self, key: &str) -> f64 {
        *self.0.get(key).unwrap_or_else(|| panic!("tolerance {key:?} has no default"))
    }

    /// The subset named in `keys`, for report echoing.
    pub fn subset(&self, keys: &[&str]) -> BTreeMap<String, f64> {
        keys.iter().map(|k| (k.to_string(), self.get(k))).collect()
    }

    pub fn all(&self) -> &BTreeMap<String, f64> {
        &self.0
    }
}

/// Run-dependent data kept apart from everything else so two runs with the
/// same inputs can be compared after dropping this one field.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Volatile {
    pub timestamp: u64,
    pub elapsed_ms: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub inputs: Value,
    pub versions: BTreeMap<String, String>,
    pub tolerances: BTreeMap<String, f64>,
    pub results: Value,
    pub passed: bool,
    /// Files written next to the report.
    pub artifacts: Vec<String>,
    pub volatile: Volatile,
}

impl Report {
    pub fn new(config: &RunConfig, tolerances: BTreeMap<String, f64>, results: Value, passed: bool) -> Self {
        let mut inputs = Map::new();
        inputs.insert("params".into(), Value::Object(config.params.clone()));
        inputs.insert("seed".into(), config.seed.into());
        Self {
            schema: SCHEMA,
            command: config.command.clone(),
            inputs: Value::Object(inputs),
            versions: BTreeMap::from([
                ("sepint".to_string(), env!("CARGO_PKG_VERSION").to_string()),
                ("schema".to_string(), SCHEMA.to_string()),
            ]),
            tolerances,
            results,
            passed,
            artifacts: Vec::new(),
            volatile: Volatile {
                timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
                elapsed_ms: BTreeMap::new(),
            },
        }
    }

    /// The report without its volatile field, as compact JSON.
    pub fn stable_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Value::Object(m) = &mut v {
            m.remove("volatile");
        }
        serde_json::to_string(&v).expect("report serializes")
    }

    pub fn write(&self, path: &Path) -> anyhow::Result<()> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }
}

/// Strips the volatile field from a report file's JSON text.
pub fn stable_text(raw: &str) -> anyhow::Result<String> {
    let mut v: Value = serde_json::from_str(raw)?;
    if let Value::Object(m) = &mut v {
        m.remove("volatile");
    }
    Ok(serde_json::to_string_pretty(&v)?)
}

/// A finished run: its report and where it was written.
#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub path: PathBuf,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.report.passed {
            0
        } else {
            2
        }
    }
}

/// Runs the configured subcommand and writes its report. Errors are usage
/// or configuration problems; numerical failures end up in the report.
pub fn dispatch(config: &RunConfig) -> anyhow::Result<Outcome> {
    let tol = Tolerances::with_overrides(&config.tolerances)?;
    let run = || -> anyhow::Result<Outcome> {
        match config.command.as_str() {
            "lcc-check" => commands::lcc_check(config, &tol),
            "radial-scan" => commands::radial_scan(config, &tol),
            "construct" => commands::construct(config, &tol),
            "orbit" => commands::orbit(config, &tol),
            "p6" => commands::p6(config, &tol),
            "dependence" => commands::dependence(config, &tol),
            "suite" => commands::suite(config, &tol),
            "report" => commands::report(config, &tol),
            other => anyhow::bail!("unknown command {other:?}; expected one of {COMMANDS:?}"),
        }
    };
    match config.jobs {
        Some(j) if j > 0 => rayon::ThreadPoolBuilder::new().num_threads(j).build()?.install(run),
        Some(_) => anyhow::bail!("--jobs must be positive"),
        None => run(),
    }
}
