//! Effective parameters: command-line flags override the `--config` file,
//! which overrides built-in defaults.
//!
//! The config file is a JSON object. Keys may sit at the top level or inside a
//! section named after the subcommand (`{"score": {"top": 20}}`); section keys
//! win over top-level ones.

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use needfinder_core::learn::{Hyperparams, DEFAULT_TOP_M, DEFAULT_TOP_N, DEFAULT_WEIGHT_FLOOR};
use needfinder_core::prepare::{DEFAULT_K, DEFAULT_TZ, DEFAULT_WINDOW_MINUTES};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::CliError;

fn overlay(base: &mut Map<String, Value>, top: &Map<String, Value>) {
    for (k, v) in top {
        if !v.is_null() {
            base.insert(k.clone(), v.clone());
        }
    }
}

/// Merges `flags` over the config file and deserializes the result.
pub fn resolve<T: DeserializeOwned>(
    command: &str,
    flags: &impl Serialize,
    config: Option<&Path>,
) -> Result<T, CliError> {
    let mut merged = Map::new();
    if let Some(path) = config {
        let file: Value = needfinder_core::io::read_json(path)?;
        let Value::Object(file) = file else {
            return Err(CliError::Usage(format!("config file {} must hold a JSON object", path.display())));
        };
        let flat: Map<String, Value> =
            file.iter().filter(|(_, v)| !v.is_object()).map(|(k, v)| (k.clone(), v.clone())).collect();
        overlay(&mut merged, &flat);
        if let Some(Value::Object(section)) = file.get(command) {
            overlay(&mut merged, section);
        }
    }
    match serde_json::to_value(flags).expect("flags serialize") {
        Value::Object(f) => overlay(&mut merged, &f),
        _ => unreachable!("flag structs serialize to objects"),
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| CliError::Usage(format!("{command}: {e}")))
}

pub fn required<T>(value: Option<T>, command: &str, name: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("{command}: missing required parameter --{}", name.replace('_', "-"))))
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct GenerateParams {
    pub scenario: Option<PathBuf>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct PrepareParams {
    pub pings: Option<PathBuf>,
    pub searches: Option<PathBuf>,
    pub region: Option<PathBuf>,
    pub k: u64,
    pub window_min: i64,
    pub tz: String,
    pub out: PathBuf,
}

impl Default for PrepareParams {
    fn default() -> Self {
        Self {
            pings: None,
            searches: None,
            region: None,
            k: DEFAULT_K,
            window_min: DEFAULT_WINDOW_MINUTES,
            tz: DEFAULT_TZ.into(),
            out: "counts.csv".into(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct StopwordsParams {
    pub counts: Option<PathBuf>,
    pub baseline_start: Option<NaiveDate>,
    pub baseline_end: Option<NaiveDate>,
    pub event_day: Option<NaiveDate>,
    pub top_m: usize,
    pub floor: f64,
    pub lambda: f64,
    pub seed: u64,
    pub out: PathBuf,
}

impl Default for StopwordsParams {
    fn default() -> Self {
        let h = Hyperparams::default();
        Self {
            counts: None,
            baseline_start: None,
            baseline_end: None,
            event_day: None,
            top_m: DEFAULT_TOP_M,
            floor: DEFAULT_WEIGHT_FLOOR,
            lambda: h.l2_lambda,
            seed: h.seed,
            out: "stopwords.json".into(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ScoreParams {
    pub counts: Option<PathBuf>,
    pub date: Option<NaiveDate>,
    pub stopwords: Option<PathBuf>,
    pub top: usize,
    pub lambda: f64,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

impl Default for ScoreParams {
    fn default() -> Self {
        let h = Hyperparams::default();
        Self {
            counts: None,
            date: None,
            stopwords: None,
            top: DEFAULT_TOP_N,
            lambda: h.l2_lambda,
            seed: h.seed,
            out: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalParams {
    pub reports: Option<PathBuf>,
    pub truth: Option<PathBuf>,
    pub pv: Option<PathBuf>,
    pub n: usize,
    pub out: PathBuf,
}

impl Default for EvalParams {
    fn default() -> Self {
        Self { reports: None, truth: None, pv: None, n: DEFAULT_TOP_N, out: "metrics.json".into() }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ReportParams {
    pub report: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct DemoParams {
    pub scenario: Option<PathBuf>,
    pub out: PathBuf,
    #[serde(flatten)]
    pub options: needfinder_core::pipeline::DemoOptions,
}

impl Default for DemoParams {
    fn default() -> Self {
        Self { scenario: None, out: "demo_out".into(), options: Default::default() }
    }
}
