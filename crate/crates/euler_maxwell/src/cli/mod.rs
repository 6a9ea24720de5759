//! Experiment runner: TOML configs in, CSV tables out.
//!
//! A config has a top-level `experiment` name, an optional `seed`, an
//! optional `output` path, a `[params]` table with the eight physical
//! parameters and an optional `[options]` table whose keys depend on the
//! experiment. Emitted files start with the config itself as `# `-prefixed
//! TOML, so every file can be re-run from its own header.

mod experiments;

pub use experiments::run_experiment;

use std::fmt::Write as _;
use std::path::Path;

use crate::params::{validate, PlasmaParams, RawParams};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("unknown key `{key}`{}", at_line(*line))]
    UnknownKey { key: String, line: Option<usize> },
    #[error("missing key `{key}`")]
    MissingKey { key: String },
    #[error("key `{key}`: expected {expected}{}", at_line(*line))]
    TypeMismatch { key: String, expected: String, line: Option<usize> },
    #[error("I/O failure: {0}")]
    IoFailure(String),
    #[error("{experiment}: {source}")]
    Run {
        experiment: String,
        #[source]
        source: crate::Error,
    },
}

fn at_line(line: Option<usize>) -> String {
    line.map(|l| format!(" at line {l}")).unwrap_or_default()
}

impl CliError {
    /// 1 for validation errors, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Run { source, .. } if source.is_numerical() => 2,
            _ => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    DarcyCheck,
    FluidSpectrum,
    EmSpectrum,
    EmError,
    LyapunovCheck,
    LinearDecay,
    ProfileConvergence,
    SpecialData,
    NonlinearRun,
}

impl Experiment {
    pub const ALL: [Experiment; 9] = [
        Experiment::DarcyCheck,
        Experiment::FluidSpectrum,
        Experiment::EmSpectrum,
        Experiment::EmError,
        Experiment::LyapunovCheck,
        Experiment::LinearDecay,
        Experiment::ProfileConvergence,
        Experiment::SpecialData,
        Experiment::NonlinearRun,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::DarcyCheck => "darcy-check",
            Experiment::FluidSpectrum => "fluid-spectrum",
            Experiment::EmSpectrum => "em-spectrum",
            Experiment::EmError => "em-error",
            Experiment::LyapunovCheck => "lyapunov-check",
            Experiment::LinearDecay => "linear-decay",
            Experiment::ProfileConvergence => "profile-convergence",
            Experiment::SpecialData => "special-data",
            Experiment::NonlinearRun => "nonlinear-run",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == name)
    }

    /// Accepted option keys with their defaults.
    pub fn option_defaults(self) -> Vec<(&'static str, OptValue)> {
        use OptValue::*;
        let box_6pi = Float(6.0 * std::f64::consts::PI);
        match self {
            Experiment::DarcyCheck => {
                vec![("n_sets", Count(100)), ("b_values", List(vec![0.0, 1.0, 1e3])), ("density", Float(1.0))]
            }
            Experiment::FluidSpectrum | Experiment::EmSpectrum => {
                vec![("k_min", Float(1e-3)), ("k_max", Float(1e2)), ("n_k", Count(41))]
            }
            Experiment::EmError => vec![("n_modes", Count(50)), ("t_max", Float(100.0)), ("n_t", Count(101))],
            Experiment::LyapunovCheck => vec![("n_modes", Count(100)), ("t_max", Float(50.0)), ("n_t", Count(51))],
            Experiment::LinearDecay | Experiment::ProfileConvergence | Experiment::SpecialData => vec![
                ("t_min", Float(1e2)),
                ("t_max", Float(1e4)),
                ("n_t", Count(41)),
                ("nodes", Count(512)),
            ],
            Experiment::NonlinearRun => vec![
                ("grid_size", Count(32)),
                ("box_length", box_6pi),
                ("epsilon", Float(1e-3)),
                ("t_end", Float(20.0)),
                ("dt", Float(0.05)),
                ("sobolev_order", Count(3)),
                ("kappas", List(Vec::new())),
                ("record_every", Count(20)),
            ],
        }
    }
}

/// Option value; the variant of the default fixes the accepted type.
#[derive(Debug, Clone, PartialEq)]
pub enum OptValue {
    Float(f64),
    /// Positive integer.
    Count(u64),
    List(Vec<f64>),
}

impl OptValue {
    fn expected(&self) -> &'static str {
        match self {
            OptValue::Float(_) => "a number",
            OptValue::Count(_) => "a positive integer",
            OptValue::List(_) => "an array of numbers",
        }
    }

    fn to_toml(&self) -> String {
        match self {
            OptValue::Float(x) => fmt_num(*x),
            OptValue::Count(n) => n.to_string(),
            OptValue::List(v) => format!("[{}]", v.iter().map(|x| fmt_num(*x)).collect::<Vec<_>>().join(", ")),
        }
    }
}

fn as_f64(v: &toml::Value) -> Option<f64> {
    match v {
        toml::Value::Float(x) => Some(*x),
        toml::Value::Integer(n) => Some(*n as f64),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub params: PlasmaParams,
    /// Every accepted key, defaults filled in, in declaration order.
    pub options: Vec<(String, OptValue)>,
    pub output: Option<String>,
    pub seed: u64,
}

impl ExperimentConfig {
    fn opt(&self, key: &str) -> &OptValue {
        &self.options.iter().find(|(k, _)| k == key).expect("option declared for this experiment").1
    }

    pub fn float(&self, key: &str) -> f64 {
        match self.opt(key) {
            OptValue::Float(x) => *x,
            OptValue::Count(n) => *n as f64,
            OptValue::List(_) => f64::NAN,
        }
    }

    pub fn count(&self, key: &str) -> usize {
        match self.opt(key) {
            OptValue::Count(n) => *n as usize,
            _ => 0,
        }
    }

    pub fn list(&self, key: &str) -> Vec<f64> {
        match self.opt(key) {
            OptValue::List(v) => v.clone(),
            _ => Vec::new(),
        }
    }

    /// The config as TOML text; [`parse_config`] reads it back unchanged.
    pub fn to_toml(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "experiment = \"{}\"", self.experiment.name());
        let _ = writeln!(s, "seed = {}", self.seed);
        if let Some(out) = &self.output {
            let _ = writeln!(s, "output = {}", toml::Value::String(out.clone()));
        }
        s.push_str("[params]\n");
        for (k, v) in RawParams::KEYS.iter().zip(self.params.raw().values()) {
            let _ = writeln!(s, "{k} = {}", fmt_num(v));
        }
        s.push_str("[options]\n");
        for (k, v) in &self.options {
            let _ = writeln!(s, "{k} = {}", v.to_toml());
        }
        s
    }
}

/// Seventeen significant digits; parses back to the same `f64`.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

/// 1-based line of `key` inside `[section]` (top level for `None`).
fn locate(text: &str, section: Option<&str>, key: &str) -> Option<usize> {
    let mut current: Option<String> = None;
    for (n, line) in text.lines().enumerate() {
        let t = line.trim();
        if let Some(name) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            current = Some(name.trim().to_string());
            continue;
        }
        let lhs = t.split('=').next().unwrap_or("").trim().trim_matches('"');
        if t.contains('=') && lhs == key && current.as_deref() == section {
            return Some(n + 1);
        }
    }
    None
}

fn line_of_offset(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

pub fn parse_config(text: &str) -> CliResult<ExperimentConfig> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| CliError::TypeMismatch {
        key: "<document>".into(),
        expected: format!("valid TOML ({})", e.message()),
        line: e.span().map(|s| line_of_offset(text, s.start)),
    })?;
    let mismatch = |section: Option<&str>, key: &str, expected: &str| CliError::TypeMismatch {
        key: key.to_string(),
        expected: expected.to_string(),
        line: locate(text, section, key),
    };
    for key in table.keys() {
        if !["experiment", "seed", "output", "params", "options"].contains(&key.as_str()) {
            return Err(CliError::UnknownKey { key: key.clone(), line: locate(text, None, key) });
        }
    }
    let name = match table.get("experiment") {
        None => return Err(CliError::MissingKey { key: "experiment".into() }),
        Some(toml::Value::String(s)) => s.clone(),
        Some(_) => return Err(mismatch(None, "experiment", "a string")),
    };
    let experiment = Experiment::from_name(&name).ok_or_else(|| {
        let names: Vec<&str> = Experiment::ALL.iter().map(|e| e.name()).collect();
        mismatch(None, "experiment", &format!("one of {}", names.join(", ")))
    })?;
    let seed = match table.get("seed") {
        None => 0,
        Some(toml::Value::Integer(n)) if *n >= 0 => *n as u64,
        Some(_) => return Err(mismatch(None, "seed", "a non-negative integer")),
    };
    let output = match table.get("output") {
        None => None,
        Some(toml::Value::String(s)) => Some(s.clone()),
        Some(_) => return Err(mismatch(None, "output", "a string")),
    };

    let params_table = match table.get("params") {
        None => return Err(CliError::MissingKey { key: "params".into() }),
        Some(toml::Value::Table(t)) => t,
        Some(_) => return Err(mismatch(None, "params", "a table")),
    };
    for key in params_table.keys() {
        if !RawParams::KEYS.contains(&key.as_str()) {
            return Err(CliError::UnknownKey { key: format!("params.{key}"), line: locate(text, Some("params"), key) });
        }
    }
    let mut values = [0.0; 8];
    for (slot, key) in values.iter_mut().zip(RawParams::KEYS) {
        let v = params_table.get(key).ok_or_else(|| CliError::MissingKey { key: format!("params.{key}") })?;
        *slot = as_f64(v).ok_or_else(|| mismatch(Some("params"), key, "a number"))?;
        if !(*slot > 0.0) || !slot.is_finite() {
            return Err(mismatch(Some("params"), key, "a positive finite number"));
        }
    }
    let params = validate(&RawParams::from_values(values)).map_err(|e| CliError::Run {
        experiment: experiment.name().into(),
        source: e,
    })?;

    let defaults = experiment.option_defaults();
    let empty = toml::Table::new();
    let opts = match table.get("options") {
        None => &empty,
        Some(toml::Value::Table(t)) => t,
        Some(_) => return Err(mismatch(None, "options", "a table")),
    };
    for key in opts.keys() {
        if !defaults.iter().any(|(k, _)| k == key) {
            return Err(CliError::UnknownKey { key: format!("options.{key}"), line: locate(text, Some("options"), key) });
        }
    }
    let mut options = Vec::with_capacity(defaults.len());
    for (key, default) in defaults {
        let bad = || mismatch(Some("options"), key, default.expected());
        let value = match (opts.get(key), &default) {
            (None, _) => default.clone(),
            (Some(v), OptValue::Float(_)) => OptValue::Float(as_f64(v).filter(|x| x.is_finite()).ok_or_else(bad)?),
            (Some(toml::Value::Integer(n)), OptValue::Count(_)) if *n > 0 => OptValue::Count(*n as u64),
            (Some(toml::Value::Array(a)), OptValue::List(_)) => {
                OptValue::List(a.iter().map(as_f64).collect::<Option<Vec<_>>>().ok_or_else(bad)?)
            }
            _ => return Err(bad()),
        };
        options.push((key.to_string(), value));
    }
    Ok(ExperimentConfig { experiment, params, options, output, seed })
}

/// Recovers the config from the header of an emitted file.
pub fn config_from_emitted(text: &str) -> CliResult<ExperimentConfig> {
    let mut cfg = String::new();
    for line in text.lines().skip(1) {
        let Some(body) = line.strip_prefix("# ") else { break };
        if body.trim() == "[results]" {
            break;
        }
        cfg.push_str(body);
        cfg.push('\n');
    }
    parse_config(&cfg)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub config: ExperimentConfig,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Scalar results such as fitted exponents, written to the header.
    pub notes: Vec<(String, f64)>,
}

impl ResultTable {
    pub fn new(config: &ExperimentConfig, columns: &[&str]) -> Self {
        ResultTable {
            config: config.clone(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the column count");
        self.rows.push(row);
    }

    pub fn note(&mut self, key: &str, value: f64) {
        self.notes.push((key.to_string(), value));
    }

    pub fn get_note(&self, key: &str) -> Option<f64> {
        self.notes.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut s = format!("# emlab {}\n", env!("CARGO_PKG_VERSION"));
        for line in self.config.to_toml().lines() {
            let _ = writeln!(s, "# {line}");
        }
        if !self.notes.is_empty() {
            s.push_str("# [results]\n");
            for (k, v) in &self.notes {
                let _ = writeln!(s, "# {k} = {}", fmt_num(*v));
            }
        }
        if !self.columns.is_empty() {
            let _ = writeln!(s, "{}", self.columns.join(","));
        }
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|x| fmt_num(*x)).collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }
}

pub fn emit(table: &ResultTable, path: &Path) -> CliResult<()> {
    std::fs::write(path, table.to_csv()).map_err(|e| CliError::IoFailure(format!("{}: {e}", path.display())))
}

/// Column names and rows of an emitted CSV.
pub fn read_csv(text: &str) -> CliResult<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let columns: Vec<String> = match lines.next() {
        Some(h) if !h.is_empty() => h.split(',').map(str::to_string).collect(),
        _ => Vec::new(),
    };
    let mut rows = Vec::new();
    for (n, line) in lines.enumerate() {
        let row = line
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| CliError::IoFailure(format!("row {}: {e}", n + 1)))?;
        if row.len() != columns.len() {
            return Err(CliError::IoFailure(format!("row {} has {} cells, expected {}", n + 1, row.len(), columns.len())));
        }
        rows.push(row);
    }
    Ok((columns, rows))
}
