//! Declarative experiment configuration (TOML) and the named presets.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::data::{CsvDataset, Transform};
use crate::baselines::LassoConfig;
use crate::eval::{ForecastConfig, Method};
use crate::fhtd::FhtdConfig;
use crate::tsdgp::{BuiltinSpec, SizeTier, TIERS_MAIN, TIERS_S5};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("`{0}` is neither a config file nor a preset (presets: {presets})", presets = preset_names().join(", "))]
    UnknownPreset(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Table1,
    Table2,
    TableS5,
    Example21,
    Example22,
    Example31,
    Forecast,
}

impl ExperimentKind {
    pub fn builtin(self) -> Option<BuiltinSpec> {
        match self {
            ExperimentKind::Table1 => Some(BuiltinSpec::Ex41),
            ExperimentKind::Table2 => Some(BuiltinSpec::Ex42),
            ExperimentKind::TableS5 => Some(BuiltinSpec::ExS5),
            _ => None,
        }
    }

    pub fn is_table(self) -> bool {
        self.builtin().is_some()
    }

    pub fn is_example(self) -> bool {
        matches!(self, ExperimentKind::Example21 | ExperimentKind::Example22 | ExperimentKind::Example31)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Example21Config {
    pub a: f64,
    /// Sample size of the `(F₁−F₂)/n` estimate.
    pub n: usize,
    /// Sample size and covariate count of the OGA-path checks.
    pub oga_n: usize,
    pub oga_p: usize,
    pub k_max: usize,
}

impl Default for Example21Config {
    fn default() -> Self {
        Self { a: 0.3, n: 10_000, oga_n: 500, oga_p: 1000, k_max: 40 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Example22Config {
    pub n: usize,
    /// Explicit λ values; otherwise `n_lambda` log-spaced points on `[n^{1/2}, n^{3/2}]`.
    pub lambdas: Option<Vec<f64>>,
    pub n_lambda: usize,
}

impl Default for Example22Config {
    fn default() -> Self {
        Self { n: 2000, lambdas: None, n_lambda: 9 }
    }
}

impl Example22Config {
    pub fn grid(&self) -> Vec<f64> {
        if let Some(l) = &self.lambdas {
            return l.clone();
        }
        let (lo, hi) = ((self.n as f64).sqrt().ln(), (self.n as f64).powf(1.5).ln());
        let m = self.n_lambda.max(2);
        (0..m).map(|i| (lo + (hi - lo) * i as f64 / (m - 1) as f64).exp()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Example31Config {
    pub k: usize,
    pub n: usize,
}

impl Default for Example31Config {
    fn default() -> Self {
        Self { k: 2, n: 2000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Md,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Directory for report files; nothing is written when unset.
    pub dir: Option<PathBuf>,
    pub formats: Vec<OutputFormat>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: None, formats: vec![OutputFormat::Md, OutputFormat::Csv] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// File stem of the written reports.
    #[serde(default)]
    pub name: Option<String>,
    /// Size tiers; every published tier of the design when empty.
    #[serde(default)]
    pub tiers: Vec<SizeTier>,
    #[serde(default = "default_reps")]
    pub reps: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    /// Worker threads; rayon's default when unset.
    #[serde(default)]
    pub threads: Option<usize>,
    /// Share of replications a method may fail before the run fails.
    #[serde(default = "default_failure_limit")]
    pub max_failure_rate: f64,
    #[serde(default)]
    pub fhtd: FhtdConfig<f64>,
    #[serde(default)]
    pub lasso: LassoConfig<f64>,
    #[serde(default)]
    pub example21: Example21Config,
    #[serde(default)]
    pub example22: Example22Config,
    #[serde(default)]
    pub example31: Example31Config,
    #[serde(default)]
    pub forecast: ForecastConfig<f64>,
    #[serde(default)]
    pub data: Option<CsvDataset>,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_reps() -> u64 {
    1000
}

fn default_seed() -> u64 {
    20_240_601
}

fn default_methods() -> Vec<Method> {
    Method::ALL.to_vec()
}

fn default_failure_limit() -> f64 {
    0.01
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind) -> Self {
        Self {
            kind,
            name: None,
            tiers: Vec::new(),
            reps: default_reps(),
            seed: default_seed(),
            methods: default_methods(),
            threads: None,
            max_failure_rate: default_failure_limit(),
            fhtd: FhtdConfig::default(),
            lasso: LassoConfig::default(),
            example21: Example21Config::default(),
            example22: Example22Config::default(),
            example31: Example31Config::default(),
            forecast: ForecastConfig::default(),
            data: None,
            output: OutputConfig::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    /// Reads a TOML file (relative data paths resolve against its directory)
    /// or, if no such file exists, a preset name.
    pub fn load(path_or_preset: &str) -> Result<Self, ConfigError> {
        let path = Path::new(path_or_preset);
        if path.is_file() {
            let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
            let mut cfg = Self::from_toml(&text)?;
            if let (Some(data), Some(dir)) = (cfg.data.take(), path.parent()) {
                cfg.data = Some(data.with_base_dir(dir));
            }
            return Ok(cfg);
        }
        preset(path_or_preset).ok_or_else(|| ConfigError::UnknownPreset(path_or_preset.into()))
    }

    pub fn name(&self) -> String {
        self.name.clone().unwrap_or_else(|| {
            serde_json::to_value(self.kind).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
        })
    }

    /// Tiers to run: the configured ones, else the published ones.
    pub fn resolved_tiers(&self) -> Vec<SizeTier> {
        match (self.tiers.is_empty(), self.kind.builtin().and_then(|b| b.tiers())) {
            (false, _) => self.tiers.clone(),
            (true, Some(t)) => t.to_vec(),
            (true, None) => Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if self.reps == 0 {
            return bad("reps must be at least 1".into());
        }
        if self.threads == Some(0) {
            return bad("threads must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.max_failure_rate) {
            return bad(format!("max_failure_rate {} outside [0, 1]", self.max_failure_rate));
        }
        self.fhtd.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.lasso.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if let Some(b) = self.kind.builtin() {
            let allowed = b.tiers().unwrap_or(&[]);
            if let Some(t) = self.tiers.iter().find(|t| !allowed.contains(t)) {
                return bad(format!("tier ({}, {}, {}) is not a published tier of {}", t.n, t.p, t.r, b.label()));
            }
        }
        if self.kind == ExperimentKind::Forecast {
            if self.data.is_none() {
                return bad("forecast experiments need a [data] section".into());
            }
            if self.forecast.methods.is_empty() {
                return bad("forecast.methods is empty".into());
            }
            let grids_ok = |g: &[f64]| !g.is_empty() && g.iter().all(|v| v.is_finite() && *v > 0.0);
            if !grids_ok(&self.forecast.c_grid) || !grids_ok(&self.forecast.d_grid) {
                return bad("tuning grids must be nonempty and positive".into());
            }
            let f = self.forecast.validation_fraction;
            if !(f > 0.0 && f < 1.0) {
                return bad(format!("validation_fraction {f} outside (0, 1)"));
            }
        }
        if self.kind == ExperimentKind::Example21 && self.example21.a.abs() >= 1.0 {
            return bad("example21.a must satisfy |a| < 1".into());
        }
        if self.kind == ExperimentKind::Example31 && self.example31.k == 0 {
            return bad("example31.k must be at least 1".into());
        }
        Ok(())
    }
}

const PRESETS: &[&str] = &[
    "table1",
    "table2",
    "table_s5",
    "ex41-n200",
    "ex41-n400",
    "ex41-n800",
    "ex42-n200",
    "ex42-n400",
    "ex42-n800",
    "s5-n800",
    "s5-n1000",
    "s5-n1500",
    "example21",
    "example22",
    "example31",
    "housing-like",
];

pub fn preset_names() -> Vec<&'static str> {
    PRESETS.to_vec()
}

/// Built-in settings by name; `ex41-n400` is the `ex41` design at `n = 400` and so on.
/// `housing-like` reads `data/housing_like.csv` relative to the working directory.
pub fn preset(name: &str) -> Option<ExperimentConfig> {
    let single = |kind: ExperimentKind, tiers: &[SizeTier], n: usize| {
        let tier = *tiers.iter().find(|t| t.n == n)?;
        Some(ExperimentConfig { name: Some(name.into()), tiers: vec![tier], ..ExperimentConfig::new(kind) })
    };
    let named = |kind| Some(ExperimentConfig { name: Some(name.into()), ..ExperimentConfig::new(kind) });
    match name {
        "table1" => named(ExperimentKind::Table1),
        "table2" => named(ExperimentKind::Table2),
        "table_s5" => named(ExperimentKind::TableS5),
        "example21" => named(ExperimentKind::Example21),
        "example22" => Some(ExperimentConfig { reps: 500, ..named(ExperimentKind::Example22)? }),
        "example31" => Some(ExperimentConfig { reps: 5000, ..named(ExperimentKind::Example31)? }),
        "housing-like" => {
            let mut cfg = named(ExperimentKind::Forecast)?;
            cfg.data = Some(housing_like_dataset(PathBuf::from("data/housing_like.csv")));
            cfg.forecast = housing_like_forecast();
            Some(cfg)
        }
        _ => {
            let (design, n) = name.split_once("-n")?;
            let n: usize = n.parse().ok()?;
            match design {
                "ex41" => single(ExperimentKind::Table1, &TIERS_MAIN, n),
                "ex42" => single(ExperimentKind::Table2, &TIERS_MAIN, n),
                "s5" => single(ExperimentKind::TableS5, &TIERS_S5, n),
                _ => None,
            }
        }
    }
}

/// Column directives of the bundled synthetic housing-like panel.
pub fn housing_like_dataset(path: PathBuf) -> CsvDataset {
    CsvDataset {
        path,
        date: Some("date".into()),
        y: "starts".into(),
        y_transform: Transform::None,
        exogenous: Vec::new(),
        default_transform: Transform::SeasonalDiff { period: 12, log: true },
        transforms: [("rate".to_string(), Transform::Diff)].into_iter().collect(),
        max_lag: 6,
    }
}

/// Forecast settings matching the bundled panel (`q = r = 6`, 24 test points).
pub fn housing_like_forecast() -> ForecastConfig<f64> {
    let mut cfg = ForecastConfig::default();
    cfg.test_size = 24;
    cfg.selector.q = Some(6);
    cfg.selector.max_lag = Some(6);
    cfg
}
