//! Config-driven experiments: Monte-Carlo selection tables, the example
//! checks and rolling forecasts, plus Markdown/CSV emission.

mod config;
mod data;
mod report;

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use config::{
    housing_like_dataset, housing_like_forecast, preset, preset_names, ConfigError, Example21Config, Example22Config,
    Example31Config, ExperimentConfig, ExperimentKind, OutputConfig, OutputFormat,
};
pub use data::{housing_like_csv, load_csv, parse_csv, CsvDataset, DataError, LoadedData, Transform};
pub use report::emit_tables;

use crate::eval::{
    example21_limit, example21_oga, example22_frequencies, example31_mspe, rolling_forecast, Example21Limit,
    Example21Oga, Example22Point, Example31Mspe, ForecastError, ForecastReport, Method, SelectionTally,
};
use crate::tsdgp::{builtin_spec, simulate, SimulationError, SizeTier};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Simulation(#[from] SimulationError),
    #[error(transparent)]
    Forecast(#[from] ForecastError),
    #[error("{0}")]
    Example(String),
    #[error("thread pool: {0}")]
    ThreadPool(String),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{method} failed in {failures} of {attempts} replications at n = {n}")]
    TooManyFailures { method: Method, n: usize, failures: u64, attempts: u64 },
}

impl HarnessError {
    /// Exit status for the command-line driver: 1 for configuration problems, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 1,
            _ => 2,
        }
    }
}

/// Tallies of every method at one size tier, in configuration order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TierResult {
    pub tier: SizeTier,
    pub tallies: Vec<SelectionTally>,
    /// First error message per method, if any replication failed.
    pub first_errors: Vec<Option<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub design: String,
    pub methods: Vec<Method>,
    pub tiers: Vec<TierResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExperimentReport {
    Selection(SelectionReport),
    Example21 { a: f64, n: usize, limit: Example21Limit, oga_n: usize, oga_p: usize, oga: Example21Oga },
    Example22 { n: usize, points: Vec<Example22Point> },
    Example31 { k: usize, n: usize, mspe: Example31Mspe },
    Forecast(ForecastReport<f64>),
}

fn pool(threads: Option<usize>) -> Result<rayon::ThreadPool, HarnessError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        b = b.num_threads(t);
    }
    b.build().map_err(|e| HarnessError::ThreadPool(e.to_string()))
}

/// One replication: every method's outcome, or its error message.
fn replicate(
    config: &ExperimentConfig,
    tier: SizeTier,
    r: u64,
) -> Result<Vec<Result<SelectionTally, String>>, SimulationError> {
    let spec = builtin_spec(config.kind.builtin().expect("table kind"), tier)?;
    let data = simulate(&spec, config.seed ^ r)?;
    Ok(config
        .methods
        .iter()
        .map(|m| {
            let model = m.select(&data, &config.fhtd, &config.lasso, false)?;
            let mut t = SelectionTally::default();
            t.tally(&data.true_q, &data.true_j, &model.q_hat, &model.j_hat);
            Ok(t)
        })
        .collect())
}

fn run_tables(config: &ExperimentConfig) -> Result<SelectionReport, HarnessError> {
    let pool = pool(config.threads)?;
    let design = config.kind.builtin().map(|b| b.label()).unwrap_or_default();
    let mut tiers = Vec::new();
    for tier in config.resolved_tiers() {
        let outcomes: Vec<_> = pool.install(|| {
            (0..config.reps).into_par_iter().map(|r| replicate(config, tier, r)).collect::<Result<Vec<_>, _>>()
        })?;
        let mut tallies = vec![SelectionTally::default(); config.methods.len()];
        let mut first_errors = vec![None; config.methods.len()];
        for rep in outcomes {
            for (m, outcome) in rep.into_iter().enumerate() {
                match outcome {
                    Ok(t) => tallies[m] = tallies[m].merge(&t),
                    Err(e) => {
                        tallies[m].record_failure();
                        first_errors[m].get_or_insert(e);
                    }
                }
            }
        }
        tiers.push(TierResult { tier, tallies, first_errors });
    }
    Ok(SelectionReport { design, methods: config.methods.clone(), tiers })
}

/// Runs the configured experiment. Method failures within replications are
/// counted in the report; see [`check_failures`] for the failure-rate rule.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport, HarnessError> {
    config.validate()?;
    let example = |e: Box<dyn std::error::Error + Send + Sync>| HarnessError::Example(e.to_string());
    let report = match config.kind {
        ExperimentKind::Table1 | ExperimentKind::Table2 | ExperimentKind::TableS5 => {
            ExperimentReport::Selection(run_tables(config)?)
        }
        ExperimentKind::Example21 => {
            let c = &config.example21;
            let limit = example21_limit(c.a, c.n, config.reps, config.seed)?;
            let oga = example21_oga(c.a, c.oga_n, c.oga_p, c.k_max, config.reps, config.seed).map_err(example)?;
            ExperimentReport::Example21 { a: c.a, n: c.n, limit, oga_n: c.oga_n, oga_p: c.oga_p, oga }
        }
        ExperimentKind::Example22 => {
            let c = &config.example22;
            let points = example22_frequencies(c.n, &c.grid(), config.reps, config.seed).map_err(example)?;
            ExperimentReport::Example22 { n: c.n, points }
        }
        ExperimentKind::Example31 => {
            let c = &config.example31;
            ExperimentReport::Example31 { k: c.k, n: c.n, mspe: example31_mspe(c.k, c.n, config.reps, config.seed)? }
        }
        ExperimentKind::Forecast => {
            let spec = config.data.as_ref().ok_or_else(|| ConfigError::Invalid("missing [data]".into()))?;
            let loaded = load_csv(spec)?;
            let report = pool(config.threads)?.install(|| rolling_forecast(&loaded.dataset, &config.forecast))?;
            ExperimentReport::Forecast(report)
        }
    };
    Ok(report)
}

/// Fails if any method's failure share exceeds `limit` at some tier.
pub fn check_failures(report: &ExperimentReport, limit: f64) -> Result<(), HarnessError> {
    if let ExperimentReport::Selection(sel) = report {
        for tier in &sel.tiers {
            for (m, t) in sel.methods.iter().zip(&tier.tallies) {
                if t.failure_rate() > limit {
                    return Err(HarnessError::TooManyFailures {
                        method: *m,
                        n: tier.tier.n,
                        failures: t.failures,
                        attempts: t.reps + t.failures,
                    });
                }
            }
        }
    }
    Ok(())
}

/// Writes `<dir>/<stem>.md` and/or `<dir>/<stem>.csv`; returns the paths written.
pub fn write_report(
    report: &ExperimentReport,
    dir: &Path,
    stem: &str,
    formats: &[OutputFormat],
) -> Result<Vec<PathBuf>, HarnessError> {
    std::fs::create_dir_all(dir).map_err(|source| HarnessError::Io { path: dir.into(), source })?;
    let mut written = Vec::new();
    for &format in formats {
        let ext = match format {
            OutputFormat::Md => "md",
            OutputFormat::Csv => "csv",
        };
        let path = dir.join(format!("{stem}.{ext}"));
        std::fs::write(&path, emit_tables(report, format))
            .map_err(|source| HarnessError::Io { path: path.clone(), source })?;
        written.push(path);
    }
    Ok(written)
}
