use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fhtd_core::eval::Method;
use fhtd_core::harness::{
    check_failures, emit_tables, load_csv, preset, run_experiment, write_report, ConfigError, ExperimentConfig,
    ExperimentKind, HarnessError, OutputFormat,
};
use fhtd_core::tsdgp::{builtin_spec, simulate};

#[derive(Parser)]
#[command(name = "fhtd", version, about = "Model selection for high-dimensional unit-root ARX series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte-Carlo selection tables (kinds table1, table2, table_s5).
    Simulate(Common),
    /// Select a model for one dataset (the config's CSV, or one simulated replication) and print JSON.
    Select(Common),
    /// Rolling one-step-ahead forecasts on the config's CSV.
    Forecast(Common),
    /// Example checks (kinds example21, example22, example31); all three presets without --config.
    Examples(Common),
}

#[derive(Args)]
struct Common {
    /// TOML config file or preset name (e.g. ex41-n400, housing-like).
    #[arg(long)]
    config: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    reps: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
    /// Output directory for Markdown/CSV reports (a JSON file for `select`).
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig, HarnessError> {
        let name = self.config.as_deref().ok_or_else(|| ConfigError::Invalid("--config is required".into()))?;
        let cfg = ExperimentConfig::load(name)?;
        Ok(self.apply(cfg))
    }

    fn apply(&self, mut cfg: ExperimentConfig) -> ExperimentConfig {
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(r) = self.reps {
            cfg.reps = r;
        }
        if self.threads.is_some() {
            cfg.threads = self.threads;
        }
        if self.out.is_some() {
            cfg.output.dir = self.out.clone();
        }
        cfg
    }
}

fn require(cfg: &ExperimentConfig, ok: bool, command: &str) -> Result<(), HarnessError> {
    if ok {
        Ok(())
    } else {
        Err(ConfigError::Invalid(format!("experiment kind {:?} cannot run under `{command}`", cfg.kind)).into())
    }
}

fn run_and_emit(cfg: &ExperimentConfig) -> Result<(), HarnessError> {
    let report = run_experiment(cfg)?;
    print!("{}", emit_tables(&report, OutputFormat::Md));
    if let Some(dir) = &cfg.output.dir {
        for path in write_report(&report, dir, &cfg.name(), &cfg.output.formats)? {
            eprintln!("wrote {}", path.display());
        }
    }
    check_failures(&report, cfg.max_failure_rate)
}

fn select(cfg: &ExperimentConfig, out: Option<&PathBuf>) -> Result<(), HarnessError> {
    cfg.validate()?;
    let data = match (&cfg.data, cfg.kind.builtin()) {
        (Some(spec), _) => load_csv(spec)?.dataset,
        (None, Some(b)) => {
            let tier =
                *cfg.resolved_tiers().first().ok_or_else(|| ConfigError::Invalid("no size tier configured".into()))?;
            simulate(&builtin_spec(b, tier)?, cfg.seed)?
        }
        (None, None) => return Err(ConfigError::Invalid("select needs a [data] section or a table kind".into()).into()),
    };
    let (selector, lasso, intercept) = if cfg.kind == ExperimentKind::Forecast {
        (&cfg.forecast.selector, &cfg.forecast.lasso, cfg.forecast.intercept)
    } else {
        (&cfg.fhtd, &cfg.lasso, false)
    };
    let mut models = serde_json::Map::new();
    for m in &cfg.methods {
        let value = match m.select(&data, selector, lasso, intercept) {
            Ok(model) => serde_json::to_value(model).map_err(|e| HarnessError::Example(e.to_string()))?,
            Err(e) => serde_json::json!({ "error": e }),
        };
        models.insert(method_key(*m), value);
    }
    let text = serde_json::to_string_pretty(&serde_json::Value::Object(models)).unwrap_or_default();
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|source| HarnessError::Io { path: dir.clone(), source })?;
            let path = dir.join(format!("{}_select.json", cfg.name()));
            std::fs::write(&path, text + "\n").map_err(|source| HarnessError::Io { path: path.clone(), source })?;
            eprintln!("wrote {}", path.display());
        }
        None => println!("{text}"),
    }
    Ok(())
}

fn method_key(m: Method) -> String {
    serde_json::to_value(m).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_else(|| m.to_string())
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Simulate(c) => {
            let cfg = c.load()?;
            require(&cfg, cfg.kind.is_table(), "simulate")?;
            run_and_emit(&cfg)
        }
        Command::Select(c) => {
            let cfg = c.load()?;
            select(&cfg, c.out.as_ref())
        }
        Command::Forecast(c) => {
            let cfg = c.load()?;
            require(&cfg, cfg.kind == ExperimentKind::Forecast, "forecast")?;
            run_and_emit(&cfg)
        }
        Command::Examples(c) => {
            let configs = match &c.config {
                Some(_) => vec![c.load()?],
                None => ["example21", "example22", "example31"]
                    .iter()
                    .filter_map(|name| preset(name))
                    .map(|cfg| c.apply(cfg))
                    .collect(),
            };
            for cfg in &configs {
                require(cfg, cfg.kind.is_example(), "examples")?;
                println!("## {}\n", cfg.name());
                run_and_emit(cfg)?;
                println!();
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
