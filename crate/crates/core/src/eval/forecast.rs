//! Rolling-window one-step-ahead forecasting with hold-out tuning of `(c, d)`.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{dm_test, mae, rmse, DmResult};
use crate::baselines::{lasso_on_design, oga3_on_design, oga_path, LassoConfig, LassoVariant};
use crate::fhtd::{assemble_model, fhtd_on_design, fsr_path, stop_and_trim, FhtdConfig, SelectedModel, SelectionPath};
use crate::projection::{ColumnId, LagDesign};
use crate::scalar::Real;
use crate::tsdgp::Dataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Lasso,
    Alasso,
    Oga3,
    ArAlasso,
    ArOga3,
    Fhtd,
}

impl Method {
    /// Table order.
    pub const ALL: [Method; 6] =
        [Method::Lasso, Method::Alasso, Method::Oga3, Method::ArAlasso, Method::ArOga3, Method::Fhtd];

    pub fn label(self) -> &'static str {
        match self {
            Method::Lasso => "LASSO",
            Method::Alasso => "ALasso",
            Method::Oga3 => "OGA-3",
            Method::ArAlasso => "AR-ALasso",
            Method::ArOga3 => "AR-OGA-3",
            Method::Fhtd => "FHTD",
        }
    }

    fn tuned(self) -> bool {
        matches!(self, Method::Fhtd | Method::ArOga3)
    }

    /// Runs this selector on a full dataset with fixed tuning constants.
    pub fn select<T: Real>(
        self,
        data: &Dataset<T>,
        selector: &FhtdConfig<T>,
        lasso: &LassoConfig<T>,
        intercept: bool,
    ) -> Result<SelectedModel<T>, String> {
        let design = selector.design(data).map_err(|e| e.to_string())?;
        match self {
            Method::Fhtd => fhtd_on_design(&design, selector, intercept).map_err(|e| e.to_string()),
            Method::Oga3 | Method::ArOga3 => {
                oga3_on_design(&design, selector, self == Method::ArOga3, intercept).map_err(|e| e.to_string())
            }
            Method::Lasso | Method::Alasso | Method::ArAlasso => {
                let lc = LassoConfig { intercept, ..lasso.clone() };
                lasso_on_design(&design, &lc, self.lasso_variant()).map_err(|e| e.to_string())
            }
        }
    }

    fn lasso_variant(self) -> LassoVariant {
        match self {
            Method::Alasso => LassoVariant::Alasso,
            Method::ArAlasso => LassoVariant::ArAlasso,
            _ => LassoVariant::Lasso,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ForecastError {
    #[error("window too small: {reason}")]
    WindowTooSmall { reason: String },
    #[error("no forecasting methods configured")]
    NoMethods,
    #[error("{method} failed in window {window}: {message}")]
    Method { method: Method, window: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, bound(deserialize = "T: Real + serde::de::DeserializeOwned", serialize = "T: Serialize"))]
pub struct ForecastConfig<T> {
    /// Number of one-step forecasts (the last `test_size` observations).
    pub test_size: usize,
    /// Observations per training window; all data before the first target when unset.
    pub train_window: Option<usize>,
    pub methods: Vec<Method>,
    /// Demean, select, then refit with an intercept.
    pub intercept: bool,
    pub c_grid: Vec<T>,
    pub d_grid: Vec<T>,
    /// Share of training rows held out for tuning.
    pub validation_fraction: T,
    /// Tune `(c, d)` in the first window only.
    pub freeze_tuning: bool,
    /// `q`, `max_lag`, `k_max`, `η` and threshold mode; `c` and `d` are tuned.
    pub selector: FhtdConfig<T>,
    pub lasso: LassoConfig<T>,
    /// Bartlett lag of the Diebold–Mariano variance.
    pub dm_lag: usize,
    /// Method the others are tested against; the first configured method if absent.
    pub dm_reference: Method,
}

fn default_grid<T: Real>() -> Vec<T> {
    (1..=7).map(|i| T::lit(i as f64 / 10.0)).collect()
}

impl<T: Real> Default for ForecastConfig<T> {
    fn default() -> Self {
        Self {
            test_size: 24,
            train_window: None,
            methods: Method::ALL.to_vec(),
            intercept: false,
            c_grid: default_grid(),
            d_grid: default_grid(),
            validation_fraction: T::lit(0.2),
            freeze_tuning: false,
            selector: FhtdConfig::default(),
            lasso: LassoConfig::default(),
            dm_lag: 0,
            dm_reference: Method::Fhtd,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastRecord<T> {
    pub window: usize,
    /// 0-based index of the forecast target.
    pub target: usize,
    pub actual: T,
    /// One entry per configured method, in configuration order.
    pub predicted: Vec<T>,
    pub abs_error: Vec<T>,
    /// Chosen `(c, d)` for tuned methods.
    pub tuned: Vec<Option<(T, T)>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: Method,
    pub rmse: f64,
    pub mae: f64,
    /// DM test against the report's reference method (absent for that method).
    pub dm_vs_reference: Option<DmResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastReport<T> {
    pub methods: Vec<Method>,
    pub reference: Method,
    pub records: Vec<ForecastRecord<T>>,
    pub summary: Vec<MethodSummary>,
}

/// One tuned model: selection on a fit block plus everything needed to
/// reuse the `c`-dependent stages across `d`.
struct Tuner<'a, T: Real> {
    sel: LagDesign<T>,
    raw: &'a LagDesign<T>,
    path: SelectionPath<T>,
    intercept: bool,
    ar_forced_threshold: bool,
    trims: HashMap<usize, (usize, Vec<ColumnId>)>,
}

impl<'a, T: Real> Tuner<'a, T> {
    fn new(raw: &'a LagDesign<T>, method: Method, config: &ForecastConfig<T>) -> Result<Self, String> {
        let sel = if config.intercept { raw.centered() } else { raw.clone() };
        let path = match method {
            Method::Fhtd => fsr_path(&sel, &config.selector),
            Method::ArOga3 => oga_path(&sel, &config.selector, true),
            _ => oga_path(&sel, &config.selector, false),
        }
        .map_err(|e| e.to_string())?;
        Ok(Self {
            sel,
            raw,
            path,
            intercept: config.intercept,
            ar_forced_threshold: method != Method::Oga3,
            trims: HashMap::new(),
        })
    }

    fn model(&mut self, ci: usize, c: T, d: T, base: &FhtdConfig<T>) -> SelectedModel<T> {
        let cfg = FhtdConfig { c, d, ..base.clone() };
        let w = cfg.penalty_weight(self.sel.p_star());
        let (sel, path) = (&self.sel, &self.path);
        let (k, kept) = self.trims.entry(ci).or_insert_with(|| stop_and_trim(sel, path, w));
        assemble_model(&self.sel, self.raw, self.intercept, &self.path, (*k, kept), &cfg, self.ar_forced_threshold)
    }
}

fn one_step_errors<T: Real>(model: &SelectedModel<T>, data: &Dataset<T>, targets: std::ops::Range<usize>) -> Vec<T> {
    targets.map(|t| data.y[t] - model.predict_at(&data.y, &data.x, t)).collect()
}

struct WindowOutcome<T> {
    prediction: T,
    tuned: Option<(T, T)>,
}

fn forecast_window<T: Real>(
    data: &Dataset<T>,
    train: std::ops::Range<usize>,
    method: Method,
    config: &ForecastConfig<T>,
    frozen: Option<(T, T)>,
) -> Result<WindowOutcome<T>, String> {
    let target = train.end;
    let q = config.selector.resolved_q(train.len());
    let r = config.selector.max_lag.unwrap_or(data.max_lag);
    let window = data.slice(train.clone());
    let design = LagDesign::new(&window, q, r).map_err(|e| e.to_string())?;

    let (model, tuned) = match method {
        Method::Lasso | Method::Alasso | Method::ArAlasso => {
            let lc = LassoConfig { intercept: config.intercept, ..config.lasso.clone() };
            (lasso_on_design(&design, &lc, method.lasso_variant()).map_err(|e| e.to_string())?, None)
        }
        Method::Oga3 => {
            let mut tuner = Tuner::new(&design, method, config)?;
            (tuner.model(0, config.selector.c, config.selector.d, &config.selector), None)
        }
        Method::Fhtd | Method::ArOga3 => {
            let (c, d) = match frozen {
                Some(cd) => cd,
                None => tune(&window, q, r, method, config)?,
            };
            let mut tuner = Tuner::new(&design, method, config)?;
            (tuner.model(0, c, d, &config.selector), Some((c, d)))
        }
    };
    Ok(WindowOutcome { prediction: model.predict_at(&data.y, &data.x, target), tuned })
}

/// Grid search over `(c, d)` by one-step RMSE on the last rows of the window,
/// using a single selection on the preceding rows. Ties keep the earliest grid point.
fn tune<T: Real>(
    window: &Dataset<T>,
    q: usize,
    r: usize,
    method: Method,
    config: &ForecastConfig<T>,
) -> Result<(T, T), String> {
    let n = window.n();
    let r_bar = q.max(r);
    let rows = n.saturating_sub(r_bar);
    let n_val = (T::count(rows) * config.validation_fraction).round().to_usize().unwrap_or(0).max(1);
    if n_val >= rows {
        return Err(format!("{rows} training rows leave nothing to fit after holding out {n_val}"));
    }
    let fit_block = window.slice(0..n - n_val);
    let design = LagDesign::new(&fit_block, q, r).map_err(|e| e.to_string())?;
    let mut tuner = Tuner::new(&design, method, config)?;
    let mut best: Option<(T, T, T)> = None;
    for (ci, &c) in config.c_grid.iter().enumerate() {
        for &d in &config.d_grid {
            let model = tuner.model(ci, c, d, &config.selector);
            let score = rmse(&one_step_errors(&model, window, n - n_val..n));
            if score.is_finite() && best.is_none_or(|(_, _, s)| score < s) {
                best = Some((c, d, score));
            }
        }
    }
    best.map(|(c, d, _)| (c, d)).ok_or_else(|| "no finite validation error on the tuning grid".into())
}

/// Rolling one-step-ahead forecasts of the last `test_size` observations.
pub fn rolling_forecast<T: Real>(
    data: &Dataset<T>,
    config: &ForecastConfig<T>,
) -> Result<ForecastReport<T>, ForecastError> {
    if config.methods.is_empty() {
        return Err(ForecastError::NoMethods);
    }
    let n = data.n();
    if config.test_size == 0 || config.test_size >= n {
        return Err(ForecastError::WindowTooSmall {
            reason: format!("test size {} with {n} observations", config.test_size),
        });
    }
    let first_target = n - config.test_size;
    let width = config.train_window.unwrap_or(first_target);
    if width > first_target || width == 0 {
        return Err(ForecastError::WindowTooSmall {
            reason: format!("training window {width} exceeds the {first_target} observations before the first target"),
        });
    }

    let mut frozen: Vec<Option<(T, T)>> = vec![None; config.methods.len()];
    let mut records = Vec::with_capacity(config.test_size);
    for (w, target) in (first_target..n).enumerate() {
        let train = target - width..target;
        let mut rec = ForecastRecord {
            window: w,
            target,
            actual: data.y[target],
            predicted: Vec::with_capacity(config.methods.len()),
            abs_error: Vec::with_capacity(config.methods.len()),
            tuned: Vec::with_capacity(config.methods.len()),
        };
        for (m, &method) in config.methods.iter().enumerate() {
            let freeze = if config.freeze_tuning && method.tuned() { frozen[m] } else { None };
            let out = forecast_window(data, train.clone(), method, config, freeze)
                .map_err(|message| ForecastError::Method { method, window: w, message })?;
            if !out.prediction.is_finite() {
                return Err(ForecastError::Method { method, window: w, message: "non-finite prediction".into() });
            }
            if config.freeze_tuning && frozen[m].is_none() {
                frozen[m] = out.tuned;
            }
            rec.predicted.push(out.prediction);
            rec.abs_error.push((rec.actual - out.prediction).abs());
            rec.tuned.push(out.tuned);
        }
        records.push(rec);
    }

    let errors: Vec<Vec<T>> =
        (0..config.methods.len()).map(|m| records.iter().map(|r| r.actual - r.predicted[m]).collect()).collect();
    let reference = config.methods.iter().position(|&m| m == config.dm_reference).unwrap_or(0);
    let summary = config
        .methods
        .iter()
        .enumerate()
        .map(|(m, &method)| MethodSummary {
            method,
            rmse: rmse(&errors[m]).as_f64(),
            mae: mae(&errors[m]).as_f64(),
            dm_vs_reference: if m == reference {
                None
            } else {
                dm_test(&errors[m], &errors[reference], config.dm_lag).ok()
            },
        })
        .collect();
    Ok(ForecastReport { methods: config.methods.clone(), reference: config.methods[reference], records, summary })
}
