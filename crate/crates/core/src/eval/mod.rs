//! Selection metrics, forecast accuracy measures, the Diebold–Mariano test and
//! the Monte-Carlo checks of the motivating examples.

mod examples;
mod forecast;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

pub use examples::{
    example21_limit, example21_oga, example22_frequencies, example31_mspe, min_eigen_survey, Example21Limit,
    Example21Oga, Example22Point, Example31Mspe,
};
pub use forecast::{
    rolling_forecast, ForecastConfig, ForecastError, ForecastRecord, ForecastReport, Method, MethodSummary,
};

use crate::scalar::Real;
use crate::types::ExoIndex;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("series lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least {needed} observations, got {got}")]
    TooShort { needed: usize, got: usize },
}

/// Running E / SS / TP / FP counts over replications.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionTally {
    pub reps: u64,
    pub e_count: u64,
    pub ss_count: u64,
    pub tp_sum: u64,
    pub fp_sum: u64,
    /// Replications in which the method returned an error.
    pub failures: u64,
}

impl SelectionTally {
    pub fn tally(
        &mut self,
        true_q: &BTreeSet<usize>,
        true_j: &BTreeSet<ExoIndex>,
        est_q: &BTreeSet<usize>,
        est_j: &BTreeSet<ExoIndex>,
    ) {
        self.reps += 1;
        let sure = true_q.is_subset(est_q) && true_j.is_subset(est_j);
        if sure {
            self.ss_count += 1;
            if est_q.len() == true_q.len() && est_j.len() == true_j.len() {
                self.e_count += 1;
            }
        }
        let tp = est_q.intersection(true_q).count() + est_j.intersection(true_j).count();
        let size = est_q.len() + est_j.len();
        self.tp_sum += tp as u64;
        self.fp_sum += (size - tp) as u64;
    }

    pub fn record_failure(&mut self) {
        self.failures += 1;
    }

    pub fn merge(&self, other: &Self) -> Self {
        Self {
            reps: self.reps + other.reps,
            e_count: self.e_count + other.e_count,
            ss_count: self.ss_count + other.ss_count,
            tp_sum: self.tp_sum + other.tp_sum,
            fp_sum: self.fp_sum + other.fp_sum,
            failures: self.failures + other.failures,
        }
    }

    fn per_rep(&self, v: u64) -> f64 {
        if self.reps == 0 {
            0.0
        } else {
            v as f64 / self.reps as f64
        }
    }

    pub fn e_rate(&self) -> f64 {
        self.per_rep(self.e_count)
    }

    pub fn ss_rate(&self) -> f64 {
        self.per_rep(self.ss_count)
    }

    pub fn tp_mean(&self) -> f64 {
        self.per_rep(self.tp_sum)
    }

    pub fn fp_mean(&self) -> f64 {
        self.per_rep(self.fp_sum)
    }

    /// Share of attempted replications that failed.
    pub fn failure_rate(&self) -> f64 {
        let total = self.reps + self.failures;
        if total == 0 {
            0.0
        } else {
            self.failures as f64 / total as f64
        }
    }
}

pub fn rmse<T: Real>(errors: &[T]) -> T {
    if errors.is_empty() {
        return T::zero();
    }
    (errors.iter().map(|e| *e * *e).sum::<T>() / T::count(errors.len())).sqrt()
}

/// Median absolute error.
pub fn mae<T: Real>(errors: &[T]) -> T {
    if errors.is_empty() {
        return T::zero();
    }
    let mut abs: Vec<T> = errors.iter().map(|e| e.abs()).collect();
    abs.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let m = abs.len() / 2;
    if abs.len() % 2 == 1 {
        abs[m]
    } else {
        (abs[m - 1] + abs[m]) / T::lit(2.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DmResult {
    pub statistic: f64,
    pub p_value: f64,
    /// The loss differential had zero variance.
    pub degenerate: bool,
}

pub const DM_MIN_LEN: usize = 10;

/// Diebold–Mariano test of equal absolute-error loss. Positive statistics mean
/// `errors_a` is less accurate. `bartlett_lag = 0` uses the plain sample
/// variance of the loss differential.
pub fn dm_test<T: Real>(errors_a: &[T], errors_b: &[T], bartlett_lag: usize) -> Result<DmResult, EvalError> {
    if errors_a.len() != errors_b.len() {
        return Err(EvalError::LengthMismatch(errors_a.len(), errors_b.len()));
    }
    let w = errors_a.len();
    if w < DM_MIN_LEN {
        return Err(EvalError::TooShort { needed: DM_MIN_LEN, got: w });
    }
    let d: Vec<f64> = errors_a.iter().zip(errors_b).map(|(a, b)| a.abs().as_f64() - b.abs().as_f64()).collect();
    let wf = w as f64;
    let mean = d.iter().sum::<f64>() / wf;
    let autocov = |k: usize| d[k..].iter().zip(&d).map(|(x, y)| (x - mean) * (y - mean)).sum::<f64>() / wf;
    let mut var = autocov(0);
    for k in 1..=bartlett_lag.min(w - 1) {
        var += 2.0 * (1.0 - k as f64 / (bartlett_lag as f64 + 1.0)) * autocov(k);
    }
    if var <= 0.0 || !var.is_finite() {
        let (statistic, p_value) = if mean == 0.0 { (0.0, 1.0) } else { (mean.signum() * f64::INFINITY, 0.0) };
        return Ok(DmResult { statistic, p_value, degenerate: true });
    }
    let statistic = mean / (var / wf).sqrt();
    let normal = Normal::standard();
    let p_value = (2.0 * (1.0 - normal.cdf(statistic.abs()))).clamp(0.0, 1.0);
    Ok(DmResult { statistic, p_value, degenerate: false })
}
