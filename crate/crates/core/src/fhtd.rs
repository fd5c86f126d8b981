//! The FHTD selector: forward stepwise regression over exogenous lags with
//! every AR lag coerced in, an HDIC stopping rule, leave-one-out trimming and
//! data-driven thresholding of the AR coefficients.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::projection::{
    ols_solve, ols_solve_with_intercept, ActiveFit, CandidatePool, ColumnId, Criterion, LagDesign, ProjectionError,
};
use crate::scalar::Real;
use crate::tsdgp::Dataset;
use crate::types::{ExoIndex, Regressor};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FhtdError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("insufficient data: {rows} usable rows, need more than {needed}")]
    InsufficientData { rows: usize, needed: usize },
    #[error("no eligible candidate for forward selection")]
    NoEligibleCandidates,
    #[error("selection path is empty")]
    EmptyPath,
    #[error(transparent)]
    Projection(#[from] ProjectionError),
}

/// How the AR-coefficient threshold is computed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ThresholdMode<T> {
    /// `d · min{(q+ŝ₀)^{1/2}, ŝ₀_under^{1/2} q^{1/2}} / n^{1/2}`.
    Simulation,
    /// `d̃ · max{q^{3/2}/n^{1/2}, min{(q+ŝ₀)^{1/2}, ŝ₀_under^{1/2} q^{1/η}}} / n^{1/2}`,
    /// with `d̃ = log log n` unless supplied.
    Theoretical { d_tilde: Option<T> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FhtdConfig<T> {
    /// Number of coerced AR lags; `⌊2 n^{1/4}⌋` when unset.
    pub q: Option<usize>,
    /// Lag depth of every exogenous series; the dataset's `max_lag` when unset.
    pub max_lag: Option<usize>,
    /// Forward-selection iterations.
    pub k_max: usize,
    pub eta: T,
    /// HDIC penalty constant.
    pub c: T,
    /// Threshold constant.
    pub d: T,
    pub threshold_mode: ThresholdMode<T>,
    /// Caller-supplied HDIC penalty weight `w`; overrides `c·p*^{1/η}`.
    pub penalty: Option<T>,
}

impl<T: Real> Default for FhtdConfig<T> {
    fn default() -> Self {
        Self {
            q: None,
            max_lag: None,
            k_max: 40,
            eta: T::lit(2.0),
            c: T::lit(0.5),
            d: T::lit(0.5),
            threshold_mode: ThresholdMode::Simulation,
            penalty: None,
        }
    }
}

pub fn default_q(n: usize) -> usize {
    (2.0 * (n as f64).powf(0.25)).floor() as usize
}

impl<T: Real> FhtdConfig<T> {
    pub fn validate(&self) -> Result<(), FhtdError> {
        let bad = |m: &str| Err(FhtdError::InvalidConfig(m.into()));
        if self.q == Some(0) {
            return bad("q must be at least 1");
        }
        if self.k_max == 0 {
            return bad("k_max must be at least 1");
        }
        if !(self.c > T::zero()) {
            return bad("c must be positive");
        }
        if !(self.d > T::zero()) {
            return bad("d must be positive");
        }
        if !(self.eta >= T::lit(2.0)) {
            return bad("eta must be at least 2");
        }
        if let Some(w) = self.penalty {
            if !(w > T::zero()) {
                return bad("penalty weight must be positive");
            }
        }
        Ok(())
    }

    pub fn resolved_q(&self, n: usize) -> usize {
        self.q.unwrap_or_else(|| default_q(n).max(1))
    }

    pub fn resolved_max_lag(&self, data: &Dataset<T>) -> usize {
        self.max_lag.unwrap_or(data.max_lag)
    }

    /// HDIC penalty per regressor, `w = c·p*^{1/η}` unless overridden.
    pub fn penalty_weight(&self, p_star: usize) -> T {
        self.penalty.unwrap_or_else(|| self.c * T::count(p_star).powf(T::one() / self.eta))
    }

    pub fn design(&self, data: &Dataset<T>) -> Result<LagDesign<T>, FhtdError> {
        self.validate()?;
        Ok(LagDesign::new(data, self.resolved_q(data.n()), self.resolved_max_lag(data))?)
    }
}

/// `n log(rss/n) + size·w`; `-inf` for a perfect fit.
pub fn hdic<T: Real>(n: usize, rss: T, model_size: usize, w: T) -> T {
    if rss <= T::zero() {
        return T::neg_infinity();
    }
    let nf = T::count(n);
    nf * (rss / nf).ln() + T::count(model_size) * w
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathStep<T> {
    pub regressor: Regressor,
    pub column: ColumnId,
    pub score: T,
    pub rss: T,
    pub hdic: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionPath<T> {
    pub criterion: Criterion,
    /// Columns held in the model before the greedy steps.
    pub base: Vec<ColumnId>,
    pub steps: Vec<PathStep<T>>,
    /// True when the path stopped early because no eligible candidate remained.
    pub exhausted: bool,
}

impl<T: Real> SelectionPath<T> {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn columns(&self) -> Vec<ColumnId> {
        self.steps.iter().map(|s| s.column).collect()
    }

    /// Recomputes the HDIC values for a different penalty weight.
    pub fn rescored(&self, n: usize, w: T) -> Self {
        let mut out = self.clone();
        for (m, s) in out.steps.iter_mut().enumerate() {
            s.hdic = hdic(n, s.rss, self.base.len() + m + 1, w);
        }
        out
    }
}

/// Greedy path from `base` over `candidates` for at most `k_max` steps.
pub fn greedy_path<T: Real>(
    design: &LagDesign<T>,
    base: &[ColumnId],
    candidates: &[ColumnId],
    crit: Criterion,
    k_max: usize,
    w: T,
) -> Result<SelectionPath<T>, FhtdError> {
    let k_eff = k_max.min(candidates.len());
    let needed = base.len() + k_eff;
    if design.rows() <= needed {
        return Err(FhtdError::InsufficientData { rows: design.rows(), needed });
    }
    let mut fit = ActiveFit::new(design, base)?;
    let mut pool = CandidatePool::new(&fit, candidates);
    let mut steps = Vec::with_capacity(k_eff);
    let mut exhausted = false;
    while steps.len() < k_eff {
        match pool.advance(&mut fit, crit) {
            Some((column, score)) => {
                let rss = fit.rss();
                steps.push(PathStep {
                    regressor: design.regressor(column),
                    column,
                    score,
                    rss,
                    hdic: hdic(design.n(), rss, base.len() + steps.len() + 1, w),
                });
            }
            None => {
                exhausted = true;
                break;
            }
        }
    }
    if steps.is_empty() && !candidates.is_empty() {
        return Err(FhtdError::NoEligibleCandidates);
    }
    Ok(SelectionPath { criterion: crit, base: base.to_vec(), steps, exhausted })
}

/// Forward stepwise path over the exogenous candidates with all AR lags coerced.
pub fn fsr_path<T: Real>(design: &LagDesign<T>, config: &FhtdConfig<T>) -> Result<SelectionPath<T>, FhtdError> {
    config.validate()?;
    let base: Vec<ColumnId> = design.ar_ids().collect();
    let cands: Vec<ColumnId> = design.exo_ids().collect();
    greedy_path(design, &base, &cands, Criterion::Fsr, config.k_max, config.penalty_weight(design.p_star()))
}

/// Number of path steps `k̂` minimising HDIC (first minimum on ties).
pub fn hdic_stop<T: Real>(path: &SelectionPath<T>) -> Result<usize, FhtdError> {
    let mut best: Option<(usize, T)> = None;
    for (m, s) in path.steps.iter().enumerate() {
        if best.is_none_or(|(_, b)| s.hdic < b) {
            best = Some((m + 1, s.hdic));
        }
    }
    best.map(|(k, _)| k).ok_or(FhtdError::EmptyPath)
}

fn model_rss<T: Real>(design: &LagDesign<T>, base: &[ColumnId], extra: &[ColumnId]) -> T {
    let ids: Vec<ColumnId> = base.iter().chain(extra).copied().collect();
    ols_solve(design, &ids).rss
}

/// Leave-one-out elimination: keeps a variable only if dropping it raises HDIC.
/// Each reduced model is refitted from scratch.
pub fn trim<T: Real>(design: &LagDesign<T>, base: &[ColumnId], selected: &[ColumnId], w: T) -> Vec<ColumnId> {
    if selected.is_empty() {
        return Vec::new();
    }
    let n = design.n();
    let full = hdic(n, model_rss(design, base, selected), base.len() + selected.len(), w);
    selected
        .iter()
        .enumerate()
        .filter(|(i, _)| {
            let reduced: Vec<ColumnId> = selected.iter().enumerate().filter(|(k, _)| k != i).map(|(_, c)| *c).collect();
            let h = hdic(n, model_rss(design, base, &reduced), base.len() + reduced.len(), w);
            h > full
        })
        .map(|(_, c)| *c)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DdtOutcome<T> {
    pub q_hat: BTreeSet<usize>,
    pub alpha_hat: Vec<T>,
    pub threshold: T,
    pub rank_deficient: bool,
}

/// Threshold `Ĥ` for `q` AR lags, `s0 = |Ĵ|` and `s0_under` distinct series in `Ĵ`.
///
/// When `Ĵ` is empty the second branch of the minimum vanishes; the first
/// branch is used alone.
pub fn ddt_threshold<T: Real>(config: &FhtdConfig<T>, n: usize, q: usize, s0: usize, s0_under: usize) -> T {
    let nf = T::count(n);
    let qf = T::count(q);
    let first = T::count(q + s0).sqrt();
    let root = match config.threshold_mode {
        ThresholdMode::Simulation => T::lit(0.5),
        ThresholdMode::Theoretical { .. } => T::one() / config.eta,
    };
    let branch = if s0_under == 0 { first } else { first.min(T::count(s0_under).sqrt() * qf.powf(root)) };
    match config.threshold_mode {
        ThresholdMode::Simulation => config.d * branch / nf.sqrt(),
        ThresholdMode::Theoretical { d_tilde } => {
            let dt = d_tilde.unwrap_or_else(|| nf.ln().ln());
            let lead = qf.powf(T::lit(1.5)) / nf.sqrt();
            dt * lead.max(branch) / nf.sqrt()
        }
    }
}

/// Data-driven thresholding of the AR coefficients of `[q] ⊕ Ĵ`.
pub fn ddt<T: Real>(design: &LagDesign<T>, j_hat: &[ColumnId], config: &FhtdConfig<T>) -> DdtOutcome<T> {
    let ids: Vec<ColumnId> = design.ar_ids().chain(j_hat.iter().copied()).collect();
    let fit = ols_solve(design, &ids);
    let q = design.q();
    let alpha_hat = fit.coef[..q].to_vec();
    let series: BTreeSet<usize> = j_hat
        .iter()
        .filter_map(|&c| match design.regressor(c) {
            Regressor::Exo(e) => Some(e.series),
            Regressor::Ar(_) => None,
        })
        .collect();
    let threshold = ddt_threshold(config, design.n(), q, j_hat.len(), series.len());
    let q_hat = alpha_hat.iter().enumerate().filter(|(_, a)| a.abs() >= threshold).map(|(i, _)| i + 1).collect();
    DdtOutcome { q_hat, alpha_hat, threshold, rank_deficient: fit.rank_deficient }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term<T> {
    pub regressor: Regressor,
    pub coef: T,
}

/// Outcome of a selector: the chosen AR lags and exogenous lags plus the
/// least-squares refit on exactly those regressors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectedModel<T> {
    pub q_hat: BTreeSet<usize>,
    pub j_hat: BTreeSet<ExoIndex>,
    /// AR coefficients used for thresholding (empty for selectors without that stage).
    pub alpha_hat: Vec<T>,
    pub final_coef: Vec<Term<T>>,
    pub intercept: Option<T>,
    pub sigma2_hat: T,
    pub threshold_used: Option<T>,
    /// Path steps kept by the stopping rule (0 when there was no path).
    pub k_hat: usize,
    pub path_len: usize,
    pub rank_deficient: bool,
}

impl<T: Real> SelectedModel<T> {
    /// One-step prediction of `y[t]` (0-based) from `y[..t]` and `x[..][..t]`.
    pub fn predict_at(&self, y: &[T], x: &[Vec<T>], t: usize) -> T {
        let mut v = self.intercept.unwrap_or_else(T::zero);
        for term in &self.final_coef {
            let value = match term.regressor {
                Regressor::Ar(i) => y[t - i],
                Regressor::Exo(e) => x[e.series - 1][t - e.lag],
            };
            v += term.coef * value;
        }
        v
    }

    pub fn size(&self) -> usize {
        self.q_hat.len() + self.j_hat.len()
    }
}

/// Stopping rule and trimming for penalty weight `w`: returns `k̂` and the
/// surviving path columns.
pub(crate) fn stop_and_trim<T: Real>(design: &LagDesign<T>, path: &SelectionPath<T>, w: T) -> (usize, Vec<ColumnId>) {
    let path = path.rescored(design.n(), w);
    let k_hat = hdic_stop(&path).unwrap_or(0);
    let chosen: Vec<ColumnId> = path.steps[..k_hat].iter().map(|s| s.column).collect();
    (k_hat, trim(design, &path.base, &chosen, w))
}

/// Builds the final model from trimmed columns. `design` is the design
/// selection ran on (centered in intercept mode); `raw` is used for the final
/// refit when `intercept` is set. With `threshold_ar` the AR lags come from
/// DDT; otherwise from the path's base and surviving AR columns.
pub(crate) fn assemble_model<T: Real>(
    design: &LagDesign<T>,
    raw: &LagDesign<T>,
    intercept: bool,
    path: &SelectionPath<T>,
    trimmed: (usize, &[ColumnId]),
    config: &FhtdConfig<T>,
    threshold_ar: bool,
) -> SelectedModel<T> {
    let (k_hat, kept) = trimmed;
    let exo_kept: Vec<ColumnId> = kept.iter().copied().filter(|c| design.exo_ids().contains(c)).collect();
    let (q_hat, alpha_hat, threshold_used, mut rank_deficient) = if threshold_ar {
        let out = ddt(design, &exo_kept, config);
        (out.q_hat, out.alpha_hat, Some(out.threshold), out.rank_deficient)
    } else {
        let base_ar = path.base.iter().chain(kept).filter_map(|&c| match design.regressor(c) {
            Regressor::Ar(i) => Some(i),
            Regressor::Exo(_) => None,
        });
        (base_ar.collect(), Vec::new(), None, false)
    };

    let mut ids: Vec<ColumnId> = q_hat.iter().map(|i| i - 1).collect();
    ids.extend(exo_kept.iter().copied());
    ids.sort_unstable();
    let fit = if intercept { ols_solve_with_intercept(raw, &ids) } else { ols_solve(design, &ids) };
    rank_deficient |= fit.rank_deficient;
    let final_coef =
        ids.iter().zip(&fit.coef).map(|(&id, &coef)| Term { regressor: design.regressor(id), coef }).collect();
    let j_hat = exo_kept
        .iter()
        .filter_map(|&c| match design.regressor(c) {
            Regressor::Exo(e) => Some(e),
            Regressor::Ar(_) => None,
        })
        .collect();
    SelectedModel {
        q_hat,
        j_hat,
        alpha_hat,
        final_coef,
        intercept: fit.intercept,
        sigma2_hat: fit.rss / T::count(design.n()),
        threshold_used,
        k_hat,
        path_len: path.len(),
        rank_deficient,
    }
}

pub(crate) fn finish_from_path<T: Real>(
    design: &LagDesign<T>,
    raw: &LagDesign<T>,
    intercept: bool,
    path: &SelectionPath<T>,
    config: &FhtdConfig<T>,
    threshold_ar: bool,
) -> SelectedModel<T> {
    let (k_hat, kept) = stop_and_trim(design, path, config.penalty_weight(design.p_star()));
    assemble_model(design, raw, intercept, path, (k_hat, &kept), config, threshold_ar)
}

/// Runs the selector on a prepared design. With `intercept`, selection runs on
/// the centered design and the final refit includes an intercept.
pub fn fhtd_on_design<T: Real>(
    design: &LagDesign<T>,
    config: &FhtdConfig<T>,
    intercept: bool,
) -> Result<SelectedModel<T>, FhtdError> {
    let centered;
    let sel = if intercept {
        centered = design.centered();
        &centered
    } else {
        design
    };
    let path = fsr_path(sel, config)?;
    Ok(finish_from_path(sel, design, intercept, &path, config, true))
}

pub fn fhtd_select<T: Real>(data: &Dataset<T>, config: &FhtdConfig<T>) -> Result<SelectedModel<T>, FhtdError> {
    fhtd_on_design(&config.design(data)?, config, false)
}

/// Demeans every variable over the estimation window, selects, then refits the
/// chosen regressors with an intercept on the raw data.
pub fn fhtd_select_with_intercept<T: Real>(
    data: &Dataset<T>,
    config: &FhtdConfig<T>,
) -> Result<SelectedModel<T>, FhtdError> {
    fhtd_on_design(&config.design(data)?, config, true)
}
