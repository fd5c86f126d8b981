//! Competing selectors: LASSO, adaptive LASSO, OGA-3 and their AR-forced
//! variants.

mod lasso;
mod oga;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use lasso::{
    adaptive_lasso, kkt_violation, lasso_path, weighted_lasso_path, AdaptiveLassoFit, LassoConfig, LassoError, LassoFit,
};
pub use oga::{oga3_on_design, oga3_select, oga_path};

use crate::fhtd::{default_q, FhtdError, SelectedModel, Term};
use crate::projection::{ColumnId, LagDesign, ProjectionError};
use crate::scalar::Real;
use crate::tsdgp::Dataset;
use crate::types::Regressor;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LassoVariant {
    Lasso,
    Alasso,
    /// Adaptive LASSO whose first stage leaves the AR lags unpenalized.
    ArAlasso,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BaselineError {
    #[error(transparent)]
    Lasso(#[from] LassoError),
    #[error(transparent)]
    Projection(#[from] ProjectionError),
    #[error(transparent)]
    Fhtd(#[from] FhtdError),
}

/// Fits a LASSO-family selector on every column of `design` (AR lags first).
/// An adaptive fit whose first stage is empty yields the empty model.
pub fn lasso_on_design<T: Real>(
    design: &LagDesign<T>,
    config: &LassoConfig<T>,
    variant: LassoVariant,
) -> Result<SelectedModel<T>, BaselineError> {
    let cols: Vec<&[T]> = (0..design.width()).map(|id| design.column(id)).collect();
    let is_ar = |id: ColumnId| matches!(design.regressor(id), Regressor::Ar(_));
    let y = design.target();
    let fit = match variant {
        LassoVariant::Lasso => {
            let mask: Vec<bool> = (0..design.width()).map(|id| config.penalize_ar || !is_ar(id)).collect();
            lasso_path(&cols, y, &mask, config)?
        }
        LassoVariant::Alasso | LassoVariant::ArAlasso => {
            let free_ar = variant == LassoVariant::ArAlasso;
            let mask: Vec<bool> = (0..design.width()).map(|id| !(free_ar && is_ar(id))).collect();
            match adaptive_lasso(&cols, y, &mask, config) {
                Ok(f) => f.stage2,
                Err(LassoError::AllZeroFirstStage) => return Ok(empty_model(design, config.intercept)),
                Err(e) => return Err(e.into()),
            }
        }
    };
    Ok(model_from_lasso(design, &fit, config.intercept))
}

fn empty_model<T: Real>(design: &LagDesign<T>, intercept: bool) -> SelectedModel<T> {
    let y = design.target();
    let nf = T::count(y.len());
    let mean = y.iter().copied().sum::<T>() / nf;
    let b0 = if intercept { mean } else { T::zero() };
    let rss: T = y.iter().map(|v| (*v - b0) * (*v - b0)).sum();
    SelectedModel {
        q_hat: BTreeSet::new(),
        j_hat: BTreeSet::new(),
        alpha_hat: Vec::new(),
        final_coef: Vec::new(),
        intercept: intercept.then_some(b0),
        sigma2_hat: rss / T::count(design.n()),
        threshold_used: None,
        k_hat: 0,
        path_len: 0,
        rank_deficient: false,
    }
}

fn model_from_lasso<T: Real>(design: &LagDesign<T>, fit: &LassoFit<T>, intercept: bool) -> SelectedModel<T> {
    let coef = fit.chosen_coefficients();
    let mut model = empty_model(design, intercept);
    for &id in fit.chosen_active() {
        let regressor = design.regressor(id);
        match regressor {
            Regressor::Ar(i) => {
                model.q_hat.insert(i);
            }
            Regressor::Exo(e) => {
                model.j_hat.insert(e);
            }
        }
        model.final_coef.push(Term { regressor, coef: coef[id] });
    }
    model.intercept = intercept.then(|| fit.chosen_intercept());
    model.sigma2_hat = fit.rss[fit.chosen] / T::count(design.n());
    model.path_len = fit.lambdas.len();
    model
}

/// Builds the lag design with `q` AR lags (default `⌊2n^{1/4}⌋`) and `max_lag`
/// exogenous lags (default from the dataset), then runs [`lasso_on_design`].
pub fn lasso_select<T: Real>(
    data: &Dataset<T>,
    config: &LassoConfig<T>,
    variant: LassoVariant,
    q: Option<usize>,
    max_lag: Option<usize>,
) -> Result<SelectedModel<T>, BaselineError> {
    let q = q.unwrap_or_else(|| default_q(data.n()).max(1));
    let design = LagDesign::new(data, q, max_lag.unwrap_or(data.max_lag))?;
    lasso_on_design(&design, config, variant)
}
