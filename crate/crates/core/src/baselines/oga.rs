//! Orthogonal greedy algorithm and OGA + HDIC + Trim.

use crate::fhtd::{finish_from_path, greedy_path, FhtdConfig, FhtdError, SelectedModel, SelectionPath};
use crate::projection::{ColumnId, Criterion, LagDesign};
use crate::scalar::Real;
use crate::tsdgp::Dataset;

/// OGA path. With `force_ar` the AR lags form the base model and only
/// exogenous lags compete; otherwise AR and exogenous lags compete together
/// from an empty model.
pub fn oga_path<T: Real>(
    design: &LagDesign<T>,
    config: &FhtdConfig<T>,
    force_ar: bool,
) -> Result<SelectionPath<T>, FhtdError> {
    config.validate()?;
    let w = config.penalty_weight(design.p_star());
    if force_ar {
        let base: Vec<ColumnId> = design.ar_ids().collect();
        let cands: Vec<ColumnId> = design.exo_ids().collect();
        greedy_path(design, &base, &cands, Criterion::Oga, config.k_max, w)
    } else {
        let cands: Vec<ColumnId> = (0..design.width()).collect();
        greedy_path(design, &[], &cands, Criterion::Oga, config.k_max, w)
    }
}

/// OGA-3 on a prepared design. The AR-forced variant thresholds the AR
/// coefficients exactly as FHTD does; the unforced variant keeps whatever AR
/// and exogenous lags survive trimming.
pub fn oga3_on_design<T: Real>(
    design: &LagDesign<T>,
    config: &FhtdConfig<T>,
    force_ar: bool,
    intercept: bool,
) -> Result<SelectedModel<T>, FhtdError> {
    let centered;
    let sel = if intercept {
        centered = design.centered();
        &centered
    } else {
        design
    };
    let path = oga_path(sel, config, force_ar)?;
    Ok(finish_from_path(sel, design, intercept, &path, config, force_ar))
}

pub fn oga3_select<T: Real>(
    data: &Dataset<T>,
    config: &FhtdConfig<T>,
    force_ar: bool,
) -> Result<SelectedModel<T>, FhtdError> {
    oga3_on_design(&config.design(data)?, config, force_ar, false)
}
