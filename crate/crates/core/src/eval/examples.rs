//! Monte-Carlo checks of the motivating examples and the minimum-eigenvalue
//! diagnostic.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::baselines::{lasso_path, oga_path, LassoConfig};
use crate::fhtd::FhtdConfig;
use crate::linalg::{dot, lstsq, sq_norm};
use crate::projection::{min_eig_diag, LagDesign};
use crate::tsdgp::{builtin_spec, simulate, BuiltinSpec, Dataset, SimulationError, SizeTier};
use crate::types::{ExoIndex, Regressor};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Example21Limit {
    /// Mean over replications of `(F₁ − F₂)/n`.
    pub mean_scaled_diff: f64,
    /// `(1 + 2a)/(1 − a²)`.
    pub limit: f64,
}

/// `F₁ − F₂` from the AR(2) unit-root model with `y_t = (1+a)y_{t−1} − a y_{t−2} + ε_t`.
pub fn example21_limit(a: f64, n: usize, reps: u64, seed: u64) -> Result<Example21Limit, SimulationError> {
    let spec = builtin_spec(BuiltinSpec::Ex21 { a }, SizeTier::new(n, 0, 1))?;
    let mut total = 0.0;
    for r in 0..reps {
        let y = simulate(&spec, seed ^ r)?.y;
        let target = &y[2..];
        let o1 = &y[1..n - 1];
        let o2 = &y[..n - 2];
        let f1 = dot(target, o1).powi(2) / sq_norm(o1);
        let f2 = dot(target, o2).powi(2) / sq_norm(o2);
        total += (f1 - f2) / n as f64;
    }
    Ok(Example21Limit { mean_scaled_diff: total / reps as f64, limit: (1.0 + 2.0 * a) / (1.0 - a * a) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Example21Oga {
    /// Share of replications whose first OGA pick is `y_{t−1}`.
    pub first_pick_y1: f64,
    /// Share of replications whose path never picks `y_{t−2}`.
    pub y2_missed: f64,
}

/// Unforced OGA over `{y_{t−1}, y_{t−2}, x_{t−1,j}}` for `k_max` steps.
pub fn example21_oga(
    a: f64,
    n: usize,
    p: usize,
    k_max: usize,
    reps: u64,
    seed: u64,
) -> Result<Example21Oga, Box<dyn std::error::Error + Send + Sync>> {
    let spec = builtin_spec(BuiltinSpec::Ex21 { a }, SizeTier::new(n, p, 1))?;
    let config = FhtdConfig::<f64> { q: Some(2), max_lag: Some(1), k_max, ..Default::default() };
    let (mut first, mut missed) = (0u64, 0u64);
    for r in 0..reps {
        let data = simulate(&spec, seed ^ r)?;
        let design = LagDesign::new(&data, 2, 1)?;
        let path = oga_path(&design, &config, false)?;
        if path.steps.first().map(|s| s.regressor) == Some(Regressor::Ar(1)) {
            first += 1;
        }
        if !path.steps.iter().any(|s| s.regressor == Regressor::Ar(2)) {
            missed += 1;
        }
    }
    Ok(Example21Oga { first_pick_y1: first as f64 / reps as f64, y2_missed: missed as f64 / reps as f64 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Example22Point {
    pub lambda: f64,
    /// Share of replications with `β̂₁ ≠ 0, β̂₂ = 0, β̂₃ ≠ 0`.
    pub correct: f64,
}

/// LASSO on `(y_{t−1}, y_{t−2}, x_{t−1})` for `y_t = y_{t−1} + x_{t−1} + ε_t`,
/// unstandardized and without intercept, at each `λ` of `lambdas` (any order).
pub fn example22_frequencies(
    n: usize,
    lambdas: &[f64],
    reps: u64,
    seed: u64,
) -> Result<Vec<Example22Point>, Box<dyn std::error::Error + Send + Sync>> {
    let spec = builtin_spec(BuiltinSpec::Ex22, SizeTier::new(n, 1, 1))?;
    let mut grid = lambdas.to_vec();
    grid.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    grid.dedup();
    let config = LassoConfig { lambda_grid: Some(grid.clone()), standardize: false, ..Default::default() };
    let mut hits = vec![0u64; grid.len()];
    for r in 0..reps {
        let data = simulate(&spec, seed ^ r)?;
        let y = &data.y;
        let x = &data.x[0];
        let cols: [&[f64]; 3] = [&y[1..n - 1], &y[..n - 2], &x[1..n - 1]];
        let fit = lasso_path(&cols, &y[2..], &[true; 3], &config)?;
        for (h, b) in hits.iter_mut().zip(&fit.coefficients) {
            if b[0] != 0.0 && b[1] == 0.0 && b[2] != 0.0 {
                *h += 1;
            }
        }
    }
    Ok(grid.iter().zip(hits).map(|(&lambda, h)| Example22Point { lambda, correct: h as f64 / reps as f64 }).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Example31Mspe {
    /// Estimate of `n(MSPE_k − σ²)` for the full-order least-squares predictor.
    pub full: f64,
    /// Estimate of `n(MSPẼ_k − σ²)` for the single-lag predictor.
    pub single: f64,
}

impl Example31Mspe {
    pub fn ratio(&self) -> f64 {
        self.full / self.single
    }
}

/// Excess one-step MSPE of the two least-squares predictors of
/// `y_t = y_{t−k} + ε_t`, `σ² = 1`.
///
/// The excess is estimated by its conditional form `(ŷ_{n+1} − y_{n+1−k})²`,
/// whose expectation equals `MSPE − σ²` without the noise of `ε_{n+1}`.
pub fn example31_mspe(k: usize, n: usize, reps: u64, seed: u64) -> Result<Example31Mspe, SimulationError> {
    let spec = builtin_spec(BuiltinSpec::Ex31 { k }, SizeTier::new(n, 0, 1))?;
    let (mut full, mut single) = (0.0, 0.0);
    for r in 0..reps {
        let y = simulate(&spec, seed ^ r)?.y;
        // 0-based: y[t] is y_{t+1}. Regress y_{t+1} on (y_t, …, y_{t−k+1}) for t = k..n−1.
        let target = &y[k..n];
        let cols: Vec<&[f64]> = (0..k).map(|i| &y[k - 1 - i..n - 1 - i]).collect();
        let beta = lstsq(&cols, target).coef;
        let y_hat: f64 = (0..k).map(|i| beta[i] * y[n - 1 - i]).sum();
        let lagk = &y[..n - k];
        let b_tilde = dot(lagk, target) / sq_norm(lagk);
        let y_tilde = b_tilde * y[n - k];
        let truth = y[n - k];
        full += (y_hat - truth).powi(2);
        single += (y_tilde - truth).powi(2);
    }
    let scale = n as f64 / reps as f64;
    Ok(Example31Mspe { full: full * scale, single: single * scale })
}

/// `λ_min(n⁻¹ Σ_t w_t w_tᵀ)` for `n_sets` random exogenous sets of size
/// `set_size`, each with the `q` AR lags prepended.
pub fn min_eigen_survey(
    data: &Dataset<f64>,
    q: usize,
    max_lag: usize,
    n_sets: usize,
    set_size: usize,
    seed: u64,
) -> Result<Vec<f64>, crate::projection::ProjectionError> {
    let design = LagDesign::new(data, q, max_lag)?;
    let pool: Vec<ExoIndex> = design
        .exo_ids()
        .filter_map(|id| match design.regressor(id) {
            Regressor::Exo(e) => Some(e),
            Regressor::Ar(_) => None,
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_sets)
        .map(|_| {
            let picks: Vec<ExoIndex> =
                sample(&mut rng, pool.len(), set_size.min(pool.len())).into_iter().map(|i| pool[i]).collect();
            min_eig_diag(&design, &picks)
        })
        .collect()
}
