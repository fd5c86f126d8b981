//! LASSO by cyclic coordinate descent with BIC tuning, and the two-stage
//! adaptive LASSO.
//!
//! The objective is `Σ_t (y_t − b₀ − z_tᵀβ)² + λ Σ_j w_j |β_j|` with no `1/(2n)`
//! factor. Weight 0 leaves a coefficient unpenalized; an infinite weight
//! removes the column.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{axpy, cholesky_solve, collinear_tol, dot, lstsq, sq_norm};
use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LassoError {
    #[error("invalid lasso configuration: {0}")]
    InvalidConfig(String),
    #[error("design contains non-finite values")]
    NonFinite,
    #[error("column {column} has {len} rows, expected {rows}")]
    LengthMismatch { column: usize, len: usize, rows: usize },
    #[error("first-stage lasso selected nothing")]
    AllZeroFirstStage,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LassoConfig<T> {
    /// Explicit, strictly decreasing grid; otherwise `n_lambda` geometric points
    /// over `[λ_max·lambda_min_ratio, λ_max]`.
    pub lambda_grid: Option<Vec<T>>,
    pub n_lambda: usize,
    /// Defaults to `1e-4` when rows ≥ columns and `1e-2` otherwise, so the
    /// grid stops short of the interpolating regime.
    pub lambda_min_ratio: Option<T>,
    /// Coordinate-descent sweeps per λ.
    pub max_iter: usize,
    /// Bound on the largest coordinate step (standardized units) at convergence.
    pub tol: T,
    pub standardize: bool,
    pub penalize_ar: bool,
    pub intercept: bool,
}

impl<T: Real> Default for LassoConfig<T> {
    fn default() -> Self {
        Self {
            lambda_grid: None,
            n_lambda: 100,
            lambda_min_ratio: None,
            max_iter: 10_000,
            tol: T::lit(1e-7),
            standardize: true,
            penalize_ar: true,
            intercept: false,
        }
    }
}

impl<T: Real> LassoConfig<T> {
    pub fn validate(&self) -> Result<(), LassoError> {
        let bad = |m: &str| Err(LassoError::InvalidConfig(m.into()));
        if !(self.tol > T::zero()) {
            return bad("tol must be positive");
        }
        if self.max_iter == 0 {
            return bad("max_iter must be positive");
        }
        match &self.lambda_grid {
            Some(g) => {
                if g.is_empty() {
                    return bad("lambda grid is empty");
                }
                if g.iter().any(|l| !l.is_finite() || *l < T::zero()) {
                    return bad("lambda grid must be finite and non-negative");
                }
                if g.windows(2).any(|w| w[1] >= w[0]) {
                    return bad("lambda grid must be strictly decreasing");
                }
            }
            None => {
                if self.n_lambda == 0 {
                    return bad("n_lambda must be positive");
                }
                if let Some(r) = self.lambda_min_ratio {
                    if !(r > T::zero() && r < T::one()) {
                        return bad("lambda_min_ratio must lie in (0, 1)");
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LassoFit<T> {
    pub lambdas: Vec<T>,
    /// Coefficients on the original column scale, one vector per λ.
    pub coefficients: Vec<Vec<T>>,
    pub intercepts: Vec<T>,
    pub active: Vec<Vec<usize>>,
    pub rss: Vec<T>,
    pub bic: Vec<T>,
    pub converged: Vec<bool>,
    /// Index of the BIC-minimising λ (first on ties).
    pub chosen: usize,
    /// Per-column penalty weights used (0 unpenalized, +inf excluded).
    pub weights: Vec<T>,
}

impl<T: Real> LassoFit<T> {
    pub fn chosen_coefficients(&self) -> &[T] {
        &self.coefficients[self.chosen]
    }

    pub fn chosen_intercept(&self) -> T {
        self.intercepts[self.chosen]
    }

    pub fn chosen_active(&self) -> &[usize] {
        &self.active[self.chosen]
    }

    pub fn all_converged(&self) -> bool {
        self.converged.iter().all(|c| *c)
    }
}

/// Centered (if `intercept`) and scaled copy of the design.
struct Standardized<T> {
    z: Vec<Vec<T>>,
    y: Vec<T>,
    x_mean: Vec<T>,
    y_mean: T,
    scale: Vec<T>,
    /// `‖z_j‖²`, zero for constant columns.
    norm2: Vec<T>,
}

impl<T: Real> Standardized<T> {
    fn new(columns: &[&[T]], y: &[T], standardize: bool, intercept: bool) -> Result<Self, LassoError> {
        let rows = y.len();
        if y.iter().any(|v| !v.is_finite()) {
            return Err(LassoError::NonFinite);
        }
        let nf = T::count(rows.max(1));
        let mean = |v: &[T]| {
            if intercept {
                v.iter().copied().sum::<T>() / nf
            } else {
                T::zero()
            }
        };
        let y_mean = mean(y);
        let yc: Vec<T> = y.iter().map(|v| *v - y_mean).collect();
        let mut z = Vec::with_capacity(columns.len());
        let mut x_mean = Vec::with_capacity(columns.len());
        let mut scale = Vec::with_capacity(columns.len());
        let mut norm2 = Vec::with_capacity(columns.len());
        for (j, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(LassoError::LengthMismatch { column: j, len: col.len(), rows });
            }
            if col.iter().any(|v| !v.is_finite()) {
                return Err(LassoError::NonFinite);
            }
            let m = mean(col);
            let mut c: Vec<T> = col.iter().map(|v| *v - m).collect();
            let raw = sq_norm(&c);
            let tiny = raw <= T::epsilon() * T::epsilon() * nf;
            let s = if standardize && !tiny { (raw / nf).sqrt() } else { T::one() };
            if s != T::one() {
                c.iter_mut().for_each(|v| *v /= s);
            }
            norm2.push(if tiny { T::zero() } else { sq_norm(&c) });
            z.push(c);
            x_mean.push(m);
            scale.push(s);
        }
        Ok(Self { z, y: yc, x_mean, y_mean, scale, norm2 })
    }

    fn rows(&self) -> usize {
        self.y.len()
    }

    /// Copy with `y` and every other column residualized on the span of the
    /// `free` columns, which are themselves zeroed out.
    fn profile_out(&self, free: &[usize]) -> Self {
        let mut basis: Vec<Vec<T>> = Vec::with_capacity(free.len());
        let project = |basis: &[Vec<T>], v: &mut [T]| {
            for _ in 0..2 {
                for q in basis {
                    let c = dot(q, v);
                    axpy(-c, q, v);
                }
            }
        };
        for &j in free {
            let mut v = self.z[j].clone();
            let raw = sq_norm(&v);
            project(&basis, &mut v);
            let rem = sq_norm(&v);
            if rem > collinear_tol::<T>() * raw {
                let inv = T::one() / rem.sqrt();
                v.iter_mut().for_each(|x| *x *= inv);
                basis.push(v);
            }
        }
        let mut out = Self {
            z: self.z.clone(),
            y: self.y.clone(),
            x_mean: self.x_mean.clone(),
            y_mean: self.y_mean,
            scale: self.scale.clone(),
            norm2: self.norm2.clone(),
        };
        project(&basis, &mut out.y);
        for j in 0..out.z.len() {
            if free.contains(&j) {
                out.z[j].iter_mut().for_each(|x| *x = T::zero());
                out.norm2[j] = T::zero();
                continue;
            }
            project(&basis, &mut out.z[j]);
            let rem = sq_norm(&out.z[j]);
            out.norm2[j] = if rem > collinear_tol::<T>() * self.norm2[j] { rem } else { T::zero() };
        }
        out
    }

    fn to_original(&self, beta: &[T]) -> (Vec<T>, T) {
        let coef: Vec<T> = beta.iter().zip(&self.scale).map(|(b, s)| *b / *s).collect();
        let b0 = self.y_mean - coef.iter().zip(&self.x_mean).map(|(c, m)| *c * *m).sum::<T>();
        (coef, b0)
    }
}

fn soft_threshold<T: Real>(v: T, t: T) -> T {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        T::zero()
    }
}

/// Coordinate descent with covariance updates: `grad_j = z_jᵀr` is kept
/// current through cached Gram columns, so a coordinate step costs `O(p)`.
struct Solver<'a, T> {
    std: &'a Standardized<T>,
    weights: &'a [T],
    beta: Vec<T>,
    /// `z_jᵀy`.
    zy: Vec<T>,
    grad: Vec<T>,
    gram: Vec<Option<Vec<T>>>,
}

impl<'a, T: Real> Solver<'a, T> {
    fn new(std: &'a Standardized<T>, weights: &'a [T]) -> Self {
        let p = std.z.len();
        let zy: Vec<T> = std.z.iter().map(|z| dot(z, &std.y)).collect();
        Self { std, weights, beta: vec![T::zero(); p], grad: zy.clone(), zy, gram: vec![None; p] }
    }

    fn usable(&self, j: usize) -> bool {
        self.std.norm2[j] > T::zero() && self.weights[j].is_finite()
    }

    fn gram_column(&mut self, k: usize) -> Vec<T> {
        match self.gram[k].take() {
            Some(col) => col,
            None => self.std.z.iter().map(|z| dot(z, &self.std.z[k])).collect(),
        }
    }

    /// Coordinate minimiser of `j` given the current gradient.
    fn target(&self, j: usize, lambda: T) -> T {
        let g2 = self.std.norm2[j];
        let rho = self.grad[j] + g2 * self.beta[j];
        if self.weights[j] == T::zero() {
            rho / g2
        } else {
            soft_threshold(rho, lambda * self.weights[j] / T::lit(2.0)) / g2
        }
    }

    fn set(&mut self, j: usize, value: T) -> T {
        let delta = value - self.beta[j];
        if delta != T::zero() {
            let col = self.gram_column(j);
            axpy(-delta, &col, &mut self.grad);
            self.gram[j] = Some(col);
            self.beta[j] = value;
        }
        delta.abs()
    }

    fn sweep(&mut self, ids: &[usize], lambda: T) -> T {
        let mut worst = T::zero();
        for &j in ids {
            let t = self.target(j, lambda);
            worst = worst.max(self.set(j, t));
        }
        worst
    }

    fn kkt(&self, ids: &[usize], lambda: T) -> T {
        ids.iter().map(|&j| (self.target(j, lambda) - self.beta[j]).abs()).fold(T::zero(), T::max)
    }

    /// Recomputes the gradient from scratch to shed accumulated rounding.
    fn refresh(&mut self) {
        self.grad.clone_from(&self.zy);
        for k in 0..self.beta.len() {
            if self.beta[k] != T::zero() {
                let col = self.gram_column(k);
                axpy(-self.beta[k], &col, &mut self.grad);
                self.gram[k] = Some(col);
            }
        }
    }

    fn active(&self, all: &[usize]) -> Vec<usize> {
        all.iter().copied().filter(|&j| self.beta[j] != T::zero() || self.weights[j] == T::zero()).collect()
    }

    /// Moves toward the minimiser of the objective with the current active set
    /// and signs held fixed, stopping where a coefficient would change sign.
    fn active_set_step(&mut self, active: &[usize], lambda: T) {
        let k = active.len();
        if k == 0 || k > self.std.rows() {
            return;
        }
        let cols: Vec<Vec<T>> = active.iter().map(|&j| self.gram_column(j)).collect();
        let mut g = vec![T::zero(); k * k];
        for (a, col) in cols.iter().enumerate() {
            for (b, &j) in active.iter().enumerate() {
                g[a * k + b] = col[j];
            }
        }
        for (&j, col) in active.iter().zip(cols) {
            self.gram[j] = Some(col);
        }
        let half = lambda / T::lit(2.0);
        let rhs: Vec<T> = active
            .iter()
            .map(|&j| {
                let w = self.weights[j];
                if w == T::zero() {
                    self.zy[j]
                } else {
                    self.zy[j] - half * w * self.beta[j].signum()
                }
            })
            .collect();
        let Some(x) = cholesky_solve(g, k, &rhs, 3) else {
            return;
        };
        if x.iter().any(|v| !v.is_finite()) {
            return;
        }
        let mut step = T::one();
        let mut hits = Vec::new();
        for (a, &j) in active.iter().enumerate() {
            let b = self.beta[j];
            if self.weights[j] != T::zero() && x[a].signum() != b.signum() {
                let t = b / (b - x[a]);
                if t < step {
                    step = t;
                    hits.clear();
                }
                if t <= step {
                    hits.push(j);
                }
            }
        }
        for (a, &j) in active.iter().enumerate() {
            let b = self.beta[j];
            self.beta[j] = b + step * (x[a] - b);
        }
        for j in hits {
            self.beta[j] = T::zero();
        }
        self.refresh();
    }

    /// Runs to convergence at one λ; returns whether `tol` was met.
    fn solve(&mut self, all: &[usize], lambda: T, tol: T, max_iter: usize) -> bool {
        const SWEEPS_BEFORE_EXACT: usize = 8;
        let mut iter = 0;
        while iter < max_iter {
            let change = self.sweep(all, lambda);
            iter += 1;
            if change < tol {
                self.refresh();
                if self.kkt(all, lambda) < tol {
                    return true;
                }
            }
            let active = self.active(all);
            let mut inner = 0;
            while iter < max_iter {
                let c = self.sweep(&active, lambda);
                iter += 1;
                inner += 1;
                if c < tol {
                    break;
                }
                if inner % SWEEPS_BEFORE_EXACT == 0 {
                    self.active_set_step(&self.active(&active), lambda);
                }
            }
        }
        self.refresh();
        self.kkt(all, lambda) < tol
    }

    fn residual(&self) -> Vec<T> {
        let mut r = self.std.y.clone();
        for (j, b) in self.beta.iter().enumerate() {
            if *b != T::zero() {
                axpy(-*b, &self.std.z[j], &mut r);
            }
        }
        r
    }
}

fn bic<T: Real>(rows: usize, rss: T, df: usize) -> T {
    if rss <= T::zero() {
        return T::neg_infinity();
    }
    let nf = T::count(rows);
    nf * (rss / nf).ln() + nf.ln() * T::count(df)
}

fn run_path<T: Real>(std: &Standardized<T>, weights: Vec<T>, config: &LassoConfig<T>) -> LassoFit<T> {
    let p = std.z.len();
    let rows = std.rows();
    let free: Vec<usize> = (0..p).filter(|&j| std.norm2[j] > T::zero() && weights[j] == T::zero()).collect();
    // Unpenalized columns are profiled out exactly and recovered by least
    // squares per λ; coordinate descent only sees the penalized block.
    let profiled;
    let work = if free.is_empty() {
        std
    } else {
        profiled = std.profile_out(&free);
        &profiled
    };
    let mut solver = Solver::new(work, &weights);
    let all: Vec<usize> = (0..p).filter(|&j| solver.usable(j) && weights[j] > T::zero()).collect();
    let free_cols: Vec<&[T]> = free.iter().map(|&j| std.z[j].as_slice()).collect();

    let lambdas = config.lambda_grid.clone().unwrap_or_else(|| {
        let lmax = all.iter().map(|&j| T::lit(2.0) * solver.grad[j].abs() / weights[j]).fold(T::zero(), T::max);
        let lmax = if lmax > T::zero() { lmax } else { T::one() };
        let k = config.n_lambda;
        let ratio = config.lambda_min_ratio.unwrap_or_else(|| {
            if rows >= all.len() + free.len() {
                T::lit(1e-4)
            } else {
                T::lit(1e-2)
            }
        });
        (0..k)
            .map(|i| {
                let frac = if k == 1 { T::zero() } else { T::count(i) / T::count(k - 1) };
                lmax * ratio.powf(frac)
            })
            .collect()
    });

    let mut fit = LassoFit {
        lambdas: lambdas.clone(),
        coefficients: Vec::with_capacity(lambdas.len()),
        intercepts: Vec::with_capacity(lambdas.len()),
        active: Vec::with_capacity(lambdas.len()),
        rss: Vec::with_capacity(lambdas.len()),
        bic: Vec::with_capacity(lambdas.len()),
        converged: Vec::with_capacity(lambdas.len()),
        chosen: 0,
        weights: weights.clone(),
    };
    for &lambda in &lambdas {
        let ok = solver.solve(&all, lambda, config.tol, config.max_iter);
        let mut beta = solver.beta.clone();
        let mut resid = std.y.clone();
        for &j in &all {
            if beta[j] != T::zero() {
                axpy(-beta[j], &std.z[j], &mut resid);
            }
        }
        if !free.is_empty() {
            let ls = lstsq(&free_cols, &resid);
            for ((&j, &b), col) in free.iter().zip(&ls.coef).zip(&free_cols) {
                beta[j] = b;
                axpy(-b, col, &mut resid);
            }
        }
        let rss = sq_norm(&resid);
        let active: Vec<usize> = (0..p).filter(|&j| beta[j] != T::zero()).collect();
        let (coef, b0) = std.to_original(&beta);
        fit.bic.push(bic(rows, rss, active.len()));
        fit.coefficients.push(coef);
        fit.intercepts.push(b0);
        fit.active.push(active);
        fit.rss.push(rss);
        fit.converged.push(ok);
    }
    let mut best = 0;
    for (k, b) in fit.bic.iter().enumerate() {
        if *b < fit.bic[best] {
            best = k;
        }
    }
    fit.chosen = best;
    fit
}

fn unit_weights<T: Real>(penalized: &[bool]) -> Vec<T> {
    penalized.iter().map(|p| if *p { T::one() } else { T::zero() }).collect()
}

/// LASSO path over `columns`; `penalized[j] = false` leaves column `j` free.
pub fn lasso_path<T: Real>(
    columns: &[&[T]],
    y: &[T],
    penalized: &[bool],
    config: &LassoConfig<T>,
) -> Result<LassoFit<T>, LassoError> {
    config.validate()?;
    if penalized.len() != columns.len() {
        return Err(LassoError::InvalidConfig("penalty mask length differs from column count".into()));
    }
    let std = Standardized::new(columns, y, config.standardize, config.intercept)?;
    Ok(run_path(&std, unit_weights(penalized), config))
}

/// LASSO with explicit per-column weights (0 free, +inf excluded).
pub fn weighted_lasso_path<T: Real>(
    columns: &[&[T]],
    y: &[T],
    weights: &[T],
    config: &LassoConfig<T>,
) -> Result<LassoFit<T>, LassoError> {
    config.validate()?;
    if weights.len() != columns.len() || weights.iter().any(|w| w.is_nan() || *w < T::zero()) {
        return Err(LassoError::InvalidConfig("weights must be non-negative, one per column".into()));
    }
    let std = Standardized::new(columns, y, config.standardize, config.intercept)?;
    Ok(run_path(&std, weights.to_vec(), config))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveLassoFit<T> {
    pub stage1: LassoFit<T>,
    pub stage2: LassoFit<T>,
}

/// Two-stage adaptive LASSO. Stage one uses `stage1_penalized`; stage two
/// penalizes every column with weight `1/|β̂_j|` (standardized scale) and drops
/// the columns stage one set to zero.
pub fn adaptive_lasso<T: Real>(
    columns: &[&[T]],
    y: &[T],
    stage1_penalized: &[bool],
    config: &LassoConfig<T>,
) -> Result<AdaptiveLassoFit<T>, LassoError> {
    config.validate()?;
    if stage1_penalized.len() != columns.len() {
        return Err(LassoError::InvalidConfig("penalty mask length differs from column count".into()));
    }
    let std = Standardized::new(columns, y, config.standardize, config.intercept)?;
    let stage1 = run_path(&std, unit_weights(stage1_penalized), config);
    let weights: Vec<T> = stage1
        .chosen_coefficients()
        .iter()
        .zip(&std.scale)
        .map(|(b, s)| {
            let b_std = (*b * *s).abs();
            if b_std > T::zero() {
                T::one() / b_std
            } else {
                T::infinity()
            }
        })
        .collect();
    if weights.iter().all(|w| w.is_infinite()) {
        return Err(LassoError::AllZeroFirstStage);
    }
    let stage2 = run_path(&std, weights, config);
    Ok(AdaptiveLassoFit { stage1, stage2 })
}

/// Largest subgradient-optimality violation of `fit` at grid index `k`,
/// expressed as a coordinate step in standardized units.
pub fn kkt_violation<T: Real>(columns: &[&[T]], y: &[T], config: &LassoConfig<T>, fit: &LassoFit<T>, k: usize) -> T {
    let std = Standardized::new(columns, y, config.standardize, config.intercept).expect("validated by fit");
    let mut solver = Solver::new(&std, &fit.weights);
    solver.beta = fit.coefficients[k].iter().zip(&std.scale).map(|(b, s)| *b * *s).collect();
    let r = solver.residual();
    solver.grad = std.z.iter().map(|z| dot(z, &r)).collect();
    let ids: Vec<usize> = (0..columns.len()).filter(|&j| solver.usable(j)).collect();
    solver.kkt(&ids, fit.lambdas[k])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(grid: Vec<f64>) -> LassoConfig<f64> {
        LassoConfig { lambda_grid: Some(grid), standardize: false, ..Default::default() }
    }

    #[test]
    fn scalar_soft_threshold() {
        // ‖x‖² = n = 4, y = 3x. Minimising Σr² + λ|β| gives β = 3 − λ/(2n).
        let x = [1.0, -1.0, 1.0, -1.0];
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v).collect();
        let fit = lasso_path(&[&x], &y, &[true], &cfg(vec![16.0, 8.0, 0.0])).unwrap();
        assert!((fit.coefficients[0][0] - 1.0).abs() < 1e-9);
        // λ = 2n is the n-normalised λ = 2, giving 3 − 1 = 2.
        assert!((fit.coefficients[1][0] - 2.0).abs() < 1e-9);
        assert!((fit.coefficients[2][0] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn lambda_max_zeroes_everything() {
        let x1: [f64; 5] = [1.0, 2.0, -1.0, 0.5, 3.0];
        let x2: [f64; 5] = [0.3, -1.0, 2.0, 1.0, -0.4];
        let y: [f64; 5] = [1.0, 0.5, -0.2, 2.0, 1.1];
        let lmax = 2.0 * dot(&x1, &y).abs().max(dot(&x2, &y).abs());
        let fit = lasso_path(&[&x1, &x2], &y, &[true, true], &cfg(vec![lmax * 1.0001, lmax * 0.9])).unwrap();
        assert!(fit.coefficients[0].iter().all(|b| *b == 0.0));
        assert!(fit.coefficients[1].iter().any(|b| *b != 0.0));
    }

    #[test]
    fn generated_grid_starts_at_lambda_max() {
        let x1: [f64; 6] = [1.0, 2.0, -1.0, 0.5, 3.0, 1.0];
        let y = [1.0, 0.5, -0.2, 2.0, 1.1, 0.0];
        let fit = lasso_path(&[&x1], &y, &[true], &LassoConfig::<f64>::default()).unwrap();
        assert_eq!(fit.lambdas.len(), 100);
        assert!(fit.coefficients[0][0] == 0.0);
        assert!(fit.coefficients[1][0] != 0.0);
        assert!((fit.lambdas[99] / fit.lambdas[0] - 1e-4).abs() < 1e-12);
    }

    #[test]
    fn unpenalized_column_is_ols() {
        let x1 = [1.0, 2.0, 3.0, 4.0, 5.0];
        let x2 = [1.0, -1.0, 1.0, -1.0, 1.0];
        let y = [2.1, 3.9, 6.2, 7.8, 10.1];
        let fit = lasso_path(&[&x1, &x2], &y, &[false, true], &cfg(vec![1e6])).unwrap();
        assert_eq!(fit.coefficients[0][1], 0.0);
        let b = dot(&x1, &y) / sq_norm(&x1);
        assert!((fit.coefficients[0][0] - b).abs() < 1e-9);
    }

    #[test]
    fn intercept_is_unpenalized() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [11.0, 12.0, 13.0, 14.0];
        let c = LassoConfig { intercept: true, ..cfg(vec![1e6, 0.0]) };
        let fit = lasso_path(&[&x], &y, &[true], &c).unwrap();
        assert_eq!(fit.coefficients[0][0], 0.0);
        assert!((fit.intercepts[0] - 12.5).abs() < 1e-12);
        assert!((fit.coefficients[1][0] - 1.0).abs() < 1e-8);
        assert!((fit.intercepts[1] - 10.0).abs() < 1e-7);
    }

    #[test]
    fn adaptive_drops_small_first_stage() {
        let n = 200;
        let x1: Vec<f64> = (0..n).map(|t| ((t * 37 % 101) as f64 / 50.0) - 1.0).collect();
        let x2: Vec<f64> = (0..n).map(|t| ((t * 53 % 97) as f64 / 48.0) - 1.0).collect();
        let y: Vec<f64> = x1
            .iter()
            .zip(&x2)
            .enumerate()
            .map(|(t, (a, b))| 5.0 * a + 0.01 * b + 0.3 * (((t * 71 % 89) as f64 / 44.0) - 1.0))
            .collect();
        let fit = adaptive_lasso(&[&x1, &x2], &y, &[true, true], &LassoConfig::default()).unwrap();
        let c = fit.stage2.chosen_coefficients();
        assert!(c[0] > 4.5);
        assert_eq!(c[1], 0.0);
    }

    #[test]
    fn all_zero_first_stage() {
        let x = [0.0; 6];
        let y = [1.0, 2.0, 3.0, 1.0, 2.0, 3.0];
        let err = adaptive_lasso(&[&x], &y, &[true], &LassoConfig::default()).unwrap_err();
        assert_eq!(err, LassoError::AllZeroFirstStage);
    }

    #[test]
    fn rejects_increasing_grid() {
        let x = [1.0, 2.0];
        let err = lasso_path(&[&x], &[1.0, 2.0], &[true], &cfg(vec![1.0, 2.0])).unwrap_err();
        assert!(matches!(err, LassoError::InvalidConfig(_)));
    }
}
