//! Incremental least squares over the lag-indexed ARX design.
//!
//! [`LagDesign`] lays out the regressors `y_{t−1..t−q}` and `x_{t−l,j}` over the
//! common window `t = r̄+1..n`. [`ActiveFit`] keeps an orthonormal basis of the
//! active columns (modified Gram–Schmidt with one re-orthogonalisation pass)
//! and the residual of `y`, from which the forward-selection criteria are read.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::linalg::{axpy, collinear_tol, dot, lstsq, sq_norm, symmetric_eigenvalues};
use crate::scalar::Real;
use crate::tsdgp::Dataset;
use crate::types::{ExoIndex, Regressor};

/// Column position inside a [`LagDesign`]: AR lags first, then exogenous
/// candidates in `(series, lag)` order.
pub type ColumnId = usize;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProjectionError {
    #[error("design has no rows (n = {n}, r̄ = {r_bar})")]
    EmptyDesign { n: usize, r_bar: usize },
    #[error("regressor {0} is not part of the design")]
    UnknownRegressor(Regressor),
    #[error("series {series} has length {len}, expected {expected}")]
    RaggedSeries { series: usize, len: usize, expected: usize },
}

#[derive(Debug, Clone)]
pub struct LagDesign<T> {
    n: usize,
    q: usize,
    r_bar: usize,
    target: Vec<T>,
    columns: Vec<Vec<T>>,
    regressors: Vec<Regressor>,
    lookup: HashMap<Regressor, ColumnId>,
    centered: bool,
}

impl<T: Real> LagDesign<T> {
    /// Design with `q` AR lags and lags `1..=r` of every exogenous series.
    pub fn new(data: &Dataset<T>, q: usize, r: usize) -> Result<Self, ProjectionError> {
        Self::with_lags(data, q, &vec![r; data.p()])
    }

    /// Design with per-series lag depths `lags[j-1] = r_j`.
    pub fn with_lags(data: &Dataset<T>, q: usize, lags: &[usize]) -> Result<Self, ProjectionError> {
        let n = data.n();
        for (j, col) in data.x.iter().enumerate() {
            if col.len() != n {
                return Err(ProjectionError::RaggedSeries { series: j + 1, len: col.len(), expected: n });
            }
        }
        let r_bar = lags.iter().copied().max().unwrap_or(0).max(q);
        if r_bar >= n {
            return Err(ProjectionError::EmptyDesign { n, r_bar });
        }
        let mut columns = Vec::with_capacity(q + lags.iter().sum::<usize>());
        let mut regressors = Vec::with_capacity(columns.capacity());
        for i in 1..=q {
            columns.push(data.y[r_bar - i..n - i].to_vec());
            regressors.push(Regressor::Ar(i));
        }
        for (j, &r) in lags.iter().enumerate() {
            for l in 1..=r {
                columns.push(data.x[j][r_bar - l..n - l].to_vec());
                regressors.push(Regressor::Exo(ExoIndex::new(j + 1, l)));
            }
        }
        let lookup = regressors.iter().enumerate().map(|(i, r)| (*r, i)).collect();
        Ok(Self { n, q, r_bar, target: data.y[r_bar..n].to_vec(), columns, regressors, lookup, centered: false })
    }

    /// Copy with the target and every column demeaned over the window, which
    /// projects out an intercept.
    pub fn centered(&self) -> Self {
        let center = |v: &[T]| {
            let m = v.iter().copied().sum::<T>() / T::count(v.len());
            v.iter().map(|x| *x - m).collect::<Vec<T>>()
        };
        Self {
            target: center(&self.target),
            columns: self.columns.iter().map(|c| center(c)).collect(),
            centered: true,
            ..self.clone()
        }
    }

    pub fn is_centered(&self) -> bool {
        self.centered
    }

    /// Sample size `n` used in the `n⁻¹` normalisations.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn r_bar(&self) -> usize {
        self.r_bar
    }

    /// Rows of the estimation window, `n − r̄`.
    pub fn rows(&self) -> usize {
        self.target.len()
    }

    /// Number of exogenous candidates `p*`.
    pub fn p_star(&self) -> usize {
        self.columns.len() - self.q
    }

    pub fn width(&self) -> usize {
        self.columns.len()
    }

    pub fn target(&self) -> &[T] {
        &self.target
    }

    pub fn column(&self, id: ColumnId) -> &[T] {
        &self.columns[id]
    }

    pub fn regressor(&self, id: ColumnId) -> Regressor {
        self.regressors[id]
    }

    pub fn id_of(&self, reg: Regressor) -> Result<ColumnId, ProjectionError> {
        self.lookup.get(&reg).copied().ok_or(ProjectionError::UnknownRegressor(reg))
    }

    pub fn ar_ids(&self) -> std::ops::Range<ColumnId> {
        0..self.q
    }

    pub fn exo_ids(&self) -> std::ops::Range<ColumnId> {
        self.q..self.columns.len()
    }
}

/// Forward-selection criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Criterion {
    /// `n⁻¹|yᵀ(I−P)x| / (n⁻¹ xᵀ(I−P)x)^{1/2}`
    Fsr,
    /// `n⁻¹|yᵀ(I−P)x| / (n⁻¹ xᵀx)^{1/2}`
    Oga,
}

fn criterion_value<T: Real>(crit: Criterion, n: T, cross: T, resid_sq: T, raw_sq: T) -> T {
    if raw_sq <= T::zero() || resid_sq < collinear_tol::<T>() * raw_sq {
        return T::neg_infinity();
    }
    let denom = match crit {
        Criterion::Fsr => resid_sq,
        Criterion::Oga => raw_sq,
    };
    (cross.abs() / n) / (denom / n).sqrt()
}

/// Least-squares fit of the design target on an ordered set of active columns.
#[derive(Debug, Clone)]
pub struct ActiveFit<'a, T> {
    design: &'a LagDesign<T>,
    active: Vec<ColumnId>,
    collinear: Vec<bool>,
    basis: Vec<Vec<T>>,
    resid: Vec<T>,
    rss: T,
}

impl<'a, T: Real> ActiveFit<'a, T> {
    pub fn new(design: &'a LagDesign<T>, initial: &[ColumnId]) -> Result<Self, ProjectionError> {
        if design.rows() == 0 {
            return Err(ProjectionError::EmptyDesign { n: design.n, r_bar: design.r_bar });
        }
        let resid = design.target.clone();
        let rss = sq_norm(&resid);
        let mut fit = Self { design, active: Vec::new(), collinear: Vec::new(), basis: Vec::new(), resid, rss };
        for &id in initial {
            fit.append(id);
        }
        Ok(fit)
    }

    pub fn design(&self) -> &'a LagDesign<T> {
        self.design
    }

    pub fn active(&self) -> &[ColumnId] {
        &self.active
    }

    /// Per active column: true when it was linearly dependent on earlier ones.
    pub fn collinear(&self) -> &[bool] {
        &self.collinear
    }

    pub fn rss(&self) -> T {
        self.rss
    }

    pub fn residual(&self) -> &[T] {
        &self.resid
    }

    pub fn basis(&self) -> &[Vec<T>] {
        &self.basis
    }

    /// `(I − P) v` in place.
    pub fn residualize(&self, v: &mut [T]) {
        for _ in 0..2 {
            for b in &self.basis {
                let c = dot(b, v);
                axpy(-c, b, v);
            }
        }
    }

    fn score_with(&self, crit: Criterion, id: ColumnId) -> T {
        let x = self.design.column(id);
        let mut r = x.to_vec();
        self.residualize(&mut r);
        criterion_value(crit, T::count(self.design.n), dot(&self.resid, &r), sq_norm(&r), sq_norm(x))
    }

    /// Forward stepwise criterion of a candidate; `-inf` when the candidate is
    /// numerically inside the active span.
    pub fn fsr_score(&self, id: ColumnId) -> T {
        self.score_with(Criterion::Fsr, id)
    }

    /// Orthogonal greedy criterion (raw-norm denominator).
    pub fn oga_score(&self, id: ColumnId) -> T {
        self.score_with(Criterion::Oga, id)
    }

    pub fn score(&self, crit: Criterion, id: ColumnId) -> T {
        self.score_with(crit, id)
    }

    /// Adds a column. Returns `false` (and records it as collinear) when the
    /// column adds no new direction.
    pub fn append(&mut self, id: ColumnId) -> bool {
        let x = self.design.column(id);
        let mut r = x.to_vec();
        self.residualize(&mut r);
        let rr = sq_norm(&r);
        let raw = sq_norm(x);
        self.active.push(id);
        if raw <= T::zero() || rr < collinear_tol::<T>() * raw {
            self.collinear.push(true);
            return false;
        }
        let inv = T::one() / rr.sqrt();
        r.iter_mut().for_each(|v| *v *= inv);
        let c = dot(&r, &self.resid);
        axpy(-c, &r, &mut self.resid);
        self.rss = sq_norm(&self.resid);
        self.basis.push(r);
        self.collinear.push(false);
        true
    }
}

/// Candidates pre-residualized against an [`ActiveFit`], updated one basis
/// vector at a time. Scoring all candidates costs `O(rows)` each per step.
#[derive(Debug, Clone)]
pub struct CandidatePool<T> {
    ids: Vec<ColumnId>,
    resid: Vec<Vec<T>>,
    raw_sq: Vec<T>,
    taken: Vec<bool>,
}

impl<T: Real> CandidatePool<T> {
    pub fn new(fit: &ActiveFit<'_, T>, ids: &[ColumnId]) -> Self {
        let mut ids = ids.to_vec();
        ids.sort_unstable();
        ids.dedup();
        let resid = ids
            .iter()
            .map(|&id| {
                let mut r = fit.design().column(id).to_vec();
                fit.residualize(&mut r);
                r
            })
            .collect();
        let raw_sq = ids.iter().map(|&id| sq_norm(fit.design().column(id))).collect();
        let taken = ids.iter().map(|id| fit.active().contains(id)).collect();
        Self { ids, resid, raw_sq, taken }
    }

    /// Scores of every untaken candidate against the fit's current residual.
    pub fn scores(&self, fit: &ActiveFit<'_, T>, crit: Criterion) -> Vec<(ColumnId, T)> {
        let n = T::count(fit.design().n());
        self.ids
            .iter()
            .enumerate()
            .filter(|(k, _)| !self.taken[*k])
            .map(|(k, &id)| {
                let r = &self.resid[k];
                (id, criterion_value(crit, n, dot(fit.residual(), r), sq_norm(r), self.raw_sq[k]))
            })
            .collect()
    }

    /// Picks the best eligible candidate (lowest id on ties), appends it to the
    /// fit and residualizes the remaining candidates against the new direction.
    pub fn advance(&mut self, fit: &mut ActiveFit<'_, T>, crit: Criterion) -> Option<(ColumnId, T)> {
        let n = T::count(fit.design().n());
        let mut best: Option<(usize, T)> = None;
        for k in 0..self.ids.len() {
            if self.taken[k] {
                continue;
            }
            let r = &self.resid[k];
            let s = criterion_value(crit, n, dot(fit.residual(), r), sq_norm(r), self.raw_sq[k]);
            if s == T::neg_infinity() || s.is_nan() {
                continue;
            }
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((k, s));
            }
        }
        let (k, score) = best?;
        self.taken[k] = true;
        let id = self.ids[k];
        if fit.append(id) {
            let b = fit.basis().last().expect("basis vector just added");
            for (kk, r) in self.resid.iter_mut().enumerate() {
                if !self.taken[kk] {
                    let c = dot(b, r);
                    axpy(-c, b, r);
                }
            }
        }
        Some((id, score))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OlsFit<T> {
    pub coef: Vec<T>,
    pub intercept: Option<T>,
    pub rss: T,
    pub rank_deficient: bool,
}

/// OLS of the design target on `ids` (pivoted QR; minimum-norm when rank deficient).
pub fn ols_solve<T: Real>(design: &LagDesign<T>, ids: &[ColumnId]) -> OlsFit<T> {
    let cols: Vec<&[T]> = ids.iter().map(|&id| design.column(id)).collect();
    let y = design.target();
    let ls = lstsq(&cols, y);
    let rss = residual_ss(&cols, &ls.coef, y, T::zero());
    OlsFit { rank_deficient: ls.rank_deficient(), coef: ls.coef, intercept: None, rss }
}

/// OLS with an unpenalised intercept, on the (uncentered) design.
pub fn ols_solve_with_intercept<T: Real>(design: &LagDesign<T>, ids: &[ColumnId]) -> OlsFit<T> {
    let mean = |v: &[T]| v.iter().copied().sum::<T>() / T::count(v.len());
    let y = design.target();
    let ybar = mean(y);
    let yc: Vec<T> = y.iter().map(|v| *v - ybar).collect();
    let means: Vec<T> = ids.iter().map(|&id| mean(design.column(id))).collect();
    let centered: Vec<Vec<T>> =
        ids.iter().zip(&means).map(|(&id, m)| design.column(id).iter().map(|v| *v - *m).collect()).collect();
    let refs: Vec<&[T]> = centered.iter().map(|c| c.as_slice()).collect();
    let ls = lstsq(&refs, &yc);
    let intercept = ybar - ls.coef.iter().zip(&means).map(|(c, m)| *c * *m).sum::<T>();
    let raw: Vec<&[T]> = ids.iter().map(|&id| design.column(id)).collect();
    let rss = residual_ss(&raw, &ls.coef, y, intercept);
    OlsFit { rank_deficient: ls.rank_deficient(), coef: ls.coef, intercept: Some(intercept), rss }
}

fn residual_ss<T: Real>(cols: &[&[T]], coef: &[T], y: &[T], intercept: T) -> T {
    let mut r: Vec<T> = y.iter().map(|v| *v - intercept).collect();
    for (c, b) in cols.iter().zip(coef) {
        axpy(-*b, c, &mut r);
    }
    sq_norm(&r)
}

/// `λ_min(n⁻¹ Σ_t w_t wᵀ_t)` with `w_t` the `q` AR lags followed by `x_t(J)`.
pub fn min_eig_diag<T: Real>(design: &LagDesign<T>, exo: &[ExoIndex]) -> Result<T, ProjectionError> {
    let mut ids: Vec<ColumnId> = design.ar_ids().collect();
    for e in exo {
        ids.push(design.id_of(Regressor::Exo(*e))?);
    }
    Ok(gram_min_eigenvalue(design, &ids))
}

pub fn gram_min_eigenvalue<T: Real>(design: &LagDesign<T>, ids: &[ColumnId]) -> T {
    let k = ids.len();
    if k == 0 {
        return T::zero();
    }
    let n = T::count(design.n());
    let mut g = vec![T::zero(); k * k];
    for i in 0..k {
        for j in i..k {
            let v = dot(design.column(ids[i]), design.column(ids[j])) / n;
            g[i * k + j] = v;
            g[j * k + i] = v;
        }
    }
    symmetric_eigenvalues(g, k)[0]
}
