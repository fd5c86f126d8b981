//! Synthetic unit-root ARX data: specifications, built-in designs and the
//! simulator.

mod builtin;
mod poly;
mod simulate;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;
use crate::types::ExoIndex;

pub use builtin::{builtin_spec, BuiltinSpec, SizeTier, TIERS_MAIN, TIERS_S5};
pub use poly::{characteristic_polynomial, expand_characteristic, poly_mul, roots, roots_outside_unit_circle};
pub use simulate::{simulate, StreamRole};

/// Root-modulus tolerance used by all stationarity checks.
pub const ROOT_TOL: f64 = 1e-8;
/// Default warm-up length for stationary recursions.
pub const DEFAULT_BURN_IN: usize = 500;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimulationError {
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("covariate series {series} diverged at t = {t}")]
    NonStationaryCovariate { series: usize, t: usize },
    #[error("non-finite or overflowing y at t = {t}")]
    NonFinite { t: usize },
    #[error("size tier (n={n}, p={p}, r={r}) is not defined for {name}")]
    UnknownTier { name: String, n: usize, p: usize, r: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexPair {
    /// Angle of the conjugate root pair, in radians, inside `(0, π)`.
    pub theta: f64,
    pub multiplicity: u32,
}

/// Factorised AR polynomial of the dependent series.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct UnitRootSpec {
    /// Multiplicity of the root at `z = 1`.
    pub a: u32,
    /// Multiplicity of the root at `z = −1`.
    pub b: u32,
    #[serde(default)]
    pub complex_pairs: Vec<ComplexPair>,
    /// `a_1..a_ι` of the stable factor `ψ(z) = 1 + Σ a_s z^s`.
    #[serde(default)]
    pub psi_coeffs: Vec<f64>,
}

impl UnitRootSpec {
    pub fn validate(&self) -> Result<(), SimulationError> {
        for pair in &self.complex_pairs {
            if !(pair.theta > 0.0 && pair.theta < std::f64::consts::PI) {
                return Err(SimulationError::InvalidSpec(format!("complex root angle {} outside (0, π)", pair.theta)));
            }
        }
        let mut psi = vec![1.0];
        psi.extend_from_slice(&self.psi_coeffs);
        if !roots_outside_unit_circle(&psi, ROOT_TOL) {
            return Err(SimulationError::InvalidSpec("ψ(z) has a root in the closed unit disk".into()));
        }
        Ok(())
    }

    /// Number of AR lags `m` of the expanded polynomial.
    pub fn order(&self) -> usize {
        (self.a + self.b) as usize
            + 2 * self.complex_pairs.iter().map(|p| p.multiplicity as usize).sum::<usize>()
            + self.psi_coeffs.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ErrorProcessSpec {
    Gaussian,
    /// Raw Student-t draws (not rescaled to unit variance).
    StudentT {
        df: f64,
    },
    /// `ε_t = σ_t Z_t`, `σ_t² = ω + α ε²_{t−1} + β σ²_{t−1}`, Gaussian `Z_t`.
    Garch11 {
        omega: f64,
        alpha: f64,
        beta: f64,
    },
}

impl ErrorProcessSpec {
    pub fn validate(&self) -> Result<(), SimulationError> {
        match *self {
            ErrorProcessSpec::Gaussian => Ok(()),
            ErrorProcessSpec::StudentT { df } if df > 0.0 => Ok(()),
            ErrorProcessSpec::StudentT { df } => {
                Err(SimulationError::InvalidSpec(format!("t degrees of freedom {df} must be positive")))
            }
            ErrorProcessSpec::Garch11 { omega, alpha, beta } => {
                if omega > 0.0 && alpha >= 0.0 && beta >= 0.0 && alpha + beta < 1.0 {
                    Ok(())
                } else {
                    Err(SimulationError::InvalidSpec(format!(
                        "GARCH(1,1) needs ω>0, α,β≥0, α+β<1 (got {omega}, {alpha}, {beta})"
                    )))
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CovariateKind {
    /// Independent standard normal series.
    IidGaussian,
    /// `x_{t,j} = ρ x_{t−1,j} + w·f_t + v_{t,j}` with a common Gaussian factor `f_t`.
    Ar1CommonFactor { rho: f64, factor_weight: f64 },
    /// `φ(B) x_{t,j} = θ(B) w_{t,j}` where `w_t = A π_t`, `A_{ij} = base^{|i−j|}` for
    /// `|i−j| ≤ band_width`, and `π` has independent t(`innov_df`) entries.
    /// `ar_coeffs` are `φ_1..` in `x_t = Σ φ_i x_{t−i} + w_t + Σ θ_i w_{t−i}`.
    ArmaBanded { ar_coeffs: Vec<f64>, ma_coeffs: Vec<f64>, band_base: f64, band_width: usize, innov_df: f64 },
    /// Two independent ARCH(1) drivers `π_{t,1}, π_{t,2}`; `w_{t,j} = π_{t,1 or 2} + v_{t,j}`
    /// by parity of `j`, and `x_{t,j} = m_0 w_{t,j} + m_1 w_{t−1,j}`.
    Ma2ArchPair { ma_odd: [f64; 2], ma_even: [f64; 2], arch_omega: f64, arch_alpha: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovariateProcessSpec {
    #[serde(flatten)]
    pub kind: CovariateKind,
    /// Number of exogenous series.
    pub p: usize,
}

impl CovariateProcessSpec {
    pub fn validate(&self) -> Result<(), SimulationError> {
        let bad = |m: String| Err(SimulationError::InvalidSpec(m));
        match &self.kind {
            CovariateKind::IidGaussian => Ok(()),
            CovariateKind::Ar1CommonFactor { rho, .. } => {
                if roots_outside_unit_circle(&[1.0, -rho], ROOT_TOL) {
                    Ok(())
                } else {
                    bad(format!("AR(1) covariate coefficient {rho} is not stationary"))
                }
            }
            CovariateKind::ArmaBanded { ar_coeffs, innov_df, .. } => {
                let mut phi = vec![1.0];
                phi.extend(ar_coeffs.iter().map(|c| -c));
                if !roots_outside_unit_circle(&phi, ROOT_TOL) {
                    return bad("ARMA covariate AR polynomial is not stationary".into());
                }
                if *innov_df <= 2.0 {
                    return bad(format!("t innovations need df > 2 (got {innov_df})"));
                }
                Ok(())
            }
            CovariateKind::Ma2ArchPair { arch_omega, arch_alpha, .. } => {
                if *arch_omega > 0.0 && (0.0..1.0).contains(arch_alpha) {
                    Ok(())
                } else {
                    bad(format!("ARCH(1) needs ω>0 and 0≤α<1 (got {arch_omega}, {arch_alpha})"))
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub series: usize,
    pub lag: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DgpSpec {
    pub unit_root: UnitRootSpec,
    pub error: ErrorProcessSpec,
    pub covariates: CovariateProcessSpec,
    /// Nonzero exogenous coefficients `β_l^{(j)}`.
    #[serde(default)]
    pub beta: Vec<Coefficient>,
    pub n: usize,
    #[serde(default = "default_burn_in")]
    pub burn_in: usize,
    /// Candidate lag depth `r` for every exogenous series in the selection design.
    pub max_lag: usize,
}

fn default_burn_in() -> usize {
    DEFAULT_BURN_IN
}

impl DgpSpec {
    pub fn validate(&self) -> Result<(), SimulationError> {
        if self.n == 0 {
            return Err(SimulationError::InvalidSpec("n must be positive".into()));
        }
        self.unit_root.validate()?;
        self.error.validate()?;
        self.covariates.validate()?;
        let mut seen = BTreeSet::new();
        for c in &self.beta {
            if c.series == 0 || c.series > self.covariates.p || c.lag == 0 {
                return Err(SimulationError::InvalidSpec(format!(
                    "coefficient index ({}, {}) outside 1..={} × 1..",
                    c.series, c.lag, self.covariates.p
                )));
            }
            if !seen.insert((c.series, c.lag)) {
                return Err(SimulationError::InvalidSpec(format!(
                    "duplicate coefficient index ({}, {})",
                    c.series, c.lag
                )));
            }
        }
        Ok(())
    }

    pub fn true_exogenous(&self) -> BTreeSet<ExoIndex> {
        self.beta.iter().filter(|c| c.value != 0.0).map(|c| ExoIndex::new(c.series, c.lag)).collect()
    }
}

/// Observed sample plus the ground truth it was generated from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset<T> {
    /// `y_1..y_n`.
    pub y: Vec<T>,
    /// Exogenous series, each of length `n` (`x[j-1][t-1] = x_{t,j}`).
    pub x: Vec<Vec<T>>,
    /// AR lags with nonzero coefficient.
    pub true_q: BTreeSet<usize>,
    pub true_j: BTreeSet<ExoIndex>,
    pub alpha_true: Vec<T>,
    /// Error draws `ε_1..ε_n`; empty for observed data.
    pub innovations: Vec<T>,
    /// Candidate lag depth `r` for exogenous series.
    pub max_lag: usize,
}

impl<T: Real> Dataset<T> {
    /// Observed data without ground truth.
    pub fn observed(y: Vec<T>, x: Vec<Vec<T>>, max_lag: usize) -> Self {
        Self {
            y,
            x,
            true_q: BTreeSet::new(),
            true_j: BTreeSet::new(),
            alpha_true: Vec::new(),
            innovations: Vec::new(),
            max_lag,
        }
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn p(&self) -> usize {
        self.x.len()
    }

    pub fn cast<U: Real>(&self) -> Dataset<U> {
        let conv = |v: &[T]| v.iter().map(|a| U::lit(a.as_f64())).collect::<Vec<U>>();
        Dataset {
            y: conv(&self.y),
            x: self.x.iter().map(|c| conv(c)).collect(),
            true_q: self.true_q.clone(),
            true_j: self.true_j.clone(),
            alpha_true: conv(&self.alpha_true),
            innovations: conv(&self.innovations),
            max_lag: self.max_lag,
        }
    }

    /// Sub-sample of time points `range` (0-based, half-open).
    pub fn slice(&self, range: std::ops::Range<usize>) -> Self {
        Self {
            y: self.y[range.clone()].to_vec(),
            x: self.x.iter().map(|c| c[range.clone()].to_vec()).collect(),
            true_q: self.true_q.clone(),
            true_j: self.true_j.clone(),
            alpha_true: self.alpha_true.clone(),
            innovations: if self.innovations.is_empty() { Vec::new() } else { self.innovations[range].to_vec() },
            max_lag: self.max_lag,
        }
    }
}
