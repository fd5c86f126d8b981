//! The published simulation designs.

use serde::{Deserialize, Serialize};

use super::{
    Coefficient, ComplexPair, CovariateKind, CovariateProcessSpec, DgpSpec, ErrorProcessSpec, SimulationError,
    UnitRootSpec, DEFAULT_BURN_IN,
};

/// `(n, p, r)`: sample size, number of exogenous series and lag depth per series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SizeTier {
    pub n: usize,
    pub p: usize,
    pub r: usize,
}

impl SizeTier {
    pub const fn new(n: usize, p: usize, r: usize) -> Self {
        Self { n, p, r }
    }

    /// Number of exogenous candidates `p* = p·r`.
    pub fn p_star(&self) -> usize {
        self.p * self.r
    }
}

pub const TIERS_MAIN: [SizeTier; 3] =
    [SizeTier::new(200, 100, 4), SizeTier::new(400, 200, 5), SizeTier::new(800, 500, 6)];
pub const TIERS_S5: [SizeTier; 3] =
    [SizeTier::new(800, 250, 4), SizeTier::new(1000, 275, 5), SizeTier::new(1500, 300, 6)];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum BuiltinSpec {
    /// Single unit root with a stable quartic/quintic factor, t(6) errors and
    /// AR(1) covariates sharing a common factor.
    Ex41,
    /// Complex unit-root pair, GARCH(1,1) errors, banded ARMA(2,1) covariates.
    Ex42,
    /// Double unit root, GARCH errors and MA covariates driven by ARCH processes.
    ExS5,
    /// AR(2) `y_t = (1+a) y_{t−1} − a y_{t−2} + ε_t` with pure-noise covariates.
    Ex21 { a: f64 },
    /// `y_t = y_{t−1} + x_{t−1} + ε_t` with one Gaussian covariate.
    Ex22,
    /// `y_t = y_{t−k} + ε_t`, no covariates.
    Ex31 { k: usize },
}

impl BuiltinSpec {
    pub fn tiers(&self) -> Option<&'static [SizeTier]> {
        match self {
            BuiltinSpec::Ex41 | BuiltinSpec::Ex42 => Some(&TIERS_MAIN),
            BuiltinSpec::ExS5 => Some(&TIERS_S5),
            _ => None,
        }
    }

    pub fn label(&self) -> String {
        match self {
            BuiltinSpec::Ex41 => "ex41".into(),
            BuiltinSpec::Ex42 => "ex42".into(),
            BuiltinSpec::ExS5 => "ex_s5".into(),
            BuiltinSpec::Ex21 { a } => format!("ex21(a={a})"),
            BuiltinSpec::Ex22 => "ex22".into(),
            BuiltinSpec::Ex31 { k } => format!("ex31(k={k})"),
        }
    }
}

fn coefs(lag: usize, first_series: usize, values: &[f64]) -> impl Iterator<Item = Coefficient> + '_ {
    values.iter().enumerate().map(move |(i, &value)| Coefficient { series: first_series + i, lag, value })
}

/// Exact DGP of a published example at the given size.
///
/// Examples 2.1, 2.2 and 3.1 accept any tier; only `n` (and `p` for 2.1) is used.
pub fn builtin_spec(name: BuiltinSpec, tier: SizeTier) -> Result<DgpSpec, SimulationError> {
    if let Some(tiers) = name.tiers() {
        if !tiers.contains(&tier) {
            return Err(SimulationError::UnknownTier { name: name.label(), n: tier.n, p: tier.p, r: tier.r });
        }
    }
    let spec = match name {
        BuiltinSpec::Ex41 => DgpSpec {
            unit_root: UnitRootSpec {
                a: 1,
                b: 0,
                complex_pairs: vec![],
                psi_coeffs: vec![0.0, 0.0, 0.0, -0.45, -0.45],
            },
            error: ErrorProcessSpec::StudentT { df: 6.0 },
            covariates: CovariateProcessSpec {
                kind: CovariateKind::Ar1CommonFactor { rho: 0.8, factor_weight: 2.0 },
                p: tier.p,
            },
            beta: coefs(1, 1, &[3.0, 3.75, 4.5, 5.25, 6.0]).chain(coefs(2, 6, &[6.75, 7.5, 8.25, 9.0, 9.25])).collect(),
            n: tier.n,
            burn_in: DEFAULT_BURN_IN,
            max_lag: tier.r,
        },
        BuiltinSpec::Ex42 => DgpSpec {
            unit_root: UnitRootSpec {
                a: 0,
                b: 0,
                complex_pairs: vec![ComplexPair { theta: 0.1, multiplicity: 1 }],
                psi_coeffs: vec![-0.3],
            },
            error: ErrorProcessSpec::Garch11 { omega: 5e-2, alpha: 0.05, beta: 0.9 },
            covariates: CovariateProcessSpec {
                kind: CovariateKind::ArmaBanded {
                    ar_coeffs: vec![0.1, -0.7],
                    ma_coeffs: vec![0.7],
                    band_base: 0.6,
                    band_width: 7,
                    innov_df: 13.0,
                },
                p: tier.p,
            },
            beta: coefs(1, 1, &[0.82, -1.03, 1.92, -2.21, 2.42])
                .chain(coefs(2, 6, &[-2.57, 3.28, -3.54, 3.72, -3.90]))
                .collect(),
            n: tier.n,
            burn_in: DEFAULT_BURN_IN,
            max_lag: tier.r,
        },
        BuiltinSpec::ExS5 => DgpSpec {
            unit_root: UnitRootSpec { a: 2, b: 0, complex_pairs: vec![], psi_coeffs: vec![0.4] },
            error: ErrorProcessSpec::Garch11 { omega: 5e-2, alpha: 0.5, beta: 0.1 },
            covariates: CovariateProcessSpec {
                kind: CovariateKind::Ma2ArchPair {
                    ma_odd: [0.8, 0.1],
                    ma_even: [0.2, 0.6],
                    arch_omega: 1.0,
                    arch_alpha: 0.2,
                },
                p: tier.p,
            },
            beta: [(1usize, [-7.62, 6.72, -5.55, 3.77]), (2, [6.89, -6.18, 4.47, -3.10])]
                .iter()
                .flat_map(|(j, vals)| {
                    vals.iter().enumerate().map(move |(l, &value)| Coefficient { series: *j, lag: l + 1, value })
                })
                .collect(),
            n: tier.n,
            burn_in: DEFAULT_BURN_IN,
            max_lag: tier.r,
        },
        BuiltinSpec::Ex21 { a } => {
            if a.abs() >= 1.0 {
                return Err(SimulationError::InvalidSpec(format!("example 2.1 needs |a| < 1 (got {a})")));
            }
            DgpSpec {
                unit_root: UnitRootSpec { a: 1, b: 0, complex_pairs: vec![], psi_coeffs: vec![-a] },
                error: ErrorProcessSpec::Gaussian,
                covariates: CovariateProcessSpec { kind: CovariateKind::IidGaussian, p: tier.p },
                beta: vec![],
                n: tier.n,
                burn_in: 0,
                max_lag: 1,
            }
        }
        BuiltinSpec::Ex22 => DgpSpec {
            unit_root: UnitRootSpec { a: 1, ..Default::default() },
            error: ErrorProcessSpec::Gaussian,
            covariates: CovariateProcessSpec { kind: CovariateKind::IidGaussian, p: 1 },
            beta: vec![Coefficient { series: 1, lag: 1, value: 1.0 }],
            n: tier.n,
            burn_in: 0,
            max_lag: 1,
        },
        BuiltinSpec::Ex31 { k } => {
            if k == 0 {
                return Err(SimulationError::InvalidSpec("example 3.1 needs k ≥ 1".into()));
            }
            // 1 − z^k factors over the k-th roots of unity.
            let complex_pairs = (1..=(k - 1) / 2)
                .map(|m| ComplexPair { theta: 2.0 * std::f64::consts::PI * m as f64 / k as f64, multiplicity: 1 })
                .collect();
            DgpSpec {
                unit_root: UnitRootSpec { a: 1, b: u32::from(k % 2 == 0), complex_pairs, psi_coeffs: vec![] },
                error: ErrorProcessSpec::Gaussian,
                covariates: CovariateProcessSpec { kind: CovariateKind::IidGaussian, p: 0 },
                beta: vec![],
                n: tier.n,
                burn_in: 0,
                max_lag: 1,
            }
        }
    };
    spec.validate()?;
    Ok(spec)
}
