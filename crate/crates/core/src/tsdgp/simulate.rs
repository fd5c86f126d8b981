use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, StudentT};

use super::{expand_characteristic, CovariateKind, Dataset, DgpSpec, ErrorProcessSpec, SimulationError};

const DIVERGENCE_BOUND: f64 = 1e12;
const NONZERO: f64 = 1e-12;

/// Independent random stream assignments. Each role draws from its own ChaCha
/// stream so that adding series never perturbs the draws of another role.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamRole {
    Error,
    CommonFactor,
    /// ARCH driver `k` (0-based).
    Driver(usize),
    /// Idiosyncratic innovations of exogenous series `j` (1-based).
    Series(usize),
}

impl StreamRole {
    fn id(self) -> u64 {
        match self {
            StreamRole::Error => 0,
            StreamRole::CommonFactor => 1,
            StreamRole::Driver(k) => 16 + k as u64,
            StreamRole::Series(j) => (1 << 32) + j as u64,
        }
    }

    pub fn rng(self, seed: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(self.id());
        rng
    }
}

fn normal(rng: &mut impl Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Draws one dataset. Identical `(spec, seed)` pairs give identical output.
///
/// `y_t = 0` for `t ≤ 0` and exogenous terms `x_{t−l}` with `t − l ≤ 0` are
/// dropped; only the stationary covariate and error recursions are warmed up.
pub fn simulate(spec: &DgpSpec, seed: u64) -> Result<Dataset<f64>, SimulationError> {
    spec.validate()?;
    let n = spec.n;
    let x = simulate_covariates(spec, seed)?;
    let eps = simulate_errors(&spec.error, n, spec.burn_in, seed);
    let alpha = expand_characteristic(&spec.unit_root);

    let mut y = vec![0.0; n];
    for t in 0..n {
        let mut v = eps[t];
        for (i, a) in alpha.iter().enumerate() {
            if t > i {
                v += a * y[t - 1 - i];
            }
        }
        for c in &spec.beta {
            if t >= c.lag {
                v += c.value * x[c.series - 1][t - c.lag];
            }
        }
        if !v.is_finite() || v.abs() > DIVERGENCE_BOUND {
            return Err(SimulationError::NonFinite { t: t + 1 });
        }
        y[t] = v;
    }

    let true_q = alpha.iter().enumerate().filter(|(_, a)| a.abs() > NONZERO).map(|(i, _)| i + 1).collect();
    Ok(Dataset {
        y,
        x,
        true_q,
        true_j: spec.true_exogenous(),
        alpha_true: alpha,
        innovations: eps,
        max_lag: spec.max_lag,
    })
}

fn simulate_errors(spec: &ErrorProcessSpec, n: usize, burn_in: usize, seed: u64) -> Vec<f64> {
    let mut rng = StreamRole::Error.rng(seed);
    match *spec {
        ErrorProcessSpec::Gaussian => (0..n).map(|_| normal(&mut rng)).collect(),
        ErrorProcessSpec::StudentT { df } => {
            let dist = StudentT::new(df).expect("validated df");
            (0..n).map(|_| dist.sample(&mut rng)).collect()
        }
        ErrorProcessSpec::Garch11 { omega, alpha, beta } => {
            let mut sigma2 = omega / (1.0 - alpha - beta);
            let mut prev_eps2 = sigma2;
            let mut out = Vec::with_capacity(n);
            for t in 0..burn_in + n {
                sigma2 = omega + alpha * prev_eps2 + beta * sigma2;
                let e = sigma2.sqrt() * normal(&mut rng);
                prev_eps2 = e * e;
                if t >= burn_in {
                    out.push(e);
                }
            }
            out
        }
    }
}

fn check_bounded(x: &[Vec<f64>]) -> Result<(), SimulationError> {
    for (j, col) in x.iter().enumerate() {
        if let Some(t) = col.iter().position(|v| !v.is_finite() || v.abs() > DIVERGENCE_BOUND) {
            return Err(SimulationError::NonStationaryCovariate { series: j + 1, t: t + 1 });
        }
    }
    Ok(())
}

fn simulate_covariates(spec: &DgpSpec, seed: u64) -> Result<Vec<Vec<f64>>, SimulationError> {
    let n = spec.n;
    let p = spec.covariates.p;
    let burn = spec.burn_in;
    let total = burn + n;
    let x: Vec<Vec<f64>> = match &spec.covariates.kind {
        CovariateKind::IidGaussian => (1..=p)
            .map(|j| {
                let mut rng = StreamRole::Series(j).rng(seed);
                (0..n).map(|_| normal(&mut rng)).collect()
            })
            .collect(),
        CovariateKind::Ar1CommonFactor { rho, factor_weight } => {
            let mut frng = StreamRole::CommonFactor.rng(seed);
            let factor: Vec<f64> = (0..total).map(|_| normal(&mut frng)).collect();
            (1..=p)
                .map(|j| {
                    let mut rng = StreamRole::Series(j).rng(seed);
                    let mut prev = 0.0;
                    let mut col = Vec::with_capacity(n);
                    for (t, f) in factor.iter().enumerate() {
                        prev = rho * prev + factor_weight * f + normal(&mut rng);
                        if t >= burn {
                            col.push(prev);
                        }
                    }
                    col
                })
                .collect()
        }
        CovariateKind::ArmaBanded { ar_coeffs, ma_coeffs, band_base, band_width, innov_df } => {
            let dist = StudentT::new(*innov_df).expect("validated df");
            let pi: Vec<Vec<f64>> = (1..=p)
                .map(|j| {
                    let mut rng = StreamRole::Series(j).rng(seed);
                    (0..total).map(|_| dist.sample(&mut rng)).collect()
                })
                .collect();
            let weights: Vec<f64> = (0..=*band_width).map(|d| band_base.powi(d as i32)).collect();
            (0..p)
                .map(|j| {
                    let lo = j.saturating_sub(*band_width);
                    let hi = (j + band_width).min(p - 1);
                    let w: Vec<f64> =
                        (0..total).map(|t| (lo..=hi).map(|i| weights[i.abs_diff(j)] * pi[i][t]).sum()).collect();
                    let mut xs = vec![0.0; total];
                    for t in 0..total {
                        let mut v = w[t];
                        for (k, phi) in ar_coeffs.iter().enumerate() {
                            if t > k {
                                v += phi * xs[t - 1 - k];
                            }
                        }
                        for (k, theta) in ma_coeffs.iter().enumerate() {
                            if t > k {
                                v += theta * w[t - 1 - k];
                            }
                        }
                        xs[t] = v;
                    }
                    xs.split_off(burn)
                })
                .collect()
        }
        CovariateKind::Ma2ArchPair { ma_odd, ma_even, arch_omega, arch_alpha } => {
            let drivers: Vec<Vec<f64>> = (0..2)
                .map(|k| {
                    let mut rng = StreamRole::Driver(k).rng(seed);
                    let mut prev2 = arch_omega / (1.0 - arch_alpha);
                    (0..total)
                        .map(|_| {
                            let h2 = arch_omega + arch_alpha * prev2;
                            let v = h2.sqrt() * normal(&mut rng);
                            prev2 = v * v;
                            v
                        })
                        .collect()
                })
                .collect();
            (1..=p)
                .map(|j| {
                    let mut rng = StreamRole::Series(j).rng(seed);
                    let (driver, ma) = if j % 2 == 1 { (&drivers[0], ma_odd) } else { (&drivers[1], ma_even) };
                    let mut prev_w = 0.0;
                    let mut col = Vec::with_capacity(n);
                    for (t, d) in driver.iter().enumerate() {
                        let w = d + normal(&mut rng);
                        if t >= burn {
                            col.push(ma[0] * w + ma[1] * prev_w);
                        }
                        prev_w = w;
                    }
                    col
                })
                .collect()
        }
    };
    check_bounded(&x)?;
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tsdgp::{builtin_spec, BuiltinSpec, CovariateProcessSpec, SizeTier, UnitRootSpec};

    fn random_walk(n: usize) -> DgpSpec {
        DgpSpec {
            unit_root: UnitRootSpec { a: 1, ..Default::default() },
            error: ErrorProcessSpec::Gaussian,
            covariates: CovariateProcessSpec { kind: CovariateKind::IidGaussian, p: 2 },
            beta: vec![],
            n,
            burn_in: 10,
            max_lag: 1,
        }
    }

    #[test]
    fn random_walk_is_cumulative_sum_of_errors() {
        let d = simulate(&random_walk(4), 11).unwrap();
        let mut acc = 0.0;
        for t in 0..4 {
            acc += d.innovations[t];
            assert_eq!(d.y[t], acc);
        }
        let d = simulate(&random_walk(500), 12).unwrap();
        for t in 1..500 {
            assert!((d.y[t] - d.y[t - 1] - d.innovations[t]).abs() < 1e-12);
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let spec = builtin_spec(BuiltinSpec::Ex42, SizeTier::new(200, 100, 4)).unwrap();
        let a = simulate(&spec, 5).unwrap();
        let b = simulate(&spec, 5).unwrap();
        assert_eq!(a, b);
        let c = simulate(&spec, 6).unwrap();
        assert_ne!(a.y, c.y);
    }

    #[test]
    fn adding_series_does_not_perturb_errors() {
        let mut spec = random_walk(50);
        let a = simulate(&spec, 3).unwrap();
        spec.covariates.p = 9;
        let b = simulate(&spec, 3).unwrap();
        assert_eq!(a.innovations, b.innovations);
        assert_eq!(a.x[0], b.x[0]);
    }

    #[test]
    fn example_41_truth() {
        let spec = builtin_spec(BuiltinSpec::Ex41, SizeTier::new(400, 200, 5)).unwrap();
        let d = simulate(&spec, 1).unwrap();
        assert_eq!(d.true_j.len(), 10);
        assert_eq!(d.true_q.iter().copied().collect::<Vec<_>>(), vec![1, 4, 6]);
        assert_eq!(d.alpha_true.len(), 6);
        assert_eq!(d.x.len(), 200);
    }

    #[test]
    fn example_41_recovers_innovations() {
        let spec = builtin_spec(BuiltinSpec::Ex41, SizeTier::new(400, 200, 5)).unwrap();
        let d = simulate(&spec, 2).unwrap();
        for t in 0..d.n() {
            let mut z = d.y[t];
            for (i, a) in d.alpha_true.iter().enumerate() {
                if t > i {
                    z -= a * d.y[t - 1 - i];
                }
            }
            for c in &spec.beta {
                if t >= c.lag {
                    z -= c.value * d.x[c.series - 1][t - c.lag];
                }
            }
            let scale = d.y[t].abs().max(1.0);
            assert!((z - d.innovations[t]).abs() < 1e-9 * scale, "t={t}");
        }
    }

    #[test]
    fn example_s5_truth() {
        let spec = builtin_spec(BuiltinSpec::ExS5, SizeTier::new(800, 250, 4)).unwrap();
        let d = simulate(&spec, 4).unwrap();
        assert_eq!(d.true_j.len(), 8);
        assert_eq!(d.alpha_true.len(), 3);
    }

    #[test]
    fn garch_moments() {
        let mut spec = builtin_spec(BuiltinSpec::Ex42, SizeTier::new(200, 100, 4)).unwrap();
        spec.n = 100_000;
        let eps = simulate_errors(&spec.error, spec.n, spec.burn_in, 9);
        let n = eps.len() as f64;
        let mean = eps.iter().sum::<f64>() / n;
        let var = eps.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / n;
        let kurt = eps.iter().map(|e| (e - mean).powi(4)).sum::<f64>() / n / (var * var);
        assert!(kurt.is_finite());
        assert!(mean.abs() < 5.0 * (var / n).sqrt());
        // Unconditional variance ω/(1−α−β) = 1.
        assert!((var - 1.0).abs() < 0.1);
    }

    #[test]
    fn common_factor_correlation() {
        let mut spec = builtin_spec(BuiltinSpec::Ex41, SizeTier::new(200, 100, 4)).unwrap();
        spec.n = 100_000;
        spec.covariates.p = 3;
        spec.beta.retain(|c| c.series <= 3);
        let x = simulate_covariates(&spec, 21).unwrap();
        let corr = |a: &[f64], b: &[f64]| {
            let n = a.len() as f64;
            let ma = a.iter().sum::<f64>() / n;
            let mb = b.iter().sum::<f64>() / n;
            let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
            let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
            let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
            cov / (va * vb).sqrt()
        };
        assert!((corr(&x[0], &x[1]) - 0.8).abs() < 0.02);
        assert!((corr(&x[1], &x[2]) - 0.8).abs() < 0.02);
    }

    #[test]
    fn diverging_covariate_is_reported() {
        let mut spec = random_walk(10);
        spec.covariates.kind = CovariateKind::Ar1CommonFactor { rho: 1.5, factor_weight: 1.0 };
        assert!(matches!(simulate(&spec, 1), Err(SimulationError::InvalidSpec(_))));
    }

    #[test]
    fn exploding_y_is_reported() {
        let mut spec = random_walk(3000);
        spec.unit_root = UnitRootSpec { a: 6, ..Default::default() };
        assert!(matches!(simulate(&spec, 1), Err(SimulationError::NonFinite { .. })));
    }
}
