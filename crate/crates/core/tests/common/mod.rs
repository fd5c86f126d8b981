//! Property checks shared by the `oracle`, `invariants` and `acceptance`
//! targets. Each runs a proptest runner and returns the first failure.

#![allow(dead_code)]

use std::collections::BTreeSet;

use fhtd_core::baselines::{adaptive_lasso, kkt_violation, lasso_path, LassoConfig};
use fhtd_core::eval::{Method, SelectionTally};
use fhtd_core::fhtd::{ddt, fsr_path, greedy_path, FhtdConfig};
use fhtd_core::harness::{emit_tables, run_experiment, ExperimentConfig, ExperimentKind, OutputFormat};
use fhtd_core::projection::{ols_solve, ActiveFit, ColumnId, Criterion, LagDesign};
use fhtd_core::tsdgp::{builtin_spec, simulate, BuiltinSpec, Dataset, SizeTier};
use fhtd_core::types::ExoIndex;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

fn run<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `(AᵀA) b = Aᵀy` by Gauss–Jordan with partial pivoting.
fn normal_equations(cols: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let k = cols.len();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut m: Vec<Vec<f64>> =
        (0..k).map(|i| (0..k).map(|j| dot(&cols[i], &cols[j])).chain([dot(&cols[i], y)]).collect()).collect();
    for c in 0..k {
        let p = (c..k).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs())).unwrap();
        m.swap(c, p);
        let piv = m[c][c];
        for v in m[c].iter_mut() {
            *v /= piv;
        }
        for r in 0..k {
            if r != c {
                let f = m[r][c];
                let row_c = m[c].clone();
                for (v, w) in m[r].iter_mut().zip(row_c) {
                    *v -= f * w;
                }
            }
        }
    }
    m.iter().map(|row| row[k]).collect()
}

/// `(I − P_A) v` computed from explicit coefficients.
fn dense_residual(cols: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    if cols.is_empty() {
        return v.to_vec();
    }
    let b = normal_equations(cols, v);
    let mut r = v.to_vec();
    for (c, bj) in cols.iter().zip(&b) {
        for (ri, ci) in r.iter_mut().zip(c) {
            *ri -= bj * ci;
        }
    }
    r
}

fn dense_score(crit: Criterion, n: usize, active: &[Vec<f64>], y: &[f64], x: &[f64]) -> f64 {
    let ry = dense_residual(active, y);
    let rx = dense_residual(active, x);
    let nf = n as f64;
    let cross: f64 = ry.iter().zip(x).map(|(a, b)| a * b).sum();
    let denom = match crit {
        Criterion::Fsr => rx.iter().map(|v| v * v).sum::<f64>(),
        Criterion::Oga => x.iter().map(|v| v * v).sum::<f64>(),
    };
    (cross.abs() / nf) / (denom / nf).sqrt()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-7 * a.abs().max(b.abs()).max(1.0)
}

/// Small random designs: `q + p·r ≤ 12` columns, at most 50 rows.
fn instance() -> impl Strategy<Value = (Dataset<f64>, usize, usize)> {
    (1usize..=3, 1usize..=3, 1usize..=3, 20usize..=50, any::<bool>()).prop_flat_map(|(q, p, r, n_rows, walk)| {
        let (q, p, r) = (q, p.min((12 - q) / r).max(1), r);
        let n = n_rows + q.max(r);
        (
            prop::collection::vec(-3.0f64..3.0, n),
            prop::collection::vec(prop::collection::vec(-3.0f64..3.0, n), p),
            Just((q, r, walk)),
        )
            .prop_map(|(mut y, x, (q, r, walk))| {
                if walk {
                    for t in 1..y.len() {
                        y[t] += y[t - 1];
                    }
                }
                (Dataset::observed(y, x, r), q, r)
            })
    })
}

/// Scores, rss, OLS coefficients and greedy choices of the incremental
/// projections agree with dense normal-equation solves to 1e-7 relative.
pub fn oracle_equivalence(cases: u32) -> Result<(), String> {
    run(cases, instance(), |(data, q, r)| {
        let design = LagDesign::new(&data, q, r).unwrap();
        let width = design.width();
        prop_assert!(width <= 12 && design.rows() <= 50);
        let col = |id: ColumnId| design.column(id).to_vec();
        let y = design.target().to_vec();

        // Scores against a growing active set.
        let mut fit = ActiveFit::new(&design, &[]).unwrap();
        let mut active: Vec<Vec<f64>> = Vec::new();
        for id in 0..width.min(6) {
            for cand in id..width {
                for crit in [Criterion::Fsr, Criterion::Oga] {
                    let got = fit.score(crit, cand);
                    let want = dense_score(crit, design.n(), &active, &y, &col(cand));
                    prop_assert!(close(got, want), "{crit:?} col {cand}: {got} vs {want}");
                }
            }
            fit.append(id);
            active.push(col(id));
            let rss: f64 = dense_residual(&active, &y).iter().map(|v| v * v).sum();
            prop_assert!(close(fit.rss(), rss), "rss {} vs {}", fit.rss(), rss);
        }

        // OLS coefficients.
        let ids: Vec<ColumnId> = (0..width).collect();
        let ols = ols_solve(&design, &ids);
        let want = normal_equations(&ids.iter().map(|&i| col(i)).collect::<Vec<_>>(), &y);
        for (a, b) in ols.coef.iter().zip(&want) {
            prop_assert!(close(*a, *b), "coef {a} vs {b}");
        }

        // Per-step rss and greedy choice of a forward path.
        let base: Vec<ColumnId> = design.ar_ids().collect();
        let cands: Vec<ColumnId> = design.exo_ids().collect();
        let k_max = cands.len().min(design.rows() - base.len() - 1);
        let path = greedy_path(&design, &base, &cands, Criterion::Fsr, k_max, 1.0).unwrap();
        let mut chosen: Vec<Vec<f64>> = base.iter().map(|&i| col(i)).collect();
        for step in &path.steps {
            let best = cands
                .iter()
                .filter(|c| !path.steps.iter().take_while(|s| s.column != step.column).any(|s| s.column == **c))
                .map(|&c| dense_score(Criterion::Fsr, design.n(), &chosen, &y, &col(c)))
                .fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(close(step.score, best), "step score {} vs best {}", step.score, best);
            chosen.push(col(step.column));
            let rss: f64 = dense_residual(&chosen, &y).iter().map(|v| v * v).sum();
            prop_assert!(close(step.rss, rss), "path rss {} vs {}", step.rss, rss);
        }
        Ok(())
    })
}

fn panel(n: usize, p: usize) -> impl Strategy<Value = (Vec<f64>, Vec<Vec<f64>>)> {
    (prop::collection::vec(-2.0f64..2.0, n), prop::collection::vec(prop::collection::vec(-2.0f64..2.0, n), p)).prop_map(
        |(e, x)| {
            // Random walk plus a visible signal from the first two series.
            let mut y = vec![0.0; e.len()];
            for t in 2..y.len() {
                y[t] = y[t - 1] + 1.5 * x[0][t - 1] - 1.2 * x[1][t - 2] + 0.3 * e[t];
            }
            (y, x)
        },
    )
}

/// The forward path is unchanged when `y` and each series are rescaled.
pub fn scale_invariance(cases: u32) -> Result<(), String> {
    run(cases, (panel(80, 6), 0.01f64..100.0, prop::collection::vec(0.01f64..100.0, 6)), |((y, x), a, b)| {
        let config = FhtdConfig::<f64> { q: Some(2), max_lag: Some(3), k_max: 10, ..Default::default() };
        let d1 = Dataset::observed(y.clone(), x.clone(), 3);
        let xs: Vec<Vec<f64>> = x.iter().zip(&b).map(|(c, s)| c.iter().map(|v| v * s).collect()).collect();
        let d2 = Dataset::observed(y.iter().map(|v| v * a).collect(), xs, 3);
        let p1 = fsr_path(&config.design(&d1).unwrap(), &config).unwrap();
        let p2 = fsr_path(&config.design(&d2).unwrap(), &config).unwrap();
        let r1: Vec<_> = p1.steps.iter().map(|s| s.regressor).collect();
        let r2: Vec<_> = p2.steps.iter().map(|s| s.regressor).collect();
        prop_assert_eq!(r1, r2);
        for (s1, s2) in p1.steps.iter().zip(&p2.steps) {
            prop_assert!((s2.score / (s1.score * a) - 1.0).abs() < 1e-6);
        }
        Ok(())
    })
}

/// `(I−P)` is idempotent, orthogonal to the active columns, and splits norms.
pub fn projection_identities(cases: u32) -> Result<(), String> {
    run(
        cases,
        (panel(60, 4), prop::collection::btree_set(0usize..14, 1..8), prop::collection::vec(-5.0f64..5.0, 57)),
        |((y, x), picks, v)| {
            let data = Dataset::observed(y, x, 3);
            let design = LagDesign::new(&data, 2, 3).unwrap();
            let ids: Vec<ColumnId> = picks.into_iter().filter(|&i| i < design.width()).collect();
            let fit = ActiveFit::new(&design, &ids).unwrap();

            let mut once = v.clone();
            fit.residualize(&mut once);
            let mut twice = once.clone();
            fit.residualize(&mut twice);
            let scale = dot(&v, &v).sqrt().max(1.0);
            for (a, b) in once.iter().zip(&twice) {
                prop_assert!((a - b).abs() < 1e-10 * scale);
            }
            for &id in &ids {
                let c = design.column(id);
                prop_assert!(dot(c, &once).abs() < 1e-8 * dot(c, c).sqrt() * scale);
            }
            // ‖v‖² = ‖Pv‖² + ‖(I−P)v‖².
            let proj: Vec<f64> = v.iter().zip(&once).map(|(a, b)| a - b).collect();
            let lhs = dot(&v, &v);
            prop_assert!((lhs - dot(&proj, &proj) - dot(&once, &once)).abs() < 1e-9 * lhs.max(1.0));
            let y = design.target();
            let fitted: Vec<f64> = y.iter().zip(fit.residual()).map(|(a, b)| a - b).collect();
            let yy = dot(y, y);
            prop_assert!((yy - dot(&fitted, &fitted) - fit.rss()).abs() < 1e-9 * yy.max(1.0));
            Ok(())
        },
    )
}

/// A larger threshold constant keeps a subset of the AR lags.
pub fn ddt_monotone(cases: u32) -> Result<(), String> {
    run(
        cases,
        (panel(120, 5), prop::collection::btree_set(0usize..15, 0..4), 0.01f64..3.0, 0.0f64..3.0),
        |((y, x), extra, d1, step)| {
            let data = Dataset::observed(y, x, 3);
            let design = LagDesign::new(&data, 6, 3).unwrap();
            let j: Vec<ColumnId> = extra.into_iter().map(|k| design.exo_ids().start + k).collect();
            let lo = ddt(&design, &j, &FhtdConfig { d: d1, ..Default::default() });
            let hi = ddt(&design, &j, &FhtdConfig { d: d1 + step, ..Default::default() });
            prop_assert!(hi.threshold >= lo.threshold);
            prop_assert!(hi.q_hat.is_subset(&lo.q_hat));
            Ok(())
        },
    )
}

/// Tally merging is associative and independent of replication order.
pub fn tally_merge(cases: u32) -> Result<(), String> {
    run(
        cases,
        (
            prop::collection::vec(
                (prop::collection::btree_set(1usize..6, 0..5), prop::collection::btree_set(1usize..8, 0..6)),
                1..30,
            ),
            any::<prop::sample::Index>(),
        ),
        |(outcomes, split)| {
            let true_q: BTreeSet<usize> = [1, 3].into();
            let true_j: BTreeSet<ExoIndex> = [ExoIndex::new(1, 1), ExoIndex::new(2, 2)].into();
            let one = |q: &BTreeSet<usize>, j: &BTreeSet<usize>| {
                let j: BTreeSet<ExoIndex> = j.iter().map(|&s| ExoIndex::new(s, 1 + s % 2)).collect();
                let mut t = SelectionTally::default();
                t.tally(&true_q, &true_j, q, &j);
                t
            };
            let singles: Vec<SelectionTally> = outcomes.iter().map(|(q, j)| one(q, j)).collect();
            let forward = singles.iter().fold(SelectionTally::default(), |acc, t| acc.merge(t));
            let backward = singles.iter().rev().fold(SelectionTally::default(), |acc, t| acc.merge(t));
            prop_assert_eq!(forward, backward);
            let k = split.index(singles.len());
            let left = singles[..k].iter().fold(SelectionTally::default(), |acc, t| acc.merge(t));
            let right = singles[k..].iter().fold(SelectionTally::default(), |acc, t| acc.merge(t));
            prop_assert_eq!(left.merge(&right), forward);
            prop_assert!(forward.e_count <= forward.ss_count && forward.ss_count <= forward.reps);
            prop_assert_eq!(forward.reps, singles.len() as u64);
            Ok(())
        },
    )
}

/// Every converged LASSO fit on the path satisfies the optimality conditions to 10·tol.
pub fn lasso_kkt(cases: u32) -> Result<(), String> {
    run(cases, (0u64..10_000, any::<bool>(), any::<bool>()), |(seed, adaptive, intercept)| {
        let spec = builtin_spec(BuiltinSpec::Ex41, SizeTier::new(200, 100, 4)).unwrap();
        let data = simulate(&spec, seed).unwrap();
        let config = FhtdConfig::<f64>::default();
        let design = config.design(&data).unwrap();
        let cols: Vec<&[f64]> = (0..design.width()).map(|i| design.column(i)).collect();
        let lc = LassoConfig { intercept, n_lambda: 40, ..Default::default() };
        let penalized: Vec<bool> = (0..cols.len()).map(|i| i >= design.q()).collect();
        let fits = if adaptive {
            match adaptive_lasso(&cols, design.target(), &penalized, &lc) {
                Ok(a) => vec![a.stage1, a.stage2],
                Err(_) => vec![],
            }
        } else {
            vec![lasso_path(&cols, design.target(), &vec![true; cols.len()], &lc).unwrap()]
        };
        for fit in &fits {
            prop_assert!(fit.all_converged());
            for k in 0..fit.lambdas.len() {
                let v = kkt_violation(&cols, design.target(), &lc, fit, k);
                prop_assert!(v <= 10.0 * lc.tol, "λ index {k}: KKT violation {v}");
            }
        }
        Ok(())
    })
}

/// Table CSV output does not depend on the worker count.
pub fn thread_determinism(cases: u32) -> Result<(), String> {
    run(cases, any::<u64>(), |seed| {
        let run = |threads: usize| {
            let cfg = ExperimentConfig {
                reps: 4,
                seed,
                threads: Some(threads),
                tiers: vec![SizeTier::new(200, 100, 4)],
                methods: vec![Method::Fhtd, Method::Lasso, Method::ArOga3],
                ..ExperimentConfig::new(ExperimentKind::Table1)
            };
            emit_tables(&run_experiment(&cfg).unwrap(), OutputFormat::Csv)
        };
        let one = run(1);
        prop_assert_eq!(&one, &run(2));
        prop_assert_eq!(&one, &run(5));
        Ok(())
    })
}
