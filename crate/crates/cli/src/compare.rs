// SPDX-License-Identifier: Apache-2.0

//! Run several configurations on one problem and merge their metrics.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use ndarray::Array1;
use ppg_core::ResidualReport;
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::problem_file::{load, LoadedProblem};
use crate::solve::solve;

pub const MERGED_HEADER: &str = "run,algo,k,epoch,residual_norm,residual_norm_sd,objective,objective_sd,dist_to_ref,dist_to_ref_sd,seeds";

/// Budget multiplier of the pre-pass that defines `x*`.
pub const REFERENCE_FACTOR: usize = 10;

/// Mean and standard deviation over seeds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stat {
    pub mean: f64,
    pub sd: f64,
}

impl Stat {
    fn of(values: &[f64]) -> Option<Stat> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = if values.len() > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Some(Stat { mean, sd: var.sqrt() })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MergedRow {
    pub k: usize,
    pub epoch: f64,
    pub residual_norm: Stat,
    pub objective: Option<Stat>,
    pub dist_to_ref: Option<Stat>,
    pub seeds: usize,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub algo: String,
    pub rows: Vec<MergedRow>,
}

pub struct Comparison {
    pub x_star: Array1<f64>,
    pub series: Vec<Series>,
}

fn same_problem(configs: &[RunConfig]) -> Result<()> {
    let canon = |c: &RunConfig| {
        c.problem_file
            .canonicalize()
            .with_context(|| format!("cannot open problem file {}", c.problem_file.display()))
    };
    let first = canon(&configs[0])?;
    for c in &configs[1..] {
        if canon(c)? != first {
            bail!(
                "configs use different problem files: {} and {}",
                configs[0].problem_file.display(),
                c.problem_file.display()
            );
        }
    }
    Ok(())
}

/// `x*` from a pre-pass of the longest-budget deterministic config (any config
/// if all are stochastic) at `REFERENCE_FACTOR` times its budget, `tol = 0`.
pub fn reference_point(configs: &[RunConfig], problem: &LoadedProblem) -> Result<Array1<f64>> {
    let pick = configs
        .iter()
        .filter(|c| !c.algo.is_stochastic())
        .max_by_key(|c| c.max_iters)
        .or_else(|| configs.iter().max_by_key(|c| c.max_iters))
        .expect("at least one config");
    let mut cfg = pick.clone();
    cfg.max_iters = pick.max_iters.saturating_mul(REFERENCE_FACTOR);
    cfg.tol = 0.0;
    cfg.metrics_out = None;
    log::info!("reference pre-pass: {} for {} iterations", cfg.algo, cfg.max_iters);
    Ok(solve(&cfg, problem, None)?.output.x_out)
}

fn aggregate(runs: &[Vec<ResidualReport>]) -> Vec<MergedRow> {
    let mut by_k: BTreeMap<usize, Vec<&ResidualReport>> = BTreeMap::new();
    for run in runs {
        for row in run {
            by_k.entry(row.k).or_default().push(row);
        }
    }
    by_k.into_iter()
        .map(|(k, rows)| {
            let pick = |f: fn(&ResidualReport) -> Option<f64>| -> Option<Stat> {
                let v: Option<Vec<f64>> = rows.iter().map(|r| f(r)).collect();
                v.and_then(|v| Stat::of(&v))
            };
            MergedRow {
                k,
                epoch: rows[0].epoch,
                residual_norm: pick(|r| Some(r.residual_norm)).expect("nonempty group"),
                objective: pick(|r| r.objective),
                dist_to_ref: pick(|r| r.dist_to_ref),
                seeds: rows.len(),
            }
        })
        .collect()
}

/// Run every config (each stochastic one over `seeds` consecutive seeds) with
/// distances measured against a common `x*`.
pub fn compare(configs: &[RunConfig], seeds: usize) -> Result<Comparison> {
    ensure!(configs.len() >= 2, "compare needs at least two configs, got {}", configs.len());
    ensure!(seeds >= 1, "seeds must be at least 1");
    same_problem(configs)?;
    let problem = load(&configs[0].problem_file)?;
    let x_star = reference_point(configs, &problem)?;

    let jobs: Vec<(usize, RunConfig)> = configs
        .iter()
        .enumerate()
        .flat_map(|(idx, c)| {
            let count = if c.algo.is_stochastic() { seeds } else { 1 };
            (0..count as u64).map(move |s| {
                let mut run = c.clone();
                run.seed = c.seed.wrapping_add(s);
                if s > 0 {
                    run.metrics_out = None;
                }
                (idx, run)
            })
        })
        .collect();
    let results: Vec<(usize, Vec<ResidualReport>)> = jobs
        .par_iter()
        .map(|(idx, cfg)| {
            let res = solve(cfg, &problem, Some(x_star.clone()))
                .with_context(|| format!("run {} ({}) failed", cfg.label(), cfg.algo))?;
            Ok((*idx, res.output.log.rows().to_vec()))
        })
        .collect::<Result<_>>()?;

    let series = configs
        .iter()
        .enumerate()
        .map(|(idx, c)| {
            let runs: Vec<Vec<ResidualReport>> =
                results.iter().filter(|(i, _)| *i == idx).map(|(_, r)| r.clone()).collect();
            Series {
                label: c.label(),
                algo: c.algo.name().to_string(),
                rows: aggregate(&runs),
            }
        })
        .collect();
    Ok(Comparison { x_star, series })
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.16e}")).unwrap_or_default()
}

/// Long-format CSV, one line per `(run, k)`.
pub fn write_merged(path: &Path, cmp: &Comparison) -> Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "{MERGED_HEADER}")?;
    for s in &cmp.series {
        for r in &s.rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{},{}",
                s.label,
                s.algo,
                r.k,
                cell(Some(r.epoch)),
                cell(Some(r.residual_norm.mean)),
                cell(Some(r.residual_norm.sd)),
                cell(r.objective.map(|o| o.mean)),
                cell(r.objective.map(|o| o.sd)),
                cell(r.dist_to_ref.map(|o| o.mean)),
                cell(r.dist_to_ref.map(|o| o.sd)),
                r.seeds
            )?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Algo;
    use crate::gen::{write_group_lasso, write_svm, GroupLassoParams, SvmParams};

    fn report(k: usize, res: f64) -> ResidualReport {
        ResidualReport {
            k,
            epoch: k as f64,
            residual_norm: res,
            objective: Some(res),
            dist_to_ref: None,
            wall_time_s: None,
        }
    }

    #[test]
    fn aggregation_mean_and_sd() {
        let rows = aggregate(&[vec![report(0, 1.0), report(1, 2.0)], vec![report(0, 3.0), report(1, 2.0)]]);
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].residual_norm.mean, 2.0);
        assert!((rows[0].residual_norm.sd - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(rows[1].residual_norm.sd, 0.0);
        assert_eq!(rows[0].seeds, 2);
        assert!(rows[0].dist_to_ref.is_none());
    }

    #[test]
    fn single_config_rejected() {
        let cfg = RunConfig::new("p.json", Algo::Ppg);
        assert!(compare(&[cfg], 1).is_err());
    }

    #[test]
    fn mismatched_problems_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p1 = write_group_lasso(&dir.path().join("a"), &GroupLassoParams::default()).unwrap();
        let p2 = write_group_lasso(&dir.path().join("b"), &GroupLassoParams::default()).unwrap();
        let err = compare(&[RunConfig::new(&p1, Algo::Ppg), RunConfig::new(&p2, Algo::Admm)], 1)
            .err()
            .unwrap();
        assert!(err.to_string().contains("different problem files"));
    }

    #[test]
    fn ppg_against_admm_gives_two_series() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_group_lasso(dir.path(), &GroupLassoParams::default()).unwrap();
        let mut a = RunConfig::new(&p, Algo::Ppg);
        let mut b = RunConfig::new(&p, Algo::Admm);
        a.max_iters = 200;
        b.max_iters = 200;
        let cmp = compare(&[a, b], 1).unwrap();
        assert_eq!(cmp.series.len(), 2);
        for s in &cmp.series {
            assert!(s.rows.iter().all(|r| r.dist_to_ref.is_some()));
        }
        let out = dir.path().join("merged.csv");
        write_merged(&out, &cmp).unwrap();
        let text = std::fs::read_to_string(out).unwrap();
        assert!(text.starts_with(MERGED_HEADER));
        assert!(text.contains("\nppg,ppg,0,") && text.contains("\nadmm,admm,0,"));
    }

    #[test]
    fn seeds_are_averaged() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_svm(
            dir.path(),
            &SvmParams {
                n: 64,
                d: 4,
                ..SvmParams::default()
            },
        )
        .unwrap();
        let mut a = RunConfig::new(&p, Algo::Sppg);
        a.alpha = Some(0.5);
        a.max_iters = 640;
        a.tol = 0.0;
        let mut b = RunConfig::new(&p, Algo::Ppg);
        b.alpha = Some(0.5);
        b.max_iters = 10;
        let cmp = compare(&[a, b], 10).unwrap();
        assert!(cmp.series[0].rows.iter().all(|r| r.seeds == 10));
        assert!(cmp.series[0].rows.iter().skip(1).any(|r| r.residual_norm.sd > 0.0));
        assert!(cmp.series[1].rows.iter().all(|r| r.seeds == 1));
    }
}
