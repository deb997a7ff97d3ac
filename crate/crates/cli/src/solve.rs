// SPDX-License-Identifier: Apache-2.0

use anyhow::Result;
use ndarray::Array1;
use ppg_core::baselines::{
    consensus_admm_run, finito_run, proximal_gradient_run, stochastic_prox_iteration_run, StepSchedule,
};
use ppg_core::io::write_metrics;
use ppg_core::solver::default_alpha;
use ppg_core::{ppg_run, sppg_run, RunOutput, SolveOptions};

use crate::config::{Algo, RunConfig};
use crate::problem_file::LoadedProblem;

/// Exit status when a run stops at `max_iters` without meeting `tol`.
pub const EXIT_NOT_CONVERGED: i32 = 2;

pub struct SolveResult {
    pub output: RunOutput,
    pub alpha: f64,
    /// Objective at the returned point.
    pub objective: Option<f64>,
}

impl SolveResult {
    pub fn converged(&self) -> bool {
        self.output.converged
    }

    /// Last recorded residual.
    pub fn residual(&self) -> Option<f64> {
        self.output.log.last().map(|r| r.residual_norm)
    }

    pub fn exit_code(&self) -> i32 {
        if self.converged() {
            0
        } else {
            EXIT_NOT_CONVERGED
        }
    }
}

/// Solver options described by `cfg`, with `alpha` already resolved.
pub fn options(cfg: &RunConfig, alpha: f64, reference: Option<Array1<f64>>) -> Result<SolveOptions> {
    let mut opts = SolveOptions::new(alpha)
        .max_iters(cfg.max_iters)
        .tol(cfg.tol)
        .ergodic(cfg.ergodic)
        .threads(cfg.resolved_threads()?)
        .record_wall_time(cfg.record_wall_time);
    if let Some(every) = cfg.record_every {
        opts = opts.record_every(every);
    }
    if let Some(x) = reference {
        opts = opts.reference(x);
    }
    Ok(opts)
}

/// Run the configured solver. Writes the metrics file when `metrics_out` is set.
pub fn solve(cfg: &RunConfig, problem: &LoadedProblem, reference: Option<Array1<f64>>) -> Result<SolveResult> {
    let terms = &problem.terms;
    let alpha = cfg.alpha.unwrap_or_else(|| default_alpha(terms));
    let opts = options(cfg, alpha, reference)?;
    let mut output = match cfg.algo {
        Algo::Ppg => ppg_run(terms, &opts, None)?,
        Algo::Sppg => sppg_run(terms, &opts, cfg.seed, None)?,
        Algo::ProxGrad => proximal_gradient_run(terms, &opts)?,
        Algo::Admm => consensus_admm_run(terms, &opts)?,
        Algo::Finito => finito_run(terms, &opts, cfg.seed)?,
        Algo::Spi => {
            let c = cfg.spi_c.or(cfg.alpha).unwrap_or(1.0);
            stochastic_prox_iteration_run(&problem.folded()?, &opts, StepSchedule::Diminishing { c }, cfg.seed)?
        }
    };
    output.log.meta_mut().problem = Some(problem.kind.to_string());
    if let Some(path) = &cfg.metrics_out {
        write_metrics(path, &output.log)?;
    }
    let objective = problem.objective(output.x_out.view());
    Ok(SolveResult {
        output,
        alpha,
        objective,
    })
}
