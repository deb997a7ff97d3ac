// SPDX-License-Identifier: Apache-2.0

use ndarray::{Array1, Array2, Axis};

use super::{require_no_g, require_no_r};
use crate::error::Result;
use crate::io::{MetricsLog, MetricsMeta};
use crate::model::{mean_rows, ProblemSpec, ResidualReport};
use crate::solver::{Recorder, RunOutput, Sampler, SolveOptions};

/// Finito with a constant step:
///
/// ```text
/// w = mean(z);  φ = w;  z_i ← φ − α∇f_i(φ)   for one uniform i
/// ```
///
/// The mean is cached and re-synchronized every `n` steps.
pub struct Finito<'p> {
    problem: &'p ProblemSpec,
    z: Array2<f64>,
    w: Array1<f64>,
    alpha: f64,
    sampler: Sampler,
    k: usize,
}

impl<'p> Finito<'p> {
    pub fn new(problem: &'p ProblemSpec, alpha: f64, seed: u64) -> Result<Self> {
        require_no_g(problem, "finito")?;
        require_no_r(problem, "finito")?;
        crate::model::check_alpha(alpha)?;
        Ok(Finito {
            problem,
            z: Array2::zeros((problem.n(), problem.dim())),
            w: Array1::zeros(problem.dim()),
            alpha,
            sampler: Sampler::new(seed, problem.n())?,
            k: 0,
        })
    }

    pub fn z(&self) -> &Array2<f64> {
        &self.z
    }

    pub fn w(&self) -> &Array1<f64> {
        &self.w
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Update term `i`.
    pub fn step_at(&mut self, i: usize) {
        let n = self.problem.n();
        let phi = self.w.clone();
        let mut zi = phi.clone();
        zi.scaled_add(-self.alpha, &self.problem.f(i).gradient(phi.view()));
        let delta = &zi - &self.z.row(i);
        self.z.row_mut(i).assign(&zi);
        self.w.scaled_add(1.0 / n as f64, &delta);
        self.k += 1;
        if self.k % n == 0 {
            self.w = mean_rows(self.z.view(), self.problem.reduction_chunks(), false);
        }
    }

    /// One step on a sampled index; returns the index.
    pub fn step(&mut self) -> usize {
        let i = self.sampler.next_index();
        self.step_at(i);
        i
    }

    /// `‖p(z)‖` with `p_i = (z_i − w + α∇f_i(w)) / α`, matching the S-PPG
    /// residual when `g = r = 0`.
    pub fn residual_norm(&self) -> f64 {
        let mut sq = 0.0;
        for (i, zi) in self.z.axis_iter(Axis(0)).enumerate() {
            let mut p = &zi - &self.w;
            p.scaled_add(self.alpha, &self.problem.f(i).gradient(self.w.view()));
            sq += p.dot(&p);
        }
        sq.sqrt() / self.alpha
    }
}

/// Run Finito for `opts.max_iters` steps.
pub fn finito_run(problem: &ProblemSpec, opts: &SolveOptions, seed: u64) -> Result<RunOutput> {
    let mut fin = Finito::new(problem, opts.alpha, seed)?;
    opts.validate(problem)?;
    let n = problem.n();
    let every = opts.record_every.unwrap_or(n);
    let mut log = MetricsLog::new(MetricsMeta::new("finito", opts.alpha, Some(seed)));
    let rec = Recorder::new(opts);
    let record = |fin: &Finito, log: &mut MetricsLog| -> Result<bool> {
        let res = fin.residual_norm();
        let objective = if opts.record_objective {
            crate::solver::finite(problem.objective(fin.w().view()))
        } else {
            None
        };
        log.push(ResidualReport {
            k: fin.k(),
            epoch: fin.k() as f64 / n as f64,
            residual_norm: res,
            objective,
            dist_to_ref: rec.dist(fin.w().view()),
            wall_time_s: rec.wall_time(),
        })?;
        Ok(crate::solver::normalized(res, problem) <= opts.tol)
    };
    let mut converged = false;
    for k in 0..opts.max_iters {
        if k % every == 0 && record(&fin, &mut log)? {
            converged = true;
            break;
        }
        fin.step();
    }
    if !converged && log.last().map(|r| r.k) != Some(fin.k()) {
        converged = record(&fin, &mut log)?;
    }
    Ok(RunOutput {
        iterations: fin.k(),
        x_out: fin.w,
        log,
        ergodic: None,
        converged,
        final_state: None,
        drift_resyncs: 0,
    })
}
