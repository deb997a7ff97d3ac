// SPDX-License-Identifier: Apache-2.0

use ndarray::{Array1, Array2};

use super::require_no_g;
use crate::error::Result;
use crate::io::{MetricsLog, MetricsMeta};
use crate::model::{mean_rows, ProblemSpec, ResidualReport};
use crate::solver::{for_each_row, Executor, Recorder, RunOutput, SolveOptions};

/// `x ← prox_{αr}(x − (α/n) Σ ∇f_i(x))`, started at `prox_{αr}(0)`.
pub struct ProxGradient<'p> {
    problem: &'p ProblemSpec,
    x: Array1<f64>,
    alpha: f64,
    k: usize,
    exec: Executor,
    grads: Array2<f64>,
}

impl<'p> ProxGradient<'p> {
    pub fn new(problem: &'p ProblemSpec, alpha: f64, threads: usize) -> Result<Self> {
        require_no_g(problem, "prox-grad")?;
        crate::model::check_alpha(alpha)?;
        let x = problem.prox_r(Array1::zeros(problem.dim()).view(), alpha)?;
        Ok(ProxGradient {
            problem,
            x,
            alpha,
            k: 0,
            exec: Executor::new(threads)?,
            grads: Array2::zeros((problem.n(), problem.dim())),
        })
    }

    pub fn x(&self) -> &Array1<f64> {
        &self.x
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// One step; returns the gradient-mapping norm `‖x_k − x_{k+1}‖ / α`.
    pub fn step(&mut self) -> Result<f64> {
        let ProxGradient {
            problem,
            x,
            alpha,
            exec,
            grads,
            ..
        } = self;
        let parallel = exec.parallel();
        let gbar = exec.install(|| {
            for_each_row(grads, None, parallel, |i, mut row, _| {
                row.assign(&problem.f(i).gradient(x.view()));
            });
            mean_rows(grads.view(), problem.reduction_chunks(), parallel)
        });
        let mut v = x.clone();
        v.scaled_add(-*alpha, &gbar);
        let next = problem.prox_r(v.view(), *alpha)?;
        let moved = crate::model::sq_dist(next.view(), x.view()).sqrt() / *alpha;
        *x = next;
        self.k += 1;
        Ok(moved)
    }
}

/// Run proximal gradient; `g_i` must all be zero.
pub fn proximal_gradient_run(problem: &ProblemSpec, opts: &SolveOptions) -> Result<RunOutput> {
    require_no_g(problem, "prox-grad")?;
    opts.validate(problem)?;
    let every = opts.record_every.unwrap_or(1);
    let mut pg = ProxGradient::new(problem, opts.alpha, opts.threads)?;
    let mut log = MetricsLog::new(MetricsMeta::new("prox-grad", opts.alpha, None));
    let rec = Recorder::new(opts);
    let scale = (problem.dim() as f64).sqrt();
    let mut converged = false;
    let mut iterations = 0;
    for k in 0..opts.max_iters {
        let x_k = pg.x().clone();
        let res = pg.step()?;
        iterations = k + 1;
        let done = res / scale <= opts.tol;
        if k % every == 0 || k + 1 == opts.max_iters || done {
            let objective = if opts.record_objective {
                crate::solver::finite(problem.objective(x_k.view()))
            } else {
                None
            };
            log.push(ResidualReport {
                k,
                epoch: k as f64,
                residual_norm: res,
                objective,
                dist_to_ref: rec.dist(x_k.view()),
                wall_time_s: rec.wall_time(),
            })?;
        }
        if done {
            converged = true;
            break;
        }
    }
    Ok(RunOutput {
        x_out: pg.x,
        log,
        ergodic: None,
        converged,
        iterations,
        final_state: None,
        drift_resyncs: 0,
    })
}
