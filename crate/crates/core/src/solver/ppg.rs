// SPDX-License-Identifier: Apache-2.0

use ndarray::{Array1, Array2};

use super::{finite, for_each_row, normalized, ErgodicState, Executor, Recorder, RunOutput, SolveOptions};
use crate::error::Result;
use crate::io::{MetricsLog, MetricsMeta};
use crate::model::{mean_rows, ProblemSpec, ResidualReport, SolverState};

/// What one full PPG iteration observed.
#[derive(Debug, Clone)]
pub struct PpgStep {
    /// `‖p(z^k)‖`, measured at the state the step started from.
    pub residual_norm: f64,
    pub x_half: Array1<f64>,
    /// Objective surrogate at `(x½, x'_1..x'_n)` when requested and available.
    pub objective: Option<f64>,
}

struct RowOut {
    sq: f64,
    value: Option<f64>,
}

fn step_impl(
    state: &mut SolverState,
    problem: &ProblemSpec,
    parallel: bool,
    ergodic: Option<&mut ErgodicState>,
    want_objective: bool,
) -> Result<PpgStep> {
    let alpha = state.alpha();
    let x_half = problem.prox_r(state.zbar(), alpha)?;
    let chunks = problem.reduction_chunks();

    let (z, zbar) = state.parts_mut();
    let (sum_x, ergodic) = match ergodic {
        Some(e) => {
            let ErgodicState { sum_x_half, sum_x, count } = e;
            (Some(sum_x), Some((sum_x_half, count)))
        }
        None => (None, None),
    };

    let rows = for_each_row(z, sum_x, parallel, |i, mut z_row, acc| -> Result<RowOut> {
        let x = problem.x_prime(i, x_half.view(), z_row.view(), alpha)?;
        let delta = &x - &x_half;
        let sq = delta.dot(&delta);
        z_row += &delta;
        if let Some(mut acc) = acc {
            acc += &x;
        }
        let value = if want_objective {
            problem
                .g(i)
                .value(x.view())
                .map(|g| g + problem.f(i).value(x_half.view()))
        } else {
            None
        };
        Ok(RowOut { sq, value })
    });

    let mut sq = 0.0;
    let mut term_sum = Some(0.0);
    for row in rows {
        let row = row?;
        sq += row.sq;
        term_sum = term_sum.zip(row.value).map(|(a, b)| a + b);
    }
    *zbar = mean_rows(z.view(), chunks, parallel);

    if let Some((sum_x_half, count)) = ergodic {
        *sum_x_half += &x_half;
        *count += 1;
    }

    let objective = if want_objective {
        let n = problem.n() as f64;
        finite(
            problem
                .r()
                .value(x_half.view())
                .zip(term_sum)
                .map(|(r, s)| r + s / n),
        )
    } else {
        None
    };

    state.advance();
    Ok(PpgStep {
        residual_norm: sq.sqrt() / alpha,
        x_half,
        objective,
    })
}

/// One sequential PPG iteration, updating `state` in place.
pub fn ppg_step(state: &mut SolverState, problem: &ProblemSpec) -> Result<PpgStep> {
    step_impl(state, problem, false, None, true)
}

/// Stateful PPG driver owning its iterate, thread pool and ergodic sums.
pub struct Ppg<'p> {
    problem: &'p ProblemSpec,
    state: SolverState,
    ergodic: Option<ErgodicState>,
    exec: Executor,
}

impl<'p> Ppg<'p> {
    pub fn new(problem: &'p ProblemSpec, alpha: f64, threads: usize) -> Result<Self> {
        Ok(Ppg {
            problem,
            state: SolverState::zeros(problem, alpha)?,
            ergodic: None,
            exec: Executor::new(threads)?,
        })
    }

    pub fn warm_start(mut self, z: Array2<f64>) -> Result<Self> {
        self.state = SolverState::from_rows(z, self.state.alpha(), self.problem)?;
        Ok(self)
    }

    pub fn with_ergodic(mut self) -> Self {
        self.ergodic = Some(ErgodicState::new(self.problem.n(), self.problem.dim()));
        self
    }

    pub fn step(&mut self, want_objective: bool) -> Result<PpgStep> {
        let Ppg {
            problem,
            state,
            ergodic,
            exec,
        } = self;
        let parallel = exec.parallel();
        exec.install(|| step_impl(state, problem, parallel, ergodic.as_mut(), want_objective))
    }

    pub fn state(&self) -> &SolverState {
        &self.state
    }

    pub fn ergodic(&self) -> Option<&ErgodicState> {
        self.ergodic.as_ref()
    }

    /// `prox_{αr}(z̄)` at the current state.
    pub fn x_out(&self) -> Result<Array1<f64>> {
        self.problem.prox_r(self.state.zbar(), self.state.alpha())
    }

    pub fn into_parts(self) -> (SolverState, Option<ErgodicState>) {
        (self.state, self.ergodic)
    }
}

/// Run PPG from `z = 0` (or `warm_start`) until the normalized residual falls
/// below `opts.tol` or `opts.max_iters` iterations have run.
pub fn ppg_run(problem: &ProblemSpec, opts: &SolveOptions, warm_start: Option<Array2<f64>>) -> Result<RunOutput> {
    opts.validate(problem)?;
    let every = opts.record_every.unwrap_or(1);
    let mut solver = Ppg::new(problem, opts.alpha, opts.threads)?;
    if let Some(z) = warm_start {
        solver = solver.warm_start(z)?;
    }
    if opts.ergodic {
        solver = solver.with_ergodic();
    }
    let mut log = MetricsLog::new(MetricsMeta::new("ppg", opts.alpha, None));
    let rec = Recorder::new(opts);
    let mut converged = false;
    let mut iterations = 0;
    for k in 0..opts.max_iters {
        let last = k + 1 == opts.max_iters;
        let on_schedule = k % every == 0;
        let step = solver.step(opts.record_objective)?;
        iterations = k + 1;
        let done = normalized(step.residual_norm, problem) <= opts.tol;
        if on_schedule || last || done {
            log.push(ResidualReport {
                k,
                epoch: k as f64,
                residual_norm: step.residual_norm,
                objective: step.objective,
                dist_to_ref: rec.dist(step.x_half.view()),
                wall_time_s: rec.wall_time(),
            })?;
        }
        if done {
            converged = true;
            break;
        }
    }
    let x_out = solver.x_out()?;
    let (state, ergodic) = solver.into_parts();
    Ok(RunOutput {
        x_out,
        log,
        ergodic,
        converged,
        iterations,
        final_state: Some(state),
        drift_resyncs: 0,
    })
}
