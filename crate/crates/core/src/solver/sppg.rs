// SPDX-License-Identifier: Apache-2.0

use ndarray::{Array1, Array2};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{finite, normalized, Recorder, RunOutput, SolveOptions};
use crate::error::{Error, Result};
use crate::io::{MetricsLog, MetricsMeta};
use crate::model::{residual_map, ProblemSpec, ResidualReport, SolverState};

/// Drift between the cached and recomputed `z̄` that counts as a resync event.
pub const DRIFT_TOLERANCE: f64 = 1e-9;

/// Uniform index stream over `0..n`.
///
/// ChaCha8 seeded with `seed_from_u64`; each index is the high word of
/// `next_u64() · n`, so the stream is fixed by `(seed, n)` on every platform.
#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
    n: usize,
}

impl Sampler {
    pub fn new(seed: u64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("cannot sample from zero terms"));
        }
        Ok(Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            n,
        })
    }

    pub fn next_index(&mut self) -> usize {
        ((self.rng.next_u64() as u128 * self.n as u128) >> 64) as usize
    }
}

/// What one S-PPG step did.
#[derive(Debug, Clone)]
pub struct SppgStep {
    pub index: usize,
    pub x_half: Array1<f64>,
}

/// Update term `i` only: `z_i += x_i − x½`, `z̄ += (x_i − x½)/n`.
pub fn sppg_step_at(state: &mut SolverState, problem: &ProblemSpec, i: usize) -> Result<SppgStep> {
    if i >= problem.n() {
        return Err(Error::invalid(format!("term index {i} out of range for n = {}", problem.n())));
    }
    let alpha = state.alpha();
    let x_half = problem.prox_r(state.zbar(), alpha)?;
    let (z, zbar) = state.parts_mut();
    let x = problem.x_prime(i, x_half.view(), z.row(i), alpha)?;
    let delta = &x - &x_half;
    let mut row = z.row_mut(i);
    row += &delta;
    zbar.scaled_add(1.0 / problem.n() as f64, &delta);
    state.advance();
    Ok(SppgStep { index: i, x_half })
}

/// One S-PPG step with the index drawn from `sampler`.
pub fn sppg_step(state: &mut SolverState, problem: &ProblemSpec, sampler: &mut Sampler) -> Result<SppgStep> {
    let i = sampler.next_index();
    sppg_step_at(state, problem, i)
}

/// Stateful S-PPG driver.
pub struct Sppg<'p> {
    problem: &'p ProblemSpec,
    state: SolverState,
    sampler: Sampler,
    drift_resyncs: usize,
}

impl<'p> Sppg<'p> {
    pub fn new(problem: &'p ProblemSpec, alpha: f64, seed: u64) -> Result<Self> {
        Ok(Sppg {
            problem,
            state: SolverState::zeros(problem, alpha)?,
            sampler: Sampler::new(seed, problem.n())?,
            drift_resyncs: 0,
        })
    }

    pub fn warm_start(mut self, z: Array2<f64>) -> Result<Self> {
        self.state = SolverState::from_rows(z, self.state.alpha(), self.problem)?;
        Ok(self)
    }

    /// One step; re-synchronizes `z̄` after every `n` steps.
    pub fn step(&mut self) -> Result<SppgStep> {
        let out = sppg_step(&mut self.state, self.problem, &mut self.sampler)?;
        if self.state.k() % self.problem.n() == 0 {
            self.resync();
        }
        Ok(out)
    }

    /// Recompute `z̄` from the rows, returning the drift.
    pub fn resync(&mut self) -> f64 {
        let drift = self.state.resync(self.problem.reduction_chunks());
        let scale = 1.0 + self.state.zbar().dot(&self.state.zbar()).sqrt();
        if drift > DRIFT_TOLERANCE * scale {
            log::debug!("z-bar drift {drift:.3e} at k = {}", self.state.k());
            self.drift_resyncs += 1;
        }
        drift
    }

    pub fn state(&self) -> &SolverState {
        &self.state
    }

    pub fn drift_resyncs(&self) -> usize {
        self.drift_resyncs
    }

    pub fn x_out(&self) -> Result<Array1<f64>> {
        self.problem.prox_r(self.state.zbar(), self.state.alpha())
    }
}

/// Run S-PPG for `opts.max_iters` single-term steps (`n` steps per epoch).
///
/// The residual `‖p(z^k)‖` costs a full pass, so it is evaluated only every
/// `record_every` steps (default `n`) and the stopping test runs at the same
/// points.
pub fn sppg_run(
    problem: &ProblemSpec,
    opts: &SolveOptions,
    seed: u64,
    warm_start: Option<Array2<f64>>,
) -> Result<RunOutput> {
    opts.validate(problem)?;
    let n = problem.n();
    let every = opts.record_every.unwrap_or(n);
    let mut solver = Sppg::new(problem, opts.alpha, seed)?;
    if let Some(z) = warm_start {
        solver = solver.warm_start(z)?;
    }
    if opts.ergodic {
        log::warn!("ergodic averaging is not tracked by S-PPG; ignoring");
    }
    let mut log = MetricsLog::new(MetricsMeta::new("sppg", opts.alpha, Some(seed)));
    let rec = Recorder::new(opts);
    let mut converged = false;

    let record = |solver: &Sppg, log: &mut MetricsLog| -> Result<bool> {
        let res = residual_map(solver.state(), problem)?;
        let norm = res.norm();
        let objective = if opts.record_objective {
            finite(problem.split_objective(res.x_half.view(), res.x_primes.view()))
        } else {
            None
        };
        let k = solver.state().k();
        log.push(ResidualReport {
            k,
            epoch: k as f64 / n as f64,
            residual_norm: norm,
            objective,
            dist_to_ref: rec.dist(res.x_half.view()),
            wall_time_s: rec.wall_time(),
        })?;
        Ok(normalized(norm, problem) <= opts.tol)
    };

    for k in 0..opts.max_iters {
        if k % every == 0 && record(&solver, &mut log)? {
            converged = true;
            break;
        }
        solver.step()?;
    }
    if !converged {
        let k = solver.state().k();
        if log.last().map(|r| r.k) != Some(k) {
            converged = record(&solver, &mut log)?;
        }
    }
    Ok(RunOutput {
        x_out: solver.x_out()?,
        log,
        ergodic: None,
        converged,
        iterations: solver.state().k(),
        drift_resyncs: solver.drift_resyncs,
        final_state: Some(solver.state),
    })
}
