// SPDX-License-Identifier: Apache-2.0

//! PPG and S-PPG drivers and the options they share.

mod ppg;
mod sppg;

pub use ppg::{ppg_run, ppg_step, Ppg, PpgStep};
pub use sppg::{sppg_run, sppg_step, sppg_step_at, Sampler, Sppg, SppgStep, DRIFT_TOLERANCE};

use std::time::Instant;

use ndarray::{Array1, Array2, ArrayView1, ArrayViewMut1, Axis};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::io::MetricsLog;
use crate::model::{ProblemSpec, SolverState};

/// Run configuration shared by the PPG-family solvers and the baselines.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub alpha: f64,
    pub max_iters: usize,
    /// Stop once `‖p(z)‖ / √(n·d) ≤ tol`.
    pub tol: f64,
    /// Accumulate ergodic averages of `x½` and the `x_i`.
    pub ergodic: bool,
    /// Record every this many iterations; `None` picks the solver default
    /// (1 for full-batch methods, `n` for stochastic ones).
    pub record_every: Option<usize>,
    pub threads: usize,
    /// Reference point for the `dist_to_ref` column.
    pub reference: Option<Array1<f64>>,
    /// Evaluate the objective surrogate at recorded iterations.
    pub record_objective: bool,
    pub record_wall_time: bool,
}

impl SolveOptions {
    pub fn new(alpha: f64) -> Self {
        SolveOptions {
            alpha,
            max_iters: 1000,
            tol: 0.0,
            ergodic: false,
            record_every: None,
            threads: 1,
            reference: None,
            record_objective: true,
            record_wall_time: false,
        }
    }

    pub fn max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn ergodic(mut self, on: bool) -> Self {
        self.ergodic = on;
        self
    }

    pub fn record_every(mut self, every: usize) -> Self {
        self.record_every = Some(every);
        self
    }

    pub fn threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }

    pub fn reference(mut self, x: Array1<f64>) -> Self {
        self.reference = Some(x);
        self
    }

    pub fn record_objective(mut self, on: bool) -> Self {
        self.record_objective = on;
        self
    }

    pub fn record_wall_time(mut self, on: bool) -> Self {
        self.record_wall_time = on;
        self
    }

    /// Check everything except the step-size bound.
    pub(crate) fn validate_basic(&self, problem: &ProblemSpec) -> Result<()> {
        crate::model::check_alpha(self.alpha)?;
        if self.record_every == Some(0) {
            return Err(Error::invalid("record_every must be at least 1"));
        }
        if self.threads == 0 {
            return Err(Error::invalid("threads must be at least 1"));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::invalid(format!("tolerance must be nonnegative, got {}", self.tol)));
        }
        if let Some(r) = &self.reference {
            if r.len() != problem.dim() {
                return Err(Error::Dimension {
                    what: "reference point",
                    expected: problem.dim(),
                    found: r.len(),
                });
            }
        }
        Ok(())
    }

    pub(crate) fn validate(&self, problem: &ProblemSpec) -> Result<()> {
        self.validate_basic(problem)?;
        check_step_size(self.alpha, problem.max_lipschitz())
    }
}

/// Enforce `α < 2/L` and warn outside the guaranteed range `(0, 3/(2L))`.
pub fn check_step_size(alpha: f64, lipschitz: f64) -> Result<()> {
    crate::model::check_alpha(alpha)?;
    if lipschitz > 0.0 {
        if alpha >= 2.0 / lipschitz {
            return Err(Error::invalid(format!(
                "step size {alpha} violates the bound alpha < 2/L = {}",
                2.0 / lipschitz
            )));
        }
        if alpha >= 1.5 / lipschitz {
            log::warn!(
                "step size {alpha} is outside the guaranteed range (0, 3/(2L)) = (0, {})",
                1.5 / lipschitz
            );
        }
    }
    Ok(())
}

/// `1/L` when the smooth terms have a known Lipschitz bound, else `1.0`.
pub fn default_alpha(problem: &ProblemSpec) -> f64 {
    let l = problem.max_lipschitz();
    if l > 0.0 {
        1.0 / l
    } else {
        log::warn!("no Lipschitz bound available; defaulting to alpha = 1.0");
        1.0
    }
}

/// Running sums for the ergodic iterates.
#[derive(Debug, Clone, PartialEq)]
pub struct ErgodicState {
    sum_x_half: Array1<f64>,
    sum_x: Array2<f64>,
    count: usize,
}

impl ErgodicState {
    pub fn new(n: usize, d: usize) -> Self {
        ErgodicState {
            sum_x_half: Array1::zeros(d),
            sum_x: Array2::zeros((n, d)),
            count: 0,
        }
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Average of the `x½` iterates accumulated so far.
    pub fn x_half(&self) -> Option<Array1<f64>> {
        (self.count > 0).then(|| &self.sum_x_half / self.count as f64)
    }

    /// Averages of the per-term `x_i` iterates, one row per term.
    pub fn x_rows(&self) -> Option<Array2<f64>> {
        (self.count > 0).then(|| &self.sum_x / self.count as f64)
    }
}

/// Everything a solver run hands back.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub x_out: Array1<f64>,
    pub log: MetricsLog,
    pub ergodic: Option<ErgodicState>,
    pub converged: bool,
    pub iterations: usize,
    /// Final `z` block (`None` for methods that do not keep one).
    pub final_state: Option<SolverState>,
    /// Epochs at which the cached `z̄` had drifted past tolerance before
    /// being re-synchronized (S-PPG only).
    pub drift_resyncs: usize,
}

impl RunOutput {
    pub fn ergodic_out(&self) -> Option<Array1<f64>> {
        self.ergodic.as_ref().and_then(ErgodicState::x_half)
    }
}

/// Thread pool wrapper. With one thread everything runs inline.
pub(crate) struct Executor {
    pool: Option<rayon::ThreadPool>,
}

impl Executor {
    pub(crate) fn new(threads: usize) -> Result<Self> {
        if threads <= 1 {
            return Ok(Executor { pool: None });
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::invalid(format!("cannot build thread pool: {e}")))?;
        Ok(Executor { pool: Some(pool) })
    }

    pub(crate) fn parallel(&self) -> bool {
        self.pool.is_some()
    }

    pub(crate) fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        match &self.pool {
            Some(pool) => pool.install(f),
            None => f(),
        }
    }
}

/// Apply `f` to each row of `z` (and the matching row of `extra`), returning
/// results in row order regardless of scheduling.
pub(crate) fn for_each_row<R, F>(
    z: &mut Array2<f64>,
    extra: Option<&mut Array2<f64>>,
    parallel: bool,
    f: F,
) -> Vec<R>
where
    R: Send,
    F: Fn(usize, ArrayViewMut1<f64>, Option<ArrayViewMut1<f64>>) -> R + Sync + Send,
{
    match (extra, parallel) {
        (None, false) => z
            .axis_iter_mut(Axis(0))
            .enumerate()
            .map(|(i, row)| f(i, row, None))
            .collect(),
        (None, true) => z
            .axis_iter_mut(Axis(0))
            .into_par_iter()
            .enumerate()
            .map(|(i, row)| f(i, row, None))
            .collect(),
        (Some(e), false) => z
            .axis_iter_mut(Axis(0))
            .zip(e.axis_iter_mut(Axis(0)))
            .enumerate()
            .map(|(i, (row, er))| f(i, row, Some(er)))
            .collect(),
        (Some(e), true) => z
            .axis_iter_mut(Axis(0))
            .into_par_iter()
            .zip(e.axis_iter_mut(Axis(0)).into_par_iter())
            .enumerate()
            .map(|(i, (row, er))| f(i, row, Some(er)))
            .collect(),
    }
}

/// Per-run bookkeeping for the `dist_to_ref` and wall-time columns.
pub(crate) struct Recorder {
    start: Instant,
    wall: bool,
    reference: Option<Array1<f64>>,
}

impl Recorder {
    pub(crate) fn new(opts: &SolveOptions) -> Self {
        Recorder {
            start: Instant::now(),
            wall: opts.record_wall_time,
            reference: opts.reference.clone(),
        }
    }

    pub(crate) fn dist(&self, x: ArrayView1<f64>) -> Option<f64> {
        self.reference
            .as_ref()
            .map(|r| crate::model::sq_dist(x, r.view()))
    }

    pub(crate) fn wall_time(&self) -> Option<f64> {
        self.wall.then(|| self.start.elapsed().as_secs_f64())
    }
}

/// `‖p‖ / √(n·d)`, the quantity compared against `tol`.
pub(crate) fn normalized(residual: f64, problem: &ProblemSpec) -> f64 {
    residual / ((problem.n() * problem.dim()) as f64).sqrt()
}

pub(crate) fn finite(v: Option<f64>) -> Option<f64> {
    v.filter(|x| x.is_finite())
}
