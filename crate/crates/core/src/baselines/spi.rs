// SPDX-License-Identifier: Apache-2.0

use ndarray::Array1;

use super::{require, require_no_f, require_no_r};
use crate::error::{Error, Result};
use crate::io::{MetricsLog, MetricsMeta};
use crate::model::{check_output, ProblemSpec, ResidualReport};
use crate::solver::{Recorder, RunOutput, Sampler, SolveOptions};
use crate::Term;

/// Step-size rule for stochastic methods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSchedule {
    Constant(f64),
    /// `α_k = c / k` for `k = 1, 2, …`.
    Diminishing { c: f64 },
}

impl StepSchedule {
    /// Step used by iteration `k ≥ 1`.
    pub fn alpha(&self, k: usize) -> f64 {
        match *self {
            StepSchedule::Constant(a) => a,
            StepSchedule::Diminishing { c } => c / k.max(1) as f64,
        }
    }

    fn validate(&self) -> Result<()> {
        let v = match *self {
            StepSchedule::Constant(a) => a,
            StepSchedule::Diminishing { c } => c,
        };
        crate::model::check_alpha(v)
    }
}

/// `x ← prox_{α_k g_{i(k)}}(x)` with `i(k)` uniform and `α_k = c/k`.
pub struct StochasticProxIteration<'p> {
    problem: &'p ProblemSpec,
    x: Array1<f64>,
    schedule: StepSchedule,
    sampler: Sampler,
    k: usize,
}

impl<'p> StochasticProxIteration<'p> {
    pub fn new(problem: &'p ProblemSpec, schedule: StepSchedule, seed: u64) -> Result<Self> {
        require_no_f(problem, "spi")?;
        require_no_r(problem, "spi")?;
        require(
            matches!(schedule, StepSchedule::Diminishing { .. }),
            "spi",
            "stochastic proximal iteration needs a diminishing step size c/k",
        )?;
        schedule.validate()?;
        Ok(StochasticProxIteration {
            problem,
            x: Array1::zeros(problem.dim()),
            schedule,
            sampler: Sampler::new(seed, problem.n())?,
            k: 0,
        })
    }

    pub fn x(&self) -> &Array1<f64> {
        &self.x
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// One step; returns the sampled index.
    pub fn step(&mut self) -> Result<usize> {
        self.k += 1;
        let alpha = self.schedule.alpha(self.k);
        let i = self.sampler.next_index();
        let next = self.problem.g(i).prox(self.x.view(), alpha)?;
        check_output(&next, self.problem.dim(), Term::G, i)?;
        self.x = next;
        Ok(i)
    }
}

/// Run SPI for `opts.max_iters` single-term steps. `opts.alpha` is unused;
/// the step comes from `schedule`.
///
/// The residual column holds `‖x − x_prev‖`, the movement since the previous
/// recorded row.
pub fn stochastic_prox_iteration_run(
    problem: &ProblemSpec,
    opts: &SolveOptions,
    schedule: StepSchedule,
    seed: u64,
) -> Result<RunOutput> {
    let mut spi = StochasticProxIteration::new(problem, schedule, seed)?;
    opts.validate_basic(problem)?;
    let n = problem.n();
    let every = opts.record_every.unwrap_or(n);
    let c = match schedule {
        StepSchedule::Diminishing { c } => c,
        StepSchedule::Constant(_) => return Err(Error::invalid("unreachable constant schedule")),
    };
    let mut log = MetricsLog::new(MetricsMeta::new("spi", c, Some(seed)));
    let rec = Recorder::new(opts);
    let mut prev = spi.x().clone();
    let mut record = |spi: &StochasticProxIteration, log: &mut MetricsLog| -> Result<()> {
        let x = spi.x();
        let moved = crate::model::sq_dist(x.view(), prev.view()).sqrt();
        prev.assign(x);
        let objective = if opts.record_objective {
            crate::solver::finite(problem.objective(x.view()))
        } else {
            None
        };
        log.push(ResidualReport {
            k: spi.k(),
            epoch: spi.k() as f64 / n as f64,
            residual_norm: moved,
            objective,
            dist_to_ref: rec.dist(x.view()),
            wall_time_s: rec.wall_time(),
        })
    };
    for k in 0..opts.max_iters {
        if k % every == 0 {
            record(&spi, &mut log)?;
        }
        spi.step()?;
    }
    if log.last().map(|r| r.k) != Some(spi.k()) {
        record(&spi, &mut log)?;
    }
    Ok(RunOutput {
        iterations: spi.k(),
        x_out: spi.x,
        log,
        ergodic: None,
        converged: false,
        final_state: None,
        drift_resyncs: 0,
    })
}
