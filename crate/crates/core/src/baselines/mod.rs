// SPDX-License-Identifier: Apache-2.0

//! Reference methods that PPG reduces to or is compared against.
//!
//! All of them report through [`MetricsLog`](crate::io::MetricsLog) with the
//! same columns as the PPG-family solvers.

mod admm;
mod finito;
mod prox_grad;
mod spi;

pub use admm::{consensus_admm_run, AdmmStep, ConsensusAdmm};
pub use finito::{finito_run, Finito};
pub use prox_grad::{proximal_gradient_run, ProxGradient};
pub use spi::{stochastic_prox_iteration_run, StepSchedule, StochasticProxIteration};

use crate::error::{Error, Result};
use crate::model::ProblemSpec;

pub(crate) fn require(ok: bool, solver: &'static str, reason: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Incompatible {
            solver,
            reason: reason.to_string(),
        })
    }
}

pub(crate) fn require_no_g(problem: &ProblemSpec, solver: &'static str) -> Result<()> {
    require(
        problem.all_g_zero(),
        solver,
        "nonsmooth terms g_i are present; this method only handles r and smooth f_i",
    )
}

pub(crate) fn require_no_f(problem: &ProblemSpec, solver: &'static str) -> Result<()> {
    require(
        problem.all_f_zero(),
        solver,
        "smooth terms f_i are present; this method only handles prox terms",
    )
}

pub(crate) fn require_no_r(problem: &ProblemSpec, solver: &'static str) -> Result<()> {
    require(
        problem.r().is_zero(),
        solver,
        "a nonzero regularizer r is present; fold it into the g_i terms",
    )
}
