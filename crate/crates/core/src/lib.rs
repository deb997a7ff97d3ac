// SPDX-License-Identifier: Apache-2.0

//! Proximal-proximal-gradient (PPG) and stochastic PPG (S-PPG) solvers for
//!
//! ```text
//! minimize  r(x) + (1/n) Σ_i (f_i(x) + g_i(x))
//! ```
//!
//! with `r`, `g_i` proximable and `f_i` smooth, plus the proximal operators,
//! problem builders, baseline methods and metrics I/O used around them.

pub mod baselines;
pub mod error;
pub mod io;
pub mod model;
pub mod problems;
pub mod prox;
pub mod solver;

pub use error::{Error, Result, Term};
pub use model::{
    e_gap, mean_rows, residual_map, ProblemSpec, ProxFn, Residual, ResidualReport, SmoothFn, SolverState, Zero,
};
pub use solver::{ppg_run, sppg_run, RunOutput, SolveOptions};
