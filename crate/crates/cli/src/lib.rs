// SPDX-License-Identifier: Apache-2.0

//! Library side of the `ppg` command: data generation, problem files,
//! run configuration, single solves and multi-run comparisons.

pub mod compare;
pub mod config;
pub mod gen;
pub mod problem_file;
pub mod solve;

pub use config::{Algo, RunConfig};
pub use problem_file::{load, LoadedProblem, ProblemFile};
pub use solve::{solve, SolveResult};
