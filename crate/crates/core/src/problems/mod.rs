// SPDX-License-Identifier: Apache-2.0

//! Builders that put applications into the `r + (1/n) Σ (f_i + g_i)` form.

mod fused;
mod glm;
mod graph;
mod group_lasso;
mod network;
mod svm;

pub use fused::{build_fused_lasso, PairChainIndicator, Parity};
pub use glm::build_glm;
pub use graph::{greedy_edge_coloring, EdgeColoring, Graph};
pub use group_lasso::{build_group_lasso, GroupPartition, GroupSoftThreshold};
pub use network::{build_network_lasso, EdgeClassPenalty, StackedLoss};
pub use svm::{build_svm, build_svm_folded, SvmData};

use std::sync::Arc;

use ndarray::ArrayView1;

use crate::error::{Error, Result};
use crate::model::{ProblemSpec, ProxFn, SmoothFn, Zero};
use crate::prox::functions::{ScaledProx, ScaledSmooth};

/// Default cap on the number of terms a recast may produce.
pub const RECAST_TERM_CAP: usize = 1_000_000;

/// `r(x) + (1/n) Σ_i f_i(x) + (1/m) Σ_j g_j(x)` with independent counts.
#[derive(Clone)]
pub struct NaturalProblem {
    pub dim: usize,
    pub r: Arc<dyn ProxFn>,
    pub f: Vec<Arc<dyn SmoothFn>>,
    pub g: Vec<Arc<dyn ProxFn>>,
}

impl NaturalProblem {
    fn check(&self) -> Result<()> {
        if self.f.is_empty() || self.g.is_empty() {
            return Err(Error::invalid("need at least one smooth and one nonsmooth term"));
        }
        Ok(())
    }

    pub fn objective(&self, x: ArrayView1<f64>) -> Option<f64> {
        let f: f64 = self.f.iter().map(|f| f.value(x)).sum::<f64>() / self.f.len() as f64;
        let mut g = 0.0;
        for t in &self.g {
            g += t.value(x)?;
        }
        Some(self.r.value(x)? + f + g / self.g.len() as f64)
    }
}

/// `n·m` terms: term `(i, j)` carries `f_i` and `g_j`.
pub fn recast_symmetric(p: &NaturalProblem, cap: usize) -> Result<ProblemSpec> {
    p.check()?;
    let (n, m) = (p.f.len(), p.g.len());
    let total = n
        .checked_mul(m)
        .filter(|&t| t <= cap)
        .ok_or_else(|| Error::invalid(format!("recast would create {n}x{m} terms, above the cap of {cap}")))?;
    let mut f = Vec::with_capacity(total);
    let mut g = Vec::with_capacity(total);
    for fi in &p.f {
        for gj in &p.g {
            f.push(Arc::clone(fi));
            g.push(Arc::clone(gj));
        }
    }
    ProblemSpec::new(p.dim, Arc::clone(&p.r), f, g)
}

/// `n + m` terms: `((m+n)/n) f_i` paired with zero, then `((m+n)/m) g_j`
/// paired with zero.
pub fn recast_weighted(p: &NaturalProblem) -> Result<ProblemSpec> {
    p.check()?;
    let (n, m) = (p.f.len(), p.g.len());
    let wf = (m + n) as f64 / n as f64;
    let wg = (m + n) as f64 / m as f64;
    let mut f: Vec<Arc<dyn SmoothFn>> = Vec::with_capacity(n + m);
    let mut g: Vec<Arc<dyn ProxFn>> = Vec::with_capacity(n + m);
    for fi in &p.f {
        f.push(Arc::new(ScaledSmooth::new(Arc::clone(fi), wf)));
        g.push(Arc::new(Zero));
    }
    for gj in &p.g {
        f.push(Arc::new(Zero));
        g.push(Arc::new(ScaledProx::new(Arc::clone(gj), wg)));
    }
    ProblemSpec::new(p.dim, Arc::clone(&p.r), f, g)
}
