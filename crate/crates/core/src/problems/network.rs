// SPDX-License-Identifier: Apache-2.0

use std::sync::Arc;

use ndarray::{s, Array1, ArrayView1};

use super::graph::{EdgeColoring, Graph};
use crate::error::{Error, Result};
use crate::model::{ProblemSpec, ProxFn, SmoothFn, Zero};
use crate::prox::functions::L1Norm;
use crate::prox::soft_threshold_vector;

/// `Σ_v ℓ_v(x_v)` on the stacked vector `(x_0, …, x_{|V|−1})`, each block of
/// length `d`.
#[derive(Clone)]
pub struct StackedLoss {
    losses: Vec<Arc<dyn SmoothFn>>,
    block: usize,
    lipschitz: f64,
}

impl StackedLoss {
    pub fn new(losses: Vec<Arc<dyn SmoothFn>>, block: usize) -> Self {
        let lipschitz = losses.iter().map(|l| l.lipschitz()).fold(0.0, f64::max);
        StackedLoss {
            losses,
            block,
            lipschitz,
        }
    }

    fn slot(&self, v: usize) -> ndarray::Slice {
        ndarray::Slice::from(v * self.block..(v + 1) * self.block)
    }
}

impl SmoothFn for StackedLoss {
    fn value(&self, x: ArrayView1<f64>) -> f64 {
        self.losses
            .iter()
            .enumerate()
            .map(|(v, l)| l.value(x.slice_axis(ndarray::Axis(0), self.slot(v))))
            .sum()
    }

    fn gradient(&self, x: ArrayView1<f64>) -> Array1<f64> {
        let mut out = Array1::zeros(x.len());
        for (v, l) in self.losses.iter().enumerate() {
            let g = l.gradient(x.slice_axis(ndarray::Axis(0), self.slot(v)));
            out.slice_mut(s![v * self.block..(v + 1) * self.block]).assign(&g);
        }
        out
    }

    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    fn is_zero(&self) -> bool {
        self.losses.iter().all(|l| l.is_zero())
    }
}

/// `λ Σ_{(u,v) ∈ E_c} ‖x_u − x_v‖₂` over a matching `E_c`.
///
/// Edges in a matching touch disjoint blocks, so the prox is the pairwise
/// difference prox per edge: `x_u, x_v = ½(x_u + x_v ± u_{2αλ}(x_u − x_v))`.
/// Blocks of vertices the class does not touch pass through.
#[derive(Debug, Clone)]
pub struct EdgeClassPenalty {
    edges: Vec<(usize, usize)>,
    block: usize,
    lam: f64,
}

impl EdgeClassPenalty {
    pub fn new(edges: Vec<(usize, usize)>, block: usize, lam: f64) -> Self {
        EdgeClassPenalty { edges, block, lam }
    }

    fn range(&self, v: usize) -> std::ops::Range<usize> {
        v * self.block..(v + 1) * self.block
    }
}

impl ProxFn for EdgeClassPenalty {
    fn prox(&self, x0: ArrayView1<f64>, alpha: f64) -> Result<Array1<f64>> {
        let mut out = x0.to_owned();
        for &(u, v) in &self.edges {
            let xu = x0.slice(s![self.range(u)]);
            let xv = x0.slice(s![self.range(v)]);
            let w = soft_threshold_vector((&xu - &xv).view(), 2.0 * alpha * self.lam);
            let sum = &xu + &xv;
            out.slice_mut(s![self.range(u)]).assign(&((&sum + &w) * 0.5));
            out.slice_mut(s![self.range(v)]).assign(&((&sum - &w) * 0.5));
        }
        Ok(out)
    }

    fn value(&self, x: ArrayView1<f64>) -> Option<f64> {
        Some(
            self.lam
                * self
                    .edges
                    .iter()
                    .map(|&(u, v)| {
                        let d = &x.slice(s![self.range(u)]) - &x.slice(s![self.range(v)]);
                        d.dot(&d).sqrt()
                    })
                    .sum::<f64>(),
        )
    }

    fn is_zero(&self) -> bool {
        self.lam == 0.0 || self.edges.is_empty()
    }
}

/// `Σ_v (λ₁‖x_v‖₁ + ℓ_v(x_v)) + λ₂ Σ_{(u,v) ∈ E} ‖x_u − x_v‖₂` over the
/// stacked vector, with one term per color: `f_c = Σ_v ℓ_v` and
/// `g_c = Cλ₂ Σ_{E_c} ‖x_u − x_v‖₂`. A graph without edges gives one term.
pub fn build_network_lasso(
    graph: &Graph,
    coloring: &EdgeColoring,
    losses: Vec<Arc<dyn SmoothFn>>,
    block: usize,
    lambda1: f64,
    lambda2: f64,
) -> Result<ProblemSpec> {
    coloring.verify(graph)?;
    if losses.len() != graph.n_vertices() {
        return Err(Error::Dimension {
            what: "per-vertex losses",
            expected: graph.n_vertices(),
            found: losses.len(),
        });
    }
    if block == 0 {
        return Err(Error::invalid("vertex block dimension must be positive"));
    }
    for (name, v) in [("lambda1", lambda1), ("lambda2", lambda2)] {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::invalid(format!("{name} must be nonnegative, got {v}")));
        }
    }
    let colors = coloring.n_colors().max(1);
    let lambda3 = colors as f64 * lambda2;
    let loss: Arc<dyn SmoothFn> = Arc::new(StackedLoss::new(losses, block));
    let g: Vec<Arc<dyn ProxFn>> = if coloring.n_colors() == 0 {
        vec![Arc::new(Zero)]
    } else {
        coloring
            .classes()
            .iter()
            .map(|class| {
                let edges = class.iter().map(|&e| graph.edges()[e]).collect();
                Arc::new(EdgeClassPenalty::new(edges, block, lambda3)) as Arc<dyn ProxFn>
            })
            .collect()
    };
    let f = vec![loss; colors];
    ProblemSpec::new(graph.n_vertices() * block, Arc::new(L1Norm::new(lambda1)), f, g)
}
