// SPDX-License-Identifier: Apache-2.0

use std::sync::Arc;

use ndarray::{Array1, Array2, ArrayView1};

use crate::error::{Error, Result};
use crate::model::{ProblemSpec, ProxFn, SmoothFn, Zero};
use crate::prox::functions::{L1Norm, LeastSquaresRow};

/// Which adjacent pairs a [`PairChainIndicator`] constrains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    /// Pairs `(0,1), (2,3), …`.
    Odd,
    /// Pairs `(1,2), (3,4), …`.
    Even,
}

impl Parity {
    fn first(self) -> usize {
        match self {
            Parity::Odd => 0,
            Parity::Even => 1,
        }
    }
}

/// Indicator of `|x_{j+1} − x_j| ≤ ε` over every other adjacent pair.
///
/// The pairs are disjoint, so the prox acts on each independently:
/// keep `x_j + x_{j+1}` and clip the difference to `[−ε, ε]`.
#[derive(Debug, Clone, Copy)]
pub struct PairChainIndicator {
    parity: Parity,
    eps: f64,
}

impl PairChainIndicator {
    pub fn new(parity: Parity, eps: f64) -> Result<Self> {
        if !(eps >= 0.0) {
            return Err(Error::invalid(format!("epsilon must be nonnegative, got {eps}")));
        }
        Ok(PairChainIndicator { parity, eps })
    }

    fn pairs(&self, d: usize) -> impl Iterator<Item = usize> {
        (self.parity.first()..d.saturating_sub(1)).step_by(2)
    }
}

impl ProxFn for PairChainIndicator {
    fn prox(&self, x0: ArrayView1<f64>, _alpha: f64) -> Result<Array1<f64>> {
        let mut out = x0.to_owned();
        for j in self.pairs(x0.len()) {
            let (a, b) = (x0[j], x0[j + 1]);
            let s = a + b;
            let w = (a - b).clamp(-self.eps, self.eps);
            out[j] = 0.5 * (s + w);
            out[j + 1] = 0.5 * (s - w);
        }
        Ok(out)
    }

    fn value(&self, x: ArrayView1<f64>) -> Option<f64> {
        let slack = self.eps * (1.0 + 1e-9) + 1e-12;
        let ok = self.pairs(x.len()).all(|j| (x[j + 1] - x[j]).abs() <= slack);
        Some(if ok { 0.0 } else { f64::INFINITY })
    }
}

/// `λ‖x‖₁ + (1/n) Σ ½(a_iᵀx − y_i)²` subject to `|x_{j+1} − x_j| ≤ ε`,
/// as `2n` terms: `(ℓ_i, g_odd)` for `i < n`, then `(ℓ_i, g_even)`.
///
/// With `ε = ∞` the constraint terms are zero.
pub fn build_fused_lasso(a: &Array2<f64>, y: &Array1<f64>, lambda: f64, eps: f64) -> Result<ProblemSpec> {
    if a.nrows() != y.len() {
        return Err(Error::Dimension {
            what: "fused lasso responses",
            expected: a.nrows(),
            found: y.len(),
        });
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::invalid(format!("lambda must be nonnegative, got {lambda}")));
    }
    let (g_odd, g_even): (Arc<dyn ProxFn>, Arc<dyn ProxFn>) = if eps == f64::INFINITY {
        (Arc::new(Zero), Arc::new(Zero))
    } else {
        (
            Arc::new(PairChainIndicator::new(Parity::Odd, eps)?),
            Arc::new(PairChainIndicator::new(Parity::Even, eps)?),
        )
    };
    let losses: Vec<Arc<dyn SmoothFn>> = a
        .rows()
        .into_iter()
        .zip(y.iter())
        .map(|(row, &yi)| Arc::new(LeastSquaresRow::new(row.to_owned(), yi)) as Arc<dyn SmoothFn>)
        .collect();
    let n = losses.len();
    let f: Vec<Arc<dyn SmoothFn>> = losses.iter().chain(losses.iter()).cloned().collect();
    let g: Vec<Arc<dyn ProxFn>> = std::iter::repeat_n(g_odd, n).chain(std::iter::repeat_n(g_even, n)).collect();
    ProblemSpec::new(a.ncols(), Arc::new(L1Norm::new(lambda)), f, g)
}
