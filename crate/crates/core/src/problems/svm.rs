// SPDX-License-Identifier: Apache-2.0

use std::sync::Arc;

use ndarray::{Array1, Array2, ArrayView1};

use crate::error::{Error, Result};
use crate::model::{ProblemSpec, ProxFn, SmoothFn, Zero};
use crate::prox::functions::{PlusSqNorm, SqNorm};
use crate::prox::prox_hinge;

/// Training data for `(λ/2)‖x‖² + (1/n) Σ max{1 − y_i a_iᵀx, 0}`.
#[derive(Debug, Clone)]
pub struct SvmData {
    a: Arc<Array2<f64>>,
    y: Array1<f64>,
    lambda: f64,
}

impl SvmData {
    pub fn new(a: Array2<f64>, y: Array1<f64>, lambda: f64) -> Result<Self> {
        if a.nrows() != y.len() {
            return Err(Error::Dimension {
                what: "SVM labels",
                expected: a.nrows(),
                found: y.len(),
            });
        }
        if a.nrows() == 0 || a.ncols() == 0 {
            return Err(Error::invalid("SVM data must be nonempty"));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::invalid(format!("SVM lambda must be positive, got {lambda}")));
        }
        if let Some(i) = y.iter().position(|&v| v != 1.0 && v != -1.0) {
            return Err(Error::invalid(format!("label {} of sample {i} is not +1 or -1", y[i])));
        }
        if let Some(i) = a.rows().into_iter().position(|r| r.iter().all(|&v| v == 0.0)) {
            return Err(Error::invalid(format!("feature row {i} is zero")));
        }
        Ok(SvmData {
            a: Arc::new(a),
            y,
            lambda,
        })
    }

    pub fn features(&self) -> &Array2<f64> {
        &self.a
    }

    pub fn labels(&self) -> &Array1<f64> {
        &self.y
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn dim(&self) -> usize {
        self.a.ncols()
    }

    /// The SVM objective evaluated directly.
    pub fn objective(&self, x: ArrayView1<f64>) -> f64 {
        let margins = self.a.dot(&x);
        let hinge: f64 = margins
            .iter()
            .zip(self.y.iter())
            .map(|(m, y)| (1.0 - y * m).max(0.0))
            .sum();
        0.5 * self.lambda * x.dot(&x) + hinge / self.n() as f64
    }

    fn hinge_terms(&self) -> impl Iterator<Item = HingeRow> + '_ {
        (0..self.n()).map(|row| HingeRow {
            data: Arc::clone(&self.a),
            row,
            y: self.y[row],
        })
    }
}

/// Hinge loss on one row of a shared feature matrix.
struct HingeRow {
    data: Arc<Array2<f64>>,
    row: usize,
    y: f64,
}

impl ProxFn for HingeRow {
    fn prox(&self, x0: ArrayView1<f64>, alpha: f64) -> Result<Array1<f64>> {
        Ok(prox_hinge(x0, self.data.row(self.row), self.y, alpha))
    }

    fn value(&self, x: ArrayView1<f64>) -> Option<f64> {
        Some((1.0 - self.y * self.data.row(self.row).dot(&x)).max(0.0))
    }
}

/// `r = (λ/2)‖x‖²`, `g_i` = hinge of sample `i`, `f_i = 0`.
pub fn build_svm(data: &SvmData) -> Result<ProblemSpec> {
    let g: Vec<Arc<dyn ProxFn>> = data.hinge_terms().map(|h| Arc::new(h) as Arc<dyn ProxFn>).collect();
    let f: Vec<Arc<dyn SmoothFn>> = vec![Arc::new(Zero); data.n()];
    ProblemSpec::new(data.dim(), Arc::new(SqNorm::new(data.lambda)), f, g)
}

/// Same objective with the regularizer folded into every `g_i` and `r = 0`,
/// for methods that only accept `g` terms.
pub fn build_svm_folded(data: &SvmData) -> Result<ProblemSpec> {
    let g: Vec<Arc<dyn ProxFn>> = data
        .hinge_terms()
        .map(|h| Arc::new(PlusSqNorm::new(Arc::new(h), data.lambda)) as Arc<dyn ProxFn>)
        .collect();
    let f: Vec<Arc<dyn SmoothFn>> = vec![Arc::new(Zero); data.n()];
    ProblemSpec::new(data.dim(), Arc::new(Zero), f, g)
}
