// SPDX-License-Identifier: Apache-2.0

use std::sync::Arc;

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::model::{ProblemSpec, ProxFn, SmoothFn, Zero};
use crate::prox::functions::GlmTerm;
use crate::prox::GlmLink;

/// `(1/n) Σ (A(x_iᵀβ) − T_i x_iᵀβ)` with `r = 0`, `f_i = 0`.
pub fn build_glm(x: &Array2<f64>, t: &Array1<f64>, link: GlmLink) -> Result<ProblemSpec> {
    if x.nrows() != t.len() {
        return Err(Error::Dimension {
            what: "GLM responses",
            expected: x.nrows(),
            found: t.len(),
        });
    }
    let g: Vec<Arc<dyn ProxFn>> = x
        .rows()
        .into_iter()
        .zip(t.iter())
        .map(|(row, &ti)| Arc::new(GlmTerm::new(row.to_owned(), ti, link)) as Arc<dyn ProxFn>)
        .collect();
    let f: Vec<Arc<dyn SmoothFn>> = vec![Arc::new(Zero); g.len()];
    ProblemSpec::new(x.ncols(), Arc::new(Zero), f, g)
}
