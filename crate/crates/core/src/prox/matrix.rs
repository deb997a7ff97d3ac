// SPDX-License-Identifier: Apache-2.0

use nalgebra::DMatrix;
use ndarray::{Array2, ArrayView2};

use super::soft_threshold_scalar;
use crate::error::{Error, Result};

/// Nuclear-norm prox: soft-threshold the singular values of `m` by `lam`.
pub fn soft_threshold_matrix(m: ArrayView2<f64>, lam: f64) -> Result<Array2<f64>> {
    if lam == 0.0 {
        return Ok(m.to_owned());
    }
    let (p, q) = m.dim();
    let dm = DMatrix::from_fn(p, q, |i, j| m[[i, j]]);
    let svd = dm
        .try_svd(true, true, f64::EPSILON, 0)
        .ok_or_else(|| Error::Numerical("SVD did not converge".into()))?;
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => return Err(Error::Numerical("SVD returned no singular vectors".into())),
    };
    let mut scaled = u;
    for (k, sigma) in svd.singular_values.iter().enumerate() {
        let s = soft_threshold_scalar(*sigma, lam);
        scaled.column_mut(k).scale_mut(s);
    }
    let out = scaled * v_t;
    Ok(Array2::from_shape_fn((p, q), |(i, j)| out[(i, j)]))
}
