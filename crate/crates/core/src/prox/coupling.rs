// SPDX-License-Identifier: Apache-2.0

//! Proximal operators of `g(x_1, …, x_n) = f(a_1 x_1 + … + a_n x_n)`.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};

use crate::error::{Error, Result};
use crate::model::ProxFn;

/// `prox_{αg}(ξ)` for `g(x_1..x_n) = f(Σ a_i x_i)`, rows of `xi` being the `ξ_i`.
///
/// With `w = prox_{α‖a‖²f}(Σ a_i ξ_i)` and `v = (Σ a_i ξ_i − w)/‖a‖²`, row `i`
/// of the result is `ξ_i − a_i v`.
pub fn prox_sum_coupling(
    a: ArrayView1<f64>,
    f: &dyn ProxFn,
    xi: ArrayView2<f64>,
    alpha: f64,
) -> Result<Array2<f64>> {
    if a.len() != xi.nrows() {
        return Err(Error::Dimension {
            what: "coupling weights",
            expected: xi.nrows(),
            found: a.len(),
        });
    }
    let s = a.dot(&a);
    if s == 0.0 {
        return Err(Error::invalid("coupling weights must not all be zero"));
    }
    let combo = a.dot(&xi);
    let w = f.prox(combo.view(), alpha * s)?;
    let v = (&combo - &w) / s;
    let mut out = xi.to_owned();
    for (ai, mut row) in a.iter().zip(out.axis_iter_mut(Axis(0))) {
        row.scaled_add(-ai, &v);
    }
    Ok(out)
}

/// `prox_{αg}(x0, y0)` for `g(x, y) = f(x + y)`.
pub fn prox_pair_sum(
    f: &dyn ProxFn,
    x0: ArrayView1<f64>,
    y0: ArrayView1<f64>,
    alpha: f64,
) -> Result<(Array1<f64>, Array1<f64>)> {
    let w = f.prox((&x0 + &y0).view(), 2.0 * alpha)?;
    let diff = &x0 - &y0;
    Ok(((&diff + &w) * 0.5, (&w - &diff) * 0.5))
}

/// `prox_{αg}(x0, y0)` for `g(x, y) = f(x − y)`.
pub fn prox_pair_diff(
    f: &dyn ProxFn,
    x0: ArrayView1<f64>,
    y0: ArrayView1<f64>,
    alpha: f64,
) -> Result<(Array1<f64>, Array1<f64>)> {
    let w = f.prox((&x0 - &y0).view(), 2.0 * alpha)?;
    let sum = &x0 + &y0;
    Ok(((&sum + &w) * 0.5, (&sum - &w) * 0.5))
}
