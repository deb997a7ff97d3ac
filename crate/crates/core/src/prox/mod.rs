// SPDX-License-Identifier: Apache-2.0

//! Proximal operators.
//!
//! Free functions implement the operators themselves; [`functions`] wraps
//! them as [`ProxFn`](crate::model::ProxFn) / [`SmoothFn`](crate::model::SmoothFn)
//! terms that problems are assembled from.

mod coupling;
pub mod functions;
mod matrix;
mod one_dim;
mod quadratic;

pub use coupling::{prox_pair_diff, prox_pair_sum, prox_sum_coupling};
pub use matrix::soft_threshold_matrix;
pub use one_dim::{
    prox_affine_1d, prox_glm_1d, prox_hinge, GlmLink, Hinge1d, Linear1d, ScalarConvex, MAX_BISECTION_STEPS,
};
pub use quadratic::{prox_quadratic, CachedQuadraticProx};

use ndarray::{Array1, ArrayView1};

use crate::error::{Error, Result};

/// Closed interval with possibly infinite endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::invalid(format!("empty interval [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    /// `[-r, r]`.
    pub fn symmetric(radius: f64) -> Result<Self> {
        Self::new(-radius, radius)
    }

    pub fn real_line() -> Self {
        Interval {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// `prox_{λ|·|}(x)`.
pub fn soft_threshold_scalar(x: f64, lam: f64) -> f64 {
    if x > lam {
        x - lam
    } else if x < -lam {
        x + lam
    } else {
        0.0
    }
}

/// `prox_{λ‖·‖₂}(x) = max{1 − λ/‖x‖₂, 0} · x`.
pub fn soft_threshold_vector(x: ArrayView1<f64>, lam: f64) -> Array1<f64> {
    if lam == 0.0 {
        return x.to_owned();
    }
    let norm = x.dot(&x).sqrt();
    if norm <= lam {
        return Array1::zeros(x.len());
    }
    &x * (1.0 - lam / norm)
}

/// Euclidean projection onto `iv`.
pub fn project_interval(x: f64, iv: Interval) -> f64 {
    x.clamp(iv.lo, iv.hi)
}

pub fn project_interval_vec(x: ArrayView1<f64>, iv: Interval) -> Array1<f64> {
    x.mapv(|v| project_interval(v, iv))
}

/// `prox_{α(λ/2)‖·‖²}(x0) = x0 / (1 + αλ)`.
pub fn prox_scaled_sq_norm(x0: ArrayView1<f64>, lam: f64, alpha: f64) -> Array1<f64> {
    if lam == 0.0 {
        return x0.to_owned();
    }
    &x0 / (1.0 + alpha * lam)
}
