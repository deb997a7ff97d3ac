// SPDX-License-Identifier: Apache-2.0

//! Proximal operators of functions of a single linear form, `g(x) = f(aᵀx)`.
//!
//! The minimizer of `α f(aᵀx) + ½‖x − x0‖²` lies on the line `x0 + βa`, so
//! the problem collapses to the scalar equation
//!
//! ```text
//! h(β) = α f'(aᵀx0 + β‖a‖²) + β = 0,
//! ```
//!
//! where `h` is nondecreasing with slope at least one. That slope gives an
//! exact bracket: the root lies between `0` and `-h(0)`.

use ndarray::{Array1, ArrayView1};

use crate::error::{Error, Result};

/// Cap on bisection / safeguarded Newton steps in the scalar solve.
pub const MAX_BISECTION_STEPS: usize = 200;

const TOL: f64 = 1e-12;

/// A closed convex function on the real line.
pub trait ScalarConvex: Send + Sync {
    fn value(&self, t: f64) -> f64;

    /// Right derivative `f'_+(t)`; the largest element of `∂f(t)`.
    fn right_derivative(&self, t: f64) -> f64;

    /// `f''(t)` for twice-differentiable functions. Enables Newton steps.
    fn second_derivative(&self, _t: f64) -> Option<f64> {
        None
    }
}

/// `f(t) = t`.
#[derive(Debug, Clone, Copy)]
pub struct Linear1d;

impl ScalarConvex for Linear1d {
    fn value(&self, t: f64) -> f64 {
        t
    }

    fn right_derivative(&self, _t: f64) -> f64 {
        1.0
    }

    fn second_derivative(&self, _t: f64) -> Option<f64> {
        Some(0.0)
    }
}

/// `f(t) = max{1 − y·t, 0}` for a label `y ∈ {−1, +1}`.
#[derive(Debug, Clone, Copy)]
pub struct Hinge1d {
    pub y: f64,
}

impl ScalarConvex for Hinge1d {
    fn value(&self, t: f64) -> f64 {
        (1.0 - self.y * t).max(0.0)
    }

    fn right_derivative(&self, t: f64) -> f64 {
        // Slope is −y where 1 − yt > 0 and 0 elsewhere.
        if self.y > 0.0 {
            if t < 1.0 / self.y {
                -self.y
            } else {
                0.0
            }
        } else if t >= 1.0 / self.y {
            -self.y
        } else {
            0.0
        }
    }
}

/// Log-partition functions `A(t)` of common generalized linear models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GlmLink {
    /// `A(t) = t²/2`.
    Gaussian,
    /// `A(t) = log(1 + eᵗ)`.
    Logistic,
    /// `A(t) = eᵗ`.
    Poisson,
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

impl ScalarConvex for GlmLink {
    fn value(&self, t: f64) -> f64 {
        match self {
            GlmLink::Gaussian => 0.5 * t * t,
            GlmLink::Logistic => t.max(0.0) + (-t.abs()).exp().ln_1p(),
            GlmLink::Poisson => t.exp(),
        }
    }

    fn right_derivative(&self, t: f64) -> f64 {
        match self {
            GlmLink::Gaussian => t,
            GlmLink::Logistic => sigmoid(t),
            GlmLink::Poisson => t.exp(),
        }
    }

    fn second_derivative(&self, t: f64) -> Option<f64> {
        Some(match self {
            GlmLink::Gaussian => 1.0,
            GlmLink::Logistic => {
                let s = sigmoid(t);
                s * (1.0 - s)
            }
            GlmLink::Poisson => t.exp(),
        })
    }
}

/// `t ↦ A(t) − c·t`.
struct Tilted<'a> {
    inner: &'a dyn ScalarConvex,
    c: f64,
}

impl ScalarConvex for Tilted<'_> {
    fn value(&self, t: f64) -> f64 {
        self.inner.value(t) - self.c * t
    }

    fn right_derivative(&self, t: f64) -> f64 {
        self.inner.right_derivative(t) - self.c
    }

    fn second_derivative(&self, t: f64) -> Option<f64> {
        self.inner.second_derivative(t)
    }
}

/// Root of `h(β) = α f'_+(t0 + βs) + β`.
fn solve_line(f: &dyn ScalarConvex, t0: f64, s: f64, alpha: f64) -> Result<f64> {
    let h = |beta: f64| alpha * f.right_derivative(t0 + beta * s) + beta;
    let h0 = h(0.0);
    if h0 == 0.0 {
        return Ok(0.0);
    }
    if !h0.is_finite() {
        return Err(Error::Numerical(format!("derivative not finite at t = {t0}")));
    }
    let (mut lo, mut hi) = if h0 > 0.0 { (-h0, 0.0) } else { (0.0, -h0) };
    let newton = f.second_derivative(t0).is_some();
    let mut beta = 0.5 * (lo + hi);
    for _ in 0..MAX_BISECTION_STEPS {
        let hb = h(beta);
        if hb == 0.0 {
            return Ok(beta);
        }
        if hb < 0.0 {
            lo = beta;
        } else {
            hi = beta;
        }
        let scale = beta.abs().max(1.0);
        let mut next = 0.5 * (lo + hi);
        if newton {
            let curv = f.second_derivative(t0 + beta * s).unwrap_or(0.0);
            let slope = alpha * s * curv + 1.0;
            let candidate = beta - hb / slope;
            if candidate > lo && candidate < hi {
                next = candidate;
            }
        }
        if (next - beta).abs() <= TOL * scale || hi - lo <= TOL * scale {
            return Ok(next);
        }
        if next == lo || next == hi {
            // Bracket exhausted at floating-point resolution.
            return Ok(next);
        }
        beta = next;
    }
    Err(Error::Convergence(MAX_BISECTION_STEPS))
}

/// `prox_{α f(aᵀ·)}(x0) = x0 + β a`, with `β` from a bracketed scalar solve.
pub fn prox_affine_1d(
    a: ArrayView1<f64>,
    f: &dyn ScalarConvex,
    x0: ArrayView1<f64>,
    alpha: f64,
) -> Result<Array1<f64>> {
    if a.len() != x0.len() {
        return Err(Error::Dimension {
            what: "affine direction",
            expected: x0.len(),
            found: a.len(),
        });
    }
    let s = a.dot(&a);
    if s == 0.0 {
        return Err(Error::invalid("affine direction must be nonzero"));
    }
    let beta = solve_line(f, a.dot(&x0), s, alpha)?;
    let mut out = x0.to_owned();
    out.scaled_add(beta, &a);
    Ok(out)
}

/// Closed-form prox of `α·max{1 − y aᵀx, 0}`.
pub fn prox_hinge(x0: ArrayView1<f64>, a: ArrayView1<f64>, y: f64, alpha: f64) -> Array1<f64> {
    let s = a.dot(&a);
    let step = ((1.0 - y * a.dot(&x0)) / s).clamp(0.0, alpha);
    let mut out = x0.to_owned();
    out.scaled_add(step * y, &a);
    out
}

/// Prox of `α(A(xiᵀβ) − t·xiᵀβ)`; safeguarded Newton when `A''` is known.
pub fn prox_glm_1d(
    x0: ArrayView1<f64>,
    xi: ArrayView1<f64>,
    t: f64,
    link: &dyn ScalarConvex,
    alpha: f64,
) -> Result<Array1<f64>> {
    if xi.iter().all(|&v| v == 0.0) {
        return Ok(x0.to_owned());
    }
    prox_affine_1d(xi, &Tilted { inner: link, c: t }, x0, alpha)
}
