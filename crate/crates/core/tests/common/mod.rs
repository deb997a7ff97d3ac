// SPDX-License-Identifier: Apache-2.0
#![allow(dead_code)]

use ndarray::{Array1, Array2};
use ppg_core::{ProxFn, SmoothFn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn randn(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> Array1<f64> {
    Array1::from_shape_fn(d, |_| scale * rng.sample::<f64, _>(StandardNormal))
}

pub fn randn_mat(rng: &mut ChaCha8Rng, m: usize, d: usize, scale: f64) -> Array2<f64> {
    Array2::from_shape_fn((m, d), |_| scale * rng.sample::<f64, _>(StandardNormal))
}

/// Minimizer of a convex scalar function on `[lo, hi]` by repeated grid
/// refinement around the best point.
pub fn grid_argmin(phi: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    const POINTS: usize = 401;
    let mut best = 0.5 * (lo + hi);
    while hi - lo > 1e-11 * (1.0 + best.abs()) {
        let h = (hi - lo) / (POINTS - 1) as f64;
        let (mut j_best, mut v_best) = (0, f64::INFINITY);
        for j in 0..POINTS {
            let v = phi(lo + h * j as f64);
            if v < v_best {
                v_best = v;
                j_best = j;
            }
        }
        best = lo + h * j_best as f64;
        lo = best - h;
        hi = best + h;
    }
    best
}

/// Largest violation of `‖Δp‖² ≤ Δpᵀ Δx` over random pairs.
pub fn firm_nonexpansive_violation(h: &dyn ProxFn, d: usize, pairs: usize, seed: u64) -> f64 {
    let mut r = rng(seed);
    let mut worst: f64 = f64::NEG_INFINITY;
    for _ in 0..pairs {
        let alpha = 0.05 + 2.0 * r.random::<f64>();
        let x = randn(&mut r, d, 3.0);
        let y = if r.random::<f64>() < 0.3 {
            &x + &randn(&mut r, d, 1e-3)
        } else {
            randn(&mut r, d, 3.0)
        };
        let px = h.prox(x.view(), alpha).unwrap();
        let py = h.prox(y.view(), alpha).unwrap();
        let dp = &px - &py;
        let dx = &x - &y;
        worst = worst.max(dp.dot(&dp) - dp.dot(&dx));
    }
    worst
}

/// Prox objective `α h(u) + ½‖u − x0‖²` is not beaten by small perturbations
/// of the returned point. Returns the largest improvement found.
pub fn prox_local_improvement(h: &dyn ProxFn, d: usize, trials: usize, seed: u64) -> f64 {
    let mut r = rng(seed);
    let mut worst: f64 = f64::NEG_INFINITY;
    for _ in 0..trials {
        let alpha = 0.1 + r.random::<f64>();
        let x0 = randn(&mut r, d, 2.0);
        let u = h.prox(x0.view(), alpha).unwrap();
        let phi = |v: &Array1<f64>| {
            let diff = v - &x0;
            alpha * h.value(v.view()).expect("value available") + 0.5 * diff.dot(&diff)
        };
        let base = phi(&u);
        for _ in 0..20 {
            let v = &u + &randn(&mut r, d, 1e-3);
            worst = worst.max(base - phi(&v));
        }
    }
    worst
}

/// Largest relative mismatch between the gradient and central differences,
/// and largest ratio `‖∇f(x) − ∇f(y)‖ / (L‖x − y‖)`.
pub fn smooth_checks(f: &dyn SmoothFn, d: usize, samples: usize, seed: u64) -> (f64, f64) {
    let mut r = rng(seed);
    let (mut fd_err, mut lip_ratio): (f64, f64) = (0.0, 0.0);
    for _ in 0..samples {
        let x = randn(&mut r, d, 1.5);
        let g = f.gradient(x.view());
        let h = 1e-6;
        let mut fd = Array1::zeros(d);
        for j in 0..d {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += h;
            xm[j] -= h;
            fd[j] = (f.value(xp.view()) - f.value(xm.view())) / (2.0 * h);
        }
        let err = (&fd - &g).mapv(f64::abs).fold(0.0f64, |a, &b| a.max(b));
        let scale = g.mapv(f64::abs).fold(1.0f64, |a, &b| a.max(b));
        fd_err = fd_err.max(err / scale);
        let y = randn(&mut r, d, 1.5);
        let dg = &g - &f.gradient(y.view());
        let dx = &x - &y;
        let l = f.lipschitz();
        if l > 0.0 {
            lip_ratio = lip_ratio.max(dg.dot(&dg).sqrt() / (l * dx.dot(&dx).sqrt()));
        } else {
            lip_ratio = lip_ratio.max(dg.dot(&dg).sqrt());
        }
    }
    (fd_err, lip_ratio)
}

/// Group-lasso data with a planted solution on two groups.
pub fn group_lasso_data(seed: u64, m: usize, d: usize) -> (Array2<f64>, Array1<f64>) {
    let mut r = rng(seed);
    let a = randn_mat(&mut r, m, d, 1.0 / (m as f64).sqrt());
    let mut x = Array1::zeros(d);
    for j in 0..d.min(9) {
        x[j] = 1.0 + 0.1 * j as f64;
    }
    let b = a.dot(&x) + randn(&mut r, m, 0.05);
    (a, b)
}

/// Proximal-gradient iterations `x ← prox(x − α∇f(x))` until the step is tiny.
pub fn prox_grad_oracle(
    grad: impl Fn(&Array1<f64>) -> Array1<f64>,
    prox: impl Fn(Array1<f64>, f64) -> Array1<f64>,
    x0: Array1<f64>,
    alpha: f64,
    iters: usize,
) -> Array1<f64> {
    let mut x = x0;
    for _ in 0..iters {
        let next = prox(&x - &(grad(&x) * alpha), alpha);
        let moved = (&next - &x).mapv(f64::abs).fold(0.0f64, |a, &b| a.max(b));
        x = next;
        if moved < 1e-15 {
            break;
        }
    }
    x
}

pub fn max_abs_diff(a: &Array1<f64>, b: &Array1<f64>) -> f64 {
    (a - b).mapv(f64::abs).fold(0.0f64, |m, &e| m.max(e))
}
