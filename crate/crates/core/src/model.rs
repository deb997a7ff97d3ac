// SPDX-License-Identifier: Apache-2.0

//! Problem model shared by every solver.
//!
//! A problem is `r(x) + (1/n) Σ_i (f_i(x) + g_i(x))` over `x ∈ R^d`, where
//! `r` and the `g_i` are only accessed through their proximal operators and
//! the `f_i` through gradients. Function values are optional: a term that
//! cannot report a value makes the objective "unavailable" (`None`) rather
//! than failing the solve.

use std::sync::Arc;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rayon::prelude::*;

use crate::error::{Error, Result, Term};

/// Number of contiguous row chunks used when averaging the `z` block.
///
/// Fixed per problem rather than per thread count so that the summation order,
/// and therefore every bit of `z̄`, does not depend on how many threads run.
pub const DEFAULT_REDUCTION_CHUNKS: usize = 16;

/// A convex differentiable term with a Lipschitz-continuous gradient.
pub trait SmoothFn: Send + Sync {
    fn value(&self, x: ArrayView1<f64>) -> f64;

    fn gradient(&self, x: ArrayView1<f64>) -> Array1<f64>;

    /// Upper bound on the Lipschitz constant of the gradient.
    fn lipschitz(&self) -> f64;

    /// `true` only for the identically-zero function; lets solvers skip work
    /// and lets reductions to other methods be validated.
    fn is_zero(&self) -> bool {
        false
    }
}

/// A closed convex proper term accessed through its proximal operator.
pub trait ProxFn: Send + Sync {
    /// `argmin_u h(u) + ‖u − x0‖² / (2α)`.
    fn prox(&self, x0: ArrayView1<f64>, alpha: f64) -> Result<Array1<f64>>;

    /// Function value, `+∞` outside the domain, `None` when unavailable.
    fn value(&self, _x: ArrayView1<f64>) -> Option<f64> {
        None
    }

    fn is_zero(&self) -> bool {
        false
    }
}

/// The zero function, usable as either kind of term.
#[derive(Debug, Clone, Copy, Default)]
pub struct Zero;

impl SmoothFn for Zero {
    fn value(&self, _x: ArrayView1<f64>) -> f64 {
        0.0
    }

    fn gradient(&self, x: ArrayView1<f64>) -> Array1<f64> {
        Array1::zeros(x.len())
    }

    fn lipschitz(&self) -> f64 {
        0.0
    }

    fn is_zero(&self) -> bool {
        true
    }
}

impl ProxFn for Zero {
    fn prox(&self, x0: ArrayView1<f64>, _alpha: f64) -> Result<Array1<f64>> {
        Ok(x0.to_owned())
    }

    fn value(&self, _x: ArrayView1<f64>) -> Option<f64> {
        Some(0.0)
    }

    fn is_zero(&self) -> bool {
        true
    }
}

/// The triple `(r, {f_i}, {g_i})` every solver consumes.
#[derive(Clone)]
pub struct ProblemSpec {
    dim: usize,
    r: Arc<dyn ProxFn>,
    f: Vec<Arc<dyn SmoothFn>>,
    g: Vec<Arc<dyn ProxFn>>,
    reduction_chunks: usize,
}

impl std::fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("dim", &self.dim)
            .field("n", &self.n())
            .field("reduction_chunks", &self.reduction_chunks)
            .finish_non_exhaustive()
    }
}

impl ProblemSpec {
    pub fn new(
        dim: usize,
        r: Arc<dyn ProxFn>,
        f: Vec<Arc<dyn SmoothFn>>,
        g: Vec<Arc<dyn ProxFn>>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        if f.is_empty() {
            return Err(Error::invalid("need at least one term (n >= 1)"));
        }
        if f.len() != g.len() {
            return Err(Error::Dimension {
                what: "number of g terms",
                expected: f.len(),
                found: g.len(),
            });
        }
        Ok(ProblemSpec {
            dim,
            r,
            f,
            g,
            reduction_chunks: DEFAULT_REDUCTION_CHUNKS,
        })
    }

    /// Problem with `f_i = 0` for every term.
    pub fn nonsmooth(dim: usize, r: Arc<dyn ProxFn>, g: Vec<Arc<dyn ProxFn>>) -> Result<Self> {
        let f = (0..g.len()).map(|_| Arc::new(Zero) as Arc<dyn SmoothFn>).collect();
        Self::new(dim, r, f, g)
    }

    /// Problem with `g_i = 0` for every term.
    pub fn smooth(dim: usize, r: Arc<dyn ProxFn>, f: Vec<Arc<dyn SmoothFn>>) -> Result<Self> {
        let g = (0..f.len()).map(|_| Arc::new(Zero) as Arc<dyn ProxFn>).collect();
        Self::new(dim, r, f, g)
    }

    pub fn with_reduction_chunks(mut self, chunks: usize) -> Self {
        self.reduction_chunks = chunks.max(1);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.f.len()
    }

    pub fn r(&self) -> &dyn ProxFn {
        self.r.as_ref()
    }

    pub fn f(&self, i: usize) -> &dyn SmoothFn {
        self.f[i].as_ref()
    }

    pub fn g(&self, i: usize) -> &dyn ProxFn {
        self.g[i].as_ref()
    }

    pub fn f_terms(&self) -> &[Arc<dyn SmoothFn>] {
        &self.f
    }

    pub fn g_terms(&self) -> &[Arc<dyn ProxFn>] {
        &self.g
    }

    pub fn reduction_chunks(&self) -> usize {
        self.reduction_chunks
    }

    /// Uniform Lipschitz bound `L = max_i L_i`.
    pub fn max_lipschitz(&self) -> f64 {
        self.f.iter().map(|f| f.lipschitz()).fold(0.0, f64::max)
    }

    pub fn all_f_zero(&self) -> bool {
        self.f.iter().all(|f| f.is_zero())
    }

    pub fn all_g_zero(&self) -> bool {
        self.g.iter().all(|g| g.is_zero())
    }

    /// `r(x) + (1/n) Σ (f_i(x) + g_i(x))`, or `None` if some value is unavailable.
    pub fn objective(&self, x: ArrayView1<f64>) -> Option<f64> {
        let r = self.r.value(x)?;
        let mut sum = 0.0;
        for (f, g) in self.f.iter().zip(&self.g) {
            sum += f.value(x) + g.value(x)?;
        }
        Some(r + sum / self.n() as f64)
    }

    /// `r(x½) + f̄(x½) + (1/n) Σ g_i(x'_i)`: the objective with each `g_i`
    /// evaluated at its own copy. Not a true objective value and can sit below
    /// the optimum.
    pub fn split_objective(&self, x_half: ArrayView1<f64>, x_primes: ArrayView2<f64>) -> Option<f64> {
        let r = self.r.value(x_half)?;
        let mut sum = 0.0;
        for (i, (f, g)) in self.f.iter().zip(&self.g).enumerate() {
            sum += f.value(x_half) + g.value(x_primes.row(i))?;
        }
        Some(r + sum / self.n() as f64)
    }

    /// `x½ = prox_{αr}(z̄)`.
    pub fn prox_r(&self, zbar: ArrayView1<f64>, alpha: f64) -> Result<Array1<f64>> {
        let x = self.r.prox(zbar, alpha)?;
        check_output(&x, self.dim, Term::R, 0)?;
        Ok(x)
    }

    /// `x'_i = prox_{αg_i}(2x½ − z_i − α∇f_i(x½))`.
    ///
    /// Every solver routes its per-term update through here so that paired
    /// runs of different methods perform identical floating-point operations.
    pub fn x_prime(
        &self,
        i: usize,
        x_half: ArrayView1<f64>,
        z_i: ArrayView1<f64>,
        alpha: f64,
    ) -> Result<Array1<f64>> {
        let mut v = &x_half * 2.0 - &z_i;
        let f = &self.f[i];
        if !f.is_zero() {
            let grad = f.gradient(x_half);
            check_output(&grad, self.dim, Term::F, i)?;
            v.scaled_add(-alpha, &grad);
        }
        let x = self.g[i].prox(v.view(), alpha)?;
        check_output(&x, self.dim, Term::G, i)?;
        Ok(x)
    }
}

pub(crate) fn check_output(x: &Array1<f64>, dim: usize, term: Term, index: usize) -> Result<()> {
    if x.len() != dim {
        return Err(Error::Dimension {
            what: match term {
                Term::R => "prox of r output",
                Term::F => "gradient of f output",
                Term::G => "prox of g output",
            },
            expected: dim,
            found: x.len(),
        });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { term, index });
    }
    Ok(())
}

/// Row mean of `z` with a summation order fixed by `chunks` alone.
///
/// Rows are summed sequentially inside contiguous chunks of `⌈n/chunks⌉`
/// rows; the partial sums are then added in chunk order. Evaluating the
/// chunks in parallel changes nothing about the result.
pub fn mean_rows(z: ArrayView2<f64>, chunks: usize, parallel: bool) -> Array1<f64> {
    let (n, d) = z.dim();
    assert!(n > 0, "mean of an empty block");
    let chunk = n.div_ceil(chunks.max(1));
    let partial = |c: usize| {
        let lo = c * chunk;
        let hi = ((c + 1) * chunk).min(n);
        let mut acc = z.row(lo).to_owned();
        for row in z.slice(ndarray::s![lo + 1..hi, ..]).rows() {
            acc += &row;
        }
        acc
    };
    let n_chunks = n.div_ceil(chunk);
    let partials: Vec<Array1<f64>> = if parallel && n_chunks > 1 {
        (0..n_chunks).into_par_iter().map(partial).collect()
    } else {
        (0..n_chunks).map(partial).collect()
    };
    let mut total = Array1::zeros(d);
    let mut iter = partials.into_iter();
    if let Some(first) = iter.next() {
        total = first;
    }
    for p in iter {
        total += &p;
    }
    total / n as f64
}

/// The `z` iterates of PPG / S-PPG: one row per term plus a cached row mean.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    z: Array2<f64>,
    zbar: Array1<f64>,
    alpha: f64,
    k: usize,
}

impl SolverState {
    /// All rows zero.
    pub fn zeros(problem: &ProblemSpec, alpha: f64) -> Result<Self> {
        Self::from_rows(Array2::zeros((problem.n(), problem.dim())), alpha, problem)
    }

    /// Warm start from an explicit `n × d` block.
    pub fn from_rows(z: Array2<f64>, alpha: f64, problem: &ProblemSpec) -> Result<Self> {
        check_alpha(alpha)?;
        let (n, d) = z.dim();
        if n != problem.n() {
            return Err(Error::Dimension {
                what: "rows of z",
                expected: problem.n(),
                found: n,
            });
        }
        if d != problem.dim() {
            return Err(Error::Dimension {
                what: "columns of z",
                expected: problem.dim(),
                found: d,
            });
        }
        let zbar = mean_rows(z.view(), problem.reduction_chunks(), false);
        Ok(SolverState { z, zbar, alpha, k: 0 })
    }

    pub fn z(&self) -> ArrayView2<'_, f64> {
        self.z.view()
    }

    pub fn zbar(&self) -> ArrayView1<'_, f64> {
        self.zbar.view()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Iterations performed since construction.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.z.nrows()
    }

    pub fn dim(&self) -> usize {
        self.z.ncols()
    }

    pub(crate) fn parts_mut(&mut self) -> (&mut Array2<f64>, &mut Array1<f64>) {
        (&mut self.z, &mut self.zbar)
    }

    pub(crate) fn advance(&mut self) {
        self.k += 1;
    }

    /// Recompute `z̄` from the rows, returning `‖z̄_cached − mean(rows)‖`.
    pub fn resync(&mut self, chunks: usize) -> f64 {
        let fresh = mean_rows(self.z.view(), chunks, false);
        let drift = (&fresh - &self.zbar).mapv(|v| v * v).sum().sqrt();
        self.zbar = fresh;
        drift
    }

    /// `‖z − other‖_F`.
    pub fn distance_to(&self, other: ArrayView2<f64>) -> f64 {
        (&self.z - &other).mapv(|v| v * v).sum().sqrt()
    }

    pub fn into_rows(self) -> Array2<f64> {
        self.z
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::invalid(format!("step size must be positive and finite, got {alpha}")));
    }
    Ok(())
}

/// One row of diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub k: usize,
    /// Passes over the data: `k` for full-batch methods, `k / n` for stochastic ones.
    pub epoch: f64,
    /// `‖p(z^k)‖₂` over the stacked block (Frobenius norm).
    pub residual_norm: f64,
    /// Objective surrogate; absent when some term cannot report a value or the
    /// value is not finite.
    pub objective: Option<f64>,
    /// `‖x^{k+1/2} − x*‖²` against a supplied reference point.
    pub dist_to_ref: Option<f64>,
    /// Absent unless wall-clock recording was requested (it breaks byte-level
    /// reproducibility of the metrics file).
    pub wall_time_s: Option<f64>,
}

/// Output of [`residual_map`].
#[derive(Debug, Clone)]
pub struct Residual {
    /// `p_i = (x½ − x'_i) / α`.
    pub p: Array2<f64>,
    pub x_half: Array1<f64>,
    pub x_primes: Array2<f64>,
}

impl Residual {
    /// Frobenius norm of `p`.
    pub fn norm(&self) -> f64 {
        frobenius(self.p.view())
    }
}

/// Evaluate the fixed-point residual `p(z)` without touching `state`.
pub fn residual_map(state: &SolverState, problem: &ProblemSpec) -> Result<Residual> {
    if state.n() != problem.n() || state.dim() != problem.dim() {
        return Err(Error::Dimension {
            what: "solver state",
            expected: problem.n() * problem.dim(),
            found: state.n() * state.dim(),
        });
    }
    let alpha = state.alpha;
    let x_half = problem.prox_r(state.zbar.view(), alpha)?;
    let mut x_primes = Array2::zeros(state.z.raw_dim());
    for (i, mut out) in x_primes.axis_iter_mut(Axis(0)).enumerate() {
        let x = problem.x_prime(i, x_half.view(), state.z.row(i), alpha)?;
        out.assign(&x);
    }
    let p = (&x_half.view().insert_axis(Axis(0)) - &x_primes) / alpha;
    Ok(Residual { p, x_half, x_primes })
}

/// `E^k`-style gap: [`ProblemSpec::split_objective`] minus a reference
/// objective. Can be negative.
pub fn e_gap(
    x_half: ArrayView1<f64>,
    x_primes: ArrayView2<f64>,
    ref_objective: f64,
    problem: &ProblemSpec,
) -> Option<f64> {
    problem
        .split_objective(x_half, x_primes)
        .map(|v| v - ref_objective)
}

pub(crate) fn frobenius(a: ArrayView2<f64>) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub(crate) fn sq_dist(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}
