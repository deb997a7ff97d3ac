// SPDX-License-Identifier: Apache-2.0

//! Concrete terms for assembling problems.

use std::sync::{Arc, RwLock};

use ndarray::{Array1, Array2, ArrayView1};

use super::{
    prox_affine_1d, prox_glm_1d, prox_hinge, prox_quadratic, prox_scaled_sq_norm, soft_threshold_matrix,
    soft_threshold_scalar, soft_threshold_vector, CachedQuadraticProx, GlmLink, Interval, ScalarConvex,
};
use crate::error::{Error, Result};
use crate::model::{ProxFn, SmoothFn};

/// `λ‖x‖₁`.
#[derive(Debug, Clone, Copy)]
pub struct L1Norm {
    lam: f64,
}

impl L1Norm {
    pub fn new(lam: f64) -> Self {
        L1Norm { lam }
    }
}

impl ProxFn for L1Norm {
    fn prox(&self, x0: ArrayView1<f64>, alpha: f64) -> Result<Array1<f64>> {
        if self.lam == 0.0 {
            return Ok(x0.to_owned());
        }
        let t = alpha * self.lam;
        Ok(x0.mapv(|v| soft_threshold_scalar(v, t)))
    }

    fn value(&self, x: ArrayView1<f64>) -> Option<f64> {
        Some(self.lam * x.iter().map(|v| v.abs()).sum::<f64>())
    }

    fn is_zero(&self) -> bool {
        self.lam == 0.0
    }
}

/// `Σ_j |x_j − c|`.
#[derive(Debug, Clone, Copy)]
pub struct AbsShifted {
    center: f64,
}

impl AbsShifted {
    pub fn new(center: f64) -> Self {
        AbsShifted { center }
    }
}

impl ProxFn for AbsShifted {
    fn prox(&self, x0: ArrayView1<f64>, alpha: f64) -> Result<Array1<f64>> {
        Ok(x0.mapv(|v| self.center + soft_threshold_scalar(v - self.center, alpha)))
    }

    fn value(&self, x: ArrayView1<f64>) -> Option<f64> {
        Some(x.iter().map(|v| (v - self.center).abs()).sum())
    }
}

/// `λ‖x‖₂`.
#[derive(Debug, Clone, Copy)]
pub struct L2Norm {
    lam: f64,
}

impl L2Norm {
    pub fn new(lam: f64) -> Self {
        L2Norm { lam }
    }
}

impl ProxFn for L2Norm {
    fn prox(&self, x0: ArrayView1<f64>, alpha: f64) -> Result<Array1<f64>> {
        Ok(soft_threshold_vector(x0, alpha * self.lam))
    }

    fn value(&self, x: ArrayView1<f64>) -> Option<f64> {
        Some(self.lam * x.dot(&x).sqrt())
    }

    fn is_zero(&self) -> bool {
        self.lam == 0.0
    }
}

/// `(λ/2)‖x‖²`.
#[derive(Debug, Clone, Copy)]
pub struct SqNorm {
    lam: f64,
}

impl SqNorm {
    pub fn new(lam: f64) -> Self {
        SqNorm { lam }
    }

    pub fn lambda(&self) -> f64 {
        self.lam
    }
}

impl ProxFn for SqNorm {
    fn prox(&self, x0: ArrayView1<f64>, alpha: f64) -> Result<Array1<f64>> {
        Ok(prox_scaled_sq_norm(x0, self.lam, alpha))
    }

    fn value(&self, x: ArrayView1<f64>) -> Option<f64> {
        Some(0.5 * self.lam * x.dot(&x))
    }

    fn is_zero(&self) -> bool {
        self.lam == 0.0
    }
}

/// `(γ/2)‖x − c‖²`, usable as either a prox term or a smooth term.
#[derive(Debug, Clone)]
pub struct SquaredDistance {
    weight: f64,
    center: Array1<f64>,
}

impl SquaredDistance {
    pub fn new(weight: f64, center: Array1<f64>) -> Self {
        SquaredDistance { weight, center }
    }
}

impl ProxFn for SquaredDistance {
    fn prox(&self, x0: ArrayView1<f64>, alpha: f64) -> Result<Array1<f64>> {
        let aw = alpha * self.weight;
        Ok((&x0 + &(&self.center * aw)) / (1.0 + aw))
    }

    fn value(&self, x: ArrayView1<f64>) -> Option<f64> {
        Some(SmoothFn::value(self, x))
    }
}

impl SmoothFn for SquaredDistance {
    fn value(&self, x: ArrayView1<f64>) -> f64 {
        let diff = &x - &self.center;
        0.5 * self.weight * diff.dot(&diff)
    }

    fn gradient(&self, x: ArrayView1<f64>) -> Array1<f64> {
        (&x - &self.center) * self.weight
    }

    fn lipschitz(&self) -> f64 {
        self.weight
    }
}

/// `½‖x‖²` as a smooth term.
#[derive(Debug, Clone, Copy)]
pub struct HalfSquare;

impl SmoothFn for HalfSquare {
    fn value(&self, x: ArrayView1<f64>) -> f64 {
        0.5 * x.dot(&x)
    }

    fn gradient(&self, x: ArrayView1<f64>) -> Array1<f64> {
        x.to_owned()
    }

    fn lipschitz(&self) -> f64 {
        1.0
    }
}

/// `½(aᵀx − y)²`, gradient Lipschitz constant `‖a‖²`.
#[derive(Debug, Clone)]
pub struct LeastSquaresRow {
    a: Array1<f64>,
    y: f64,
    lipschitz: f64,
}

impl LeastSquaresRow {
    pub fn new(a: Array1<f64>, y: f64) -> Self {
        let lipschitz = a.dot(&a);
        LeastSquaresRow { a, y, lipschitz }
    }
}

impl SmoothFn for LeastSquaresRow {
    fn value(&self, x: ArrayView1<f64>) -> f64 {
        let r = self.a.dot(&x) - self.y;
        0.5 * r * r
    }

    fn gradient(&self, x: ArrayView1<f64>) -> Array1<f64> {
        &self.a * (self.a.dot(&x) - self.y)
    }

    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }
}

/// Indicator of a box `iv^d`.
#[derive(Debug, Clone, Copy)]
pub struct BoxIndicator {
    iv: Interval,
}

impl BoxIndicator {
    pub fn new(iv: Interval) -> Self {
        BoxIndicator { iv }
    }
}

impl ProxFn for BoxIndicator {
    fn prox(&self, x0: ArrayView1<f64>, _alpha: f64) -> Result<Array1<f64>> {
        Ok(super::project_interval_vec(x0, self.iv))
    }

    fn value(&self, x: ArrayView1<f64>) -> Option<f64> {
        Some(if x.iter().all(|&v| self.iv.contains(v)) {
            0.0
        } else {
            f64::INFINITY
        })
    }
}

/// `λ‖M‖_*` on a row-major flattened `rows × cols` matrix.
#[derive(Debug, Clone, Copy)]
pub struct NuclearNorm {
    rows: usize,
    cols: usize,
    lam: f64,
}

impl NuclearNorm {
    pub fn new(rows: usize, cols: usize, lam: f64) -> Self {
        NuclearNorm { rows, cols, lam }
    }

    fn shape(&self, x: ArrayView1<f64>) -> Result<Array2<f64>> {
        if x.len() != self.rows * self.cols {
            return Err(Error::Dimension {
                what: "flattened matrix",
                expected: self.rows * self.cols,
                found: x.len(),
            });
        }
        Ok(Array2::from_shape_fn((self.rows, self.cols), |(i, j)| x[i * self.cols + j]))
    }
}

impl ProxFn for NuclearNorm {
    fn prox(&self, x0: ArrayView1<f64>, alpha: f64) -> Result<Array1<f64>> {
        let m = self.shape(x0)?;
        let out = soft_threshold_matrix(m.view(), alpha * self.lam)?;
        Ok(Array1::from_iter(out.iter().copied()))
    }

    fn value(&self, x: ArrayView1<f64>) -> Option<f64> {
        let m = self.shape(x).ok()?;
        let dm = nalgebra::DMatrix::from_fn(self.rows, self.cols, |i, j| m[[i, j]]);
        Some(self.lam * dm.singular_values().sum())
    }
}

/// `max{1 − y aᵀx, 0}`.
#[derive(Debug, Clone)]
pub struct HingeLoss {
    a: Array1<f64>,
    y: f64,
}

impl HingeLoss {
    pub fn new(a: Array1<f64>, y: f64) -> Result<Self> {
        if a.iter().all(|&v| v == 0.0) {
            return Err(Error::invalid("hinge feature vector must be nonzero"));
        }
        Ok(HingeLoss { a, y })
    }
}

impl ProxFn for HingeLoss {
    fn prox(&self, x0: ArrayView1<f64>, alpha: f64) -> Result<Array1<f64>> {
        Ok(prox_hinge(x0, self.a.view(), self.y, alpha))
    }

    fn value(&self, x: ArrayView1<f64>) -> Option<f64> {
        Some((1.0 - self.y * self.a.dot(&x)).max(0.0))
    }
}

/// `h(x) + (λ/2)‖x‖²` for any prox term `h`.
///
/// `prox_{α(h + λ/2‖·‖²)}(x0) = prox_{α/(1+αλ) h}(x0 / (1 + αλ))`.
#[derive(Clone)]
pub struct PlusSqNorm {
    inner: Arc<dyn ProxFn>,
    lam: f64,
}

impl PlusSqNorm {
    pub fn new(inner: Arc<dyn ProxFn>, lam: f64) -> Self {
        PlusSqNorm { inner, lam }
    }
}

impl ProxFn for PlusSqNorm {
    fn prox(&self, x0: ArrayView1<f64>, alpha: f64) -> Result<Array1<f64>> {
        let scale = 1.0 + alpha * self.lam;
        self.inner.prox((&x0 / scale).view(), alpha / scale)
    }

    fn value(&self, x: ArrayView1<f64>) -> Option<f64> {
        Some(self.inner.value(x)? + 0.5 * self.lam * x.dot(&x))
    }

    fn is_zero(&self) -> bool {
        self.lam == 0.0 && self.inner.is_zero()
    }
}

/// `f(aᵀx)` for a scalar convex `f`.
#[derive(Clone)]
pub struct AffineComposite {
    a: Array1<f64>,
    f: Arc<dyn ScalarConvex>,
}

impl AffineComposite {
    pub fn new(a: Array1<f64>, f: Arc<dyn ScalarConvex>) -> Result<Self> {
        if a.iter().all(|&v| v == 0.0) {
            return Err(Error::invalid("affine direction must be nonzero"));
        }
        Ok(AffineComposite { a, f })
    }
}

impl ProxFn for AffineComposite {
    fn prox(&self, x0: ArrayView1<f64>, alpha: f64) -> Result<Array1<f64>> {
        prox_affine_1d(self.a.view(), self.f.as_ref(), x0, alpha)
    }

    fn value(&self, x: ArrayView1<f64>) -> Option<f64> {
        Some(self.f.value(self.a.dot(&x)))
    }
}

/// Negative log-likelihood term `A(xᵢᵀβ) − Tᵢ xᵢᵀβ` of a generalized linear model.
#[derive(Debug, Clone)]
pub struct GlmTerm {
    features: Array1<f64>,
    response: f64,
    link: GlmLink,
}

impl GlmTerm {
    pub fn new(features: Array1<f64>, response: f64, link: GlmLink) -> Self {
        GlmTerm {
            features,
            response,
            link,
        }
    }
}

impl ProxFn for GlmTerm {
    fn prox(&self, x0: ArrayView1<f64>, alpha: f64) -> Result<Array1<f64>> {
        prox_glm_1d(x0, self.features.view(), self.response, &self.link, alpha)
    }

    fn value(&self, x: ArrayView1<f64>) -> Option<f64> {
        let t = self.features.dot(&x);
        Some(self.link.value(t) - self.response * t)
    }
}

/// `½‖Ax − b‖²` as a prox term, backed by a Cholesky factor of `I + αAᵀA`.
///
/// The factor is rebuilt whenever the prox is requested with a different `α`.
pub struct LeastSquares {
    a: Array2<f64>,
    b: Array1<f64>,
    cache: RwLock<Option<Arc<CachedQuadraticProx>>>,
}

impl LeastSquares {
    pub fn new(a: Array2<f64>, b: Array1<f64>) -> Result<Self> {
        if a.nrows() != b.len() {
            return Err(Error::Dimension {
                what: "rhs of least squares",
                expected: a.nrows(),
                found: b.len(),
            });
        }
        Ok(LeastSquares {
            a,
            b,
            cache: RwLock::new(None),
        })
    }

    /// Build the factor for `alpha` now instead of on first use.
    pub fn with_alpha(self, alpha: f64) -> Result<Self> {
        self.cache_for(alpha)?;
        Ok(self)
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.a
    }

    pub fn rhs(&self) -> &Array1<f64> {
        &self.b
    }

    fn cache_for(&self, alpha: f64) -> Result<Arc<CachedQuadraticProx>> {
        if let Some(c) = self.cache.read().expect("cache lock").as_ref() {
            if c.alpha() == alpha {
                return Ok(Arc::clone(c));
            }
        }
        let fresh = Arc::new(CachedQuadraticProx::new(self.a.view(), self.b.view(), alpha)?);
        *self.cache.write().expect("cache lock") = Some(Arc::clone(&fresh));
        Ok(fresh)
    }
}

impl ProxFn for LeastSquares {
    fn prox(&self, x0: ArrayView1<f64>, alpha: f64) -> Result<Array1<f64>> {
        let cache = self.cache_for(alpha)?;
        prox_quadratic(&cache, x0)
    }

    fn value(&self, x: ArrayView1<f64>) -> Option<f64> {
        let r = self.a.dot(&x) - &self.b;
        Some(0.5 * r.dot(&r))
    }
}

/// `s·h` for a smooth term `h`.
#[derive(Clone)]
pub struct ScaledSmooth {
    inner: Arc<dyn SmoothFn>,
    scale: f64,
}

impl ScaledSmooth {
    pub fn new(inner: Arc<dyn SmoothFn>, scale: f64) -> Self {
        ScaledSmooth { inner, scale }
    }
}

impl SmoothFn for ScaledSmooth {
    fn value(&self, x: ArrayView1<f64>) -> f64 {
        self.scale * self.inner.value(x)
    }

    fn gradient(&self, x: ArrayView1<f64>) -> Array1<f64> {
        self.inner.gradient(x) * self.scale
    }

    fn lipschitz(&self) -> f64 {
        self.scale * self.inner.lipschitz()
    }

    fn is_zero(&self) -> bool {
        self.scale == 0.0 || self.inner.is_zero()
    }
}

/// `s·h` for a prox term `h`, `s > 0`: `prox_{α s h} = prox_h` at step `αs`.
#[derive(Clone)]
pub struct ScaledProx {
    inner: Arc<dyn ProxFn>,
    scale: f64,
}

impl ScaledProx {
    pub fn new(inner: Arc<dyn ProxFn>, scale: f64) -> Self {
        ScaledProx { inner, scale }
    }
}

impl ProxFn for ScaledProx {
    fn prox(&self, x0: ArrayView1<f64>, alpha: f64) -> Result<Array1<f64>> {
        self.inner.prox(x0, alpha * self.scale)
    }

    fn value(&self, x: ArrayView1<f64>) -> Option<f64> {
        let v = self.inner.value(x)?;
        // 0·∞ stays ∞ for indicators.
        Some(if v.is_infinite() { v } else { self.scale * v })
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }
}
