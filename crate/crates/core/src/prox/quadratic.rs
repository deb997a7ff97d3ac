// SPDX-License-Identifier: Apache-2.0

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::error::{Error, Result};

/// Factorized `I + αAᵀA` together with `αAᵀb`, for the prox of `½‖Ax − b‖²`.
///
/// Tied to the `α` it was built with.
#[derive(Clone)]
pub struct CachedQuadraticProx {
    chol: Cholesky<f64, Dyn>,
    atb: Array1<f64>,
    alpha: f64,
}

impl std::fmt::Debug for CachedQuadraticProx {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CachedQuadraticProx")
            .field("dim", &self.atb.len())
            .field("alpha", &self.alpha)
            .finish()
    }
}

impl CachedQuadraticProx {
    pub fn new(a: ArrayView2<f64>, b: ArrayView1<f64>, alpha: f64) -> Result<Self> {
        if a.nrows() != b.len() {
            return Err(Error::Dimension {
                what: "rhs of least squares",
                expected: a.nrows(),
                found: b.len(),
            });
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::invalid(format!("step size must be positive, got {alpha}")));
        }
        let d = a.ncols();
        let gram = a.t().dot(&a);
        let system = DMatrix::from_fn(d, d, |i, j| {
            let v = alpha * gram[[i, j]];
            if i == j {
                1.0 + v
            } else {
                v
            }
        });
        let chol = Cholesky::new(system)
            .ok_or_else(|| Error::Numerical("Cholesky factorization of I + αAᵀA failed".into()))?;
        let atb = a.t().dot(&b) * alpha;
        Ok(CachedQuadraticProx { chol, atb, alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.atb.len()
    }

    /// Lower-triangular factor `L` with `LLᵀ = I + αAᵀA`.
    pub fn lower_factor(&self) -> Array2<f64> {
        let l = self.chol.l();
        Array2::from_shape_fn((l.nrows(), l.ncols()), |(i, j)| l[(i, j)])
    }
}

/// Solve `(I + αAᵀA) u = αAᵀb + v` with the cached factor.
pub fn prox_quadratic(cache: &CachedQuadraticProx, v: ArrayView1<f64>) -> Result<Array1<f64>> {
    if v.len() != cache.dim() {
        return Err(Error::Dimension {
            what: "quadratic prox input",
            expected: cache.dim(),
            found: v.len(),
        });
    }
    let rhs = DVector::from_iterator(v.len(), cache.atb.iter().zip(v.iter()).map(|(a, b)| a + b));
    let u = cache.chol.solve(&rhs);
    Ok(Array1::from_iter(u.iter().copied()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};

    #[test]
    fn zero_matrix_is_identity() {
        let a = Array2::zeros((4, 3));
        let cache = CachedQuadraticProx::new(a.view(), Array1::zeros(4).view(), 2.0).unwrap();
        let v = array![1.0, -2.0, 3.5];
        assert_eq!(prox_quadratic(&cache, v.view()).unwrap(), v);
    }

    #[test]
    fn identity_matrix_halves() {
        let a = Array2::eye(3);
        let cache = CachedQuadraticProx::new(a.view(), Array1::zeros(3).view(), 1.0).unwrap();
        let u = prox_quadratic(&cache, array![2.0, -4.0, 1.0].view()).unwrap();
        for (got, want) in u.iter().zip([1.0, -2.0, 0.5]) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn random_system_residual_and_factor() {
        let a = Array2::from_shape_fn((10, 5), |(i, j)| ((3 * i + 7 * j) as f64 * 0.37).sin());
        let b = Array1::from_shape_fn(10, |i| (i as f64).cos());
        let alpha = 0.7;
        let cache = CachedQuadraticProx::new(a.view(), b.view(), alpha).unwrap();
        let v = array![0.3, -1.0, 2.0, 0.0, 5.0];
        let u = prox_quadratic(&cache, v.view()).unwrap();
        let system = Array2::eye(5) + a.t().dot(&a) * alpha;
        let resid = system.dot(&u) - (a.t().dot(&b) * alpha + &v);
        assert!(resid.mapv(f64::abs).sum() <= 1e-9);

        let l = cache.lower_factor();
        let recon = l.dot(&l.t());
        let err = (&recon - &system).mapv(|x| x * x).sum().sqrt();
        let scale = system.mapv(|x| x * x).sum().sqrt();
        assert!(err <= 1e-8 * scale);
    }
}
