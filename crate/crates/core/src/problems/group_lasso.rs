// SPDX-License-Identifier: Apache-2.0

use std::sync::Arc;

use ndarray::{Array1, Array2, ArrayView1};

use crate::error::{Error, Result};
use crate::model::{ProblemSpec, ProxFn, SmoothFn, Zero};
use crate::prox::functions::LeastSquares;

/// Groups of coordinates split into `n` collections, each collection made of
/// pairwise disjoint groups. Indices are 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupPartition {
    dim: usize,
    collections: Vec<Vec<Vec<usize>>>,
}

impl GroupPartition {
    pub fn new(dim: usize, collections: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        let p = GroupPartition { dim, collections };
        p.verify()?;
        Ok(p)
    }

    /// Collection `i` holds consecutive groups of `size` starting at `i·shift`,
    /// as many as fit inside `0..dim`.
    pub fn staggered(dim: usize, n: usize, size: usize, shift: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::invalid("group size must be positive"));
        }
        let collections = (0..n)
            .map(|i| {
                let mut groups = Vec::new();
                let mut start = i * shift;
                while start + size <= dim {
                    groups.push((start..start + size).collect());
                    start += size;
                }
                groups
            })
            .collect();
        Self::new(dim, collections)
    }

    /// Check index ranges and disjointness within each collection.
    pub fn verify(&self) -> Result<()> {
        if self.collections.is_empty() {
            return Err(Error::invalid("partition has no collections"));
        }
        for (c, coll) in self.collections.iter().enumerate() {
            let mut seen = vec![false; self.dim];
            for group in coll {
                if group.is_empty() {
                    return Err(Error::invalid(format!("collection {c} contains an empty group")));
                }
                for &j in group {
                    if j >= self.dim {
                        return Err(Error::invalid(format!(
                            "index {j} in collection {c} is out of range for dimension {}",
                            self.dim
                        )));
                    }
                    if seen[j] {
                        return Err(Error::invalid(format!("groups overlap at index {j} in collection {c}")));
                    }
                    seen[j] = true;
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.collections.len()
    }

    pub fn collection(&self, i: usize) -> &[Vec<usize>] {
        &self.collections[i]
    }

    pub fn collections(&self) -> &[Vec<Vec<usize>>] {
        &self.collections
    }

    /// Indices not covered by any group of collection `i`.
    pub fn complement(&self, i: usize) -> Vec<usize> {
        let mut covered = vec![false; self.dim];
        for g in &self.collections[i] {
            for &j in g {
                covered[j] = true;
            }
        }
        (0..self.dim).filter(|&j| !covered[j]).collect()
    }

    /// Every group across all collections.
    pub fn all_groups(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.collections.iter().flatten()
    }
}

/// `λ Σ_G ‖x_G‖₂` over disjoint groups; coordinates outside every group are
/// left alone by the prox.
#[derive(Debug, Clone)]
pub struct GroupSoftThreshold {
    groups: Vec<Vec<usize>>,
    lam: f64,
}

impl GroupSoftThreshold {
    pub fn new(groups: Vec<Vec<usize>>, lam: f64) -> Self {
        GroupSoftThreshold { groups, lam }
    }
}

impl ProxFn for GroupSoftThreshold {
    fn prox(&self, x0: ArrayView1<f64>, alpha: f64) -> Result<Array1<f64>> {
        let mut out = x0.to_owned();
        let t = alpha * self.lam;
        for g in &self.groups {
            let norm = g.iter().map(|&j| x0[j] * x0[j]).sum::<f64>().sqrt();
            let scale = if norm <= t { 0.0 } else { 1.0 - t / norm };
            for &j in g {
                out[j] = x0[j] * scale;
            }
        }
        Ok(out)
    }

    fn value(&self, x: ArrayView1<f64>) -> Option<f64> {
        Some(
            self.lam
                * self
                    .groups
                    .iter()
                    .map(|g| g.iter().map(|&j| x[j] * x[j]).sum::<f64>().sqrt())
                    .sum::<f64>(),
        )
    }

    fn is_zero(&self) -> bool {
        self.lam == 0.0 || self.groups.is_empty()
    }
}

/// `½‖Ax − b‖² + λ₁ Σ_{G} ‖x_G‖₂` with `r` the quadratic and
/// `g_i = nλ₁ Σ_{G ∈ 𝒢_i} ‖x_G‖₂`.
pub fn build_group_lasso(
    a: Array2<f64>,
    b: Array1<f64>,
    lambda1: f64,
    partition: &GroupPartition,
) -> Result<ProblemSpec> {
    partition.verify()?;
    if a.ncols() != partition.dim() {
        return Err(Error::Dimension {
            what: "columns of A",
            expected: partition.dim(),
            found: a.ncols(),
        });
    }
    if !(lambda1 >= 0.0 && lambda1.is_finite()) {
        return Err(Error::invalid(format!("lambda1 must be nonnegative, got {lambda1}")));
    }
    let n = partition.n();
    let lambda2 = n as f64 * lambda1;
    let g: Vec<Arc<dyn ProxFn>> = partition
        .collections()
        .iter()
        .map(|c| Arc::new(GroupSoftThreshold::new(c.clone(), lambda2)) as Arc<dyn ProxFn>)
        .collect();
    let f: Vec<Arc<dyn SmoothFn>> = vec![Arc::new(Zero); n];
    ProblemSpec::new(partition.dim(), Arc::new(LeastSquares::new(a, b)?), f, g)
}
