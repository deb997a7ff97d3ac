// SPDX-License-Identifier: Apache-2.0

//! Synthetic data generators.
//!
//! Every generator draws from a `ChaCha8Rng` seeded with `seed`, so the same
//! parameters give identical arrays and identical files.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{ensure, Context, Result};
use ndarray::{Array1, Array2};
use ppg_core::io::{write_dense_csv, write_libsvm, write_vector_csv};
use ppg_core::problems::{greedy_edge_coloring, Graph, GroupPartition, SvmData};
use ppg_core::prox::GlmLink;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Bernoulli, Distribution, Poisson, StandardNormal};

use crate::problem_file::{PartitionSpec, ProblemFile};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(r: &mut ChaCha8Rng, shape: (usize, usize), scale: f64) -> Array2<f64> {
    Array2::from_shape_fn(shape, |_| scale * r.sample::<f64, _>(StandardNormal))
}

fn gaussian_vec(r: &mut ChaCha8Rng, len: usize, scale: f64) -> Array1<f64> {
    Array1::from_shape_fn(len, |_| scale * r.sample::<f64, _>(StandardNormal))
}

#[derive(Debug, Clone)]
pub struct GroupLassoParams {
    pub m: usize,
    pub d: usize,
    pub n: usize,
    pub group_size: usize,
    pub shift: usize,
    pub lambda1: f64,
    pub noise: f64,
    pub seed: u64,
}

impl Default for GroupLassoParams {
    fn default() -> Self {
        GroupLassoParams {
            m: 300,
            d: 42,
            n: 3,
            group_size: 9,
            shift: 3,
            lambda1: 0.1,
            noise: 0.1,
            seed: 0,
        }
    }
}

pub struct GroupLassoData {
    pub a: Array2<f64>,
    pub b: Array1<f64>,
    pub partition: GroupPartition,
    pub truth: Array1<f64>,
}

/// Gaussian `A` with unit-variance entries scaled by `1/√m`; the planted
/// solution is nonzero on every other group of the first collection.
pub fn group_lasso(p: &GroupLassoParams) -> Result<GroupLassoData> {
    ensure!(p.m > 0 && p.d > 0 && p.n > 0, "sizes must be positive");
    let partition = GroupPartition::staggered(p.d, p.n, p.group_size, p.shift)?;
    let mut r = rng(p.seed);
    let a = gaussian(&mut r, (p.m, p.d), 1.0 / (p.m as f64).sqrt());
    let mut truth = Array1::zeros(p.d);
    for group in partition.collection(0).iter().step_by(2) {
        for &j in group {
            truth[j] = r.sample::<f64, _>(StandardNormal);
        }
    }
    let b = a.dot(&truth) + gaussian_vec(&mut r, p.m, p.noise);
    Ok(GroupLassoData { a, b, partition, truth })
}

#[derive(Debug, Clone)]
pub struct SvmParams {
    pub n: usize,
    pub d: usize,
    pub lambda: f64,
    /// Probability of flipping each label.
    pub flip: f64,
    pub seed: u64,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            n: 8192,
            d: 128,
            lambda: 0.1,
            flip: 0.05,
            seed: 0,
        }
    }
}

/// Rows `a_i ~ N(0, I/d)`, labels `sign(a_iᵀw)` for a Gaussian `w`, each
/// flipped with probability `flip`.
pub fn svm(p: &SvmParams) -> Result<SvmData> {
    ensure!(p.n > 0 && p.d > 0, "sizes must be positive");
    ensure!((0.0..=1.0).contains(&p.flip), "flip probability must lie in [0, 1]");
    let mut r = rng(p.seed);
    let w = gaussian_vec(&mut r, p.d, 1.0);
    let a = gaussian(&mut r, (p.n, p.d), 1.0 / (p.d as f64).sqrt());
    let flip = Bernoulli::new(p.flip)?;
    let y = Array1::from_shape_fn(p.n, |i| {
        let s = if a.row(i).dot(&w) >= 0.0 { 1.0 } else { -1.0 };
        if flip.sample(&mut r) {
            -s
        } else {
            s
        }
    });
    Ok(SvmData::new(a, y, p.lambda)?)
}

#[derive(Debug, Clone)]
pub struct FusedParams {
    pub m: usize,
    pub d: usize,
    pub lambda: f64,
    pub eps: Option<f64>,
    pub noise: f64,
    pub seed: u64,
}

impl Default for FusedParams {
    fn default() -> Self {
        FusedParams {
            m: 100,
            d: 40,
            lambda: 0.05,
            eps: Some(0.1),
            noise: 0.1,
            seed: 0,
        }
    }
}

/// Gaussian design with a piecewise-constant truth of four segments.
pub fn fused(p: &FusedParams) -> Result<(Array2<f64>, Array1<f64>)> {
    ensure!(p.m > 0 && p.d > 0, "sizes must be positive");
    let mut r = rng(p.seed);
    let levels: Vec<f64> = (0..4).map(|_| r.sample::<f64, _>(StandardNormal)).collect();
    let truth = Array1::from_shape_fn(p.d, |j| levels[(4 * j / p.d).min(3)]);
    let a = gaussian(&mut r, (p.m, p.d), 1.0 / (p.d as f64).sqrt());
    let y = a.dot(&truth) + gaussian_vec(&mut r, p.m, p.noise);
    Ok((a, y))
}

#[derive(Debug, Clone)]
pub struct NetworkParams {
    /// Build the `k`-dimensional hypercube; otherwise a path.
    pub hypercube: Option<u32>,
    pub vertices: usize,
    pub block: usize,
    pub lambda1: f64,
    pub lambda2: f64,
    pub noise: f64,
    pub seed: u64,
}

impl Default for NetworkParams {
    fn default() -> Self {
        NetworkParams {
            hypercube: None,
            vertices: 16,
            block: 2,
            lambda1: 0.05,
            lambda2: 0.2,
            noise: 0.3,
            seed: 0,
        }
    }
}

pub struct NetworkData {
    pub graph: Graph,
    pub targets: Array2<f64>,
}

/// Each vertex gets a noisy copy of one of two cluster centres; vertices in
/// the first half of the ordering share the first centre.
pub fn network(p: &NetworkParams) -> Result<NetworkData> {
    ensure!(p.block > 0, "block dimension must be positive");
    let graph = match p.hypercube {
        Some(k) => Graph::hypercube(k),
        None => {
            ensure!(p.vertices > 0, "vertex count must be positive");
            Graph::path(p.vertices)
        }
    };
    let v = graph.n_vertices();
    let mut r = rng(p.seed);
    let centres = gaussian(&mut r, (2, p.block), 1.0);
    let mut targets = gaussian(&mut r, (v, p.block), p.noise);
    for (i, mut row) in targets.rows_mut().into_iter().enumerate() {
        row += &centres.row(usize::from(2 * i >= v));
    }
    Ok(NetworkData { graph, targets })
}

#[derive(Debug, Clone)]
pub struct GlmParams {
    pub n: usize,
    pub d: usize,
    pub link: GlmLink,
    pub seed: u64,
}

/// Gaussian features scaled by `1/√d`; responses drawn from the model at a
/// Gaussian coefficient vector.
pub fn glm(p: &GlmParams) -> Result<(Array2<f64>, Array1<f64>)> {
    ensure!(p.n > 0 && p.d > 0, "sizes must be positive");
    let mut r = rng(p.seed);
    let beta = gaussian_vec(&mut r, p.d, 1.0);
    let x = gaussian(&mut r, (p.n, p.d), 1.0 / (p.d as f64).sqrt());
    let eta = x.dot(&beta);
    let mut t = Array1::zeros(p.n);
    for (ti, &e) in t.iter_mut().zip(eta.iter()) {
        *ti = match p.link {
            GlmLink::Gaussian => e + 0.1 * r.sample::<f64, _>(StandardNormal),
            GlmLink::Logistic => f64::from(u8::from(Bernoulli::new(1.0 / (1.0 + (-e).exp()))?.sample(&mut r))),
            GlmLink::Poisson => Poisson::new(e.exp())?.sample(&mut r),
        };
    }
    Ok((x, t))
}

fn prepare(out_dir: &Path) -> Result<()> {
    fs::create_dir_all(out_dir).with_context(|| format!("cannot create {}", out_dir.display()))
}

fn finish(out_dir: &Path, problem: &ProblemFile) -> Result<PathBuf> {
    let path = out_dir.join("problem.json");
    let text = serde_json::to_string_pretty(problem)?;
    fs::write(&path, text + "\n").with_context(|| format!("cannot write {}", path.display()))?;
    Ok(path)
}

/// Write `A.csv`, `b.csv` and `problem.json`; returns the problem path.
pub fn write_group_lasso(out_dir: &Path, p: &GroupLassoParams) -> Result<PathBuf> {
    prepare(out_dir)?;
    let data = group_lasso(p)?;
    write_dense_csv(out_dir.join("A.csv"), data.a.view())?;
    write_vector_csv(out_dir.join("b.csv"), data.b.view())?;
    write_vector_csv(out_dir.join("truth.csv"), data.truth.view())?;
    finish(
        out_dir,
        &ProblemFile::GroupLasso {
            a: "A.csv".into(),
            b: "b.csv".into(),
            lambda1: p.lambda1,
            partition: PartitionSpec::Staggered {
                n: p.n,
                size: p.group_size,
                shift: p.shift,
            },
        },
    )
}

/// Write `train.svm` (LIBSVM format) and `problem.json`.
pub fn write_svm(out_dir: &Path, p: &SvmParams) -> Result<PathBuf> {
    prepare(out_dir)?;
    let data = svm(p)?;
    write_libsvm(out_dir.join("train.svm"), data.features().view(), data.labels().view())?;
    finish(
        out_dir,
        &ProblemFile::Svm {
            data: "train.svm".into(),
            lambda: p.lambda,
            dim: Some(p.d),
        },
    )
}

pub fn write_fused(out_dir: &Path, p: &FusedParams) -> Result<PathBuf> {
    prepare(out_dir)?;
    let (a, y) = fused(p)?;
    write_dense_csv(out_dir.join("A.csv"), a.view())?;
    write_vector_csv(out_dir.join("y.csv"), y.view())?;
    finish(
        out_dir,
        &ProblemFile::FusedLasso {
            a: "A.csv".into(),
            y: "y.csv".into(),
            lambda: p.lambda,
            eps: p.eps,
        },
    )
}

pub fn write_network(out_dir: &Path, p: &NetworkParams) -> Result<PathBuf> {
    prepare(out_dir)?;
    let data = network(p)?;
    write_dense_csv(out_dir.join("targets.csv"), data.targets.view())?;
    let coloring = greedy_edge_coloring(&data.graph);
    log::info!(
        "graph with {} vertices, {} edges, {} colors",
        data.graph.n_vertices(),
        data.graph.edges().len(),
        coloring.n_colors()
    );
    finish(
        out_dir,
        &ProblemFile::NetworkLasso {
            vertices: data.graph.n_vertices(),
            edges: data.graph.edges().to_vec(),
            targets: "targets.csv".into(),
            lambda1: p.lambda1,
            lambda2: p.lambda2,
        },
    )
}

pub fn write_glm(out_dir: &Path, p: &GlmParams) -> Result<PathBuf> {
    prepare(out_dir)?;
    let (x, t) = glm(p)?;
    write_dense_csv(out_dir.join("X.csv"), x.view())?;
    write_vector_csv(out_dir.join("T.csv"), t.view())?;
    finish(
        out_dir,
        &ProblemFile::Glm {
            x: "X.csv".into(),
            t: "T.csv".into(),
            link: p.link,
        },
    )
}
