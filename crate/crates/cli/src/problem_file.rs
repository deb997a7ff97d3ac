// SPDX-License-Identifier: Apache-2.0

//! Problem description files.
//!
//! A problem file is a JSON object with a `kind` tag, hyperparameters and
//! paths to CSV or LIBSVM data. Relative paths are resolved against the
//! directory holding the JSON file. Indices are 0-based.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{Context, Result};
use ndarray::{Array1, ArrayView1};
use ppg_core::io::{read_dense_csv, read_libsvm, read_vector_csv};
use ppg_core::problems::{
    build_fused_lasso, build_glm, build_group_lasso, build_network_lasso, build_svm, build_svm_folded,
    greedy_edge_coloring, Graph, GroupPartition, SvmData,
};
use ppg_core::prox::functions::SquaredDistance;
use ppg_core::prox::GlmLink;
use ppg_core::{ProblemSpec, SmoothFn};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PartitionSpec {
    /// Collection `i` holds consecutive groups of `size` starting at `i·shift`.
    Staggered { n: usize, size: usize, shift: usize },
    Explicit { collections: Vec<Vec<Vec<usize>>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProblemFile {
    GroupLasso {
        a: PathBuf,
        b: PathBuf,
        lambda1: f64,
        partition: PartitionSpec,
    },
    Svm {
        data: PathBuf,
        lambda: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
    },
    FusedLasso {
        a: PathBuf,
        y: PathBuf,
        lambda: f64,
        /// Omitted or `null` for no chain constraint.
        #[serde(default)]
        eps: Option<f64>,
    },
    NetworkLasso {
        vertices: usize,
        edges: Vec<(usize, usize)>,
        /// `|V| × block` matrix; vertex `v` has loss `½‖x_v − targets_v‖²`.
        targets: PathBuf,
        lambda1: f64,
        lambda2: f64,
    },
    Glm {
        x: PathBuf,
        t: PathBuf,
        link: GlmLink,
    },
}

/// A built problem plus what the CLI needs to report on it.
pub struct LoadedProblem {
    pub kind: &'static str,
    pub terms: ProblemSpec,
    svm: Option<SvmData>,
}

impl LoadedProblem {
    /// SVM problems with `r` folded into every `g_i`, for methods that need
    /// `r = 0`. Other kinds return the problem unchanged.
    pub fn folded(&self) -> Result<ProblemSpec> {
        match &self.svm {
            Some(data) => Ok(build_svm_folded(data)?),
            None => Ok(self.terms.clone()),
        }
    }

    pub fn objective(&self, x: ArrayView1<f64>) -> Option<f64> {
        self.terms.objective(x)
    }
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

impl ProblemFile {
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("cannot read problem file {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("invalid problem file {}", path.display()))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ProblemFile::GroupLasso { .. } => "group-lasso",
            ProblemFile::Svm { .. } => "svm",
            ProblemFile::FusedLasso { .. } => "fused-lasso",
            ProblemFile::NetworkLasso { .. } => "network-lasso",
            ProblemFile::Glm { .. } => "glm",
        }
    }

    /// Load the data files, resolving relative paths against `base`.
    pub fn build(&self, base: &Path) -> Result<LoadedProblem> {
        let kind = self.kind();
        let mut svm = None;
        let terms = match self {
            ProblemFile::GroupLasso {
                a,
                b,
                lambda1,
                partition,
            } => {
                let a = read_dense_csv(resolve(base, a))?;
                let b = read_vector_csv(resolve(base, b))?;
                let partition = match partition {
                    PartitionSpec::Staggered { n, size, shift } => {
                        GroupPartition::staggered(a.ncols(), *n, *size, *shift)?
                    }
                    PartitionSpec::Explicit { collections } => GroupPartition::new(a.ncols(), collections.clone())?,
                };
                build_group_lasso(a, b, *lambda1, &partition)?
            }
            ProblemFile::Svm { data, lambda, dim } => {
                let (a, y) = read_libsvm(resolve(base, data), *dim)?;
                let data = SvmData::new(a, y, *lambda)?;
                let terms = build_svm(&data)?;
                svm = Some(data);
                terms
            }
            ProblemFile::FusedLasso { a, y, lambda, eps } => {
                let a = read_dense_csv(resolve(base, a))?;
                let y = read_vector_csv(resolve(base, y))?;
                build_fused_lasso(&a, &y, *lambda, eps.unwrap_or(f64::INFINITY))?
            }
            ProblemFile::NetworkLasso {
                vertices,
                edges,
                targets,
                lambda1,
                lambda2,
            } => {
                let graph = Graph::new(*vertices, edges.clone())?;
                let targets = read_dense_csv(resolve(base, targets))?;
                anyhow::ensure!(
                    targets.nrows() == *vertices,
                    "targets has {} rows but the graph has {} vertices",
                    targets.nrows(),
                    vertices
                );
                let losses = targets
                    .rows()
                    .into_iter()
                    .map(|c| Arc::new(SquaredDistance::new(1.0, c.to_owned())) as Arc<dyn SmoothFn>)
                    .collect();
                let coloring = greedy_edge_coloring(&graph);
                build_network_lasso(&graph, &coloring, losses, targets.ncols(), *lambda1, *lambda2)?
            }
            ProblemFile::Glm { x, t, link } => {
                let x = read_dense_csv(resolve(base, x))?;
                let t: Array1<f64> = read_vector_csv(resolve(base, t))?;
                build_glm(&x, &t, *link)?
            }
        };
        Ok(LoadedProblem { kind, terms, svm })
    }
}

/// Read and build the problem at `path`.
pub fn load(path: &Path) -> Result<LoadedProblem> {
    let file = ProblemFile::read(path)?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    file.build(base)
}
