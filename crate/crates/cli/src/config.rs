// SPDX-License-Identifier: Apache-2.0

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

/// Environment variable read for the default thread count.
pub const THREADS_ENV: &str = "PPG_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Algo {
    Ppg,
    Sppg,
    ProxGrad,
    Admm,
    Spi,
    Finito,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Ppg => "ppg",
            Algo::Sppg => "sppg",
            Algo::ProxGrad => "prox-grad",
            Algo::Admm => "admm",
            Algo::Spi => "spi",
            Algo::Finito => "finito",
        }
    }

    /// Whether runs depend on the seed.
    pub fn is_stochastic(self) -> bool {
        matches!(self, Algo::Sppg | Algo::Spi | Algo::Finito)
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn default_max_iters() -> usize {
    1000
}

fn default_tol() -> f64 {
    1e-8
}

/// One solver run. Relative paths are resolved against the config file's
/// directory by [`RunConfig::load`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem_file: PathBuf,
    pub algo: Algo,
    /// Step size; `1/L` when omitted (`1.0` if no smooth terms).
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default)]
    pub record_every: Option<usize>,
    #[serde(default)]
    pub ergodic: bool,
    #[serde(default)]
    pub metrics_out: Option<PathBuf>,
    /// Constant `c` of the SPI schedule `α_k = c/k`; defaults to `alpha`, else 1.
    #[serde(default)]
    pub spi_c: Option<f64>,
    #[serde(default)]
    pub record_wall_time: bool,
    /// Series name used by `compare`; defaults to the algorithm name.
    #[serde(default)]
    pub label: Option<String>,
}

impl RunConfig {
    pub fn new(problem_file: impl Into<PathBuf>, algo: Algo) -> Self {
        RunConfig {
            problem_file: problem_file.into(),
            algo,
            alpha: None,
            tol: default_tol(),
            max_iters: default_max_iters(),
            seed: 0,
            threads: None,
            record_every: None,
            ergodic: false,
            metrics_out: None,
            spi_c: None,
            record_wall_time: false,
            label: None,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        let mut cfg: RunConfig =
            serde_json::from_str(&text).with_context(|| format!("invalid config {}", path.display()))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        if cfg.problem_file.is_relative() {
            cfg.problem_file = base.join(&cfg.problem_file);
        }
        if let Some(out) = &cfg.metrics_out {
            if out.is_relative() {
                cfg.metrics_out = Some(base.join(out));
            }
        }
        Ok(cfg)
    }

    pub fn label(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.algo.name().to_string())
    }

    /// `threads` from the config, else `PPG_THREADS`, else 1.
    pub fn resolved_threads(&self) -> Result<usize> {
        if let Some(t) = self.threads {
            return Ok(t);
        }
        match std::env::var(THREADS_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .with_context(|| format!("{THREADS_ENV}={v:?} is not a thread count")),
            Err(_) => Ok(1),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_in() {
        let cfg: RunConfig = serde_json::from_str(r#"{"problem_file":"p.json","algo":"prox-grad"}"#).unwrap();
        assert_eq!(cfg, RunConfig::new("p.json", Algo::ProxGrad));
        assert_eq!(cfg.label(), "prox-grad");
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"problem_file":"p","algo":"ppg","step":1}"#).is_err());
        assert!(serde_json::from_str::<RunConfig>(r#"{"problem_file":"p","algo":"sgd"}"#).is_err());
    }

    #[test]
    fn paths_resolve_against_config_dir() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        fs::write(&path, r#"{"problem_file":"p.json","algo":"ppg","metrics_out":"m.csv"}"#).unwrap();
        let cfg = RunConfig::load(&path).unwrap();
        assert_eq!(cfg.problem_file, dir.path().join("p.json"));
        assert_eq!(cfg.metrics_out, Some(dir.path().join("m.csv")));
    }
}
