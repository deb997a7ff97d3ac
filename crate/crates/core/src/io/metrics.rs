// SPDX-License-Identifier: Apache-2.0

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ResidualReport;

pub const METRICS_HEADER: &str = "k,epoch,wall_time_s,residual_norm,objective,dist_to_ref";

/// Run metadata written next to the metrics file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsMeta {
    pub solver: String,
    pub alpha: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem: Option<String>,
    pub version: String,
}

impl MetricsMeta {
    pub fn new(solver: impl Into<String>, alpha: f64, seed: Option<u64>) -> Self {
        MetricsMeta {
            solver: solver.into(),
            alpha,
            seed,
            problem: None,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

/// Ordered diagnostics of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsLog {
    meta: MetricsMeta,
    rows: Vec<ResidualReport>,
}

impl MetricsLog {
    pub fn new(meta: MetricsMeta) -> Self {
        MetricsLog { meta, rows: Vec::new() }
    }

    /// Append a row; `k` must be strictly larger than the previous one.
    pub fn push(&mut self, row: ResidualReport) -> Result<()> {
        if let Some(last) = self.rows.last() {
            if row.k <= last.k {
                return Err(Error::invalid(format!(
                    "metrics rows must have increasing k ({} after {})",
                    row.k, last.k
                )));
            }
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn rows(&self) -> &[ResidualReport] {
        &self.rows
    }

    pub fn last(&self) -> Option<&ResidualReport> {
        self.rows.last()
    }

    pub fn meta(&self) -> &MetricsMeta {
        &self.meta
    }

    pub fn meta_mut(&mut self) -> &mut MetricsMeta {
        &mut self.meta
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.16e}")).unwrap_or_default()
}

/// Write the rows under [`METRICS_HEADER`]. Absent values are empty fields.
pub fn write_metrics_csv(path: impl AsRef<Path>, log: &MetricsLog) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    writeln!(w, "{METRICS_HEADER}").map_err(io)?;
    for r in log.rows() {
        writeln!(
            w,
            "{},{:.16e},{},{:.16e},{},{}",
            r.k,
            r.epoch,
            opt(r.wall_time_s),
            r.residual_norm,
            opt(r.objective),
            opt(r.dist_to_ref)
        )
        .map_err(io)?;
    }
    w.flush().map_err(io)
}

/// Path of the metadata sidecar: `<metrics>.meta.json`.
pub fn meta_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

/// Write the CSV and its JSON metadata sidecar.
pub fn write_metrics(path: impl AsRef<Path>, log: &MetricsLog) -> Result<()> {
    let path = path.as_ref();
    write_metrics_csv(path, log)?;
    let side = meta_path(path);
    let json = serde_json::to_string_pretty(log.meta()).map_err(|e| Error::Numerical(e.to_string()))?;
    std::fs::write(&side, json + "\n").map_err(|e| Error::io(&side, e))
}

/// Read rows written by [`write_metrics_csv`].
pub fn read_metrics_csv(path: impl AsRef<Path>) -> Result<Vec<ResidualReport>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let perr = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == METRICS_HEADER => {}
        Some((_, h)) => return Err(perr(1, format!("unexpected header {h:?}"))),
        None => return Err(perr(1, "empty metrics file".into())),
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 6 {
            return Err(perr(lineno, format!("expected 6 fields, found {}", f.len())));
        }
        let num = |s: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .map_err(|_| perr(lineno, format!("non-numeric field {s:?}")))
        };
        let opt = |s: &str| -> Result<Option<f64>> {
            if s.trim().is_empty() {
                Ok(None)
            } else {
                num(s).map(Some)
            }
        };
        rows.push(ResidualReport {
            k: f[0]
                .trim()
                .parse()
                .map_err(|_| perr(lineno, format!("bad iteration index {:?}", f[0])))?,
            epoch: num(f[1])?,
            wall_time_s: opt(f[2])?,
            residual_norm: num(f[3])?,
            objective: opt(f[4])?,
            dist_to_ref: opt(f[5])?,
        });
    }
    Ok(rows)
}
