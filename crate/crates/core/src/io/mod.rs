// SPDX-License-Identifier: Apache-2.0

//! Dense CSV and LIBSVM readers/writers, plus the metrics log format.

mod metrics;

pub use metrics::{
    meta_path, read_metrics_csv, write_metrics, write_metrics_csv, MetricsLog, MetricsMeta, METRICS_HEADER,
};

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::error::{Error, Result};

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

/// Read a dense numeric matrix. A first row that does not parse as numbers
/// is treated as a header and skipped.
pub fn read_dense_csv(path: impl AsRef<Path>) -> Result<Array2<f64>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);

    let mut data = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for (idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(idx + 1, |p| p.line() as usize);
            parse_err(path, line, e.to_string())
        })?;
        let line = record.position().map_or(idx + 1, |p| p.line() as usize);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        let values = match parsed {
            Ok(v) => v,
            Err(_) if idx == 0 => continue,
            Err(_) => {
                let bad = record.iter().find(|f| f.parse::<f64>().is_err()).unwrap_or("");
                return Err(parse_err(path, line, format!("non-numeric field {bad:?}")));
            }
        };
        match cols {
            None => cols = Some(values.len()),
            Some(c) if c != values.len() => {
                return Err(parse_err(
                    path,
                    line,
                    format!("expected {c} fields, found {}", values.len()),
                ))
            }
            _ => {}
        }
        data.extend(values);
        rows += 1;
    }
    let cols = cols.ok_or_else(|| parse_err(path, 1, "no numeric rows"))?;
    Array2::from_shape_vec((rows, cols), data).map_err(|e| Error::Numerical(e.to_string()))
}

/// Write a dense matrix with full round-trip precision and no header.
pub fn write_dense_csv(path: impl AsRef<Path>, m: ArrayView2<f64>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = csv::WriterBuilder::new().from_writer(BufWriter::new(file));
    for row in m.rows() {
        writer
            .write_record(row.iter().map(|v| format!("{v:.16e}")))
            .map_err(|e| Error::io(path, std::io::Error::other(e)))?;
    }
    writer.flush().map_err(|e| Error::io(path, e))
}

/// Write a single vector as one value per line.
pub fn write_vector_csv(path: impl AsRef<Path>, v: ArrayView1<f64>) -> Result<()> {
    write_dense_csv(path, v.insert_axis(ndarray::Axis(1)))
}

/// Read a one-column (or one-row) file as a vector.
pub fn read_vector_csv(path: impl AsRef<Path>) -> Result<Array1<f64>> {
    let path = path.as_ref();
    let m = read_dense_csv(path)?;
    match m.dim() {
        (_, 1) => Ok(m.column(0).to_owned()),
        (1, _) => Ok(m.row(0).to_owned()),
        (r, c) => Err(parse_err(path, 1, format!("expected a vector, found a {r}x{c} matrix"))),
    }
}

/// Read LIBSVM-format data (`label idx:val ...`, 1-based indices).
///
/// With `dim = None` the width is the largest index seen.
pub fn read_libsvm(path: impl AsRef<Path>, dim: Option<usize>) -> Result<(Array2<f64>, Array1<f64>)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut labels = Vec::new();
    let mut entries: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut width = 0;
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let label = fields
            .next()
            .and_then(|l| l.parse::<f64>().ok())
            .ok_or_else(|| parse_err(path, lineno, "missing or non-numeric label"))?;
        let mut row = Vec::new();
        for field in fields {
            let (i, v) = field
                .split_once(':')
                .ok_or_else(|| parse_err(path, lineno, format!("expected idx:val, found {field:?}")))?;
            let i: usize = i
                .parse()
                .map_err(|_| parse_err(path, lineno, format!("bad feature index {i:?}")))?;
            if i == 0 {
                return Err(parse_err(path, lineno, "feature indices are 1-based"));
            }
            let v: f64 = v
                .parse()
                .map_err(|_| parse_err(path, lineno, format!("bad feature value {v:?}")))?;
            if let Some(d) = dim {
                if i > d {
                    return Err(parse_err(path, lineno, format!("feature index {i} exceeds dimension {d}")));
                }
            }
            width = width.max(i);
            row.push((i - 1, v));
        }
        labels.push(label);
        entries.push(row);
    }
    if labels.is_empty() {
        return Err(parse_err(path, 1, "no samples"));
    }
    let d = dim.unwrap_or(width);
    let mut x = Array2::zeros((labels.len(), d));
    for (r, row) in entries.into_iter().enumerate() {
        for (c, v) in row {
            x[[r, c]] = v;
        }
    }
    Ok((x, Array1::from(labels)))
}

/// Write LIBSVM format, skipping zero entries.
pub fn write_libsvm(path: impl AsRef<Path>, x: ArrayView2<f64>, y: ArrayView1<f64>) -> Result<()> {
    let path = path.as_ref();
    if x.nrows() != y.len() {
        return Err(Error::Dimension {
            what: "labels",
            expected: x.nrows(),
            found: y.len(),
        });
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    for (row, label) in x.rows().into_iter().zip(y.iter()) {
        write!(w, "{label}").map_err(io)?;
        for (j, v) in row.iter().enumerate() {
            if *v != 0.0 {
                write!(w, " {}:{v:.16e}", j + 1).map_err(io)?;
            }
        }
        writeln!(w).map_err(io)?;
    }
    w.flush().map_err(io)
}
