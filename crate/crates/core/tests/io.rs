// SPDX-License-Identifier: Apache-2.0

mod common;

use std::time::Instant;

use ndarray::{array, Array1, Array2};
use ppg_core::io::{
    meta_path, read_dense_csv, read_libsvm, read_metrics_csv, write_dense_csv, write_libsvm, write_metrics,
    write_metrics_csv, MetricsLog, MetricsMeta, METRICS_HEADER,
};
use ppg_core::{Error, ResidualReport};
use proptest::prelude::*;
use rand::Rng;

fn write(dir: &tempfile::TempDir, name: &str, body: &str) -> std::path::PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn dense_csv_examples() {
    let dir = tempfile::tempdir().unwrap();
    let m = read_dense_csv(write(&dir, "a.csv", "1,2\n3,4")).unwrap();
    assert_eq!(m, array![[1.0, 2.0], [3.0, 4.0]]);
    let m = read_dense_csv(write(&dir, "h.csv", "x,y\r\n1.5,-2\r\n")).unwrap();
    assert_eq!(m, array![[1.5, -2.0]]);
    assert!(matches!(read_dense_csv(write(&dir, "e.csv", "")), Err(Error::Parse { .. })));
    match read_dense_csv(write(&dir, "r.csv", "1,2\n3,4\n5\n")) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("expected parse error, got {other:?}"),
    }
    match read_dense_csv(write(&dir, "n.csv", "1,2\n3,abc\n")) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
        other => panic!("expected parse error, got {other:?}"),
    }
}

#[test]
fn million_cells_round_trip_bitwise() {
    let dir = tempfile::tempdir().unwrap();
    let mut r = common::rng(1);
    let m = Array2::from_shape_fn((1000, 1000), |_| {
        let v: f64 = r.random::<f64>() - 0.5;
        v * 10f64.powi(r.random_range(-30..30))
    });
    let path = dir.path().join("big.csv");
    write_dense_csv(&path, m.view()).unwrap();
    let back = read_dense_csv(&path).unwrap();
    assert!(m.iter().zip(back.iter()).all(|(a, b)| a.to_bits() == b.to_bits()));
}

#[test]
fn libsvm_examples() {
    let dir = tempfile::tempdir().unwrap();
    let (x, y) = read_libsvm(write(&dir, "a.svm", "+1 1:0.5 3:2\n"), Some(3)).unwrap();
    assert_eq!(x, array![[0.5, 0.0, 2.0]]);
    assert_eq!(y, array![1.0]);
    let (x, y) = read_libsvm(write(&dir, "b.svm", "-1\n"), Some(2)).unwrap();
    assert_eq!(x, array![[0.0, 0.0]]);
    assert_eq!(y, array![-1.0]);
    let (x, _) = read_libsvm(write(&dir, "c.svm", "1 4:1\n-1 2:3\n"), None).unwrap();
    assert_eq!(x.ncols(), 4);
    match read_libsvm(write(&dir, "d.svm", "1 1:1\n1 0:2\n"), None) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
        other => panic!("expected parse error, got {other:?}"),
    }
    assert!(read_libsvm(write(&dir, "e.svm", "1 2-3\n"), None).is_err());
}

#[test]
fn libsvm_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mut r = common::rng(2);
    let x = Array2::from_shape_fn((50, 7), |_| if r.random::<f64>() < 0.4 { r.random::<f64>() } else { 0.0 });
    let y = Array1::from_shape_fn(50, |i| if i % 3 == 0 { 1.0 } else { -1.0 });
    let path = dir.path().join("rt.svm");
    write_libsvm(&path, x.view(), y.view()).unwrap();
    let (bx, by) = read_libsvm(&path, Some(7)).unwrap();
    assert_eq!(bx, x);
    assert_eq!(by, y);
}

fn row(k: usize, v: f64) -> ResidualReport {
    ResidualReport {
        k,
        epoch: k as f64 / 3.0,
        residual_norm: v,
        objective: if k % 2 == 0 { Some(v.sin()) } else { None },
        dist_to_ref: Some(v * v),
        wall_time_s: None,
    }
}

#[test]
fn metrics_header_and_empty_log() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.csv");
    let log = MetricsLog::new(MetricsMeta::new("ppg", 0.5, None));
    write_metrics_csv(&path, &log).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap().trim_end(), METRICS_HEADER);
    assert!(read_metrics_csv(&path).unwrap().is_empty());
}

#[test]
fn metrics_round_trip_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.csv");
    let mut log = MetricsLog::new(MetricsMeta::new("sppg", 0.25, Some(9)));
    for k in 0..10 {
        log.push(row(k * 5, 1.0 / (k as f64 + 0.3))).unwrap();
    }
    assert!(log.push(row(45, 0.0)).is_err());
    write_metrics(&path, &log).unwrap();
    assert_eq!(read_metrics_csv(&path).unwrap(), log.rows());
    let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(meta_path(&path)).unwrap()).unwrap();
    assert_eq!(meta["solver"], "sppg");
    assert_eq!(meta["seed"], 9);
}

#[test]
fn ten_thousand_rows_write_quickly() {
    let dir = tempfile::tempdir().unwrap();
    let mut log = MetricsLog::new(MetricsMeta::new("ppg", 1.0, None));
    for k in 0..10_000 {
        log.push(row(k, (k as f64 + 1.0).recip())).unwrap();
    }
    let start = Instant::now();
    write_metrics_csv(dir.path().join("t.csv"), &log).unwrap();
    assert!(start.elapsed().as_secs_f64() < 1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn metrics_values_survive_round_trip(
        vals in proptest::collection::vec(proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO, 1..20)
    ) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.csv");
        let mut log = MetricsLog::new(MetricsMeta::new("ppg", 1.0, None));
        for (k, v) in vals.iter().enumerate() {
            log.push(ResidualReport {
                k,
                epoch: k as f64,
                residual_norm: v.abs(),
                objective: Some(*v),
                dist_to_ref: None,
                wall_time_s: None,
            }).unwrap();
        }
        write_metrics_csv(&path, &log).unwrap();
        let back = read_metrics_csv(&path).unwrap();
        for (a, b) in back.iter().zip(log.rows()) {
            prop_assert_eq!(a.objective.unwrap().to_bits(), b.objective.unwrap().to_bits());
            prop_assert_eq!(a.residual_norm.to_bits(), b.residual_norm.to_bits());
        }
    }
}
