// SPDX-License-Identifier: Apache-2.0

mod common;

use std::sync::Arc;

use common::{group_lasso_data, max_abs_diff, prox_grad_oracle, randn, randn_mat, rng, smooth_checks};
use nalgebra::{DMatrix, DVector};
use ndarray::{array, Array1, Array2};
use ppg_core::problems::{
    build_fused_lasso, build_glm, build_group_lasso, build_network_lasso, build_svm, greedy_edge_coloring, Graph,
    GroupPartition, SvmData,
};
use ppg_core::prox::functions::SquaredDistance;
use ppg_core::prox::{soft_threshold_scalar, soft_threshold_vector, GlmLink};
use ppg_core::solver::Ppg;
use ppg_core::{ppg_run, ProblemSpec, SmoothFn, SolveOptions};

fn least_squares(a: &Array2<f64>, b: &Array1<f64>) -> Array1<f64> {
    let am = DMatrix::from_row_iterator(a.nrows(), a.ncols(), a.iter().copied());
    let bv = DVector::from_iterator(b.len(), b.iter().copied());
    let ata = am.transpose() * &am;
    let atb = am.transpose() * bv;
    let x = ata.cholesky().expect("full column rank").solve(&atb);
    Array1::from_iter(x.iter().copied())
}

fn builder_terms_pass_invariants(p: &ProblemSpec) {
    let d = p.dim();
    let worst = common::firm_nonexpansive_violation(p.r(), d, 100, 1);
    assert!(worst <= 1e-10, "r: slack {worst:e}");
    for i in 0..p.n() {
        let worst = common::firm_nonexpansive_violation(p.g(i), d, 100, 2 + i as u64);
        assert!(worst <= 1e-10, "g_{i}: slack {worst:e}");
        let (fd, lip) = smooth_checks(p.f(i), d, 20, 3 + i as u64);
        assert!(fd <= 1e-5 && lip <= 1.0 + 1e-12, "f_{i}: {fd:e} {lip}");
    }
}

#[test]
fn group_lasso_without_penalty_is_least_squares() {
    let (a, b) = group_lasso_data(1, 80, 12);
    let part = GroupPartition::staggered(12, 3, 4, 1).unwrap();
    let p = build_group_lasso(a.clone(), b.clone(), 0.0, &part).unwrap();
    let out = ppg_run(&p, &SolveOptions::new(20.0).max_iters(5000).tol(1e-14), None).unwrap();
    assert!(out.converged);
    assert!(max_abs_diff(&out.x_out, &least_squares(&a, &b)) <= 1e-8);
}

#[test]
fn single_group_matches_prox_gradient() {
    let (a, b) = group_lasso_data(2, 60, 8);
    let lam = 0.3;
    let part = GroupPartition::new(8, vec![vec![(0..8).collect()]]).unwrap();
    let p = build_group_lasso(a.clone(), b.clone(), lam, &part).unwrap();
    builder_terms_pass_invariants(&p);
    let out = ppg_run(&p, &SolveOptions::new(1.0).max_iters(20000).tol(1e-13), None).unwrap();
    assert!(out.converged);
    let step = 1.0 / a.t().dot(&a).diag().sum();
    let oracle = prox_grad_oracle(
        |x| a.t().dot(&(a.dot(x) - &b)),
        |v, s| soft_threshold_vector(v.view(), s * lam),
        Array1::zeros(8),
        step,
        200_000,
    );
    assert!(max_abs_diff(&out.x_out, &oracle) <= 1e-6);
}

#[test]
fn three_collection_partition_shape() {
    let part = GroupPartition::staggered(42, 3, 9, 3).unwrap();
    assert_eq!(part.complement(1), vec![0, 1, 2, 39, 40, 41]);
    let (a, b) = group_lasso_data(3, 300, 42);
    let p = build_group_lasso(a, b, 0.1, &part).unwrap();
    assert_eq!((p.n(), p.dim()), (3, 42));
    builder_terms_pass_invariants(&p);
}

#[test]
fn svm_objective_at_origin_is_one() {
    let mut r = rng(4);
    let a = randn_mat(&mut r, 20, 3, 1.0);
    let y = Array1::from_shape_fn(20, |i| if i % 2 == 0 { 1.0 } else { -1.0 });
    let data = SvmData::new(a, y, 0.5).unwrap();
    let p = build_svm(&data).unwrap();
    builder_terms_pass_invariants(&p);
    assert_eq!(p.objective(Array1::zeros(3).view()), Some(1.0));
}

#[test]
fn fused_without_chain_is_lasso() {
    let mut r = rng(5);
    let a = randn_mat(&mut r, 15, 6, 1.0);
    let y = randn(&mut r, 15, 1.0);
    let lam = 0.2;
    let p = build_fused_lasso(&a, &y, lam, f64::INFINITY).unwrap();
    assert_eq!(p.n(), 30);
    let alpha = 1.0 / p.max_lipschitz();
    let out = ppg_run(&p, &SolveOptions::new(alpha).max_iters(50000).tol(1e-13), None).unwrap();
    assert!(out.converged);
    let n = a.nrows() as f64;
    let step = n / a.t().dot(&a).diag().sum();
    let oracle = prox_grad_oracle(
        |x| a.t().dot(&(a.dot(x) - &y)) / n,
        |v, s| v.mapv(|t| soft_threshold_scalar(t, s * lam)),
        Array1::zeros(6),
        step,
        500_000,
    );
    assert!(max_abs_diff(&out.x_out, &oracle) <= 1e-6);
}

#[test]
fn fused_with_zero_tolerance_equalizes() {
    let mut r = rng(6);
    let a = randn_mat(&mut r, 20, 5, 1.0);
    let y = randn(&mut r, 20, 1.0);
    let p = build_fused_lasso(&a, &y, 0.05, 0.0).unwrap();
    builder_terms_pass_invariants(&p);
    let alpha = 1.0 / p.max_lipschitz();
    let out = ppg_run(&p, &SolveOptions::new(alpha).max_iters(100_000).tol(1e-12), None).unwrap();
    let spread = out.x_out.fold(f64::NEG_INFINITY, |m, &v| m.max(v)) - out.x_out.fold(f64::INFINITY, |m, &v| m.min(v));
    assert!(spread <= 1e-6, "spread {spread:e}");
}

fn quad(center: Array1<f64>) -> Arc<dyn SmoothFn> {
    Arc::new(SquaredDistance::new(1.0, center))
}

#[test]
fn network_without_edges_penalty_decouples() {
    let g = Graph::path(4);
    let col = greedy_edge_coloring(&g);
    let mut r = rng(7);
    let centers: Vec<Array1<f64>> = (0..4).map(|_| randn(&mut r, 2, 1.0)).collect();
    let lam1 = 0.3;
    let losses = centers.iter().cloned().map(quad).collect();
    let p = build_network_lasso(&g, &col, losses, 2, lam1, 0.0).unwrap();
    builder_terms_pass_invariants(&p);
    let out = ppg_run(&p, &SolveOptions::new(0.5).max_iters(5000).tol(1e-14), None).unwrap();
    for (v, c) in centers.iter().enumerate() {
        let oracle = prox_grad_oracle(
            |x| x - c,
            |u, s| u.mapv(|t| soft_threshold_scalar(t, s * lam1)),
            Array1::zeros(2),
            0.5,
            10_000,
        );
        let got = out.x_out.slice(ndarray::s![2 * v..2 * v + 2]).to_owned();
        assert!(max_abs_diff(&got, &oracle) <= 1e-8);
    }
}

#[test]
fn network_two_vertices_reach_consensus() {
    let g = Graph::path(2);
    let col = greedy_edge_coloring(&g);
    let losses = vec![quad(array![0.0]), quad(array![1.0])];
    let lam2 = 2.0;
    let p = build_network_lasso(&g, &col, losses, 1, 0.0, lam2).unwrap();
    let out = ppg_run(&p, &SolveOptions::new(0.5).max_iters(20000).tol(1e-13), None).unwrap();
    let (u, v) = (out.x_out[0], out.x_out[1]);
    assert!((u - v).abs() <= 1e-4);
    // Brute-force grid over the plane.
    let obj = |u: f64, v: f64| 0.5 * u * u + 0.5 * (v - 1.0) * (v - 1.0) + lam2 * (u - v).abs();
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 0..=400 {
        for j in 0..=400 {
            let (gu, gv) = (-0.5 + i as f64 * 0.005, -0.5 + j as f64 * 0.005);
            let val = obj(gu, gv);
            if val < best.0 {
                best = (val, gu, gv);
            }
        }
    }
    assert!((u - best.1).abs() <= 5e-3 && (v - best.2).abs() <= 5e-3);
    assert!(obj(u, v) <= best.0 + 1e-9);
}

#[test]
fn network_identical_losses_agree() {
    let g = Graph::hypercube(3);
    let col = greedy_edge_coloring(&g);
    col.verify(&g).unwrap();
    assert!(col.n_colors() <= 5);
    let losses = (0..8).map(|_| quad(array![1.0, -2.0])).collect();
    let p = build_network_lasso(&g, &col, losses, 2, 0.1, 0.3).unwrap();
    let out = ppg_run(&p, &SolveOptions::new(0.5).max_iters(5000).tol(1e-13), None).unwrap();
    for v in 1..8 {
        assert!((out.x_out[2 * v] - out.x_out[0]).abs() <= 1e-9);
        assert!((out.x_out[2 * v + 1] - out.x_out[1]).abs() <= 1e-9);
    }
}

#[test]
fn coloring_examples() {
    assert_eq!(greedy_edge_coloring(&Graph::path(2)).n_colors(), 1);
    assert_eq!(greedy_edge_coloring(&Graph::star(6)).n_colors(), 6);
}

#[test]
fn gaussian_glm_is_least_squares() {
    let mut r = rng(8);
    let x = randn_mat(&mut r, 30, 3, 1.0);
    let t = randn(&mut r, 30, 1.0);
    let p = build_glm(&x, &t, GlmLink::Gaussian).unwrap();
    builder_terms_pass_invariants(&p);
    let out = ppg_run(&p, &SolveOptions::new(1.0).max_iters(100_000).tol(1e-13), None).unwrap();
    assert!(out.converged);
    assert!(max_abs_diff(&out.x_out, &least_squares(&x, &t)) <= 1e-6);
}

#[test]
fn single_glm_term_reaches_its_minimizer() {
    let x = array![[1.0, 2.0]];
    let p = build_glm(&x, &array![0.7], GlmLink::Gaussian).unwrap();
    let out = ppg_run(&p, &SolveOptions::new(1.0).max_iters(1000).tol(1e-14), None).unwrap();
    assert!((out.x_out[0] + 2.0 * out.x_out[1] - 0.7).abs() <= 1e-10);
}

#[test]
fn logistic_glm_objective_decreases() {
    let x = array![[-2.0], [-1.0], [1.0], [2.0]];
    let t = array![0.0, 0.0, 1.0, 1.0];
    let p = build_glm(&x, &t, GlmLink::Logistic).unwrap();
    let mut ppg = Ppg::new(&p, 1.0, 1).unwrap();
    let mut objs = Vec::new();
    for _ in 0..300 {
        let step = ppg.step(false).unwrap();
        objs.push(p.objective(step.x_half.view()).unwrap());
    }
    assert!(objs.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    assert!(objs.last().unwrap() < &objs[0]);
}
