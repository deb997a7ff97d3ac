// SPDX-License-Identifier: Apache-2.0

use ndarray::{Array1, Array2, Axis};

use super::require_no_f;
use crate::error::{Error, Result};
use crate::io::{MetricsLog, MetricsMeta};
use crate::model::{check_output, mean_rows, ProblemSpec, ResidualReport};
use crate::solver::{for_each_row, Executor, Recorder, RunOutput, SolveOptions};
use crate::Term;

/// Residuals observed by one ADMM iteration.
#[derive(Debug, Clone, Copy)]
pub struct AdmmStep {
    /// `‖x_i − z⁺‖` stacked over `i`.
    pub primal: f64,
    /// `√n ‖z⁺ − z‖`.
    pub dual: f64,
}

impl AdmmStep {
    /// `√(primal² + dual²) / α`.
    pub fn combined(&self, alpha: f64) -> f64 {
        self.primal.hypot(self.dual) / alpha
    }
}

/// Global-consensus ADMM with regularizer, scaled dual form, penalty `1/α`:
///
/// ```text
/// x_i ← prox_{αg_i}(z − u_i)
/// z   ← prox_{αr}(x̄ + ū)
/// u_i ← u_i + x_i − z
/// ```
pub struct ConsensusAdmm<'p> {
    problem: &'p ProblemSpec,
    x: Array2<f64>,
    u: Array2<f64>,
    z: Array1<f64>,
    alpha: f64,
    k: usize,
    exec: Executor,
}

impl<'p> ConsensusAdmm<'p> {
    pub fn new(problem: &'p ProblemSpec, alpha: f64, threads: usize) -> Result<Self> {
        let shape = (problem.n(), problem.dim());
        Self::from_parts(problem, alpha, Array1::zeros(shape.1), Array2::zeros(shape), threads)
    }

    /// Start from a given consensus point and scaled duals.
    pub fn from_parts(
        problem: &'p ProblemSpec,
        alpha: f64,
        z: Array1<f64>,
        u: Array2<f64>,
        threads: usize,
    ) -> Result<Self> {
        require_no_f(problem, "admm")?;
        crate::model::check_alpha(alpha)?;
        if z.len() != problem.dim() || u.dim() != (problem.n(), problem.dim()) {
            return Err(Error::Dimension {
                what: "ADMM warm start",
                expected: problem.n() * problem.dim(),
                found: u.len(),
            });
        }
        Ok(ConsensusAdmm {
            problem,
            x: Array2::zeros(u.raw_dim()),
            u,
            z,
            alpha,
            k: 0,
            exec: Executor::new(threads)?,
        })
    }

    pub fn z(&self) -> &Array1<f64> {
        &self.z
    }

    pub fn u(&self) -> &Array2<f64> {
        &self.u
    }

    pub fn x(&self) -> &Array2<f64> {
        &self.x
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn step(&mut self) -> Result<AdmmStep> {
        let ConsensusAdmm {
            problem,
            x,
            u,
            z,
            alpha,
            exec,
            ..
        } = self;
        let alpha = *alpha;
        let parallel = exec.parallel();
        let chunks = problem.reduction_chunks();
        let (results, xbar, ubar) = exec.install(|| {
            let u_ref = &*u;
            let z_ref = &*z;
            let results = for_each_row(x, None, parallel, |i, mut row, _| -> Result<()> {
                let v = z_ref - &u_ref.row(i);
                let xi = problem.g(i).prox(v.view(), alpha)?;
                check_output(&xi, problem.dim(), Term::G, i)?;
                row.assign(&xi);
                Ok(())
            });
            (
                results,
                mean_rows(x.view(), chunks, parallel),
                mean_rows(u.view(), chunks, parallel),
            )
        });
        results.into_iter().collect::<Result<Vec<()>>>()?;
        let z_new = problem.prox_r((&xbar + &ubar).view(), alpha)?;
        let mut primal = 0.0;
        for (mut ui, xi) in u.axis_iter_mut(Axis(0)).zip(x.axis_iter(Axis(0))) {
            let r = &xi - &z_new;
            primal += r.dot(&r);
            ui += &r;
        }
        let dual = (problem.n() as f64).sqrt() * crate::model::sq_dist(z_new.view(), z.view()).sqrt();
        *z = z_new;
        self.k += 1;
        Ok(AdmmStep {
            primal: primal.sqrt(),
            dual,
        })
    }
}

/// Run consensus ADMM; the `f_i` must all be zero.
pub fn consensus_admm_run(problem: &ProblemSpec, opts: &SolveOptions) -> Result<RunOutput> {
    require_no_f(problem, "admm")?;
    opts.validate_basic(problem)?;
    let every = opts.record_every.unwrap_or(1);
    let mut admm = ConsensusAdmm::new(problem, opts.alpha, opts.threads)?;
    let mut log = MetricsLog::new(MetricsMeta::new("admm", opts.alpha, None));
    let rec = Recorder::new(opts);
    let mut converged = false;
    let mut iterations = 0;
    for k in 0..opts.max_iters {
        let step = admm.step()?;
        iterations = k + 1;
        let res = step.combined(opts.alpha);
        let done = crate::solver::normalized(res, problem) <= opts.tol;
        if k % every == 0 || k + 1 == opts.max_iters || done {
            let objective = if opts.record_objective {
                crate::solver::finite(problem.objective(admm.z().view()))
            } else {
                None
            };
            log.push(ResidualReport {
                k,
                epoch: k as f64,
                residual_norm: res,
                objective,
                dist_to_ref: rec.dist(admm.z().view()),
                wall_time_s: rec.wall_time(),
            })?;
        }
        if done {
            converged = true;
            break;
        }
    }
    Ok(RunOutput {
        x_out: admm.z,
        log,
        ergodic: None,
        converged,
        iterations,
        final_state: None,
        drift_resyncs: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ProxFn, SmoothFn, SolverState, Zero};
    use crate::prox::functions::{AbsShifted, HalfSquare, L1Norm, SquaredDistance};
    use crate::solver::ppg_step;
    use ndarray::array;
    use std::sync::Arc;

    #[test]
    fn matches_ppg_after_substitution() {
        // With f = r = 0: ADMM's z equals PPG's x½ and u_i = z_i − x½.
        let g: Vec<Arc<dyn ProxFn>> = vec![Arc::new(L1Norm::new(1.0)), Arc::new(AbsShifted::new(2.0))];
        let p = ProblemSpec::nonsmooth(1, Arc::new(Zero), g).unwrap();
        let z0 = array![[0.7], [-1.1]];
        let mut ppg = SolverState::from_rows(z0.clone(), 0.6, &p).unwrap();
        let zbar = ppg.zbar().to_owned();
        let u0 = &z0 - &zbar;
        let mut admm = ConsensusAdmm::from_parts(&p, 0.6, zbar, u0, 1).unwrap();
        for _ in 0..5 {
            ppg_step(&mut ppg, &p).unwrap();
            admm.step().unwrap();
            let x_half = ppg.zbar().to_owned();
            assert!((admm.z()[0] - x_half[0]).abs() < 1e-12);
            for i in 0..2 {
                assert!((admm.u()[[i, 0]] - (ppg.z()[[i, 0]] - x_half[0])).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn single_term_converges_to_minimizer() {
        let g: Vec<Arc<dyn ProxFn>> = vec![Arc::new(SquaredDistance::new(1.0, array![1.0, -2.0]))];
        let p = ProblemSpec::nonsmooth(2, Arc::new(L1Norm::new(0.5)), g).unwrap();
        let out = consensus_admm_run(&p, &SolveOptions::new(1.0).max_iters(500).tol(1e-13)).unwrap();
        assert!(out.converged);
        assert!((out.x_out[0] - 0.5).abs() < 1e-9);
        assert!((out.x_out[1] + 1.5).abs() < 1e-9);
    }

    #[test]
    fn rejects_smooth_terms() {
        let f: Vec<Arc<dyn SmoothFn>> = vec![Arc::new(HalfSquare)];
        let p = ProblemSpec::smooth(1, Arc::new(Zero), f).unwrap();
        let err = consensus_admm_run(&p, &SolveOptions::new(1.0)).unwrap_err();
        assert!(err.to_string().contains("f_i"));
    }
}
