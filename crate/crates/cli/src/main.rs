// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use ppg_cli::compare::{compare, write_merged};
use ppg_cli::config::THREADS_ENV;
use ppg_cli::gen::{
    write_fused, write_glm, write_group_lasso, write_network, write_svm, FusedParams, GlmParams, GroupLassoParams,
    NetworkParams, SvmParams,
};
use ppg_cli::{load, solve, Algo, RunConfig};
use ppg_core::prox::GlmLink;

#[derive(Parser)]
#[command(name = "ppg", version, about = "Proximal-proximal-gradient solvers and experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate synthetic data and a problem file.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Solve one problem with one algorithm.
    Solve(SolveArgs),
    /// Run several configs on the same problem and merge their metrics.
    Compare(CompareArgs),
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Subcommand)]
enum GenKind {
    GroupLasso {
        #[arg(long, default_value_t = 300)]
        m: usize,
        #[arg(long, default_value_t = 42)]
        d: usize,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 9)]
        group_size: usize,
        #[arg(long, default_value_t = 3)]
        shift: usize,
        #[arg(long, default_value_t = 0.1)]
        lambda1: f64,
        #[arg(long, default_value_t = 0.1)]
        noise: f64,
        #[command(flatten)]
        common: Common,
    },
    Svm {
        #[arg(long, default_value_t = 8192)]
        n: usize,
        #[arg(long, default_value_t = 128)]
        d: usize,
        #[arg(long, default_value_t = 0.1)]
        lambda: f64,
        /// Probability of flipping each label.
        #[arg(long, default_value_t = 0.05)]
        flip: f64,
        #[command(flatten)]
        common: Common,
    },
    FusedLasso {
        #[arg(long, default_value_t = 100)]
        m: usize,
        #[arg(long, default_value_t = 40)]
        d: usize,
        #[arg(long, default_value_t = 0.05)]
        lambda: f64,
        /// Bound on adjacent differences; omit for none.
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long, default_value_t = 0.1)]
        noise: f64,
        #[command(flatten)]
        common: Common,
    },
    NetworkLasso {
        /// Path graph on this many vertices (ignored with --hypercube).
        #[arg(long, default_value_t = 16)]
        vertices: usize,
        /// Use the k-dimensional hypercube graph.
        #[arg(long)]
        hypercube: Option<u32>,
        #[arg(long, default_value_t = 2)]
        block: usize,
        #[arg(long, default_value_t = 0.05)]
        lambda1: f64,
        #[arg(long, default_value_t = 0.2)]
        lambda2: f64,
        #[arg(long, default_value_t = 0.3)]
        noise: f64,
        #[command(flatten)]
        common: Common,
    },
    Glm {
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        d: usize,
        #[arg(long, value_enum, default_value = "logistic")]
        link: LinkArg,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum LinkArg {
    Gaussian,
    Logistic,
    Poisson,
}

impl From<LinkArg> for GlmLink {
    fn from(l: LinkArg) -> Self {
        match l {
            LinkArg::Gaussian => GlmLink::Gaussian,
            LinkArg::Logistic => GlmLink::Logistic,
            LinkArg::Poisson => GlmLink::Poisson,
        }
    }
}

/// Fields that override the config file.
#[derive(Args)]
struct Overrides {
    #[arg(long)]
    problem: Option<PathBuf>,
    #[arg(long, value_enum)]
    algo: Option<Algo>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; defaults to $PPG_THREADS, else 1.
    #[arg(long, env = THREADS_ENV)]
    threads: Option<usize>,
    #[arg(long)]
    record_every: Option<usize>,
    #[arg(long)]
    ergodic: bool,
    #[arg(long)]
    metrics_out: Option<PathBuf>,
    /// Constant c of the SPI step c/k.
    #[arg(long)]
    spi_c: Option<f64>,
    #[arg(long)]
    record_wall_time: bool,
}

#[derive(Args)]
struct SolveArgs {
    /// Run config (JSON). Flags override its fields.
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args)]
struct CompareArgs {
    /// Run configs (JSON), at least two, all on the same problem.
    #[arg(long = "config", required = true)]
    configs: Vec<PathBuf>,
    /// Merged long-format CSV.
    #[arg(long)]
    out: PathBuf,
    /// Seeds per stochastic config; curves are averaged.
    #[arg(long, default_value_t = 1)]
    seeds: usize,
}

fn build_config(args: SolveArgs) -> Result<RunConfig> {
    let o = args.overrides;
    let mut cfg = match (&args.config, &o.problem, o.algo) {
        (Some(path), _, _) => RunConfig::load(path)?,
        (None, Some(problem), Some(algo)) => RunConfig::new(problem, algo),
        (None, _, _) => anyhow::bail!("give a config file, or both --problem and --algo"),
    };
    if let Some(p) = o.problem {
        cfg.problem_file = p;
    }
    if let Some(a) = o.algo {
        cfg.algo = a;
    }
    cfg.alpha = o.alpha.or(cfg.alpha);
    cfg.tol = o.tol.unwrap_or(cfg.tol);
    cfg.max_iters = o.max_iters.unwrap_or(cfg.max_iters);
    cfg.seed = o.seed.unwrap_or(cfg.seed);
    cfg.threads = o.threads.or(cfg.threads);
    cfg.record_every = o.record_every.or(cfg.record_every);
    cfg.ergodic |= o.ergodic;
    cfg.metrics_out = o.metrics_out.or(cfg.metrics_out);
    cfg.spi_c = o.spi_c.or(cfg.spi_c);
    cfg.record_wall_time |= o.record_wall_time;
    Ok(cfg)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.10e}")).unwrap_or_else(|| "unavailable".into())
}

fn run_gen(kind: GenKind) -> Result<PathBuf> {
    match kind {
        GenKind::GroupLasso {
            m,
            d,
            n,
            group_size,
            shift,
            lambda1,
            noise,
            common,
        } => write_group_lasso(
            &common.out_dir,
            &GroupLassoParams {
                m,
                d,
                n,
                group_size,
                shift,
                lambda1,
                noise,
                seed: common.seed,
            },
        ),
        GenKind::Svm {
            n,
            d,
            lambda,
            flip,
            common,
        } => write_svm(
            &common.out_dir,
            &SvmParams {
                n,
                d,
                lambda,
                flip,
                seed: common.seed,
            },
        ),
        GenKind::FusedLasso {
            m,
            d,
            lambda,
            eps,
            noise,
            common,
        } => write_fused(
            &common.out_dir,
            &FusedParams {
                m,
                d,
                lambda,
                eps,
                noise,
                seed: common.seed,
            },
        ),
        GenKind::NetworkLasso {
            vertices,
            hypercube,
            block,
            lambda1,
            lambda2,
            noise,
            common,
        } => write_network(
            &common.out_dir,
            &NetworkParams {
                hypercube,
                vertices,
                block,
                lambda1,
                lambda2,
                noise,
                seed: common.seed,
            },
        ),
        GenKind::Glm { n, d, link, common } => write_glm(
            &common.out_dir,
            &GlmParams {
                n,
                d,
                link: link.into(),
                seed: common.seed,
            },
        ),
    }
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Gen { kind } => {
            let path = run_gen(kind)?;
            println!("{}", path.display());
            Ok(0)
        }
        Command::Solve(args) => {
            let cfg = build_config(args)?;
            let problem = load(&cfg.problem_file)?;
            let res = solve(&cfg, &problem, None)?;
            println!(
                "algo={} alpha={} iterations={} converged={} objective={} residual={}",
                cfg.algo,
                res.alpha,
                res.output.iterations,
                res.converged(),
                fmt_opt(res.objective),
                fmt_opt(res.residual()),
            );
            Ok(res.exit_code())
        }
        Command::Compare(args) => {
            let configs = args
                .configs
                .iter()
                .map(|p| RunConfig::load(p))
                .collect::<Result<Vec<_>>>()?;
            let cmp = compare(&configs, args.seeds)?;
            write_merged(&args.out, &cmp).with_context(|| format!("writing {}", args.out.display()))?;
            for s in &cmp.series {
                let last = s.rows.last();
                println!(
                    "{} ({}): rows={} final_dist={}",
                    s.label,
                    s.algo,
                    s.rows.len(),
                    fmt_opt(last.and_then(|r| r.dist_to_ref.map(|d| d.mean)))
                );
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
