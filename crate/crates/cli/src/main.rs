//! `advgame`: equilibria of the adversarial classification game from the
//! command line.
//!
//! Exit codes: 0 when every check passed, 2 when a numeric check failed,
//! 3 on invalid input.

mod commands;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use advgame::experiments::DemoSolver;
use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::*;
use output::{CliError, EXIT_INPUT, EXIT_TOLERANCE};

#[derive(Parser)]
#[command(name = "advgame", version, about = "Randomized classifiers against adversarial perturbations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON config (or the run.json of an earlier run).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the seed from the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Exact,
    Mw,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the two-classifier example on the real line and check its known values.
    Demo {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        solver: Option<SolverArg>,
        #[arg(long)]
        iters: Option<usize>,
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Best deterministic vs equilibrium randomized adversarial risk over a budget grid.
    SweepEpsilon {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        n_test: Option<usize>,
        #[arg(long)]
        samples: Option<usize>,
        /// Comma-separated budgets.
        #[arg(long, value_delimiter = ',')]
        epsilons: Option<Vec<f64>>,
        #[arg(long)]
        mw_iters: Option<usize>,
    },
    /// Oracle subgradient and regularized (FISTA) convergence traces.
    Convergence {
        #[command(flatten)]
        common: Common,
        /// Game tensor CSV (defaults to the built-in example).
        #[arg(long)]
        input: Option<PathBuf>,
        /// Comma-separated regularization strengths.
        #[arg(long, value_delimiter = ',')]
        alphas: Option<Vec<f64>>,
        #[arg(long)]
        oracle_iters: Option<usize>,
        #[arg(long)]
        fista_iters: Option<usize>,
    },
    /// Adversarial training of a mixture of logistic models.
    Train {
        #[command(flatten)]
        common: Common,
        /// Training CSV (defaults to synthetic data).
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long)]
        models: Option<usize>,
        #[arg(long)]
        iterations: Option<usize>,
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Empirical check of the sampling error bound.
    Bounds {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Generate a synthetic dataset (and optionally random linear classifiers).
    Gen {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        classifiers: Option<usize>,
    },
    /// Solve a game given as a loss tensor CSV and write its certificate.
    GameSolve {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_enum)]
        solver: Option<GameSolver>,
        /// Loss bound M of the tensor.
        #[arg(long)]
        bound: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        max_iters: Option<usize>,
    },
}

fn run(cli: Cli) -> Result<Failures, CliError> {
    match cli.command {
        Command::Demo { common, solver, iters, epsilon } => {
            let solver = solver.map(|s| match s {
                SolverArg::Exact => DemoSolver::Exact,
                SolverArg::Mw => DemoSolver::Mw,
            });
            demo(common.config.as_deref(), common.seed, &common.out, DemoArgs { solver, iters, epsilon })
        }
        Command::SweepEpsilon { common, n, n_test, samples, epsilons, mw_iters } => sweep(
            common.config.as_deref(),
            common.seed,
            &common.out,
            SweepArgs { n, n_test, samples, epsilons, mw_iters },
        ),
        Command::Convergence { common, input, alphas, oracle_iters, fista_iters } => convergence_cmd(
            common.config.as_deref(),
            common.seed,
            &common.out,
            ConvergenceArgs { input, alphas, oracle_iters, fista_iters },
        ),
        Command::Train { common, data, models, iterations, epsilon } => train_cmd(
            common.config.as_deref(),
            common.seed,
            &common.out,
            TrainArgs { data, models, iterations, epsilon },
        ),
        Command::Bounds { common, trials } => bounds_cmd(common.config.as_deref(), common.seed, &common.out, trials),
        Command::Gen { common, n, classifiers } => {
            gen_cmd(common.config.as_deref(), common.seed, &common.out, n, classifiers)
        }
        Command::GameSolve { common, input, solver, bound, tol, max_iters } => game_solve(
            common.config.as_deref(),
            common.seed,
            &common.out,
            GameSolveArgs { input, solver, bound, tol, max_iters },
        ),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(failures) if failures.is_empty() => ExitCode::SUCCESS,
        Ok(failures) => {
            for f in failures {
                eprintln!("check failed: {f}");
            }
            ExitCode::from(EXIT_TOLERANCE as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
