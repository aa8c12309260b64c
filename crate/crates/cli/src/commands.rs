//! Subcommand configs and runners. Every runner resolves and validates its
//! config, computes everything, and only then writes its artifacts.

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use advgame::bounds::{validate_statistical_bound, BoundFamily, BoundReport, BoundTrial};
use advgame::datagen::{gen_random_linear_classifiers, gen_synthetic, read_csv_path, write_csv, SyntheticSpec};
use advgame::experiments::{
    convergence, demo_motivating, sweep_epsilon, ConvergenceConfig, DemoSolver, SweepConfig,
};
use advgame::game::{motivating_instance, solve_equilibrium_mw_until, solve_exact_two, FiniteGame};
use advgame::model::{Metric, Mixture};
use advgame::trainer::{train_from, write_metrics_csv, MixtureModel, TrainConfig};
use serde::{Deserialize, Serialize};

use crate::output::{csv_line, load_config, opt, Artifacts, CliError, CliResult};
use crate::svg::{chart, Series, Style};

/// Checks that did not hold; a nonempty list maps to exit code 2.
pub type Failures = Vec<String>;

fn invalid(msg: impl std::fmt::Display) -> CliError {
    CliError::input(anyhow::anyhow!("{msg}"))
}

fn read_game(path: &Path, bound: f64) -> CliResult<FiniteGame> {
    let f = File::open(path).map_err(|e| invalid(format!("cannot open {}: {e}", path.display())))?;
    Ok(FiniteGame::read_csv(BufReader::new(f), bound)?)
}

// ---------------------------------------------------------------- demo

fn d_epsilon() -> f64 {
    1.0
}
fn d_demo_iters() -> usize {
    5000
}
fn d_exact() -> DemoSolver {
    DemoSolver::Exact
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemoConfig {
    #[serde(default = "d_epsilon")]
    pub epsilon: f64,
    #[serde(default = "d_exact")]
    pub solver: DemoSolver,
    #[serde(default = "d_demo_iters")]
    pub iters: usize,
    #[serde(default)]
    pub seed: u64,
}

impl Default for DemoConfig {
    fn default() -> Self {
        Self { epsilon: d_epsilon(), solver: d_exact(), iters: d_demo_iters(), seed: 0 }
    }
}

pub struct DemoArgs {
    pub solver: Option<DemoSolver>,
    pub iters: Option<usize>,
    pub epsilon: Option<f64>,
}

pub fn demo(config: Option<&Path>, seed: Option<u64>, out: &Path, args: DemoArgs) -> CliResult<Failures> {
    let mut cfg: DemoConfig = load_config(config, "demo")?;
    cfg.solver = args.solver.unwrap_or(cfg.solver);
    cfg.iters = args.iters.unwrap_or(cfg.iters);
    cfg.epsilon = args.epsilon.unwrap_or(cfg.epsilon);
    cfg.seed = seed.unwrap_or(cfg.seed);
    if !(cfg.epsilon >= 0.0 && cfg.epsilon.is_finite()) {
        return Err(invalid(format!("epsilon must be >= 0, got {}", cfg.epsilon)));
    }
    if cfg.iters == 0 {
        return Err(invalid("iters must be >= 1"));
    }

    let report = demo_motivating(cfg.epsilon, cfg.solver, cfg.iters)?;
    println!("standard risks:            {:?}", report.standard_risks);
    println!("pure adversarial risks:    {:?}", report.pure_adversarial_risks);
    println!("equilibrium value:         {}", report.value);
    println!("equilibrium lambda:        {:?}", report.lambda);
    println!("duality gap:               {}", report.gap);
    let mut failures = Vec::new();
    let mut csv = csv_line(["check", "expected", "actual", "tolerance", "passed"].map(String::from));
    for c in &report.checks {
        println!("{:<4} {} (expected {}, got {}, tol {})", if c.passed { "ok" } else { "FAIL" }, c.name, c.expected, c.actual, c.tolerance);
        if !c.passed {
            failures.push(format!("{}: expected {} got {}", c.name, c.expected, c.actual));
        }
        csv.push_str(&csv_line([
            c.name.clone(),
            c.expected.to_string(),
            c.actual.to_string(),
            c.tolerance.to_string(),
            c.passed.to_string(),
        ]));
    }

    let game = motivating_instance_game(cfg.epsilon)?;
    let curve: Vec<(f64, f64)> = (0..=200)
        .map(|s| {
            let a = s as f64 / 200.0;
            let v = game.primal_value(&Mixture::new(vec![a, 1.0 - a]).expect("valid mixture")).expect("valid game");
            (a, v)
        })
        .collect();
    let svg = chart(
        "Adversarial risk of the mixture (a, 1 - a)",
        "weight a on the first classifier",
        "adversarial risk",
        &[Series::new("risk", curve)],
        Style::Lines,
    );
    let mut art = Artifacts::new();
    art.add("results.csv", csv);
    art.add_json("results.json", &report)?;
    art.add("plot.svg", svg);
    art.write(out, "demo", cfg.seed, &cfg)?;
    Ok(failures)
}

fn motivating_instance_game(epsilon: f64) -> CliResult<FiniteGame> {
    if epsilon == 1.0 {
        return Ok(motivating_instance().game);
    }
    Ok(advgame::game::motivating_instance_with_epsilon(epsilon)?.game)
}

// ---------------------------------------------------------------- sweep

pub struct SweepArgs {
    pub n: Option<usize>,
    pub n_test: Option<usize>,
    pub samples: Option<usize>,
    pub epsilons: Option<Vec<f64>>,
    pub mw_iters: Option<usize>,
}

pub fn sweep(config: Option<&Path>, seed: Option<u64>, out: &Path, args: SweepArgs) -> CliResult<Failures> {
    let mut cfg: SweepConfig = load_config(config, "sweep-epsilon")?;
    cfg.n = args.n.unwrap_or(cfg.n);
    cfg.n_test = args.n_test.unwrap_or(cfg.n_test);
    cfg.samples = args.samples.unwrap_or(cfg.samples);
    cfg.epsilons = args.epsilons.unwrap_or(cfg.epsilons);
    cfg.mw_iters = args.mw_iters.unwrap_or(cfg.mw_iters);
    cfg.seed = seed.unwrap_or(cfg.seed);
    cfg.validate()?;

    let (clfs, rows) = sweep_epsilon(&cfg)?;
    let mut failures = Vec::new();
    let mut csv = csv_line(
        ["epsilon", "deterministic", "randomized", "gap", "deterministic_out", "randomized_out"].map(String::from),
    );
    for r in &rows {
        println!(
            "eps {:<6} deterministic {:.4}  randomized {:.4}  (gap {:.2e})",
            r.epsilon, r.deterministic, r.randomized, r.gap
        );
        if r.randomized > r.deterministic + 1e-12 {
            failures.push(format!("randomized risk exceeds deterministic at epsilon {}", r.epsilon));
        }
        csv.push_str(&csv_line([
            r.epsilon.to_string(),
            r.deterministic.to_string(),
            r.randomized.to_string(),
            r.gap.to_string(),
            opt(r.deterministic_out),
            opt(r.randomized_out),
        ]));
    }
    let mut series = vec![
        Series::new("deterministic", rows.iter().map(|r| (r.epsilon, r.deterministic)).collect()),
        Series::new("randomized", rows.iter().map(|r| (r.epsilon, r.randomized)).collect()),
    ];
    if cfg.n_test > 0 {
        series.push(
            Series::new("deterministic (test)", rows.iter().filter_map(|r| Some((r.epsilon, r.deterministic_out?))).collect())
                .dashed(),
        );
        series.push(
            Series::new("randomized (test)", rows.iter().filter_map(|r| Some((r.epsilon, r.randomized_out?))).collect())
                .dashed(),
        );
    }
    let svg = chart("Adversarial risk against budget", "epsilon", "adversarial risk", &series, Style::Lines);
    let mut art = Artifacts::new();
    art.add("results.csv", csv);
    art.add_json("results.json", &serde_json::json!({ "classifiers": clfs, "rows": rows }))?;
    art.add("plot.svg", svg);
    art.write(out, "sweep-epsilon", cfg.seed, &cfg)?;
    Ok(failures)
}

// ---------------------------------------------------------------- convergence

fn d_bound() -> f64 {
    1.0
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceCmdConfig {
    /// Game tensor CSV; the built-in two-classifier example when absent.
    #[serde(default)]
    pub input: Option<PathBuf>,
    #[serde(default = "d_bound")]
    pub bound: f64,
    #[serde(flatten)]
    pub run: ConvergenceConfig,
}

impl Default for ConvergenceCmdConfig {
    fn default() -> Self {
        Self { input: None, bound: d_bound(), run: ConvergenceConfig::default() }
    }
}

pub struct ConvergenceArgs {
    pub input: Option<PathBuf>,
    pub alphas: Option<Vec<f64>>,
    pub oracle_iters: Option<usize>,
    pub fista_iters: Option<usize>,
}

pub fn convergence_cmd(config: Option<&Path>, seed: Option<u64>, out: &Path, args: ConvergenceArgs) -> CliResult<Failures> {
    let mut cfg: ConvergenceCmdConfig = load_config(config, "convergence")?;
    cfg.input = args.input.or(cfg.input);
    cfg.run.alphas = args.alphas.unwrap_or(cfg.run.alphas);
    cfg.run.oracle_iters = args.oracle_iters.unwrap_or(cfg.run.oracle_iters);
    cfg.run.fista_iters = args.fista_iters.unwrap_or(cfg.run.fista_iters);
    cfg.run.seed = seed.unwrap_or(cfg.run.seed);
    cfg.run.validate()?;
    let game = match &cfg.input {
        Some(p) => read_game(p, cfg.bound)?,
        None => motivating_instance().game,
    };

    let report = convergence(&game, &cfg.run)?;
    let mut failures = Vec::new();
    let mut by_alpha: Vec<(f64, f64)> =
        report.summaries.iter().filter_map(|s| Some((s.alpha?, s.final_value))).collect();
    by_alpha.sort_by(|a, b| b.0.total_cmp(&a.0));
    for s in &report.summaries {
        println!("{:<14} final {:.6}  primal {:.6}", s.series, s.final_value, s.final_primal);
    }
    if by_alpha.windows(2).any(|w| w[1].1 < w[0].1 - 1e-12) {
        failures.push("regularized values are not monotone in alpha".into());
    }
    let oracle_best = report.summaries[0].final_value;
    if by_alpha.iter().any(|(_, v)| *v > oracle_best + 1e-9) {
        failures.push("a regularized value exceeds the oracle value".into());
    }

    let mut csv = csv_line(["series", "iter", "value", "gap_estimate"].map(String::from));
    for r in &report.rows {
        csv.push_str(&csv_line([r.series.clone(), r.iter.to_string(), r.value.to_string(), r.gap_estimate.to_string()]));
    }
    let mut names: Vec<&str> = Vec::new();
    for r in &report.rows {
        if !names.contains(&r.series.as_str()) {
            names.push(&r.series);
        }
    }
    let series: Vec<Series> = names
        .iter()
        .map(|n| {
            Series::new(
                *n,
                report.rows.iter().filter(|r| r.series == *n).map(|r| (r.iter as f64, r.value)).collect(),
            )
        })
        .collect();
    let svg = chart("Convergence", "iteration", "objective value", &series, Style::Lines);
    let mut art = Artifacts::new();
    art.add("results.csv", csv);
    art.add_json(
        "results.json",
        &serde_json::json!({ "summaries": report.summaries, "dual_lower_bound": report.dual_lower_bound }),
    )?;
    art.add("plot.svg", svg);
    art.write(out, "convergence", cfg.run.seed, &cfg)?;
    Ok(failures)
}

// ---------------------------------------------------------------- train

fn d_train_n() -> usize {
    1000
}
fn d_train() -> TrainConfig {
    let mut c = TrainConfig::new(3, 1503, 1.0);
    c.lr_model = 0.5;
    c
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainCmdConfig {
    /// Training CSV; synthetic data of size `n` when absent.
    #[serde(default)]
    pub data: Option<PathBuf>,
    /// Evaluation CSV; a fresh synthetic sample of size `n_test` when absent
    /// (0 evaluates on the training data).
    #[serde(default)]
    pub test_data: Option<PathBuf>,
    #[serde(default = "d_train_n")]
    pub n: usize,
    #[serde(default = "d_train_n")]
    pub n_test: usize,
    #[serde(default = "d_train")]
    pub train: TrainConfig,
}

impl Default for TrainCmdConfig {
    fn default() -> Self {
        Self { data: None, test_data: None, n: d_train_n(), n_test: d_train_n(), train: d_train() }
    }
}

pub struct TrainArgs {
    pub data: Option<PathBuf>,
    pub models: Option<usize>,
    pub iterations: Option<usize>,
    pub epsilon: Option<f64>,
}

pub fn train_cmd(config: Option<&Path>, seed: Option<u64>, out: &Path, args: TrainArgs) -> CliResult<Failures> {
    let mut cfg: TrainCmdConfig = load_config(config, "train")?;
    cfg.data = args.data.or(cfg.data);
    cfg.train.models = args.models.unwrap_or(cfg.train.models);
    cfg.train.iterations = args.iterations.unwrap_or(cfg.train.iterations);
    cfg.train.epsilon = args.epsilon.unwrap_or(cfg.train.epsilon);
    cfg.train.seed = seed.unwrap_or(cfg.train.seed);
    cfg.train.validate()?;
    let s = cfg.train.seed;
    let data = match &cfg.data {
        Some(p) => read_csv_path(p, Metric::L2, 0.0)?,
        None => {
            if cfg.n == 0 {
                return Err(invalid("n must be >= 1"));
            }
            gen_synthetic(&SyntheticSpec { n: cfg.n, seed: advgame::rng::sub_seed(s, 11) })?
        }
    };
    let test = match &cfg.test_data {
        Some(p) => Some(read_csv_path(p, Metric::L2, 0.0)?),
        None if cfg.n_test > 0 => Some(gen_synthetic(&SyntheticSpec { n: cfg.n_test, seed: advgame::rng::sub_seed(s, 12) })?),
        None => None,
    };

    let init = MixtureModel::init_logistic(cfg.train.models, data.dim(), cfg.train.init_scale, advgame::rng::sub_seed(s, 13))?;
    let (model, trace) = train_from(&data, test.as_ref(), init, &cfg.train)?;
    let last = trace.last().expect("trace has an initial row");
    println!("standard accuracy {:.4}  robust accuracy {:.4}  lambda {:?}", last.standard_acc, last.robust_acc, last.lambda);
    let mut failures = Vec::new();
    if trace.iter().any(|r| r.robust_acc > r.standard_acc + 1e-12) {
        failures.push("robust accuracy exceeds standard accuracy".into());
    }
    let mut csv = Vec::new();
    write_metrics_csv(&trace, &mut csv)?;
    let svg = chart(
        "Accuracy during training",
        "iteration",
        "accuracy",
        &[
            Series::new("standard", trace.iter().map(|r| (r.iter as f64, r.standard_acc)).collect()),
            Series::new("robust", trace.iter().map(|r| (r.iter as f64, r.robust_acc)).collect()),
        ],
        Style::Lines,
    );
    let mut art = Artifacts::new();
    art.add("results.csv", String::from_utf8(csv).map_err(CliError::other)?);
    art.add_json("results.json", &serde_json::json!({ "final": last, "trace": trace }))?;
    art.add_json("checkpoint.json", &model)?;
    art.add("plot.svg", svg);
    art.write(out, "train", s, &cfg)?;
    Ok(failures)
}

// ---------------------------------------------------------------- bounds

fn d_trials() -> usize {
    200
}
fn d_delta() -> f64 {
    0.05
}
fn d_sizes() -> Vec<usize> {
    vec![5, 20, 80]
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsCmdConfig {
    #[serde(default)]
    pub family: BoundFamily,
    #[serde(default = "d_trials")]
    pub trials: usize,
    #[serde(default = "d_delta")]
    pub delta: f64,
    /// Values of `m`; each overrides `family.samples`.
    #[serde(default = "d_sizes")]
    pub sample_sizes: Vec<usize>,
    #[serde(default)]
    pub seed: u64,
}

impl Default for BoundsCmdConfig {
    fn default() -> Self {
        Self { family: BoundFamily::default(), trials: d_trials(), delta: d_delta(), sample_sizes: d_sizes(), seed: 0 }
    }
}

pub fn bounds_cmd(config: Option<&Path>, seed: Option<u64>, out: &Path, trials: Option<usize>) -> CliResult<Failures> {
    let mut cfg: BoundsCmdConfig = load_config(config, "bounds")?;
    cfg.trials = trials.unwrap_or(cfg.trials);
    cfg.seed = seed.unwrap_or(cfg.seed);
    if cfg.sample_sizes.is_empty() {
        return Err(invalid("sample_sizes must not be empty"));
    }
    if cfg.trials == 0 {
        return Err(invalid("trials must be >= 1"));
    }
    if !(cfg.delta > 0.0 && cfg.delta < 1.0) {
        return Err(invalid(format!("delta must be in (0, 1), got {}", cfg.delta)));
    }
    for &m in &cfg.sample_sizes {
        BoundFamily { samples: m, ..cfg.family.clone() }.validate()?;
    }

    let mut reports: Vec<BoundReport> = Vec::new();
    let mut all_trials: Vec<BoundTrial> = Vec::new();
    for &m in &cfg.sample_sizes {
        let fam = BoundFamily { samples: m, ..cfg.family.clone() };
        let (rep, rows) = validate_statistical_bound(&fam, cfg.trials, cfg.delta, cfg.seed)?;
        println!(
            "m {:<5} median deviation {:.5}  mean bound {:.4}  violation rate {:.3}",
            m, rep.empirical_deviation, rep.bound_value, rep.violation_rate
        );
        reports.push(rep);
        all_trials.extend(rows);
    }
    let mut failures = Vec::new();
    for r in &reports {
        if r.violation_rate > cfg.delta + 0.03 {
            failures.push(format!("violation rate {} at m = {}", r.violation_rate, r.samples));
        }
    }
    let mut csv = csv_line(["samples", "trial", "deviation", "bound", "violated"].map(String::from));
    for t in &all_trials {
        csv.push_str(&csv_line([
            t.samples.to_string(),
            t.trial.to_string(),
            t.deviation.to_string(),
            t.bound.to_string(),
            t.violated.to_string(),
        ]));
    }
    let svg = chart(
        "Sampling error of the regularized risk",
        "samples per point m",
        "value",
        &[
            Series::new("median deviation", reports.iter().map(|r| (r.samples as f64, r.empirical_deviation)).collect()),
            Series::new("mean bound", reports.iter().map(|r| (r.samples as f64, r.bound_value)).collect()).dashed(),
        ],
        Style::Lines,
    );
    let mut art = Artifacts::new();
    art.add("results.csv", csv);
    art.add_json("results.json", &reports)?;
    art.add("plot.svg", svg);
    art.write(out, "bounds", cfg.seed, &cfg)?;
    Ok(failures)
}

// ---------------------------------------------------------------- gen

fn d_max_risk() -> f64 {
    0.4
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenConfig {
    #[serde(default = "d_train_n")]
    pub n: usize,
    /// Random linear classifiers to draw on the generated data (0 skips).
    #[serde(default)]
    pub classifiers: usize,
    #[serde(default = "d_max_risk")]
    pub max_risk: f64,
    #[serde(default)]
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self { n: d_train_n(), classifiers: 0, max_risk: d_max_risk(), seed: 0 }
    }
}

pub fn gen_cmd(
    config: Option<&Path>,
    seed: Option<u64>,
    out: &Path,
    n: Option<usize>,
    classifiers: Option<usize>,
) -> CliResult<Failures> {
    let mut cfg: GenConfig = load_config(config, "gen")?;
    cfg.n = n.unwrap_or(cfg.n);
    cfg.classifiers = classifiers.unwrap_or(cfg.classifiers);
    cfg.seed = seed.unwrap_or(cfg.seed);
    if !(cfg.max_risk > 0.0) {
        return Err(invalid("max_risk must be positive"));
    }
    let data = gen_synthetic(&SyntheticSpec { n: cfg.n, seed: cfg.seed })?;
    let clfs = if cfg.classifiers > 0 {
        gen_random_linear_classifiers(&data, cfg.classifiers, cfg.max_risk, advgame::rng::sub_seed(cfg.seed, 1))?
    } else {
        Vec::new()
    };
    let positives = data.points().iter().filter(|p| p.y == 1).count();
    println!("{} points, {} positive, {} classifiers", data.len(), positives, clfs.len());
    let mut csv = Vec::new();
    write_csv(&data, &mut csv)?;
    let split = |y: i64| -> Vec<(f64, f64)> {
        data.points().iter().filter(|p| p.y == y).map(|p| (p.x[0], p.x[1])).collect()
    };
    let svg = chart(
        "Synthetic sample",
        "x1",
        "x2",
        &[Series::new("y = -1", split(-1)), Series::new("y = +1", split(1))],
        Style::Markers,
    );
    let mut art = Artifacts::new();
    art.add("results.csv", String::from_utf8(csv).map_err(CliError::other)?);
    art.add_json(
        "results.json",
        &serde_json::json!({ "n": data.len(), "positives": positives, "classifiers": clfs }),
    )?;
    art.add("plot.svg", svg);
    art.write(out, "gen", cfg.seed, &cfg)?;
    Ok(Vec::new())
}


// ---------------------------------------------------------------- game-solve

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum GameSolver {
    /// Exact solver when there are two classifiers, otherwise MW.
    Auto,
    Exact,
    Mw,
}

fn d_auto() -> GameSolver {
    GameSolver::Auto
}
fn d_tol() -> f64 {
    1e-3
}
fn d_max_iters() -> usize {
    100_000
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameSolveConfig {
    #[serde(default)]
    pub input: Option<PathBuf>,
    #[serde(default = "d_bound")]
    pub bound: f64,
    #[serde(default = "d_auto")]
    pub solver: GameSolver,
    /// MW runs with doubling horizons until the gap is at most `tol` or
    /// `max_iters` iterations were spent.
    #[serde(default = "d_tol")]
    pub tol: f64,
    #[serde(default = "d_max_iters")]
    pub max_iters: usize,
    #[serde(default)]
    pub seed: u64,
}

impl Default for GameSolveConfig {
    fn default() -> Self {
        Self { input: None, bound: d_bound(), solver: d_auto(), tol: d_tol(), max_iters: d_max_iters(), seed: 0 }
    }
}

pub struct GameSolveArgs {
    pub input: Option<PathBuf>,
    pub solver: Option<GameSolver>,
    pub bound: Option<f64>,
    pub tol: Option<f64>,
    pub max_iters: Option<usize>,
}

pub fn game_solve(config: Option<&Path>, seed: Option<u64>, out: &Path, args: GameSolveArgs) -> CliResult<Failures> {
    let mut cfg: GameSolveConfig = load_config(config, "game-solve")?;
    cfg.input = args.input.or(cfg.input);
    cfg.solver = args.solver.unwrap_or(cfg.solver);
    cfg.bound = args.bound.unwrap_or(cfg.bound);
    cfg.tol = args.tol.unwrap_or(cfg.tol);
    cfg.max_iters = args.max_iters.unwrap_or(cfg.max_iters);
    cfg.seed = seed.unwrap_or(cfg.seed);
    if !(cfg.tol >= 0.0) || cfg.max_iters == 0 {
        return Err(invalid("tol must be >= 0 and max_iters >= 1"));
    }
    let path = cfg.input.clone().ok_or_else(|| invalid("game-solve needs --input <tensor.csv>"))?;
    let game = read_game(&path, cfg.bound)?;

    let cert = match cfg.solver {
        GameSolver::Exact => solve_exact_two(&game)?,
        GameSolver::Auto if game.num_classifiers() == 2 => solve_exact_two(&game)?,
        _ => solve_equilibrium_mw_until(&game, cfg.tol, cfg.max_iters)?,
    };
    println!("primal {}  dual {}  gap {}", cert.primal_value, cert.dual_value, cert.gap);
    println!("lambda {:?}", cert.lambda.weights());
    let mut failures = Vec::new();
    if cert.gap > cfg.tol {
        failures.push(format!("duality gap {} above tolerance {}", cert.gap, cfg.tol));
    }
    let mut csv = csv_line(["classifier", "lambda"].map(String::from));
    for (k, v) in cert.lambda.weights().iter().enumerate() {
        csv.push_str(&csv_line([k.to_string(), v.to_string()]));
    }
    let svg = chart(
        "Equilibrium mixture",
        "classifier",
        "weight",
        &[Series::new("lambda", cert.lambda.weights().iter().enumerate().map(|(k, v)| (k as f64, *v)).collect())],
        Style::Markers,
    );
    let mut art = Artifacts::new();
    art.add("results.csv", csv);
    art.add_json("results.json", &cert)?;
    art.add("plot.svg", svg);
    art.write(out, "game-solve", cfg.seed, &cfg)?;
    Ok(failures)
}
