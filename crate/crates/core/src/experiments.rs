//! End-to-end experiment drivers used by the command-line tool.

use serde::{Deserialize, Serialize};

use crate::attack::CandidateSet;
use crate::error::{input, Result};
use crate::game::{
    build_game, motivating_instance_with_epsilon, solve_equilibrium_mw, solve_exact_two, FiniteGame,
};
use crate::model::{classifier_risks, Classifier, LabeledDataset, Loss, Mixture};
use crate::datagen::{gen_random_linear_classifiers, gen_synthetic, SyntheticSpec};
use crate::rng;
use crate::solvers::{fista_minimize, oracle_subgradient, EntropicConfig, ExactOracle, SubgradientConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DemoSolver {
    Exact,
    Mw,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemoCheck {
    pub name: String,
    pub expected: f64,
    pub actual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemoReport {
    pub epsilon: f64,
    pub solver: DemoSolver,
    pub iterations: usize,
    pub standard_risks: Vec<f64>,
    pub pure_adversarial_risks: Vec<f64>,
    pub value: f64,
    pub dual_value: f64,
    pub gap: f64,
    pub lambda: Vec<f64>,
    pub checks: Vec<DemoCheck>,
}

impl DemoReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn check(name: &str, expected: f64, actual: f64, tolerance: f64) -> DemoCheck {
    DemoCheck { name: name.into(), expected, actual, tolerance, passed: (expected - actual).abs() <= tolerance }
}

/// Solves the two-classifier example at budget `epsilon` and compares the
/// known values: standard risks 1/4; at `ε = 1` pure adversarial risks 1
/// and game value 3/4 at `λ = (1/2, 1/2)`; at `ε = 0` value 1/4.
pub fn demo_motivating(epsilon: f64, solver: DemoSolver, iterations: usize) -> Result<DemoReport> {
    let inst = motivating_instance_with_epsilon(epsilon)?;
    let standard_risks = classifier_risks(&Loss::zero_one(), &inst.classifiers, &inst.data)?;
    let game = &inst.game;
    let pure_adversarial_risks = (0..2)
        .map(|k| game.primal_value(&Mixture::vertex(2, k)))
        .collect::<Result<Vec<_>>>()?;
    let cert = match solver {
        DemoSolver::Exact => solve_exact_two(game)?,
        DemoSolver::Mw => solve_equilibrium_mw(game, iterations)?,
    };
    let (value_tol, lambda_tol) = match solver {
        DemoSolver::Exact => (1e-9, 1e-6),
        DemoSolver::Mw => (1e-3, f64::INFINITY),
    };
    let mut checks = Vec::new();
    for (k, r) in standard_risks.iter().enumerate() {
        checks.push(check(&format!("standard_risk_{}", k + 1), 0.25, *r, 1e-12));
    }
    if epsilon == 1.0 {
        for (k, r) in pure_adversarial_risks.iter().enumerate() {
            checks.push(check(&format!("pure_adversarial_risk_{}", k + 1), 1.0, *r, 1e-12));
        }
        checks.push(check("value", 0.75, cert.primal_value, value_tol));
        if lambda_tol.is_finite() {
            checks.push(check("lambda_1", 0.5, cert.lambda.weights()[0], lambda_tol));
        }
    } else if epsilon == 0.0 {
        checks.push(check("value", 0.25, cert.primal_value, value_tol));
    }
    let gap_tol = match solver {
        DemoSolver::Exact => 1e-9,
        DemoSolver::Mw => 1e-3,
    };
    checks.push(DemoCheck {
        name: "gap".into(),
        expected: 0.0,
        actual: cert.gap,
        tolerance: gap_tol,
        passed: cert.gap <= gap_tol,
    });
    Ok(DemoReport {
        epsilon,
        solver,
        iterations: cert.iterations,
        standard_risks,
        pure_adversarial_risks,
        value: cert.primal_value,
        dual_value: cert.dual_value,
        gap: cert.gap,
        lambda: cert.lambda.weights().to_vec(),
        checks,
    })
}

fn d_n() -> usize {
    1000
}
fn d_classifiers() -> usize {
    10
}
fn d_max_risk() -> f64 {
    0.4
}
fn d_samples() -> usize {
    1000
}
fn d_epsilons() -> Vec<f64> {
    (0..10).map(|k| 0.5 * k as f64).collect()
}
fn d_mw_iters() -> usize {
    5000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "d_n")]
    pub n: usize,
    /// Size of an independent test sample for out-of-sample risks; 0 skips it.
    #[serde(default)]
    pub n_test: usize,
    #[serde(default = "d_classifiers")]
    pub classifiers: usize,
    #[serde(default = "d_max_risk")]
    pub max_risk: f64,
    /// Uniform ball samples per point (the clean point is always added).
    #[serde(default = "d_samples")]
    pub samples: usize,
    #[serde(default = "d_epsilons")]
    pub epsilons: Vec<f64>,
    #[serde(default = "d_mw_iters")]
    pub mw_iters: usize,
    #[serde(default)]
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            n: d_n(),
            n_test: 0,
            classifiers: d_classifiers(),
            max_risk: d_max_risk(),
            samples: d_samples(),
            epsilons: d_epsilons(),
            mw_iters: d_mw_iters(),
            seed: 0,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.classifiers == 0 || self.samples == 0 || self.mw_iters == 0 {
            return input("n, classifiers, samples and mw_iters must be >= 1");
        }
        if self.epsilons.is_empty() || self.epsilons.iter().any(|e| !(*e >= 0.0 && e.is_finite())) {
            return input("epsilons must be a nonempty list of finite values >= 0");
        }
        if !(self.max_risk > 0.0) {
            return input("max_risk must be positive");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub epsilon: f64,
    /// Smallest adversarial risk of a single classifier.
    pub deterministic: f64,
    /// Adversarial risk of the equilibrium mixture.
    pub randomized: f64,
    /// Certified duality gap of the mixture.
    pub gap: f64,
    pub lambda: Vec<f64>,
    pub deterministic_out: Option<f64>,
    pub randomized_out: Option<f64>,
}

/// Adversarial risks of the best single classifier and of the equilibrium
/// mixture on synthetic data for every budget in the grid.
pub fn sweep_epsilon(cfg: &SweepConfig) -> Result<(Vec<Classifier>, Vec<SweepRow>)> {
    cfg.validate()?;
    let train = gen_synthetic(&SyntheticSpec { n: cfg.n, seed: rng::sub_seed(cfg.seed, 1) })?;
    let test = if cfg.n_test > 0 {
        Some(gen_synthetic(&SyntheticSpec { n: cfg.n_test, seed: rng::sub_seed(cfg.seed, 2) })?)
    } else {
        None
    };
    let clfs = gen_random_linear_classifiers(&train, cfg.classifiers, cfg.max_risk, rng::sub_seed(cfg.seed, 3))?;
    let zo = Loss::zero_one();
    let sampled_game = |data: &LabeledDataset, eps: f64, domain: u64| -> Result<FiniteGame> {
        let data = data.with_epsilon(eps)?;
        let cands = if eps == 0.0 {
            CandidateSet::explicit(&data, data.points().iter().map(|p| vec![p.x.clone()]).collect())?
        } else {
            CandidateSet::uniform_ball(&data, cfg.samples, rng::sub_seed(cfg.seed, domain))?
        };
        Ok(build_game(&zo, &clfs, &data, &cands)?.reduce().game)
    };
    let mut rows = Vec::with_capacity(cfg.epsilons.len());
    for (e, &eps) in cfg.epsilons.iter().enumerate() {
        let game = sampled_game(&train, eps, 100 + e as u64)?;
        let pure: Vec<f64> = (0..clfs.len())
            .map(|k| game.primal_value(&Mixture::vertex(clfs.len(), k)))
            .collect::<Result<_>>()?;
        let (best_k, deterministic) =
            pure.iter().enumerate().fold((0, f64::INFINITY), |b, (k, v)| if *v < b.1 { (k, *v) } else { b });
        let cert = solve_equilibrium_mw(&game, cfg.mw_iters)?;
        let (deterministic_out, randomized_out) = match &test {
            Some(t) => {
                let g = sampled_game(t, eps, 1000 + e as u64)?;
                (
                    Some(g.primal_value(&Mixture::vertex(clfs.len(), best_k))?),
                    Some(g.primal_value(&cert.lambda)?),
                )
            }
            None => (None, None),
        };
        rows.push(SweepRow {
            epsilon: eps,
            deterministic,
            randomized: cert.primal_value,
            gap: cert.gap,
            lambda: cert.lambda.weights().to_vec(),
            deterministic_out,
            randomized_out,
        });
    }
    Ok((clfs, rows))
}

fn d_alphas() -> Vec<f64> {
    vec![1.0, 0.1, 0.01, 0.001]
}
fn d_oracle_iters() -> usize {
    1000
}
fn d_fista_iters() -> usize {
    500
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceConfig {
    #[serde(default = "d_alphas")]
    pub alphas: Vec<f64>,
    #[serde(default = "d_oracle_iters")]
    pub oracle_iters: usize,
    #[serde(default = "d_fista_iters")]
    pub fista_iters: usize,
    /// Samples per point for the entropic objective; `None` uses all.
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub seed: u64,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        Self {
            alphas: d_alphas(),
            oracle_iters: d_oracle_iters(),
            fista_iters: d_fista_iters(),
            samples: None,
            seed: 0,
        }
    }
}

impl ConvergenceConfig {
    pub fn validate(&self) -> Result<()> {
        if self.oracle_iters == 0 || self.fista_iters == 0 {
            return input("oracle_iters and fista_iters must be >= 1");
        }
        if self.alphas.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
            return input("every alpha must be positive");
        }
        if self.samples == Some(0) {
            return input("samples must be >= 1");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub series: String,
    pub iter: usize,
    pub value: f64,
    pub gap_estimate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesSummary {
    pub series: String,
    pub alpha: Option<f64>,
    pub final_value: f64,
    pub final_primal: f64,
    pub lambda: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    pub summaries: Vec<SeriesSummary>,
    /// Largest dual value seen along the oracle run (a lower bound on the
    /// game value).
    pub dual_lower_bound: f64,
}

/// Oracle subgradient run plus one FISTA run per `α`.
///
/// Series `oracle` records the best primal value so far, with the gap to
/// the best dual value so far. Series `alpha=<α>` records the regularized
/// objective, with the gap between the primal value of the iterate and the
/// oracle's dual lower bound.
pub fn convergence(game: &FiniteGame, cfg: &ConvergenceConfig) -> Result<ConvergenceReport> {
    cfg.validate()?;
    let sub = SubgradientConfig::new(cfg.oracle_iters, game.num_classifiers(), game.bound())?;
    let run = oracle_subgradient(game, &sub, &mut ExactOracle)?;
    let mut rows = Vec::new();
    let mut best_dual = f64::NEG_INFINITY;
    let best = run.best_so_far();
    for (t, lam) in run.iterates.iter().enumerate() {
        let (plan, _) = game.best_response(lam)?;
        best_dual = best_dual.max(game.dual_value(&plan)?);
        rows.push(ConvergenceRow {
            series: "oracle".into(),
            iter: t + 1,
            value: best[t],
            gap_estimate: best[t] - best_dual,
        });
    }
    let mut summaries = vec![SeriesSummary {
        series: "oracle".into(),
        alpha: None,
        final_value: run.best_value,
        final_primal: run.best_value,
        lambda: run.best_lambda().weights().to_vec(),
    }];
    for &alpha in &cfg.alphas {
        let mut ec = EntropicConfig::new(alpha, cfg.fista_iters);
        ec.samples = cfg.samples;
        ec.seed = cfg.seed;
        let res = fista_minimize(game, &ec)?;
        let name = format!("alpha={alpha}");
        for (t, (v, p)) in res.trace.iter().zip(&res.primal_trace).enumerate() {
            rows.push(ConvergenceRow { series: name.clone(), iter: t, value: *v, gap_estimate: p - best_dual });
        }
        summaries.push(SeriesSummary {
            series: name,
            alpha: Some(alpha),
            final_value: res.value,
            final_primal: *res.primal_trace.last().expect("nonempty trace"),
            lambda: res.lambda.weights().to_vec(),
        });
    }
    Ok(ConvergenceReport { rows, summaries, dual_lower_bound: best_dual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::motivating_instance;

    #[test]
    fn demo_defaults_pass() {
        let r = demo_motivating(1.0, DemoSolver::Exact, 0).unwrap();
        assert!(r.passed(), "{:?}", r.checks);
        assert!((r.value - 0.75).abs() < 1e-9);
    }

    #[test]
    fn demo_zero_budget() {
        let r = demo_motivating(0.0, DemoSolver::Exact, 0).unwrap();
        assert!(r.passed());
        assert!((r.value - 0.25).abs() < 1e-12);
    }

    #[test]
    fn demo_mw() {
        let r = demo_motivating(1.0, DemoSolver::Mw, 5000).unwrap();
        assert!(r.passed(), "{:?}", r.checks);
    }

    #[test]
    fn small_sweep_is_ordered() {
        let cfg = SweepConfig { n: 100, samples: 50, epsilons: vec![0.0, 1.0, 2.0], mw_iters: 500, ..Default::default() };
        let (_, rows) = sweep_epsilon(&cfg).unwrap();
        assert!(rows.iter().all(|r| r.randomized <= r.deterministic + 1e-12));
        assert!((rows[0].randomized - rows[0].deterministic).abs() < 1e-9);
    }

    #[test]
    fn convergence_finals_are_ordered() {
        let g = motivating_instance().game;
        let rep = convergence(&g, &ConvergenceConfig::default()).unwrap();
        let finals: Vec<f64> = rep.summaries[1..].iter().map(|s| s.final_value).collect();
        assert!(finals.windows(2).all(|w| w[0] <= w[1] + 1e-12), "{finals:?}");
        assert!((finals.last().unwrap() - 0.75).abs() < 0.01);
    }
}
