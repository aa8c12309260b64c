//! Adversarial training of a mixture of logistic models.
//!
//! Iteration `t = 1..=T` is a model step unless `t` is a multiple of
//! `T_θ L + 1`, in which case it is a λ phase. A model step picks a model
//! uniformly, attacks the batch with PGD against the current mixture and
//! takes one SGD step on that model's cross-entropy at the attacked points.
//! A λ phase builds a game from PGD restarts against the mixture and runs
//! `T_λ` projected steps on λ with the models frozen.

use std::io::Write;

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::attack::{pgd_attack_with, CandidateSet, PgdParams};
use crate::error::{input, Error, Result};
use crate::game::build_game;
use crate::model::{
    mixture_loss, standard_risk, Classifier, LabeledDataset, LabeledPoint, Loss, Mixture, DEFAULT_CE_BOUND,
};
use crate::rng;
use crate::solvers::{entropic_descent_steps, project_simplex_raw, Alpha};

const INIT_DOMAIN: u64 = 1;
const STEP_DOMAIN: u64 = 2;
const PHASE_DOMAIN: u64 = 3;
const EVAL_DOMAIN: u64 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaSolver {
    /// Fixed-step projected gradient on the entropic objective.
    Entropic,
    /// Fixed-step projected subgradient with exact best responses.
    Oracle,
}

fn d_t_theta() -> usize {
    50
}
fn d_t_lambda() -> usize {
    25
}
fn d_lr_model() -> f64 {
    0.1
}
fn d_lr_lambda() -> f64 {
    0.001
}
fn d_alpha() -> f64 {
    0.001
}
fn d_pgd_steps() -> usize {
    10
}
fn d_restarts() -> usize {
    1
}
fn d_lambda_restarts() -> usize {
    5
}
fn d_lambda_steps() -> usize {
    3
}
fn d_eval_steps() -> usize {
    20
}
fn d_init_scale() -> f64 {
    1.0
}
fn d_ce_bound() -> f64 {
    DEFAULT_CE_BOUND
}
fn d_solver() -> LambdaSolver {
    LambdaSolver::Entropic
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    /// Number of models `L`.
    pub models: usize,
    /// Total iterations `T`.
    pub iterations: usize,
    #[serde(default = "d_t_theta")]
    pub t_theta: usize,
    #[serde(default = "d_t_lambda")]
    pub t_lambda: usize,
    #[serde(default = "d_lr_model")]
    pub lr_model: f64,
    #[serde(default = "d_lr_lambda")]
    pub lr_lambda: f64,
    pub epsilon: f64,
    /// PGD used on model steps; step size defaults to `2.5 ε / steps`.
    #[serde(default = "d_pgd_steps")]
    pub pgd_steps: usize,
    #[serde(default)]
    pub pgd_step_size: Option<f64>,
    #[serde(default = "d_restarts")]
    pub pgd_restarts: usize,
    /// Candidate generation for λ phases: this many PGD restarts of
    /// `lambda_pgd_steps` steps each, plus the clean point.
    #[serde(default = "d_lambda_restarts")]
    pub lambda_restarts: usize,
    #[serde(default = "d_lambda_steps")]
    pub lambda_pgd_steps: usize,
    #[serde(default = "d_alpha")]
    pub alpha: f64,
    #[serde(default = "d_solver")]
    pub lambda_solver: LambdaSolver,
    /// PGD steps used for robust accuracy in the metrics trace.
    #[serde(default = "d_eval_steps")]
    pub eval_steps: usize,
    /// Mini-batch size; `None` uses the whole dataset.
    #[serde(default)]
    pub batch_size: Option<usize>,
    #[serde(default = "d_init_scale")]
    pub init_scale: f64,
    #[serde(default = "d_ce_bound")]
    pub ce_bound: f64,
    #[serde(default)]
    pub seed: u64,
}

impl TrainConfig {
    pub fn new(models: usize, iterations: usize, epsilon: f64) -> Self {
        Self {
            models,
            iterations,
            t_theta: d_t_theta(),
            t_lambda: d_t_lambda(),
            lr_model: d_lr_model(),
            lr_lambda: d_lr_lambda(),
            epsilon,
            pgd_steps: d_pgd_steps(),
            pgd_step_size: None,
            pgd_restarts: d_restarts(),
            lambda_restarts: d_lambda_restarts(),
            lambda_pgd_steps: d_lambda_steps(),
            alpha: d_alpha(),
            lambda_solver: d_solver(),
            eval_steps: d_eval_steps(),
            batch_size: None,
            init_scale: d_init_scale(),
            ce_bound: d_ce_bound(),
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("models", self.models),
            ("iterations", self.iterations),
            ("t_theta", self.t_theta),
            ("t_lambda", self.t_lambda),
            ("pgd_steps", self.pgd_steps),
            ("pgd_restarts", self.pgd_restarts),
            ("lambda_restarts", self.lambda_restarts),
            ("lambda_pgd_steps", self.lambda_pgd_steps),
            ("eval_steps", self.eval_steps),
        ];
        if let Some((name, _)) = counts.iter().find(|(_, v)| *v == 0) {
            return input(format!("{name} must be >= 1"));
        }
        let rates = [
            ("lr_model", self.lr_model),
            ("lr_lambda", self.lr_lambda),
            ("alpha", self.alpha),
            ("ce_bound", self.ce_bound),
        ];
        if let Some((name, v)) = rates.iter().find(|(_, v)| !(*v > 0.0 && v.is_finite())) {
            return input(format!("{name} must be positive, got {v}"));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return input(format!("epsilon must be >= 0, got {}", self.epsilon));
        }
        if !(self.init_scale >= 0.0 && self.init_scale.is_finite()) {
            return input("init_scale must be >= 0");
        }
        if let Some(s) = self.pgd_step_size {
            if !(s >= 0.0 && s.is_finite()) {
                return input("pgd_step_size must be >= 0");
            }
        }
        if self.batch_size == Some(0) {
            return input("batch_size must be >= 1");
        }
        Ok(())
    }

    /// Length of one cycle of `T_θ L` model steps and one λ phase.
    pub fn cycle(&self) -> usize {
        self.t_theta * self.models + 1
    }

    pub fn is_lambda_step(&self, t: usize) -> bool {
        t % self.cycle() == 0
    }

    /// `⌊T / (T_θ L + 1)⌋`.
    pub fn lambda_phases(&self) -> usize {
        self.iterations / self.cycle()
    }

    fn train_pgd(&self, seed: u64) -> PgdParams {
        PgdParams {
            steps: self.pgd_steps,
            step_size: self.pgd_step_size.unwrap_or(2.5 * self.epsilon / self.pgd_steps as f64),
            restarts: self.pgd_restarts,
            seed,
        }
    }

    pub fn eval_pgd(&self) -> PgdParams {
        PgdParams::with_steps(self.epsilon, self.eval_steps, 1, rng::sub_seed(self.seed, EVAL_DOMAIN))
    }
}

/// Models and mixture weights; serialized as the training checkpoint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixtureModel {
    pub models: Vec<Classifier>,
    pub lambda: Mixture,
}

impl MixtureModel {
    pub fn new(models: Vec<Classifier>, lambda: Mixture) -> Result<Self> {
        if models.is_empty() || models.len() != lambda.len() {
            return input(format!("{} models for {} mixture weights", models.len(), lambda.len()));
        }
        Ok(Self { models, lambda })
    }

    /// Logistic models with `w ~ N(0, scale² I)` and zero bias.
    pub fn init_logistic(models: usize, dim: usize, scale: f64, seed: u64) -> Result<Self> {
        let clfs = (0..models)
            .map(|k| {
                let mut r = rng::stream(seed, k as u64);
                let w = (0..dim).map(|_| scale * rng::gaussian(&mut r)).collect();
                Classifier::logistic(k, w, 0.0)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(clfs, Mixture::uniform(models))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub phase: usize,
    pub iter: usize,
    pub standard_acc: f64,
    pub robust_acc: f64,
    pub lambda: Vec<f64>,
}

pub fn write_metrics_csv<W: Write>(rows: &[MetricsRow], mut out: W) -> Result<()> {
    let l = rows.first().map_or(0, |r| r.lambda.len());
    let lam: Vec<String> = (1..=l).map(|k| format!("lambda_{k}")).collect();
    write!(out, "phase,iter,standard_acc,robust_acc")?;
    for h in &lam {
        write!(out, ",{h}")?;
    }
    writeln!(out)?;
    for r in rows {
        write!(out, "{},{},{},{}", r.phase, r.iter, r.standard_acc, r.robust_acc)?;
        for v in &r.lambda {
            write!(out, ",{v}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// How robust accuracy is measured.
#[derive(Clone, Debug)]
pub enum RobustEval {
    /// PGD against the mixture's expected cross-entropy; each point counts
    /// the worse of its clean and attacked 0/1 loss.
    Pgd { params: PgdParams, ce_bound: f64 },
    /// Exact best response over an explicit candidate set.
    Candidates(CandidateSet),
}

/// `(standard accuracy, robust accuracy)` under the 0/1 loss. The attack
/// budget and geometry are those of `data`.
pub fn evaluate_robust(model: &MixtureModel, data: &LabeledDataset, eval: &RobustEval) -> Result<(f64, f64)> {
    let zo = Loss::zero_one();
    let standard = 1.0 - standard_risk(&zo, &model.models, &model.lambda, data)?;
    let robust_risk = match eval {
        RobustEval::Candidates(cands) => {
            crate::attack::adversarial_risk(&zo, &model.models, &model.lambda, data, cands)?
        }
        RobustEval::Pgd { params, ce_bound } => {
            let ce = Loss::cross_entropy(*ce_bound)?;
            let mut total = 0.0;
            for (i, p) in data.points().iter().enumerate() {
                let mut r = rng::stream(params.seed, i as u64);
                let u = pgd_attack_with(
                    &ce,
                    &model.models,
                    &model.lambda,
                    &p.x,
                    p.y,
                    data.epsilon(),
                    data.metric(),
                    params,
                    &mut r,
                )?;
                let clean = mixture_loss(&zo, &model.models, &model.lambda, &p.x, p.y)?;
                let attacked = mixture_loss(&zo, &model.models, &model.lambda, &u, p.y)?;
                total += p.weight * clean.max(attacked);
            }
            total
        }
    };
    Ok((standard, (1.0 - robust_risk).min(standard)))
}

/// Trains from the seeded initialization in `cfg`; see the module docs for
/// the schedule. The metrics trace has one row for the initial state, one
/// after every λ phase and one for the final state.
pub fn train(data: &LabeledDataset, cfg: &TrainConfig) -> Result<(MixtureModel, Vec<MetricsRow>)> {
    cfg.validate()?;
    let init = MixtureModel::init_logistic(cfg.models, data.dim(), cfg.init_scale, rng::sub_seed(cfg.seed, INIT_DOMAIN))?;
    train_from(data, None, init, cfg)
}

/// Like [`train`] from a given state; accuracies in the trace are measured
/// on `eval_data` when supplied, otherwise on the training data.
pub fn train_from(
    data: &LabeledDataset,
    eval_data: Option<&LabeledDataset>,
    init: MixtureModel,
    cfg: &TrainConfig,
) -> Result<(MixtureModel, Vec<MetricsRow>)> {
    cfg.validate()?;
    if init.models.len() != cfg.models {
        return input(format!("{} initial models, config asks for {}", init.models.len(), cfg.models));
    }
    if let Some(c) = init.models.iter().find(|c| !c.is_differentiable()) {
        return Err(Error::Unsupported(format!("classifier {} is not differentiable", c.id)));
    }
    if let Some(p) = data.points().iter().find(|p| p.y != 1 && p.y != -1) {
        return input(format!("training needs labels in {{-1, +1}}, found {}", p.y));
    }
    let data = data.with_epsilon(cfg.epsilon)?;
    let eval_data = match eval_data {
        Some(d) => d.with_epsilon(cfg.epsilon)?,
        None => data.clone(),
    };
    let eval = RobustEval::Pgd { params: cfg.eval_pgd(), ce_bound: cfg.ce_bound };
    let ce = Loss::cross_entropy(cfg.ce_bound)?;
    let mut model = init;
    let mut step_rng = rng::stream(rng::sub_seed(cfg.seed, STEP_DOMAIN), 0);
    let mut trace = Vec::new();
    let record = |phase: usize, iter: usize, m: &MixtureModel| -> Result<MetricsRow> {
        let (standard_acc, robust_acc) = evaluate_robust(m, &eval_data, &eval)?;
        Ok(MetricsRow { phase, iter, standard_acc, robust_acc, lambda: m.lambda.weights().to_vec() })
    };
    trace.push(record(0, 0, &model)?);
    let mut phase = 0;
    for t in 1..=cfg.iterations {
        let batch = draw_batch(&data, cfg.batch_size, &mut step_rng)?;
        if cfg.is_lambda_step(t) {
            phase += 1;
            lambda_phase(&mut model, &batch, &ce, cfg, t)?;
            trace.push(record(phase, t, &model)?);
        } else {
            let k = step_rng.gen_range(0..cfg.models);
            model_step(&mut model, k, &batch, &ce, cfg, &mut step_rng)?;
        }
    }
    if trace.last().map(|r| r.iter) != Some(cfg.iterations) {
        trace.push(record(phase, cfg.iterations, &model)?);
    }
    Ok((model, trace))
}

fn draw_batch<R: Rng>(data: &LabeledDataset, size: Option<usize>, rng: &mut R) -> Result<LabeledDataset> {
    match size {
        Some(b) if b < data.len() => {
            let idx = sample(rng, data.len(), b);
            let mut pts: Vec<LabeledPoint> = idx.iter().map(|i| data.points()[i].clone()).collect();
            let total: f64 = pts.iter().map(|p| p.weight).sum();
            if total <= 0.0 {
                pts.iter_mut().for_each(|p| p.weight = 1.0 / b as f64);
            } else {
                pts.iter_mut().for_each(|p| p.weight /= total);
            }
            LabeledDataset::new(pts, data.metric(), data.epsilon())
        }
        _ => Ok(data.clone()),
    }
}

fn model_step<R: Rng>(
    model: &mut MixtureModel,
    k: usize,
    batch: &LabeledDataset,
    ce: &Loss,
    cfg: &TrainConfig,
    rng: &mut R,
) -> Result<()> {
    let params = cfg.train_pgd(0);
    let dim = batch.dim();
    let mut gw = vec![0.0; dim];
    let mut gb = 0.0;
    for p in batch.points() {
        let u = if batch.epsilon() == 0.0 {
            p.x.clone()
        } else {
            pgd_attack_with(ce, &model.models, &model.lambda, &p.x, p.y, batch.epsilon(), batch.metric(), &params, rng)?
        };
        let (w, b) = model.models[k].ce_param_gradient(&u, p.y, ce.bound)?;
        for (a, v) in gw.iter_mut().zip(w) {
            *a += p.weight * v;
        }
        gb += p.weight * b;
    }
    let (w, b) = model.models[k].affine_mut().expect("differentiable model");
    for (a, g) in w.iter_mut().zip(&gw) {
        *a -= cfg.lr_model * g;
    }
    *b -= cfg.lr_model * gb;
    Ok(())
}

fn lambda_phase(model: &mut MixtureModel, batch: &LabeledDataset, ce: &Loss, cfg: &TrainConfig, t: usize) -> Result<()> {
    let params = PgdParams {
        steps: cfg.lambda_pgd_steps,
        step_size: 2.5 * batch.epsilon() / cfg.lambda_pgd_steps as f64,
        restarts: cfg.lambda_restarts,
        seed: rng::sub_seed(rng::sub_seed(cfg.seed, PHASE_DOMAIN), t as u64),
    };
    let cands = CandidateSet::pgd_restarts(ce, &model.models, &model.lambda, batch, &params)?;
    let game = build_game(ce, &model.models, batch, &cands)?;
    model.lambda = match cfg.lambda_solver {
        LambdaSolver::Entropic => {
            entropic_descent_steps(&game, &Alpha::Constant(cfg.alpha), &model.lambda, cfg.lr_lambda, cfg.t_lambda)?
        }
        LambdaSolver::Oracle => {
            let mut lam = model.lambda.clone();
            for _ in 0..cfg.t_lambda {
                let (plan, _) = game.best_response(&lam)?;
                let g = game.expected_losses(&plan)?;
                let step: Vec<f64> = lam.weights().iter().zip(&g).map(|(a, gk)| a - cfg.lr_lambda * gk).collect();
                lam = Mixture::from_raw(project_simplex_raw(&step));
            }
            lam
        }
    };
    Ok(())
}
