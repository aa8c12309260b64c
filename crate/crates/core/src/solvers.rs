//! Mixture optimizers.
//!
//! * [`oracle_subgradient`]: projected subgradient descent on `λ`, the
//!   subgradient being the per-classifier loss under a (δ-approximate)
//!   best-response attack. With step `2 / (M √(L T))` the best iterate is
//!   within `2δ + 2M√L/√T` of the optimal adversarial risk.
//! * [`fista_minimize`]: accelerated projected gradient on the entropic
//!   relaxation, where each inner maximum is replaced by the smooth
//!   `α_i log((1/m_i) Σ_j exp(⟨λ, ℓ_ij⟩ / α_i))`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::attack::AttackPlan;
use crate::error::{input, Error, Result};
use crate::game::FiniteGame;
use crate::model::Mixture;
use crate::rng;

/// Euclidean projection onto the probability simplex (sort and threshold).
pub fn project_simplex(v: &[f64]) -> Result<Mixture> {
    if v.is_empty() {
        return input("cannot project an empty vector");
    }
    if v.iter().any(|x| !x.is_finite()) {
        return input(format!("non-finite entry in {v:?}"));
    }
    Ok(Mixture::from_raw(project_simplex_raw(v)))
}

pub(crate) fn project_simplex_raw(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut tau = 0.0;
    for (r, ur) in u.iter().enumerate() {
        cumsum += ur;
        let t = (cumsum - 1.0) / (r + 1) as f64;
        if ur - t > 0.0 {
            tau = t;
        }
    }
    v.iter().map(|x| (x - tau).max(0.0)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubgradientConfig {
    pub iterations: usize,
    pub eta: f64,
    /// Accuracy of the best-response oracle, entering the guarantee as `2δ`.
    pub delta: f64,
}

impl SubgradientConfig {
    /// `η = 2 / (M √(L T))` with an exact oracle.
    pub fn new(iterations: usize, num_classifiers: usize, bound: f64) -> Result<Self> {
        let eta = 2.0 / (bound * ((num_classifiers * iterations) as f64).sqrt());
        let cfg = Self { iterations, eta, delta: 0.0 };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return input("iterations must be >= 1");
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return input(format!("step size must be positive, got {}", self.eta));
        }
        if !(self.delta >= 0.0) {
            return input(format!("oracle accuracy must be >= 0, got {}", self.delta));
        }
        Ok(())
    }
}

/// `2δ + 2M√L/√T`.
pub fn subgradient_bound(delta: f64, bound: f64, num_classifiers: usize, iterations: usize) -> f64 {
    2.0 * delta + 2.0 * bound * (num_classifiers as f64).sqrt() / (iterations as f64).sqrt()
}

/// Supplies the attack used for the subgradient at each step.
pub trait BestResponseOracle {
    fn respond(&mut self, game: &FiniteGame, lambda: &Mixture) -> Result<AttackPlan>;
}

/// Exact best response over the full candidate sets (`δ = 0`).
#[derive(Clone, Copy, Debug, Default)]
pub struct ExactOracle;

impl BestResponseOracle for ExactOracle {
    fn respond(&mut self, game: &FiniteGame, lambda: &Mixture) -> Result<AttackPlan> {
        Ok(game.best_response(lambda)?.0)
    }
}

/// Best response over a random subset of each point's candidates (the
/// first candidate is always kept). Its accuracy is not known a priori;
/// [`SampledOracle::measured_delta`] reports the worst per-classifier
/// deviation from the exact response seen so far.
#[derive(Clone, Debug)]
pub struct SampledOracle {
    per_point: usize,
    rng: rng::StreamRng,
    measured_delta: f64,
}

impl SampledOracle {
    pub fn new(per_point: usize, seed: u64) -> Self {
        Self { per_point: per_point.max(1), rng: rng::stream(seed, 0), measured_delta: 0.0 }
    }

    pub fn measured_delta(&self) -> f64 {
        self.measured_delta
    }
}

impl BestResponseOracle for SampledOracle {
    fn respond(&mut self, game: &FiniteGame, lambda: &Mixture) -> Result<AttackPlan> {
        let lam = lambda.weights();
        let mut counts = Vec::with_capacity(game.num_points());
        let mut choices = Vec::with_capacity(game.num_points());
        for i in 0..game.num_points() {
            let m = game.num_candidates(i);
            let mut best = (0, dot(lam, game.row(i, 0)));
            for _ in 1..self.per_point.min(m) {
                let j = self.rng.gen_range(0..m);
                let v = dot(lam, game.row(i, j));
                if v > best.1 {
                    best = (j, v);
                }
            }
            counts.push(m);
            choices.push(best.0);
        }
        let plan = AttackPlan::point_masses(&counts, &choices);
        let exact = game.best_response(lambda)?.0;
        let ga = game.expected_losses(&plan)?;
        let gb = game.expected_losses(&exact)?;
        let dev = ga.iter().zip(&gb).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        self.measured_delta = self.measured_delta.max(dev);
        Ok(plan)
    }
}

#[derive(Clone, Debug)]
pub struct SubgradientRun {
    /// `λ_1, ..., λ_T`.
    pub iterates: Vec<Mixture>,
    /// Primal value of every iterate.
    pub values: Vec<f64>,
    pub best_value: f64,
    pub best_index: usize,
}

impl SubgradientRun {
    pub fn best_lambda(&self) -> &Mixture {
        &self.iterates[self.best_index]
    }

    /// `min_{s <= t}` of the primal values.
    pub fn best_so_far(&self) -> Vec<f64> {
        self.values
            .iter()
            .scan(f64::INFINITY, |m, v| {
                *m = m.min(*v);
                Some(*m)
            })
            .collect()
    }
}

/// Projected subgradient descent from the uniform mixture:
/// `λ_t = Π_Δ(λ_{t-1} - η g_t)` with `g_t` the loss of each classifier
/// under the oracle's attack against `λ_{t-1}`.
pub fn oracle_subgradient(
    game: &FiniteGame,
    cfg: &SubgradientConfig,
    oracle: &mut dyn BestResponseOracle,
) -> Result<SubgradientRun> {
    cfg.validate()?;
    let l = game.num_classifiers();
    let mut lambda = Mixture::uniform(l);
    let mut iterates = Vec::with_capacity(cfg.iterations);
    let mut values = Vec::with_capacity(cfg.iterations);
    for _ in 0..cfg.iterations {
        let plan = oracle.respond(game, &lambda)?;
        let g = game.expected_losses(&plan)?;
        let step: Vec<f64> = lambda.weights().iter().zip(&g).map(|(v, gk)| v - cfg.eta * gk).collect();
        lambda = Mixture::from_raw(project_simplex_raw(&step));
        values.push(game.primal_unchecked(lambda.weights()));
        iterates.push(lambda.clone());
    }
    let (best_index, best_value) = values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (t, v)| if *v < acc.1 { (t, *v) } else { acc });
    Ok(SubgradientRun { iterates, values, best_value, best_index })
}

/// Regularization strengths `α_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Alpha {
    Constant(f64),
    PerPoint(Vec<f64>),
}

impl Alpha {
    pub fn get(&self, i: usize) -> f64 {
        match self {
            Alpha::Constant(a) => *a,
            Alpha::PerPoint(v) => v[i],
        }
    }

    pub fn validate(&self, num_points: usize) -> Result<()> {
        match self {
            Alpha::Constant(a) if !(*a > 0.0 && a.is_finite()) => input(format!("alpha must be positive, got {a}")),
            Alpha::PerPoint(v) if v.len() != num_points => {
                input(format!("{} alphas for {num_points} points", v.len()))
            }
            Alpha::PerPoint(v) if v.iter().any(|a| !(*a > 0.0 && a.is_finite())) => {
                input("every alpha must be positive")
            }
            _ => Ok(()),
        }
    }

    pub fn min(&self) -> f64 {
        match self {
            Alpha::Constant(a) => *a,
            Alpha::PerPoint(v) => v.iter().cloned().fold(f64::INFINITY, f64::min),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropicConfig {
    pub alpha: Alpha,
    /// Samples per point; `None` (or at least the candidate count) uses
    /// every candidate exactly once.
    pub samples: Option<usize>,
    pub seed: u64,
    pub iterations: usize,
    /// Initial Lipschitz estimate; defaults to `M² L / min_i α_i`.
    pub lipschitz0: Option<f64>,
    pub growth: f64,
}

impl EntropicConfig {
    pub fn new(alpha: f64, iterations: usize) -> Self {
        Self { alpha: Alpha::Constant(alpha), samples: None, seed: 0, iterations, lipschitz0: None, growth: 2.0 }
    }

    pub fn validate(&self, game: &FiniteGame) -> Result<()> {
        self.alpha.validate(game.num_points())?;
        if self.samples == Some(0) {
            return input("samples per point must be >= 1");
        }
        if self.iterations == 0 {
            return input("iterations must be >= 1");
        }
        if !(self.growth > 1.0) {
            return input("backtracking growth must exceed 1");
        }
        if let Some(l0) = self.lipschitz0 {
            if !(l0 > 0.0 && l0.is_finite()) {
                return input("initial Lipschitz estimate must be positive");
            }
        }
        Ok(())
    }
}

/// The game on which the sampled objective is evaluated: every candidate
/// when `m` covers the whole list, otherwise `m` i.i.d. uniform draws per
/// point from stream `i` of `seed`.
pub fn sample_candidates(game: &FiniteGame, samples: Option<usize>, seed: u64) -> Result<FiniteGame> {
    let Some(m) = samples else { return Ok(game.clone()) };
    if m == 0 {
        return input("samples per point must be >= 1");
    }
    let picks: Vec<Vec<usize>> = (0..game.num_points())
        .map(|i| {
            let count = game.num_candidates(i);
            if m >= count {
                (0..count).collect()
            } else {
                let mut r = rng::stream(seed, i as u64);
                (0..m).map(|_| r.gen_range(0..count)).collect()
            }
        })
        .collect();
    game.select(&picks)
}

/// Value and gradient of `Σ_i w_i α_i log((1/m_i) Σ_j exp(⟨λ, ℓ_ij⟩/α_i))`.
pub fn entropic_objective(game: &FiniteGame, alpha: &Alpha, lambda: &Mixture) -> Result<(f64, Vec<f64>)> {
    alpha.validate(game.num_points())?;
    game_check_lambda(game, lambda)?;
    Ok(entropic_raw(game, alpha, lambda.weights()))
}

/// The same value and gradient at any finite `λ ∈ R^L`; the formula does
/// not need `λ` to lie in the simplex.
pub fn entropic_value_grad(game: &FiniteGame, alpha: &Alpha, lambda: &[f64]) -> Result<(f64, Vec<f64>)> {
    alpha.validate(game.num_points())?;
    if lambda.len() != game.num_classifiers() || lambda.iter().any(|v| !v.is_finite()) {
        return input(format!("need {} finite coordinates", game.num_classifiers()));
    }
    Ok(entropic_raw(game, alpha, lambda))
}

fn game_check_lambda(game: &FiniteGame, lambda: &Mixture) -> Result<()> {
    game.primal_value(lambda).map(|_| ())
}

pub(crate) fn entropic_raw(game: &FiniteGame, alpha: &Alpha, lambda: &[f64]) -> (f64, Vec<f64>) {
    let l = game.num_classifiers();
    let mut value = 0.0;
    let mut grad = vec![0.0; l];
    let mut scores = Vec::new();
    for i in 0..game.num_points() {
        let a = alpha.get(i);
        let w = game.weights()[i];
        scores.clear();
        scores.extend(game.rows(i).map(|r| dot(lambda, r)));
        let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut z = 0.0;
        for s in scores.iter_mut() {
            *s = ((*s - max) / a).exp();
            z += *s;
        }
        let m = scores.len() as f64;
        value += w * (max + a * (z.ln() - m.ln()));
        for (p, row) in scores.iter().zip(game.rows(i)) {
            let c = w * p / z;
            for (gk, v) in grad.iter_mut().zip(row) {
                *gk += c * v;
            }
        }
    }
    (value, grad)
}

#[derive(Clone, Debug)]
pub struct FistaResult {
    pub lambda: Mixture,
    /// Regularized objective of the accepted iterate, one entry per step
    /// (entry 0 is the starting point).
    pub trace: Vec<f64>,
    /// Unregularized primal value of the same iterates.
    pub primal_trace: Vec<f64>,
    pub value: f64,
    pub lipschitz: f64,
}

/// Monotone FISTA with backtracking on the (sampled) entropic objective,
/// started from the uniform mixture.
pub fn fista_minimize(game: &FiniteGame, cfg: &EntropicConfig) -> Result<FistaResult> {
    minimize_entropic(game, cfg, true)
}

/// Same as [`fista_minimize`] without momentum.
pub fn projected_gradient_minimize(game: &FiniteGame, cfg: &EntropicConfig) -> Result<FistaResult> {
    minimize_entropic(game, cfg, false)
}

fn minimize_entropic(game: &FiniteGame, cfg: &EntropicConfig, accelerate: bool) -> Result<FistaResult> {
    cfg.validate(game)?;
    let sampled = sample_candidates(game, cfg.samples, cfg.seed)?;
    let l = game.num_classifiers();
    let obj = |lam: &[f64]| entropic_raw(&sampled, &cfg.alpha, lam);

    let mut x = vec![1.0 / l as f64; l];
    let (mut fx, _) = obj(&x);
    let mut trace = vec![fx];
    let mut primal_trace = vec![game.primal_unchecked(&x)];
    let mut lip = cfg
        .lipschitz0
        .unwrap_or(game.bound().powi(2) * l as f64 / cfg.alpha.min());
    if l == 1 {
        return Ok(FistaResult { lambda: Mixture::from_raw(x), trace, primal_trace, value: fx, lipschitz: lip });
    }

    let mut y = x.clone();
    let mut t = 1.0_f64;
    for _ in 0..cfg.iterations {
        let (fy, gy) = obj(&y);
        let (z, fz) = loop {
            let step: Vec<f64> = y.iter().zip(&gy).map(|(a, g)| a - g / lip).collect();
            let z = project_simplex_raw(&step);
            let (fz, _) = obj(&z);
            let d: Vec<f64> = z.iter().zip(&y).map(|(a, b)| a - b).collect();
            let model = fy + dot(&gy, &d) + 0.5 * lip * dot(&d, &d);
            if fz <= model + 1e-12 * (1.0 + fy.abs()) || lip > 1e300 {
                break (z, fz);
            }
            lip *= cfg.growth;
        };
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        let (x_next, f_next) = if fz <= fx { (z.clone(), fz) } else { (x.clone(), fx) };
        y = if accelerate {
            x_next
                .iter()
                .zip(&z)
                .zip(&x)
                .map(|((xn, zz), xo)| xn + (t / t_next) * (zz - xn) + ((t - 1.0) / t_next) * (xn - xo))
                .collect()
        } else {
            x_next.clone()
        };
        x = x_next;
        fx = f_next;
        t = t_next;
        trace.push(fx);
        primal_trace.push(game.primal_unchecked(&x));
    }
    Ok(FistaResult { lambda: Mixture::from_raw(x), trace, primal_trace, value: fx, lipschitz: lip })
}

/// `iterations` projected gradient steps of fixed size `lr` on the entropic
/// objective, warm-started at `start`.
pub fn entropic_descent_steps(
    game: &FiniteGame,
    alpha: &Alpha,
    start: &Mixture,
    lr: f64,
    iterations: usize,
) -> Result<Mixture> {
    alpha.validate(game.num_points())?;
    game_check_lambda(game, start)?;
    if !(lr > 0.0 && lr.is_finite()) {
        return input(format!("learning rate must be positive, got {lr}"));
    }
    let mut lam = start.weights().to_vec();
    for _ in 0..iterations {
        let (_, g) = entropic_raw(game, alpha, &lam);
        let step: Vec<f64> = lam.iter().zip(&g).map(|(a, gk)| a - lr * gk).collect();
        lam = project_simplex_raw(&step);
    }
    Ok(Mixture::from_raw(lam))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlphaRow {
    pub alpha: f64,
    /// `max_j ⟨λ, ℓ_ij⟩ - α log((1/m_i) Σ_j exp(⟨λ, ℓ_ij⟩/α))` per point.
    pub per_point: Vec<f64>,
    /// Weighted sum of the per-point deviations.
    pub aggregate: f64,
}

/// Gap between the smoothed and the exact inner maxima at `lambda`, for
/// each `α`. Each deviation lies in `[0, α ln m_i]` and shrinks with `α`.
pub fn alpha_limit_study(game: &FiniteGame, alphas: &[f64], lambda: &Mixture) -> Result<Vec<AlphaRow>> {
    game_check_lambda(game, lambda)?;
    let lam = lambda.weights();
    alphas
        .iter()
        .map(|&a| {
            if !(a > 0.0 && a.is_finite()) {
                return Err(Error::Input(format!("alpha must be positive, got {a}")));
            }
            let per_point: Vec<f64> = (0..game.num_points())
                .map(|i| {
                    let s: Vec<f64> = game.rows(i).map(|r| dot(lam, r)).collect();
                    let max = s.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                    let z: f64 = s.iter().map(|v| ((v - max) / a).exp()).sum();
                    // max - (max + a ln(z/m)) = a (ln m - ln z)
                    (a * ((s.len() as f64).ln() - z.ln())).max(0.0)
                })
                .collect();
            let aggregate = per_point.iter().zip(game.weights()).map(|(d, w)| d * w).sum();
            Ok(AlphaRow { alpha: a, per_point, aggregate })
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}
