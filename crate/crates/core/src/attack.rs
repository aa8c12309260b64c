//! Candidate attacks and best responses of the adversary.
//!
//! Against a fixed mixture, the best randomized attack is attained by a
//! deterministic one: every point moves to a maximizer of the expected loss
//! inside its ball. Here the ball is replaced by a finite candidate list per
//! point (explicit, sampled uniformly, or produced by PGD restarts), which
//! always contains the clean point.

use std::io::{BufRead, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::game::build_game;
use crate::model::{mixture_loss, Classifier, LabeledDataset, Loss, LossKind, Metric, Mixture};
use crate::rng;

/// Slack on `d(x_i, u) <= ε` for candidates.
pub const BALL_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Generation {
    Explicit,
    UniformBall { m: usize, seed: u64 },
    PgdRestarts { steps: usize, step_size: f64, restarts: usize, seed: u64 },
    DenseGrid { per_axis: usize },
}

/// Per-point lists of attacked inputs; labels are those of the data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateSet {
    lists: Vec<Vec<Vec<f64>>>,
    generation: Generation,
}

impl CandidateSet {
    fn checked(data: &LabeledDataset, mut lists: Vec<Vec<Vec<f64>>>, generation: Generation) -> Result<Self> {
        if lists.len() != data.len() {
            return input(format!("{} candidate lists for {} points", lists.len(), data.len()));
        }
        let eps = data.epsilon();
        for (i, (list, p)) in lists.iter_mut().zip(data.points()).enumerate() {
            for (j, u) in list.iter().enumerate() {
                if u.len() != p.x.len() {
                    return input(format!("candidate ({i},{j}) has dimension {}, expected {}", u.len(), p.x.len()));
                }
                let d = data.metric().distance(&p.x, u);
                if d > eps + BALL_TOL {
                    return input(format!("candidate ({i},{j}) lies at distance {d} > epsilon {eps}"));
                }
            }
            if !list.iter().any(|u| u == &p.x) {
                list.insert(0, p.x.clone());
            }
        }
        Ok(Self { lists, generation })
    }

    /// User-supplied candidates. The clean point is prepended to any list
    /// that lacks it.
    pub fn explicit(data: &LabeledDataset, lists: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        Self::checked(data, lists, Generation::Explicit)
    }

    /// Clean point plus `m` uniform draws from each ball; point `i` uses
    /// stream `i` of `seed`.
    pub fn uniform_ball(data: &LabeledDataset, m: usize, seed: u64) -> Result<Self> {
        use rayon::prelude::*;
        if m == 0 {
            return input("m must be >= 1");
        }
        let lists = data
            .points()
            .par_iter()
            .enumerate()
            .map(|(i, p)| {
                let mut rng = rng::stream(seed, i as u64);
                let mut list = Vec::with_capacity(m + 1);
                list.push(p.x.clone());
                list.extend(sample_ball_with(&mut rng, &p.x, data.epsilon(), data.metric(), m));
                list
            })
            .collect();
        Self::checked(data, lists, Generation::UniformBall { m, seed })
    }

    /// Clean point plus the final iterate of every PGD restart against the
    /// mixture (expected cross-entropy).
    pub fn pgd_restarts(
        loss: &Loss,
        clfs: &[Classifier],
        mix: &Mixture,
        data: &LabeledDataset,
        params: &PgdParams,
    ) -> Result<Self> {
        use rayon::prelude::*;
        let lists = data
            .points()
            .par_iter()
            .enumerate()
            .map(|(i, p)| {
                let mut rng = rng::stream(params.seed, i as u64);
                let mut list = vec![p.x.clone()];
                for r in 0..params.restarts {
                    let run = pgd_run(loss, clfs, mix, &p.x, p.y, data.epsilon(), data.metric(), params, r, &mut rng)?;
                    list.push(run.last);
                }
                Ok(list)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::checked(
            data,
            lists,
            Generation::PgdRestarts {
                steps: params.steps,
                step_size: params.step_size,
                restarts: params.restarts,
                seed: params.seed,
            },
        )
    }

    /// Regular grid of `per_axis` points per coordinate over the bounding
    /// box of each ball, keeping those inside the ball (plus the clean point).
    pub fn dense_grid(data: &LabeledDataset, per_axis: usize) -> Result<Self> {
        if per_axis < 2 {
            return input("per_axis must be >= 2");
        }
        let d = data.dim();
        let total = (per_axis as f64).powi(d as i32);
        if total > 5.0e6 {
            return input(format!("dense grid of {total} points per ball is too large"));
        }
        let eps = data.epsilon();
        let lists = data
            .points()
            .iter()
            .map(|p| {
                let mut list = vec![p.x.clone()];
                let mut idx = vec![0usize; d];
                loop {
                    let u: Vec<f64> = p
                        .x
                        .iter()
                        .zip(&idx)
                        .map(|(c, &t)| c - eps + 2.0 * eps * t as f64 / (per_axis - 1) as f64)
                        .collect();
                    if data.metric().distance(&p.x, &u) <= eps {
                        list.push(u);
                    }
                    let mut a = 0;
                    while a < d {
                        idx[a] += 1;
                        if idx[a] < per_axis {
                            break;
                        }
                        idx[a] = 0;
                        a += 1;
                    }
                    if a == d {
                        break;
                    }
                }
                list
            })
            .collect();
        Self::checked(data, lists, Generation::DenseGrid { per_axis })
    }

    pub fn num_points(&self) -> usize {
        self.lists.len()
    }

    pub fn candidates(&self, i: usize) -> &[Vec<f64>] {
        &self.lists[i]
    }

    pub fn generation(&self) -> &Generation {
        &self.generation
    }

    /// Rows `point_index,candidate_index,x1..xd`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let d = self.lists.first().and_then(|l| l.first()).map_or(0, |u| u.len());
        let cols: Vec<String> = (1..=d).map(|c| format!("x{c}")).collect();
        writeln!(out, "point_index,candidate_index,{}", cols.join(","))?;
        for (i, list) in self.lists.iter().enumerate() {
            for (j, u) in list.iter().enumerate() {
                let xs: Vec<String> = u.iter().map(|v| format!("{v:.16e}")).collect();
                writeln!(out, "{i},{j},{}", xs.join(","))?;
            }
        }
        Ok(())
    }

    /// Reads [`CandidateSet::write_csv`] output and validates it against `data`.
    pub fn read_csv<R: BufRead>(reader: R, data: &LabeledDataset) -> Result<Self> {
        let mut lists: Vec<Vec<Vec<f64>>> = vec![Vec::new(); data.len()];
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            if idx == 0 || line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() < 3 {
                return Err(Error::Parse { line: lineno, msg: "too few fields".into() });
            }
            let perr = |e: String| Error::Parse { line: lineno, msg: e };
            let i: usize = f[0].parse().map_err(|e| perr(format!("{e}")))?;
            let j: usize = f[1].parse().map_err(|e| perr(format!("{e}")))?;
            let u = f[2..]
                .iter()
                .map(|s| s.parse::<f64>().map_err(|e| perr(format!("{s:?}: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            let list = lists.get_mut(i).ok_or_else(|| perr(format!("point index {i} out of range")))?;
            if j != list.len() {
                return Err(perr(format!("candidate index {j} out of order")));
            }
            list.push(u);
        }
        if let Some(i) = lists.iter().position(|l| l.is_empty()) {
            return input(format!("no candidates for point {i}"));
        }
        Self::checked(data, lists, Generation::Explicit)
    }
}

/// Per-point distributions over candidates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AttackPlan {
    probs: Vec<Vec<f64>>,
}

impl AttackPlan {
    pub fn new(probs: Vec<Vec<f64>>) -> Result<Self> {
        for (i, q) in probs.iter().enumerate() {
            if q.is_empty() || q.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return input(format!("plan for point {i} is not a distribution"));
            }
            let s: f64 = q.iter().sum();
            if (s - 1.0).abs() > crate::model::SIMPLEX_TOL {
                return input(format!("plan for point {i} sums to {s}"));
            }
        }
        Ok(Self { probs })
    }

    /// Mass one on `choices[i]` out of `counts[i]` candidates.
    pub fn point_masses(counts: &[usize], choices: &[usize]) -> Self {
        let probs = counts
            .iter()
            .zip(choices)
            .map(|(&m, &j)| {
                let mut q = vec![0.0; m];
                q[j] = 1.0;
                q
            })
            .collect();
        Self { probs }
    }

    pub(crate) fn from_raw(probs: Vec<Vec<f64>>) -> Self {
        Self { probs }
    }

    pub fn num_points(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self, i: usize) -> &[f64] {
        &self.probs[i]
    }
}

/// `m` points drawn uniformly from the `ε`-ball around `center`.
pub fn sample_ball(center: &[f64], epsilon: f64, metric: Metric, m: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    if m == 0 {
        return input("m must be >= 1");
    }
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return input(format!("epsilon must be >= 0, got {epsilon}"));
    }
    let mut rng = rng::stream(seed, 0);
    Ok(sample_ball_with(&mut rng, center, epsilon, metric, m))
}

pub(crate) fn sample_ball_with<R: Rng + ?Sized>(
    rng: &mut R,
    center: &[f64],
    epsilon: f64,
    metric: Metric,
    m: usize,
) -> Vec<Vec<f64>> {
    (0..m).map(|_| sample_one(rng, center, epsilon, metric)).collect()
}

fn sample_one<R: Rng + ?Sized>(rng: &mut R, center: &[f64], epsilon: f64, metric: Metric) -> Vec<f64> {
    if epsilon == 0.0 {
        return center.to_vec();
    }
    match metric {
        Metric::L2 => {
            let d = center.len();
            let dir = rng::unit_vector(rng, d);
            let r = epsilon * rng.gen::<f64>().powf(1.0 / d as f64);
            center.iter().zip(dir).map(|(c, u)| c + r * u).collect()
        }
        Metric::Linf => center.iter().map(|c| c + rng::uniform(rng, -epsilon, epsilon)).collect(),
    }
}

fn project_ball(u: &mut [f64], center: &[f64], epsilon: f64, metric: Metric) {
    match metric {
        Metric::Linf => {
            for (v, c) in u.iter_mut().zip(center) {
                *v = v.clamp(c - epsilon, c + epsilon);
            }
        }
        Metric::L2 => {
            let norm = metric.distance(u, center);
            if norm > epsilon {
                let s = epsilon / norm;
                for (v, c) in u.iter_mut().zip(center) {
                    *v = c + (*v - c) * s;
                }
            }
        }
    }
}

/// Adversary's best response to `mix` over `cands` and its value (the
/// adversarial risk of `mix`).
pub fn best_response(
    loss: &Loss,
    clfs: &[Classifier],
    mix: &Mixture,
    cands: &CandidateSet,
    data: &LabeledDataset,
) -> Result<(AttackPlan, f64)> {
    let game = build_game(loss, clfs, data, cands)?;
    game.best_response(mix)
}

/// `Σ_i w_i max_j Σ_k λ_k l(θ_k, u_j^(i))`.
pub fn adversarial_risk(
    loss: &Loss,
    clfs: &[Classifier],
    mix: &Mixture,
    data: &LabeledDataset,
    cands: &CandidateSet,
) -> Result<f64> {
    Ok(best_response(loss, clfs, mix, cands, data)?.1)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PgdParams {
    pub steps: usize,
    pub step_size: f64,
    pub restarts: usize,
    pub seed: u64,
}

impl PgdParams {
    /// 10 steps of size `2.5 ε / 10`, 5 restarts.
    pub fn default_for(epsilon: f64, seed: u64) -> Self {
        Self::with_steps(epsilon, 10, 5, seed)
    }

    /// Step size `2.5 ε / steps`.
    pub fn with_steps(epsilon: f64, steps: usize, restarts: usize, seed: u64) -> Self {
        Self { steps, step_size: 2.5 * epsilon / steps.max(1) as f64, restarts, seed }
    }
}

struct PgdRun {
    best: Vec<f64>,
    best_loss: f64,
    last: Vec<f64>,
}

#[allow(clippy::too_many_arguments)]
fn pgd_run<R: Rng + ?Sized>(
    loss: &Loss,
    clfs: &[Classifier],
    mix: &Mixture,
    x: &[f64],
    y: i64,
    epsilon: f64,
    metric: Metric,
    params: &PgdParams,
    restart: usize,
    rng: &mut R,
) -> Result<PgdRun> {
    let mut u = if restart == 0 { x.to_vec() } else { sample_one(rng, x, epsilon, metric) };
    let mut best = u.clone();
    let mut best_loss = mixture_loss(loss, clfs, mix, &u, y)?;
    for _ in 0..params.steps {
        let mut g = vec![0.0; x.len()];
        for (clf, lam) in clfs.iter().zip(mix.weights()) {
            if *lam == 0.0 {
                continue;
            }
            for (gd, v) in g.iter_mut().zip(clf.ce_input_gradient(&u, y, loss.bound)?) {
                *gd += lam * v;
            }
        }
        match metric {
            Metric::Linf => {
                for (v, gd) in u.iter_mut().zip(&g) {
                    if *gd != 0.0 {
                        *v += params.step_size * gd.signum();
                    }
                }
            }
            Metric::L2 => {
                let norm = g.iter().map(|a| a * a).sum::<f64>().sqrt();
                if norm > 0.0 {
                    for (v, gd) in u.iter_mut().zip(&g) {
                        *v += params.step_size * gd / norm;
                    }
                }
            }
        }
        project_ball(&mut u, x, epsilon, metric);
        let l = mixture_loss(loss, clfs, mix, &u, y)?;
        if l > best_loss {
            best_loss = l;
            best.clone_from(&u);
        }
    }
    Ok(PgdRun { best, best_loss, last: u })
}

/// PGD on the mixture's expected cross-entropy `Σ_k λ_k l(θ_k, (u, y))`.
///
/// Restart 0 starts from the clean point, the others from uniform points
/// of the ball. Steps follow the gradient sign (`Linf`) or the normalized
/// gradient (`L2`) and are projected back onto the ball. Returns the
/// iterate of largest expected loss over all restarts; the clean point wins
/// ties, so the output never has a smaller expected loss than `x`.
#[allow(clippy::too_many_arguments)]
pub fn pgd_attack(
    loss: &Loss,
    clfs: &[Classifier],
    mix: &Mixture,
    x: &[f64],
    y: i64,
    epsilon: f64,
    metric: Metric,
    params: &PgdParams,
) -> Result<Vec<f64>> {
    let mut rng = rng::stream(params.seed, 0);
    pgd_attack_with(loss, clfs, mix, x, y, epsilon, metric, params, &mut rng)
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn pgd_attack_with<R: Rng + ?Sized>(
    loss: &Loss,
    clfs: &[Classifier],
    mix: &Mixture,
    x: &[f64],
    y: i64,
    epsilon: f64,
    metric: Metric,
    params: &PgdParams,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if loss.kind != LossKind::CrossEntropy {
        return Err(Error::Unsupported("PGD needs the cross-entropy loss".into()));
    }
    if let Some(c) = clfs.iter().find(|c| !c.is_differentiable()) {
        return Err(Error::Unsupported(format!("classifier {} is not differentiable", c.id)));
    }
    if params.steps == 0 {
        return input("PGD needs at least one step");
    }
    if mix.len() != clfs.len() {
        return input(format!("mixture has {} weights for {} classifiers", mix.len(), clfs.len()));
    }
    let mut best = x.to_vec();
    let mut best_loss = mixture_loss(loss, clfs, mix, x, y)?;
    for r in 0..params.restarts.max(1) {
        let run = pgd_run(loss, clfs, mix, x, y, epsilon, metric, params, r, rng)?;
        if run.best_loss > best_loss {
            best_loss = run.best_loss;
            best = run.best;
        }
    }
    Ok(best)
}

/// [`pgd_attack`] on every point of `data`, point `i` using stream `i`.
pub fn pgd_attack_dataset(
    loss: &Loss,
    clfs: &[Classifier],
    mix: &Mixture,
    data: &LabeledDataset,
    params: &PgdParams,
) -> Result<Vec<Vec<f64>>> {
    use rayon::prelude::*;
    data.points()
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let mut rng = rng::stream(params.seed, i as u64);
            pgd_attack_with(loss, clfs, mix, &p.x, p.y, data.epsilon(), data.metric(), params, &mut rng)
        })
        .collect()
}
