//! The finite zero-sum game between a mixture of classifiers and an
//! adversary restricted to per-point candidate attacks.
//!
//! With losses `ℓ[i][j][k]` (point `i`, candidate `j`, classifier `k`) and
//! point weights `w_i`:
//!
//! * primal value (classifier commits first): `Σ_i w_i max_j ⟨λ, ℓ_ij⟩`,
//! * dual value (adversary commits first): `min_k Σ_i w_i Σ_j q_ij ℓ_ijk`.
//!
//! Weak duality `dual(q) <= primal(λ)` holds for every pair; the difference
//! is a certified bound on how far `λ` is from optimal.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::attack::{AttackPlan, CandidateSet};
use crate::error::{input, Error, Result};
use crate::model::{
    eval_loss, Classifier, ClassifierKind, LabeledDataset, LabeledPoint, Loss, Metric, Mixture,
    SIMPLEX_TOL,
};

/// Gap below which a certificate counts as an equilibrium.
pub const DEFAULT_GAP_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct FiniteGame {
    n_classifiers: usize,
    weights: Vec<f64>,
    /// `offsets[i]..offsets[i + 1]` are the global candidate rows of point `i`.
    offsets: Vec<usize>,
    /// Row-major `(candidate row, classifier)`.
    losses: Vec<f64>,
    bound: f64,
}

impl FiniteGame {
    /// Builds a game from nested `[point][candidate][classifier]` losses.
    pub fn new(weights: Vec<f64>, losses: Vec<Vec<Vec<f64>>>, bound: f64) -> Result<Self> {
        if weights.len() != losses.len() {
            return input(format!("{} weights for {} points", weights.len(), losses.len()));
        }
        let n_classifiers = losses
            .first()
            .and_then(|p| p.first())
            .map(|r| r.len())
            .ok_or_else(|| Error::Input("game needs at least one point and candidate".into()))?;
        let mut offsets = vec![0];
        let mut flat = Vec::new();
        for (i, point) in losses.into_iter().enumerate() {
            if point.is_empty() {
                return input(format!("point {i} has no candidates"));
            }
            for row in point {
                if row.len() != n_classifiers {
                    return input(format!("point {i}: loss row of length {}, expected {n_classifiers}", row.len()));
                }
                flat.extend(row);
            }
            offsets.push(flat.len() / n_classifiers);
        }
        Self::from_parts(n_classifiers, weights, offsets, flat, bound)
    }

    fn from_parts(
        n_classifiers: usize,
        weights: Vec<f64>,
        offsets: Vec<usize>,
        losses: Vec<f64>,
        bound: f64,
    ) -> Result<Self> {
        if n_classifiers == 0 {
            return input("game has no classifiers");
        }
        if !(bound > 0.0 && bound.is_finite()) {
            return input(format!("loss bound must be positive, got {bound}"));
        }
        if weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
            return input("point weights must be finite and nonnegative");
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > SIMPLEX_TOL {
            return input(format!("point weights sum to {total}, expected 1"));
        }
        // allow rounding noise from clamped surrogates
        if let Some(v) = losses.iter().find(|v| !(**v >= 0.0 && **v <= bound * (1.0 + 1e-12))) {
            return input(format!("loss {v} outside [0, {bound}]"));
        }
        Ok(Self { n_classifiers, weights, offsets, losses, bound })
    }

    pub fn num_points(&self) -> usize {
        self.weights.len()
    }

    pub fn num_classifiers(&self) -> usize {
        self.n_classifiers
    }

    pub fn num_candidates(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn total_candidates(&self) -> usize {
        self.offsets[self.num_points()]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// Loss vector `ℓ[i][j][·]`.
    pub fn row(&self, i: usize, j: usize) -> &[f64] {
        let r = self.offsets[i] + j;
        &self.losses[r * self.n_classifiers..(r + 1) * self.n_classifiers]
    }

    pub fn rows(&self, i: usize) -> impl Iterator<Item = &[f64]> + '_ {
        (0..self.num_candidates(i)).map(move |j| self.row(i, j))
    }

    /// The same game with every loss (and the bound) multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return input(format!("scale must be positive, got {c}"));
        }
        Ok(Self {
            losses: self.losses.iter().map(|v| v * c).collect(),
            bound: self.bound * c,
            ..self.clone()
        })
    }

    /// Game restricted to the given candidate indices of every point.
    pub fn select(&self, picks: &[Vec<usize>]) -> Result<Self> {
        if picks.len() != self.num_points() {
            return input("selection must list candidates for every point");
        }
        let mut offsets = vec![0];
        let mut losses = Vec::new();
        for (i, js) in picks.iter().enumerate() {
            if js.is_empty() {
                return input(format!("selection for point {i} is empty"));
            }
            for &j in js {
                if j >= self.num_candidates(i) {
                    return input(format!("candidate {j} out of range for point {i}"));
                }
                losses.extend_from_slice(self.row(i, j));
            }
            offsets.push(losses.len() / self.n_classifiers);
        }
        Self::from_parts(self.n_classifiers, self.weights.clone(), offsets, losses, self.bound)
    }

    pub(crate) fn check_mixture(&self, lambda: &Mixture) -> Result<()> {
        if lambda.len() != self.n_classifiers {
            return input(format!("mixture of length {} for {} classifiers", lambda.len(), self.n_classifiers));
        }
        let total: f64 = lambda.weights().iter().sum();
        if lambda.weights().iter().any(|v| *v < -SIMPLEX_TOL) || (total - 1.0).abs() > SIMPLEX_TOL {
            return input("mixture outside the probability simplex");
        }
        Ok(())
    }

    /// Per point: the maximizing candidate (lowest index on ties) and its
    /// expected loss under `λ`.
    pub(crate) fn argmax_rows(&self, lambda: &[f64]) -> Vec<(usize, f64)> {
        (0..self.num_points())
            .map(|i| {
                let mut best = (0, f64::NEG_INFINITY);
                for (j, row) in self.rows(i).enumerate() {
                    let v = dot(lambda, row);
                    if v > best.1 {
                        best = (j, v);
                    }
                }
                best
            })
            .collect()
    }

    /// `Σ_i w_i max_j ⟨λ, ℓ_ij⟩`.
    pub fn primal_value(&self, lambda: &Mixture) -> Result<f64> {
        self.check_mixture(lambda)?;
        Ok(self.primal_unchecked(lambda.weights()))
    }

    pub(crate) fn primal_unchecked(&self, lambda: &[f64]) -> f64 {
        self.argmax_rows(lambda)
            .iter()
            .zip(&self.weights)
            .map(|((_, v), w)| w * v)
            .sum()
    }

    /// Deterministic best response to `λ`: mass one on a maximizing
    /// candidate per point. Returns the plan and the primal value.
    pub fn best_response(&self, lambda: &Mixture) -> Result<(AttackPlan, f64)> {
        self.check_mixture(lambda)?;
        let picks = self.argmax_rows(lambda.weights());
        let value = picks.iter().zip(&self.weights).map(|((_, v), w)| w * v).sum();
        let counts: Vec<usize> = (0..self.num_points()).map(|i| self.num_candidates(i)).collect();
        let choices: Vec<usize> = picks.iter().map(|(j, _)| *j).collect();
        Ok((AttackPlan::point_masses(&counts, &choices), value))
    }

    pub fn check_plan(&self, plan: &AttackPlan) -> Result<()> {
        if plan.num_points() != self.num_points() {
            return input(format!("plan covers {} points, game has {}", plan.num_points(), self.num_points()));
        }
        for i in 0..self.num_points() {
            if plan.probs(i).len() != self.num_candidates(i) {
                return input(format!(
                    "plan for point {i} has {} entries, expected {}",
                    plan.probs(i).len(),
                    self.num_candidates(i)
                ));
            }
        }
        Ok(())
    }

    /// `g_k = Σ_i w_i Σ_j q_ij ℓ_ijk`, the loss of each classifier against `plan`.
    pub fn expected_losses(&self, plan: &AttackPlan) -> Result<Vec<f64>> {
        self.check_plan(plan)?;
        let mut g = vec![0.0; self.n_classifiers];
        for i in 0..self.num_points() {
            for (row, q) in self.rows(i).zip(plan.probs(i)) {
                if *q == 0.0 {
                    continue;
                }
                let scale = self.weights[i] * q;
                for (gk, l) in g.iter_mut().zip(row) {
                    *gk += scale * l;
                }
            }
        }
        Ok(g)
    }

    /// `min_k Σ_i w_i Σ_j q_ij ℓ_ijk`: the best risk any classifier (hence
    /// any mixture) achieves against the fixed randomized attack.
    pub fn dual_value(&self, plan: &AttackPlan) -> Result<f64> {
        Ok(self.expected_losses(plan)?.into_iter().fold(f64::INFINITY, f64::min))
    }

    /// Drops duplicate and dominated candidates of every point. The primal
    /// value is unchanged for every `λ`; the returned map sends reduced
    /// candidate indices back to the original ones.
    pub fn reduce(&self) -> ReducedGame {
        let mut map = Vec::with_capacity(self.num_points());
        for i in 0..self.num_points() {
            let mut seen: HashMap<Vec<u64>, ()> = HashMap::new();
            let mut uniq: Vec<usize> = Vec::new();
            for (j, row) in self.rows(i).enumerate() {
                let key: Vec<u64> = row.iter().map(|v| v.to_bits()).collect();
                if seen.insert(key, ()).is_none() {
                    uniq.push(j);
                }
            }
            let keep: Vec<usize> = uniq
                .iter()
                .copied()
                .filter(|&j| {
                    let r = self.row(i, j);
                    !uniq.iter().any(|&o| {
                        let s = self.row(i, o);
                        o != j && s.iter().zip(r).all(|(a, b)| a >= b) && s.iter().zip(r).any(|(a, b)| a > b)
                    })
                })
                .collect();
            map.push(keep);
        }
        let game = self.select(&map).expect("reduction keeps a valid game");
        ReducedGame { game, map }
    }

    /// Writes `i,j,k,loss,weight` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "i,j,k,loss,weight")?;
        for i in 0..self.num_points() {
            for (j, row) in self.rows(i).enumerate() {
                for (k, l) in row.iter().enumerate() {
                    writeln!(out, "{i},{j},{k},{l:.16e},{:.16e}", self.weights[i])?;
                }
            }
        }
        Ok(())
    }

    /// Reads the format of [`FiniteGame::write_csv`]; every `(i, j, k)` must
    /// be present exactly once.
    pub fn read_csv<R: BufRead>(reader: R, bound: f64) -> Result<Self> {
        let mut entries: HashMap<(usize, usize, usize), f64> = HashMap::new();
        let mut weights: HashMap<usize, f64> = HashMap::new();
        let (mut n, mut l) = (0, 0);
        let mut counts: HashMap<usize, usize> = HashMap::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            if idx == 0 {
                if line.trim() != "i,j,k,loss,weight" {
                    return Err(Error::Parse { line: 1, msg: format!("unexpected header {line:?}") });
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != 5 {
                return Err(Error::Parse { line: lineno, msg: format!("expected 5 fields, got {}", f.len()) });
            }
            let parse_u = |s: &str| {
                s.parse::<usize>().map_err(|e| Error::Parse { line: lineno, msg: format!("{s:?}: {e}") })
            };
            let parse_f = |s: &str| {
                s.parse::<f64>().map_err(|e| Error::Parse { line: lineno, msg: format!("{s:?}: {e}") })
            };
            let (i, j, k) = (parse_u(f[0])?, parse_u(f[1])?, parse_u(f[2])?);
            let (loss, w) = (parse_f(f[3])?, parse_f(f[4])?);
            if entries.insert((i, j, k), loss).is_some() {
                return Err(Error::Parse { line: lineno, msg: format!("duplicate entry ({i},{j},{k})") });
            }
            if let Some(prev) = weights.insert(i, w) {
                if prev != w {
                    return Err(Error::Parse { line: lineno, msg: format!("inconsistent weight for point {i}") });
                }
            }
            n = n.max(i + 1);
            l = l.max(k + 1);
            let c = counts.entry(i).or_default();
            *c = (*c).max(j + 1);
        }
        let mut nested = Vec::with_capacity(n);
        let mut ws = Vec::with_capacity(n);
        for i in 0..n {
            let m = *counts.get(&i).ok_or_else(|| Error::Input(format!("point {i} missing")))?;
            let mut point = Vec::with_capacity(m);
            for j in 0..m {
                let row = (0..l)
                    .map(|k| {
                        entries
                            .get(&(i, j, k))
                            .copied()
                            .ok_or_else(|| Error::Input(format!("entry ({i},{j},{k}) missing")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                point.push(row);
            }
            nested.push(point);
            ws.push(weights[&i]);
        }
        Self::new(ws, nested, bound)
    }
}

/// A game with duplicate/dominated candidates removed.
#[derive(Clone, Debug)]
pub struct ReducedGame {
    pub game: FiniteGame,
    /// `map[i][j']` is the original index of reduced candidate `j'`.
    pub map: Vec<Vec<usize>>,
}

impl ReducedGame {
    /// Lifts a plan on the reduced game to the original candidate indexing.
    pub fn lift_plan(&self, plan: &AttackPlan, original: &FiniteGame) -> AttackPlan {
        let probs = self
            .map
            .iter()
            .enumerate()
            .map(|(i, js)| {
                let mut q = vec![0.0; original.num_candidates(i)];
                for (jr, &j) in js.iter().enumerate() {
                    q[j] += plan.probs(i)[jr];
                }
                q
            })
            .collect();
        AttackPlan::from_raw(probs)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

/// `ℓ[i][j][k] = l(θ_k, candidate j of point i)`.
pub fn build_game(loss: &Loss, clfs: &[Classifier], data: &LabeledDataset, cands: &CandidateSet) -> Result<FiniteGame> {
    use rayon::prelude::*;
    if clfs.is_empty() {
        return input("no classifiers");
    }
    if cands.num_points() != data.len() {
        return input(format!("{} candidate lists for {} points", cands.num_points(), data.len()));
    }
    let nested: Vec<Vec<Vec<f64>>> = data
        .points()
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            cands
                .candidates(i)
                .iter()
                .map(|u| clfs.iter().map(|c| eval_loss(loss, c, u, p.y)).collect::<Result<Vec<f64>>>())
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    FiniteGame::new(data.weights(), nested, loss.bound)
}

/// Primal/dual strategy pair with its certified duality gap.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumCertificate {
    pub lambda: Mixture,
    pub plan: AttackPlan,
    #[serde(rename = "primal")]
    pub primal_value: f64,
    #[serde(rename = "dual")]
    pub dual_value: f64,
    pub gap: f64,
    pub iterations: usize,
}

impl EquilibriumCertificate {
    /// Evaluates both values on `game`, so the gap is always recomputed
    /// from the strategies.
    pub fn from_pair(game: &FiniteGame, lambda: Mixture, plan: AttackPlan, iterations: usize) -> Result<Self> {
        let primal_value = game.primal_value(&lambda)?;
        let dual_value = game.dual_value(&plan)?;
        Ok(Self { lambda, plan, primal_value, dual_value, gap: primal_value - dual_value, iterations })
    }

    pub fn is_equilibrium(&self, tol: f64) -> bool {
        self.gap <= tol
    }
}

/// Multiplicative-weights step `√(8 ln L / T) / M`.
pub fn mw_step(num_classifiers: usize, iterations: usize, bound: f64) -> f64 {
    (8.0 * (num_classifiers as f64).ln() / iterations as f64).sqrt() / bound
}

/// Exponentiated-gradient updates of `λ` against exact best responses.
///
/// The certificate pairs the averaged attack plan (or the best single
/// best-response plan, whichever has the larger dual value) with the
/// mixture of smallest primal value among the averaged iterate, the played
/// iterates and the pure strategies. Both sides are valid strategies, so
/// the reported gap is a rigorous bound; it vanishes like `M √(ln L / T)`.
pub fn solve_equilibrium_mw(game: &FiniteGame, iterations: usize) -> Result<EquilibriumCertificate> {
    if iterations == 0 {
        return input("iterations must be >= 1");
    }
    let l = game.num_classifiers();
    let n = game.num_points();
    let eta = mw_step(l, iterations, game.bound());
    let counts: Vec<usize> = (0..n).map(|i| game.num_candidates(i)).collect();

    let mut log_w = vec![0.0; l];
    let mut lambda = vec![1.0 / l as f64; l];
    let mut lambda_sum = vec![0.0; l];
    let mut q_sum: Vec<Vec<f64>> = counts.iter().map(|&m| vec![0.0; m]).collect();

    let mut best_primal = (f64::INFINITY, lambda.clone());
    for k in 0..l {
        let e = Mixture::vertex(l, k);
        let v = game.primal_unchecked(e.weights());
        if v < best_primal.0 {
            best_primal = (v, e.weights().to_vec());
        }
    }
    let mut best_dual: (f64, Vec<usize>) = (f64::NEG_INFINITY, Vec::new());

    for _ in 0..iterations {
        let picks = game.argmax_rows(&lambda);
        let value: f64 = picks.iter().zip(game.weights()).map(|((_, v), w)| w * v).sum();
        if value < best_primal.0 {
            best_primal = (value, lambda.clone());
        }
        let mut g = vec![0.0; l];
        for (i, (j, _)) in picks.iter().enumerate() {
            q_sum[i][*j] += 1.0;
            let w = game.weights()[i];
            for (gk, v) in g.iter_mut().zip(game.row(i, *j)) {
                *gk += w * v;
            }
        }
        let dual = g.iter().cloned().fold(f64::INFINITY, f64::min);
        if dual > best_dual.0 {
            best_dual = (dual, picks.iter().map(|(j, _)| *j).collect());
        }
        for (s, v) in lambda_sum.iter_mut().zip(&lambda) {
            *s += v;
        }
        for (lw, gk) in log_w.iter_mut().zip(&g) {
            *lw -= eta * gk;
        }
        let max = log_w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let z: f64 = log_w.iter().map(|v| (v - max).exp()).sum();
        for (lam, lw) in lambda.iter_mut().zip(&log_w) {
            *lam = (lw - max).exp() / z;
        }
    }

    let t = iterations as f64;
    let lambda_bar = normalize(lambda_sum.iter().map(|s| s / t).collect());
    let q_bar = AttackPlan::from_raw(q_sum.into_iter().map(|q| q.into_iter().map(|c| c / t).collect()).collect());

    let bar_primal = game.primal_unchecked(&lambda_bar);
    let lambda_out = if bar_primal <= best_primal.0 { lambda_bar } else { best_primal.1 };
    let bar_dual = game.dual_value(&q_bar)?;
    let plan_out = if bar_dual >= best_dual.0 {
        q_bar
    } else {
        AttackPlan::point_masses(&counts, &best_dual.1)
    };
    EquilibriumCertificate::from_pair(game, Mixture::from_raw(lambda_out), plan_out, iterations)
}

/// Runs [`solve_equilibrium_mw`] with `T = 1000, 2000, 4000, ...` until the
/// gap is at most `tol` or the cumulative iteration count would exceed
/// `max_total`. Returns the last certificate; its `iterations` field holds
/// the cumulative count.
pub fn solve_equilibrium_mw_until(game: &FiniteGame, tol: f64, max_total: usize) -> Result<EquilibriumCertificate> {
    let mut t = 1000.min(max_total.max(1));
    let mut spent = 0;
    loop {
        let mut cert = solve_equilibrium_mw(game, t)?;
        spent += t;
        cert.iterations = spent;
        if cert.gap <= tol || spent + 2 * t > max_total {
            return Ok(cert);
        }
        t *= 2;
    }
}

fn normalize(mut v: Vec<f64>) -> Vec<f64> {
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
    v
}

/// Exact minimizer for two classifiers.
///
/// `a ↦ primal((a, 1 - a))` is a maximum of lines, so its minimum over
/// `[0, 1]` sits at an endpoint or at a crossing of two candidate lines of
/// the same point. The dual plan is assembled from the active candidates
/// at the minimizer so that both classifiers face the same expected loss.
pub fn solve_exact_two(game: &FiniteGame) -> Result<EquilibriumCertificate> {
    if game.num_classifiers() != 2 {
        return Err(Error::Unsupported(format!(
            "exact solver needs exactly 2 classifiers, got {}",
            game.num_classifiers()
        )));
    }
    let reduced = game.reduce();
    let g = &reduced.game;

    let mut breaks = vec![0.0, 1.0];
    for i in 0..g.num_points() {
        let lines: Vec<(f64, f64)> = g.rows(i).map(|r| (r[1], r[0] - r[1])).collect();
        for (p, &(c1, s1)) in lines.iter().enumerate() {
            for &(c2, s2) in &lines[p + 1..] {
                if s1 != s2 {
                    let a = (c2 - c1) / (s1 - s2);
                    if a > 0.0 && a < 1.0 {
                        breaks.push(a);
                    }
                }
            }
        }
    }
    breaks.sort_by(|a, b| a.total_cmp(b));
    breaks.dedup();

    let mut best = (f64::INFINITY, 0.0);
    for &a in &breaks {
        let v = g.primal_unchecked(&[a, 1.0 - a]);
        if v < best.0 || (v == best.0 && a > best.1) {
            best = (v, a);
        }
    }
    let a = best.1;
    let lambda = [a, 1.0 - a];

    // Extreme active slopes (loss of classifier 1 minus classifier 2) per point.
    let tol = 1e-12 * g.bound();
    let mut lo = Vec::with_capacity(g.num_points());
    let mut hi = Vec::with_capacity(g.num_points());
    for i in 0..g.num_points() {
        let vals: Vec<f64> = g.rows(i).map(|r| dot(&lambda, r)).collect();
        let max = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut jmin = None::<(usize, f64)>;
        let mut jmax = None::<(usize, f64)>;
        for (j, r) in g.rows(i).enumerate() {
            if vals[j] < max - tol {
                continue;
            }
            let s = r[0] - r[1];
            if jmin.is_none_or(|(_, b)| s < b) {
                jmin = Some((j, s));
            }
            if jmax.is_none_or(|(_, b)| s > b) {
                jmax = Some((j, s));
            }
        }
        lo.push(jmin.expect("nonempty active set"));
        hi.push(jmax.expect("nonempty active set"));
    }

    let counts: Vec<usize> = (0..g.num_points()).map(|i| g.num_candidates(i)).collect();
    let mut probs: Vec<Vec<f64>> = counts.iter().map(|&m| vec![0.0; m]).collect();
    let w = g.weights();
    if a == 0.0 {
        for i in 0..g.num_points() {
            probs[i][hi[i].0] = 1.0;
        }
    } else if a == 1.0 {
        for i in 0..g.num_points() {
            probs[i][lo[i].0] = 1.0;
        }
    } else {
        // Start from the smallest total slope and move points to their
        // largest active slope until the total crosses zero.
        let mut total: f64 = (0..g.num_points()).map(|i| w[i] * lo[i].1).sum();
        let mut split_done = total >= 0.0;
        for i in 0..g.num_points() {
            if split_done {
                probs[i][lo[i].0] += 1.0;
                continue;
            }
            let delta = w[i] * (hi[i].1 - lo[i].1);
            if total + delta <= 0.0 {
                probs[i][hi[i].0] += 1.0;
                total += delta;
            } else {
                let theta = -total / delta;
                probs[i][hi[i].0] += theta;
                probs[i][lo[i].0] += 1.0 - theta;
                total = 0.0;
                split_done = true;
            }
        }
    }
    let plan = reduced.lift_plan(&AttackPlan::from_raw(probs), game);
    EquilibriumCertificate::from_pair(game, Mixture::from_raw(lambda.to_vec()), plan, breaks.len())
}

/// The two-classifier example on the real line: `f₁(x) = -x - 1/2`,
/// `f₂(x) = x - 1/2`, mass 1/2 at `(0, -1)` and 1/4 at `(±1, +1)`, budget
/// `ε = 1` and candidates `{x - ε, x, x + ε}`.
#[derive(Clone, Debug)]
pub struct MotivatingInstance {
    pub classifiers: Vec<Classifier>,
    pub data: LabeledDataset,
    pub candidates: CandidateSet,
    pub game: FiniteGame,
}

pub fn motivating_instance() -> MotivatingInstance {
    motivating_instance_with_epsilon(1.0).expect("valid built-in instance")
}

pub fn motivating_instance_with_epsilon(epsilon: f64) -> Result<MotivatingInstance> {
    let classifiers = vec![Classifier::linear(0, vec![-1.0], -0.5)?, Classifier::linear(1, vec![1.0], -0.5)?];
    let data = LabeledDataset::new(
        vec![
            LabeledPoint { x: vec![0.0], y: -1, weight: 0.5 },
            LabeledPoint { x: vec![-1.0], y: 1, weight: 0.25 },
            LabeledPoint { x: vec![1.0], y: 1, weight: 0.25 },
        ],
        Metric::L2,
        epsilon,
    )?;
    let lists = data
        .points()
        .iter()
        .map(|p| {
            let x = p.x[0];
            if epsilon == 0.0 {
                vec![vec![x]]
            } else {
                vec![vec![x - epsilon], vec![x], vec![x + epsilon]]
            }
        })
        .collect();
    let candidates = CandidateSet::explicit(&data, lists)?;
    let game = build_game(&Loss::zero_one(), &classifiers, &data, &candidates)?;
    Ok(MotivatingInstance { classifiers, data, candidates, game })
}

/// Outcome of [`nearest_neighbor_separation_check`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeparationCheck {
    /// Adversarial 0/1 risk over the dense candidate grid.
    pub risk: f64,
    /// Smallest distance between the two supports.
    pub separation: f64,
    /// Whether `separation > 2ε`, under which the risk is guaranteed zero.
    pub guaranteed: bool,
}

/// Adversarial risk of the nearest-neighbor classifier built on the two
/// supports, over a dense grid of attacks in every ε-ball (`per_axis`
/// grid points per coordinate, filtered to the ball).
pub fn nearest_neighbor_separation_check(
    pos_support: &[Vec<f64>],
    neg_support: &[Vec<f64>],
    epsilon: f64,
    data: &LabeledDataset,
    per_axis: usize,
) -> Result<SeparationCheck> {
    let metric = data.metric();
    let clf = Classifier::new(
        0,
        ClassifierKind::NearestNeighborBinary {
            pos_support: pos_support.to_vec(),
            neg_support: neg_support.to_vec(),
            metric,
        },
    )?;
    let separation = pos_support
        .iter()
        .flat_map(|p| neg_support.iter().map(move |q| metric.distance(p, q)))
        .fold(f64::INFINITY, f64::min);
    let data = data.with_epsilon(epsilon)?;
    let cands = CandidateSet::dense_grid(&data, per_axis)?;
    let game = build_game(&Loss::zero_one(), &[clf], &data, &cands)?;
    let risk = game.primal_value(&Mixture::vertex(1, 0))?;
    Ok(SeparationCheck { risk, separation, guaranteed: separation > 2.0 * epsilon })
}
