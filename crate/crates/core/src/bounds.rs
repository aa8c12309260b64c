//! Statistical and approximation error bounds for the entropic relaxation.
//!
//! The statistical bound controls the error from replacing each point's
//! attack distribution `U_i` with `m` i.i.d. samples; the approximation
//! bound controls the error of the relaxation itself against the exact
//! adversarial risk. Both are checked here on small random or discrete
//! games where the minima can be computed by brute force.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::game::FiniteGame;
use crate::model::{for_each_grid_point, Mixture};
use crate::rng;
use crate::solvers::{entropic_raw, sample_candidates, Alpha};

/// Above this many candidates the Rademacher average is estimated by
/// Monte Carlo instead of enumerating all `2^m` sign patterns.
pub const EXACT_RADEMACHER_MAX: usize = 15;

pub const DEFAULT_SIGMA_DRAWS: usize = 10_000;

/// `(1/m) E_σ[max_k Σ_j σ_j ℓ_ijk]` for one point of the game: exact when
/// `m <= 15`, otherwise a Monte Carlo average over `sigma_draws` signs.
pub fn rademacher_estimate(game: &FiniteGame, point: usize, sigma_draws: usize, seed: u64) -> Result<f64> {
    check_point(game, point)?;
    if game.num_candidates(point) <= EXACT_RADEMACHER_MAX {
        Ok(rademacher_exact(game, point))
    } else {
        rademacher_monte_carlo(game, point, sigma_draws, seed)
    }
}

fn check_point(game: &FiniteGame, point: usize) -> Result<()> {
    if point >= game.num_points() {
        return input(format!("point {point} out of range for {} points", game.num_points()));
    }
    Ok(())
}

/// Exhaustive average over all sign patterns.
pub fn rademacher_exact(game: &FiniteGame, point: usize) -> f64 {
    let m = game.num_candidates(point);
    assert!(m < 30, "{m} candidates is too many to enumerate");
    let patterns = 1u64 << m;
    let mut total = 0.0;
    let mut signs = vec![0i8; m];
    for bits in 0..patterns {
        for (j, s) in signs.iter_mut().enumerate() {
            *s = if bits >> j & 1 == 1 { 1 } else { -1 };
        }
        total += sup_over_classifiers(game, point, &signs);
    }
    total / patterns as f64 / m as f64
}

/// Monte Carlo estimate with antithetic pairs `(σ, -σ)`, so the estimate is
/// unchanged when every draw is negated.
pub fn rademacher_monte_carlo(game: &FiniteGame, point: usize, sigma_draws: usize, seed: u64) -> Result<f64> {
    check_point(game, point)?;
    if sigma_draws == 0 {
        return input("sigma_draws must be >= 1");
    }
    let m = game.num_candidates(point);
    let mut r = rng::stream(seed, point as u64);
    let mut draws = Vec::with_capacity(sigma_draws);
    while draws.len() < sigma_draws {
        let s: Vec<i8> = (0..m).map(|_| if r.gen_bool(0.5) { 1 } else { -1 }).collect();
        if draws.len() + 1 < sigma_draws {
            draws.push(s.iter().map(|v| -v).collect());
        }
        draws.push(s);
    }
    Ok(rademacher_from_signs(game, point, &draws))
}

/// Average of `(1/m) max_k Σ_j σ_j ℓ_ijk` over the given sign vectors.
pub fn rademacher_from_signs(game: &FiniteGame, point: usize, signs: &[Vec<i8>]) -> f64 {
    let m = game.num_candidates(point) as f64;
    signs.iter().map(|s| sup_over_classifiers(game, point, s)).sum::<f64>() / signs.len() as f64 / m
}

fn sup_over_classifiers(game: &FiniteGame, point: usize, signs: &[i8]) -> f64 {
    let mut acc = vec![0.0; game.num_classifiers()];
    for (s, row) in signs.iter().zip(game.rows(point)) {
        let s = *s as f64;
        for (a, v) in acc.iter_mut().zip(row) {
            *a += s * v;
        }
    }
    acc.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

/// `(2 e^{M/α}) R̄ + 6 M̃ e^{M/α} √(log(4/δ) / (2 m N))` with `M̃ = max(M, 1)`
/// and `R̄` the average per-point Rademacher complexity.
pub fn statistical_bound(
    bound: f64,
    alpha: f64,
    points: usize,
    samples: usize,
    classifiers: usize,
    delta: f64,
    rademacher_avg: f64,
) -> Result<f64> {
    if !(bound > 0.0 && alpha > 0.0 && points > 0 && samples > 0 && classifiers > 0) {
        return input("bound, alpha, N, m and L must be positive");
    }
    if !(delta > 0.0 && delta < 1.0) {
        return input(format!("delta must be in (0, 1), got {delta}"));
    }
    if !(rademacher_avg.is_finite()) {
        return input("rademacher average must be finite");
    }
    let e = (bound / alpha).exp();
    let m_tilde = bound.max(1.0);
    let conf = ((4.0 / delta).ln() / (2.0 * samples as f64 * points as f64)).sqrt();
    Ok(2.0 * e * rademacher_avg.max(0.0) + 6.0 * m_tilde * e * conf)
}

/// `2 α |ln C_β| + β`.
pub fn approximation_bound(alpha: f64, c_beta: f64, beta: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return input(format!("alpha must be positive, got {alpha}"));
    }
    if !(c_beta > 0.0 && c_beta <= 1.0) {
        return input(format!("C_beta must be in (0, 1], got {c_beta}"));
    }
    if !(beta >= 0.0) {
        return input(format!("beta must be >= 0, got {beta}"));
    }
    Ok(2.0 * alpha * c_beta.ln().abs() + beta)
}

/// Smallest fraction of `β`-optimal candidates over all points and over the
/// simplex grid of resolution `steps`, each point's candidates weighted
/// uniformly.
pub fn c_beta(game: &FiniteGame, beta: f64, steps: usize) -> Result<f64> {
    if !(beta >= 0.0) {
        return input("beta must be >= 0");
    }
    check_grid(game, steps)?;
    let mut worst = 1.0_f64;
    for_each_grid_point(game.num_classifiers(), steps, |lam| {
        for i in 0..game.num_points() {
            let s: Vec<f64> = game.rows(i).map(|r| dot(lam, r)).collect();
            let max = s.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let hits = s.iter().filter(|v| **v >= max - beta - 1e-12).count();
            worst = worst.min(hits as f64 / s.len() as f64);
        }
    });
    Ok(worst)
}

fn check_grid(game: &FiniteGame, steps: usize) -> Result<()> {
    if game.num_classifiers() > 3 {
        return Err(crate::Error::Unsupported(format!(
            "grid minimization needs L <= 3, got {}",
            game.num_classifiers()
        )));
    }
    if steps == 0 {
        return input("grid needs at least one step");
    }
    Ok(())
}

/// Minimum of the entropic objective over the simplex grid of resolution
/// `steps` (only `L <= 3`).
pub fn grid_min_entropic(game: &FiniteGame, alpha: &Alpha, steps: usize) -> Result<(f64, Mixture)> {
    check_grid(game, steps)?;
    alpha.validate(game.num_points())?;
    let mut best = (f64::INFINITY, Vec::new());
    for_each_grid_point(game.num_classifiers(), steps, |lam| {
        let (v, _) = entropic_raw(game, alpha, lam);
        if v < best.0 {
            best = (v, lam.to_vec());
        }
    });
    Ok((best.0, Mixture::from_raw(best.1)))
}

/// Minimum of the exact primal over the simplex grid (only `L <= 3`).
pub fn grid_min_primal(game: &FiniteGame, steps: usize) -> Result<(f64, Mixture)> {
    check_grid(game, steps)?;
    let mut best = (f64::INFINITY, Vec::new());
    for_each_grid_point(game.num_classifiers(), steps, |lam| {
        let v = game.primal_unchecked(lam);
        if v < best.0 {
            best = (v, lam.to_vec());
        }
    });
    Ok((best.0, Mixture::from_raw(best.1)))
}

/// Random game family used to check the statistical bound. Each trial draws
/// a game with `points` points and `full_candidates` candidates per point,
/// losses uniform in `[0, bound]`; the uniform distribution over the full
/// list plays the role of `U_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundFamily {
    pub points: usize,
    pub classifiers: usize,
    pub full_candidates: usize,
    /// Samples per point `m`; at least `full_candidates` uses the full list.
    pub samples: usize,
    pub alpha: f64,
    pub bound: f64,
    pub grid_steps: usize,
    pub sigma_draws: usize,
}

impl Default for BoundFamily {
    fn default() -> Self {
        Self {
            points: 10,
            classifiers: 2,
            full_candidates: 200,
            samples: 20,
            alpha: 1.0,
            bound: 1.0,
            grid_steps: 1000,
            sigma_draws: 1000,
        }
    }
}

impl BoundFamily {
    pub fn validate(&self) -> Result<()> {
        if self.points == 0 || self.full_candidates == 0 || self.samples == 0 || self.sigma_draws == 0 {
            return input("points, candidates, samples and sigma_draws must be >= 1");
        }
        if !(1..=3).contains(&self.classifiers) {
            return input(format!("bound validation supports 1 to 3 classifiers, got {}", self.classifiers));
        }
        if !(self.alpha > 0.0 && self.bound > 0.0) {
            return input("alpha and bound must be positive");
        }
        if self.grid_steps == 0 {
            return input("grid_steps must be >= 1");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub samples: usize,
    /// Mean of the per-trial bound values.
    pub bound_value: f64,
    /// Median of the per-trial deviations.
    pub empirical_deviation: f64,
    pub confidence_delta: f64,
    pub trials: usize,
    pub violation_rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundTrial {
    pub trial: usize,
    pub samples: usize,
    pub deviation: f64,
    pub bound: f64,
    pub violated: bool,
}

/// Runs `trials` independent trials (trial `t` uses stream `t` of `seed`)
/// and compares `|min_λ R_α(full) - min_λ R_α(sampled)|` with
/// [`statistical_bound`]. Violations are counted, not treated as errors.
pub fn validate_statistical_bound(
    family: &BoundFamily,
    trials: usize,
    delta: f64,
    seed: u64,
) -> Result<(BoundReport, Vec<BoundTrial>)> {
    family.validate()?;
    if trials == 0 {
        return input("trials must be >= 1");
    }
    if !(delta > 0.0 && delta < 1.0) {
        return input(format!("delta must be in (0, 1), got {delta}"));
    }
    let rows: Vec<BoundTrial> = (0..trials)
        .into_par_iter()
        .map(|t| run_trial(family, t, delta, seed))
        .collect::<Result<_>>()?;
    let violations = rows.iter().filter(|r| r.violated).count();
    let mut devs: Vec<f64> = rows.iter().map(|r| r.deviation).collect();
    devs.sort_by(f64::total_cmp);
    let n = devs.len();
    let median = if n % 2 == 1 { devs[n / 2] } else { 0.5 * (devs[n / 2 - 1] + devs[n / 2]) };
    let report = BoundReport {
        samples: family.samples,
        bound_value: rows.iter().map(|r| r.bound).sum::<f64>() / n as f64,
        empirical_deviation: median,
        confidence_delta: delta,
        trials,
        violation_rate: violations as f64 / n as f64,
    };
    Ok((report, rows))
}

fn run_trial(family: &BoundFamily, trial: usize, delta: f64, seed: u64) -> Result<BoundTrial> {
    let mut r = rng::stream(seed, trial as u64);
    let weights = vec![1.0 / family.points as f64; family.points];
    let losses: Vec<Vec<Vec<f64>>> = (0..family.points)
        .map(|_| {
            (0..family.full_candidates)
                .map(|_| (0..family.classifiers).map(|_| rng::uniform(&mut r, 0.0, family.bound)).collect())
                .collect()
        })
        .collect();
    let full = FiniteGame::new(weights, losses, family.bound)?;
    let alpha = Alpha::Constant(family.alpha);
    let sample_seed: u64 = r.gen();
    let (sampled, deviation) = if family.samples >= family.full_candidates {
        (full.clone(), 0.0)
    } else {
        let sampled = sample_candidates(&full, Some(family.samples), sample_seed)?;
        let (a, _) = grid_min_entropic(&full, &alpha, family.grid_steps)?;
        let (b, _) = grid_min_entropic(&sampled, &alpha, family.grid_steps)?;
        (sampled, (a - b).abs())
    };
    let rad_seed: u64 = r.gen();
    let rad = (0..family.points)
        .map(|i| rademacher_estimate(&sampled, i, family.sigma_draws, rad_seed))
        .sum::<Result<f64>>()?
        / family.points as f64;
    let m = family.samples.min(family.full_candidates);
    let bound = statistical_bound(family.bound, family.alpha, family.points, m, family.classifiers, delta, rad)?;
    Ok(BoundTrial { trial, samples: family.samples, deviation, bound, violated: deviation > bound })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}
