//! Datasets, classifiers, losses and mixtures.
//!
//! Binary tasks use labels in `{-1, +1}` and a real score `f(x)`; a point is
//! misclassified when `y f(x) <= 0`, so a zero score counts as an error.
//! Multi-class problems are only supported through [`ClassifierKind::Tabular`].

use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};

/// Tolerance on `Σ weights = 1` for datasets and mixtures.
pub const SIMPLEX_TOL: f64 = 1e-9;

/// Default clamp for the cross-entropy surrogate.
pub const DEFAULT_CE_BOUND: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Metric {
    L2,
    Linf,
}

impl Metric {
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        let diffs = a.iter().zip(b).map(|(u, v)| (u - v).abs());
        match self {
            Metric::L2 => diffs.map(|d| d * d).sum::<f64>().sqrt(),
            Metric::Linf => diffs.fold(0.0, f64::max),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledPoint {
    pub x: Vec<f64>,
    pub y: i64,
    pub weight: f64,
}

/// Weighted labeled points together with the attack geometry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    points: Vec<LabeledPoint>,
    metric: Metric,
    epsilon: f64,
}

impl LabeledDataset {
    pub fn new(points: Vec<LabeledPoint>, metric: Metric, epsilon: f64) -> Result<Self> {
        if points.is_empty() {
            return input("dataset has no points");
        }
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return input(format!("epsilon must be finite and >= 0, got {epsilon}"));
        }
        let d = points[0].x.len();
        let mut total = 0.0;
        for (i, p) in points.iter().enumerate() {
            if p.x.len() != d {
                return input(format!("point {i} has dimension {}, expected {d}", p.x.len()));
            }
            if p.x.iter().any(|v| !v.is_finite()) {
                return input(format!("point {i} has non-finite coordinates"));
            }
            if !(p.weight >= 0.0 && p.weight.is_finite()) {
                return input(format!("point {i} has invalid weight {}", p.weight));
            }
            total += p.weight;
        }
        if (total - 1.0).abs() > SIMPLEX_TOL {
            return input(format!("weights sum to {total}, expected 1"));
        }
        Ok(Self { points, metric, epsilon })
    }

    /// Dataset with uniform weights `1/N`.
    pub fn uniform(xs: Vec<Vec<f64>>, ys: Vec<i64>, metric: Metric, epsilon: f64) -> Result<Self> {
        if xs.len() != ys.len() {
            return input(format!("{} inputs but {} labels", xs.len(), ys.len()));
        }
        let w = 1.0 / xs.len().max(1) as f64;
        let points = xs
            .into_iter()
            .zip(ys)
            .map(|(x, y)| LabeledPoint { x, y, weight: w })
            .collect();
        Self::new(points, metric, epsilon)
    }

    pub fn points(&self) -> &[LabeledPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].x.len()
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Same points and metric under a different budget.
    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        Self::new(self.points.clone(), self.metric, epsilon)
    }

    pub fn weights(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.weight).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ClassifierKind {
    /// `f(x) = <w, x> + b`.
    LinearBinary { w: Vec<f64>, b: f64 },
    /// Same decision function as `LinearBinary`; trained through the
    /// logistic (cross-entropy) surrogate.
    LogisticBinary { w: Vec<f64>, b: f64 },
    /// `f(x) = d(x, negative support) - d(x, positive support)`.
    NearestNeighborBinary {
        pos_support: Vec<Vec<f64>>,
        neg_support: Vec<Vec<f64>>,
        metric: Metric,
    },
    /// Per-label scores over an enumerated list of inputs.
    Tabular {
        labels: Vec<i64>,
        inputs: Vec<Vec<f64>>,
        scores: Vec<Vec<f64>>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classifier {
    pub id: usize,
    kind: ClassifierKind,
}

impl Classifier {
    pub fn new(id: usize, kind: ClassifierKind) -> Result<Self> {
        match &kind {
            ClassifierKind::LinearBinary { w, b } | ClassifierKind::LogisticBinary { w, b } => {
                if w.is_empty() || w.iter().chain([b]).any(|v| !v.is_finite()) {
                    return input(format!("classifier {id}: weights must be finite and nonempty"));
                }
            }
            ClassifierKind::NearestNeighborBinary { pos_support, neg_support, .. } => {
                if pos_support.is_empty() || neg_support.is_empty() {
                    return input(format!("classifier {id}: empty nearest-neighbor support"));
                }
                let d = pos_support[0].len();
                if pos_support.iter().chain(neg_support).any(|p| p.len() != d) {
                    return input(format!("classifier {id}: support dimensions differ"));
                }
            }
            ClassifierKind::Tabular { labels, inputs, scores } => {
                if labels.len() < 2 {
                    return input(format!("classifier {id}: tabular needs at least two labels"));
                }
                if inputs.len() != scores.len() || scores.iter().any(|s| s.len() != labels.len()) {
                    return input(format!("classifier {id}: tabular score table is ragged"));
                }
            }
        }
        Ok(Self { id, kind })
    }

    pub fn linear(id: usize, w: Vec<f64>, b: f64) -> Result<Self> {
        Self::new(id, ClassifierKind::LinearBinary { w, b })
    }

    pub fn logistic(id: usize, w: Vec<f64>, b: f64) -> Result<Self> {
        Self::new(id, ClassifierKind::LogisticBinary { w, b })
    }

    pub fn kind(&self) -> &ClassifierKind {
        &self.kind
    }

    /// Weight vector and bias of a linear or logistic model.
    pub fn affine(&self) -> Option<(&[f64], f64)> {
        match &self.kind {
            ClassifierKind::LinearBinary { w, b } | ClassifierKind::LogisticBinary { w, b } => {
                Some((w, *b))
            }
            _ => None,
        }
    }

    pub(crate) fn affine_mut(&mut self) -> Option<(&mut Vec<f64>, &mut f64)> {
        match &mut self.kind {
            ClassifierKind::LinearBinary { w, b } | ClassifierKind::LogisticBinary { w, b } => {
                Some((w, b))
            }
            _ => None,
        }
    }

    pub fn is_differentiable(&self) -> bool {
        self.affine().is_some()
    }

    /// Real-valued score of a binary classifier.
    pub fn score(&self, x: &[f64]) -> Result<f64> {
        match &self.kind {
            ClassifierKind::LinearBinary { w, b } | ClassifierKind::LogisticBinary { w, b } => {
                check_dim(self.id, w.len(), x.len())?;
                Ok(dot(w, x) + b)
            }
            ClassifierKind::NearestNeighborBinary { pos_support, neg_support, metric } => {
                check_dim(self.id, pos_support[0].len(), x.len())?;
                Ok(set_distance(*metric, x, neg_support) - set_distance(*metric, x, pos_support))
            }
            ClassifierKind::Tabular { labels, .. } => {
                if labels.len() != 2 || !labels.contains(&-1) || !labels.contains(&1) {
                    return Err(Error::Unsupported(format!(
                        "classifier {}: score needs a {{-1,+1}} tabular table",
                        self.id
                    )));
                }
                let row = self.tabular_row(x)?;
                let pos = labels.iter().position(|&l| l == 1).unwrap_or(0);
                Ok(row[pos] - row[1 - pos])
            }
        }
    }

    fn tabular_row(&self, x: &[f64]) -> Result<&[f64]> {
        let ClassifierKind::Tabular { inputs, scores, .. } = &self.kind else {
            unreachable!("tabular_row on non-tabular classifier");
        };
        inputs
            .iter()
            .position(|u| u.len() == x.len() && u.iter().zip(x).all(|(a, b)| (a - b).abs() <= 1e-12))
            .map(|r| scores[r].as_slice())
            .ok_or_else(|| Error::Input(format!("classifier {}: input {x:?} not in table", self.id)))
    }

    /// Predicted label; binary kinds return `+1` iff the score is positive.
    pub fn predict(&self, x: &[f64]) -> Result<i64> {
        if let ClassifierKind::Tabular { labels, .. } = &self.kind {
            let row = self.tabular_row(x)?;
            let best = (0..row.len()).fold(0, |b, c| if row[c] > row[b] { c } else { b });
            return Ok(labels[best]);
        }
        Ok(if self.score(x)? > 0.0 { 1 } else { -1 })
    }

    /// Gradient in `x` of the clamped cross-entropy of a linear/logistic
    /// model. Zero where the clamp is active.
    pub fn ce_input_gradient(&self, x: &[f64], y: i64, bound: f64) -> Result<Vec<f64>> {
        let (w, b) = self.affine().ok_or_else(|| {
            Error::Unsupported(format!("classifier {} is not differentiable", self.id))
        })?;
        check_dim(self.id, w.len(), x.len())?;
        let margin = y as f64 * (dot(w, x) + b);
        if softplus(-margin) >= bound {
            return Ok(vec![0.0; w.len()]);
        }
        // d/dx softplus(-y f(x)) = -y * sigmoid(-y f(x)) * w
        let s = -(y as f64) * sigmoid(-margin);
        Ok(w.iter().map(|wi| s * wi).collect())
    }

    /// Gradient of the clamped cross-entropy in `(w, b)`.
    pub(crate) fn ce_param_gradient(&self, x: &[f64], y: i64, bound: f64) -> Result<(Vec<f64>, f64)> {
        let (w, b) = self.affine().ok_or_else(|| {
            Error::Unsupported(format!("classifier {} is not differentiable", self.id))
        })?;
        check_dim(self.id, w.len(), x.len())?;
        let margin = y as f64 * (dot(w, x) + b);
        if softplus(-margin) >= bound {
            return Ok((vec![0.0; w.len()], 0.0));
        }
        let s = -(y as f64) * sigmoid(-margin);
        Ok((x.iter().map(|xi| s * xi).collect(), s))
    }
}

fn check_dim(id: usize, expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return input(format!("classifier {id}: input dimension {got}, expected {expected}"));
    }
    Ok(())
}

fn set_distance(metric: Metric, x: &[f64], set: &[Vec<f64>]) -> f64 {
    set.iter().map(|s| metric.distance(x, s)).fold(f64::INFINITY, f64::min)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

/// `log(1 + e^z)` without overflow.
pub fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LossKind {
    ZeroOne,
    CrossEntropy,
}

/// A loss bounded in `[0, bound]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Loss {
    pub kind: LossKind,
    pub bound: f64,
}

impl Loss {
    pub fn zero_one() -> Self {
        Self { kind: LossKind::ZeroOne, bound: 1.0 }
    }

    /// Cross-entropy clamped at `bound`.
    pub fn cross_entropy(bound: f64) -> Result<Self> {
        if !(bound > 0.0 && bound.is_finite()) {
            return input(format!("loss bound must be positive, got {bound}"));
        }
        Ok(Self { kind: LossKind::CrossEntropy, bound })
    }
}

impl Default for Loss {
    fn default() -> Self {
        Self::zero_one()
    }
}

/// `l(θ_k, (x, y))`, always in `[0, loss.bound]`.
pub fn eval_loss(loss: &Loss, clf: &Classifier, x: &[f64], y: i64) -> Result<f64> {
    if let ClassifierKind::Tabular { labels, .. } = clf.kind() {
        let row = clf.tabular_row(x)?;
        let yi = labels
            .iter()
            .position(|&l| l == y)
            .ok_or_else(|| Error::Input(format!("label {y} unknown to classifier {}", clf.id)))?;
        return Ok(match loss.kind {
            LossKind::ZeroOne => {
                let rival = row
                    .iter()
                    .enumerate()
                    .filter(|&(c, _)| c != yi)
                    .map(|(_, s)| *s)
                    .fold(f64::NEG_INFINITY, f64::max);
                if row[yi] <= rival {
                    1.0
                } else {
                    0.0
                }
            }
            LossKind::CrossEntropy => {
                let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let lse = max + row.iter().map(|s| (s - max).exp()).sum::<f64>().ln();
                (lse - row[yi]).clamp(0.0, loss.bound)
            }
        });
    }
    let margin = y as f64 * clf.score(x)?;
    Ok(match loss.kind {
        LossKind::ZeroOne => {
            if margin <= 0.0 {
                1.0
            } else {
                0.0
            }
        }
        LossKind::CrossEntropy => softplus(-margin).clamp(0.0, loss.bound),
    })
}

/// Probability vector over a finite classifier set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Mixture {
    weights: Vec<f64>,
}

impl Mixture {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return input("mixture has no components");
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return input(format!("mixture weights must be finite and nonnegative: {weights:?}"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > SIMPLEX_TOL {
            return input(format!("mixture weights sum to {total}, expected 1"));
        }
        Ok(Self { weights })
    }

    pub fn uniform(len: usize) -> Self {
        assert!(len > 0, "empty mixture");
        Self { weights: vec![1.0 / len as f64; len] }
    }

    /// Pure strategy `e_k`.
    pub fn vertex(len: usize, k: usize) -> Self {
        assert!(k < len, "vertex {k} out of range for {len} components");
        let mut weights = vec![0.0; len];
        weights[k] = 1.0;
        Self { weights }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub(crate) fn from_raw(weights: Vec<f64>) -> Self {
        Self { weights }
    }
}

/// Expected loss `Σ_k λ_k l(θ_k, (x, y))`.
pub fn mixture_loss(loss: &Loss, clfs: &[Classifier], mix: &Mixture, x: &[f64], y: i64) -> Result<f64> {
    if mix.len() != clfs.len() {
        return input(format!("mixture has {} weights for {} classifiers", mix.len(), clfs.len()));
    }
    let mut total = 0.0;
    for (clf, lam) in clfs.iter().zip(mix.weights()) {
        if *lam != 0.0 {
            total += lam * eval_loss(loss, clf, x, y)?;
        }
    }
    Ok(total)
}

/// Per-classifier standard risks `Σ_i w_i l(θ_k, point_i)`.
pub fn classifier_risks(loss: &Loss, clfs: &[Classifier], data: &LabeledDataset) -> Result<Vec<f64>> {
    clfs.iter()
        .map(|clf| {
            data.points()
                .iter()
                .map(|p| Ok(p.weight * eval_loss(loss, clf, &p.x, p.y)?))
                .sum()
        })
        .collect()
}

/// Standard risk of the randomized classifier `mix`.
pub fn standard_risk(loss: &Loss, clfs: &[Classifier], mix: &Mixture, data: &LabeledDataset) -> Result<f64> {
    if mix.len() != clfs.len() {
        return input(format!("mixture has {} weights for {} classifiers", mix.len(), clfs.len()));
    }
    let mut total = 0.0;
    for p in data.points() {
        total += p.weight * mixture_loss(loss, clfs, mix, &p.x, p.y)?;
    }
    Ok(total)
}

/// Minimum standard risk over pure strategies and over a dense grid of
/// mixtures. Standard risk is linear in `λ`, so the two agree.
pub fn min_standard_risk_equality_check(
    loss: &Loss,
    clfs: &[Classifier],
    data: &LabeledDataset,
) -> Result<(f64, f64)> {
    if clfs.is_empty() {
        return input("no classifiers");
    }
    let risks = classifier_risks(loss, clfs, data)?;
    let vertex_min = risks.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut grid_min = f64::INFINITY;
    for_each_grid_point(clfs.len(), grid_resolution(clfs.len()), |lam| {
        let r = dot(lam, &risks);
        if r < grid_min {
            grid_min = r;
        }
    });
    Ok((vertex_min, grid_min))
}

/// Finest per-axis resolution (capped at 1000) whose simplex grid has at
/// most two million points.
pub fn grid_resolution(len: usize) -> usize {
    let count = |n: usize| -> f64 {
        // C(n + len - 1, len - 1)
        (1..len).fold(1.0, |acc, i| acc * (n + i) as f64 / i as f64)
    };
    let mut n = 1000;
    while n > 1 && count(n) > 2.0e6 {
        n = (n as f64 * 0.8) as usize;
    }
    n
}

/// Visits every point of `{λ ∈ Δ_len : λ_k ∈ {0, 1/n, ..., 1}}`.
pub fn for_each_grid_point(len: usize, n: usize, mut visit: impl FnMut(&[f64])) {
    let mut counts = vec![0usize; len];
    let mut lam = vec![0.0; len];
    fn rec(k: usize, left: usize, n: usize, counts: &mut [usize], lam: &mut [f64], visit: &mut dyn FnMut(&[f64])) {
        let len = counts.len();
        if k == len - 1 {
            counts[k] = left;
            for (l, c) in lam.iter_mut().zip(counts.iter()) {
                *l = *c as f64 / n as f64;
            }
            visit(lam);
            return;
        }
        for c in 0..=left {
            counts[k] = c;
            rec(k + 1, left - c, n, counts, lam, visit);
        }
    }
    rec(0, n, n, &mut counts, &mut lam, &mut visit);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f1() -> Classifier {
        Classifier::linear(0, vec![-1.0], -0.5).unwrap()
    }

    fn f2() -> Classifier {
        Classifier::linear(1, vec![1.0], -0.5).unwrap()
    }

    fn motivating_data() -> LabeledDataset {
        LabeledDataset::new(
            vec![
                LabeledPoint { x: vec![0.0], y: -1, weight: 0.5 },
                LabeledPoint { x: vec![-1.0], y: 1, weight: 0.25 },
                LabeledPoint { x: vec![1.0], y: 1, weight: 0.25 },
            ],
            Metric::L2,
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn zero_one_examples() {
        let l = Loss::zero_one();
        assert_eq!(eval_loss(&l, &f1(), &[1.0], 1).unwrap(), 1.0);
        assert_eq!(eval_loss(&l, &f1(), &[0.0], -1).unwrap(), 0.0);
        assert_eq!(eval_loss(&l, &f2(), &[0.0], -1).unwrap(), 0.0);
        // a zero score is an error for both labels
        let flat = Classifier::linear(2, vec![1.0], 0.0).unwrap();
        assert_eq!(eval_loss(&l, &flat, &[0.0], 1).unwrap(), 1.0);
        assert_eq!(eval_loss(&l, &flat, &[0.0], -1).unwrap(), 1.0);
    }

    #[test]
    fn dimension_mismatch_is_input_error() {
        let err = eval_loss(&Loss::zero_one(), &f1(), &[1.0, 2.0], 1).unwrap_err();
        assert!(matches!(err, Error::Input(_)));
    }

    #[test]
    fn cross_entropy_is_clamped() {
        let l = Loss::cross_entropy(10.0).unwrap();
        let big = Classifier::linear(0, vec![100.0], 0.0).unwrap();
        assert_eq!(eval_loss(&l, &big, &[1.0], -1).unwrap(), 10.0);
        let v = eval_loss(&l, &big, &[1.0], 1).unwrap();
        assert!((0.0..1e-40).contains(&v));
        let g = big.ce_input_gradient(&[1.0], -1, 10.0).unwrap();
        assert_eq!(g, vec![0.0]);
    }

    #[test]
    fn ce_input_gradient_matches_finite_differences() {
        let l = Loss::cross_entropy(10.0).unwrap();
        let c = Classifier::logistic(0, vec![0.7, -1.3], 0.2).unwrap();
        let x = [0.3, 0.4];
        let g = c.ce_input_gradient(&x, 1, 10.0).unwrap();
        let h = 1e-6;
        for d in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[d] += h;
            xm[d] -= h;
            let fd = (eval_loss(&l, &c, &xp, 1).unwrap() - eval_loss(&l, &c, &xm, 1).unwrap()) / (2.0 * h);
            assert!((fd - g[d]).abs() < 1e-8);
        }
    }

    #[test]
    fn motivating_standard_risks() {
        let data = motivating_data();
        let clfs = [f1(), f2()];
        let l = Loss::zero_one();
        let r1 = standard_risk(&l, &clfs, &Mixture::vertex(2, 0), &data).unwrap();
        let r2 = standard_risk(&l, &clfs, &Mixture::vertex(2, 1), &data).unwrap();
        let rh = standard_risk(&l, &clfs, &Mixture::uniform(2), &data).unwrap();
        assert_eq!((r1, r2, rh), (0.25, 0.25, 0.25));
        assert_eq!(min_standard_risk_equality_check(&l, &clfs, &data).unwrap(), (0.25, 0.25));
    }

    #[test]
    fn single_classifier_equality_check() {
        let data = motivating_data();
        let (a, b) = min_standard_risk_equality_check(&Loss::zero_one(), &[f1()], &data).unwrap();
        assert_eq!(a, 0.25);
        assert_eq!(b, 0.25);
    }

    #[test]
    fn mixture_validation() {
        assert!(Mixture::new(vec![0.5, 0.6]).is_err());
        assert!(Mixture::new(vec![-0.1, 1.1]).is_err());
        assert!(Mixture::new(vec![]).is_err());
        assert!(Mixture::new(vec![0.25, 0.75]).is_ok());
        let data = motivating_data();
        assert!(standard_risk(&Loss::zero_one(), &[f1()], &Mixture::uniform(2), &data).is_err());
    }

    #[test]
    fn dataset_validation() {
        let p = |x: Vec<f64>, w| LabeledPoint { x, y: 1, weight: w };
        assert!(LabeledDataset::new(vec![p(vec![0.0], 0.5), p(vec![1.0], 0.4)], Metric::L2, 0.0).is_err());
        assert!(LabeledDataset::new(vec![p(vec![0.0], 0.5), p(vec![1.0, 2.0], 0.5)], Metric::L2, 0.0).is_err());
        assert!(LabeledDataset::new(vec![p(vec![0.0], 1.0)], Metric::L2, -1.0).is_err());
    }

    #[test]
    fn nearest_neighbor_and_tabular_scores() {
        let nn = Classifier::new(
            0,
            ClassifierKind::NearestNeighborBinary {
                pos_support: vec![vec![5.0]],
                neg_support: vec![vec![-5.0]],
                metric: Metric::L2,
            },
        )
        .unwrap();
        assert_eq!(nn.predict(&[4.0]).unwrap(), 1);
        assert_eq!(nn.predict(&[-4.0]).unwrap(), -1);
        assert!(Classifier::new(
            1,
            ClassifierKind::NearestNeighborBinary { pos_support: vec![], neg_support: vec![vec![0.0]], metric: Metric::L2 }
        )
        .is_err());

        let tab = Classifier::new(
            2,
            ClassifierKind::Tabular {
                labels: vec![0, 1, 2],
                inputs: vec![vec![0.0], vec![1.0]],
                scores: vec![vec![1.0, 2.0, 0.0], vec![3.0, 3.0, 0.0]],
            },
        )
        .unwrap();
        let l = Loss::zero_one();
        assert_eq!(eval_loss(&l, &tab, &[0.0], 1).unwrap(), 0.0);
        assert_eq!(eval_loss(&l, &tab, &[0.0], 0).unwrap(), 1.0);
        // ties count as errors
        assert_eq!(eval_loss(&l, &tab, &[1.0], 0).unwrap(), 1.0);
        assert!(eval_loss(&l, &tab, &[0.5], 0).is_err());
        let ce = eval_loss(&Loss::cross_entropy(10.0).unwrap(), &tab, &[0.0], 1).unwrap();
        let expect = (1f64.exp() + 2f64.exp() + 1.0).ln() - 2.0;
        assert!((ce - expect).abs() < 1e-12);
    }

    #[test]
    fn grid_visits_simplex() {
        let mut count = 0;
        for_each_grid_point(3, 4, |lam| {
            assert!((lam.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            count += 1;
        });
        assert_eq!(count, 15);
        assert_eq!(grid_resolution(2), 1000);
        assert!(grid_resolution(8) >= 10);
    }
}
