//! Synthetic datasets, random classifiers and games, dataset CSV I/O.
//!
//! The dataset CSV has a header `x1,...,xd,y[,weight]`; without a weight
//! column every point gets weight `1/N`. Floats are written with 17
//! significant digits so a write/read round trip is exact.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::attack::CandidateSet;
use crate::error::{input, Error, Result};
use crate::game::FiniteGame;
use crate::model::{classifier_risks, Classifier, ClassifierKind, LabeledDataset, LabeledPoint, Loss, Metric};
use crate::rng;

pub const DEFAULT_REJECTION_BUDGET: usize = 100_000;

/// Two-dimensional binary task: `x | y=-1 ~ N(0, I)` and
/// `x | y=+1 ~ ½ N((-3,0), I) + ½ N((3,0), I)`, balanced labels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
}

/// Draws the synthetic dataset (L2 metric, `ε = 0`). Point `i` uses stream
/// `i` of `seed`.
pub fn gen_synthetic(spec: &SyntheticSpec) -> Result<LabeledDataset> {
    if spec.n == 0 {
        return input("synthetic sample count must be >= 1");
    }
    let mut xs = Vec::with_capacity(spec.n);
    let mut ys = Vec::with_capacity(spec.n);
    for i in 0..spec.n {
        let mut r = rng::stream(spec.seed, i as u64);
        let y = if r.gen_bool(0.5) { 1 } else { -1 };
        let shift = if y == 1 { if r.gen_bool(0.5) { 3.0 } else { -3.0 } } else { 0.0 };
        xs.push(vec![shift + rng::gaussian(&mut r), rng::gaussian(&mut r)]);
        ys.push(y);
    }
    LabeledDataset::uniform(xs, ys, Metric::L2, 0.0)
}

/// Rejection-samples `count` linear classifiers with ZeroOne risk below
/// `max_risk`: `w` uniform on the unit sphere, `b` uniform in `[-5, 5]`.
pub fn gen_random_linear_classifiers(
    data: &LabeledDataset,
    count: usize,
    max_risk: f64,
    seed: u64,
) -> Result<Vec<Classifier>> {
    gen_random_linear_classifiers_with_budget(data, count, max_risk, seed, DEFAULT_REJECTION_BUDGET)
}

pub fn gen_random_linear_classifiers_with_budget(
    data: &LabeledDataset,
    count: usize,
    max_risk: f64,
    seed: u64,
    budget: usize,
) -> Result<Vec<Classifier>> {
    let mut r = rng::stream(seed, 0);
    let loss = Loss::zero_one();
    let mut out = Vec::with_capacity(count);
    let mut draws = 0;
    while out.len() < count {
        if draws == budget {
            return Err(Error::Generation(format!(
                "only {} of {count} classifiers with risk < {max_risk} after {budget} draws",
                out.len()
            )));
        }
        draws += 1;
        let w = rng::unit_vector(&mut r, data.dim());
        let b = rng::uniform(&mut r, -5.0, 5.0);
        let clf = Classifier::linear(out.len(), w, b)?;
        let risk = classifier_risks(&loss, std::slice::from_ref(&clf), data)?[0];
        if risk < max_risk {
            out.push(clf);
        }
    }
    Ok(out)
}

/// Random game with losses uniform in `[0, bound]`, `1..=max_candidates`
/// candidates per point and random point weights.
pub fn random_game(seed: u64, points: usize, classifiers: usize, max_candidates: usize, bound: f64) -> Result<FiniteGame> {
    if points == 0 || classifiers == 0 || max_candidates == 0 {
        return input("random game needs at least one point, classifier and candidate");
    }
    let mut r = rng::stream(seed, 0);
    let raw: Vec<f64> = (0..points).map(|_| rng::uniform(&mut r, 0.1, 1.0)).collect();
    let total: f64 = raw.iter().sum();
    let weights = raw.iter().map(|w| w / total).collect();
    let losses = (0..points)
        .map(|_| {
            let m = r.gen_range(1..=max_candidates);
            (0..m)
                .map(|_| (0..classifiers).map(|_| rng::uniform(&mut r, 0.0, bound)).collect())
                .collect()
        })
        .collect();
    FiniteGame::new(weights, losses, bound)
}

/// Small discrete instance: points on the integer line `0..grid`, binary
/// tabular classifiers with random scores on every grid input, and as
/// candidates the grid inputs within `radius` of each point.
pub struct TabularInstance {
    pub data: LabeledDataset,
    pub classifiers: Vec<Classifier>,
    pub candidates: CandidateSet,
}

pub fn random_tabular_instance(
    seed: u64,
    points: usize,
    classifiers: usize,
    grid: usize,
    radius: usize,
) -> Result<TabularInstance> {
    if points == 0 || classifiers == 0 || grid == 0 {
        return input("tabular instance needs points, classifiers and a nonempty grid");
    }
    let mut r = rng::stream(seed, 0);
    let inputs: Vec<Vec<f64>> = (0..grid).map(|g| vec![g as f64]).collect();
    let clfs = (0..classifiers)
        .map(|id| {
            let scores = (0..grid).map(|_| vec![r.gen::<f64>(), r.gen::<f64>()]).collect();
            Classifier::new(id, ClassifierKind::Tabular { labels: vec![-1, 1], inputs: inputs.clone(), scores })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut xs = Vec::with_capacity(points);
    let mut ys = Vec::with_capacity(points);
    let mut lists = Vec::with_capacity(points);
    for _ in 0..points {
        let g = r.gen_range(0..grid);
        xs.push(vec![g as f64]);
        ys.push(if r.gen_bool(0.5) { 1 } else { -1 });
        let lo = g.saturating_sub(radius);
        let hi = (g + radius).min(grid - 1);
        lists.push((lo..=hi).map(|h| vec![h as f64]).collect());
    }
    let data = LabeledDataset::uniform(xs, ys, Metric::L2, radius as f64)?;
    let candidates = CandidateSet::explicit(&data, lists)?;
    Ok(TabularInstance { data, classifiers: clfs, candidates })
}

pub fn write_csv<W: Write>(data: &LabeledDataset, out: W) -> Result<()> {
    let mut out = BufWriter::new(out);
    let header: Vec<String> = (1..=data.dim()).map(|k| format!("x{k}")).collect();
    writeln!(out, "{},y,weight", header.join(","))?;
    for p in data.points() {
        for v in &p.x {
            write!(out, "{v:.16e},")?;
        }
        writeln!(out, "{},{:.16e}", p.y, p.weight)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_csv<R: BufRead>(reader: R, metric: Metric, epsilon: f64) -> Result<LabeledDataset> {
    let mut lines = reader.lines();
    let header = lines.next().ok_or(Error::Parse { line: 1, msg: "empty file".into() })??;
    let cols: Vec<&str> = header.trim().split(',').map(str::trim).collect();
    let has_weight = cols.last() == Some(&"weight");
    let d = cols.len() - 1 - has_weight as usize;
    let expected: Vec<String> = (1..=d).map(|k| format!("x{k}")).collect();
    if d == 0 || cols[..d] != expected.iter().map(String::as_str).collect::<Vec<_>>()[..] || cols[d] != "y" {
        return Err(Error::Parse { line: 1, msg: format!("expected header x1,...,xd,y[,weight], got {header:?}") });
    }
    let mut points = Vec::new();
    for (idx, line) in lines.enumerate() {
        let lineno = idx + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != cols.len() {
            return Err(Error::Parse { line: lineno, msg: format!("{} fields, expected {}", fields.len(), cols.len()) });
        }
        let num = |s: &str| -> Result<f64> {
            s.parse::<f64>().map_err(|e| Error::Parse { line: lineno, msg: format!("{s:?}: {e}") })
        };
        let x = fields[..d].iter().map(|s| num(s)).collect::<Result<Vec<_>>>()?;
        let y = fields[d]
            .parse::<i64>()
            .map_err(|e| Error::Parse { line: lineno, msg: format!("label {:?}: {e}", fields[d]) })?;
        let weight = if has_weight { num(fields[d + 1])? } else { f64::NAN };
        points.push(LabeledPoint { x, y, weight });
    }
    if points.is_empty() {
        return input("dataset file has no rows");
    }
    if !has_weight {
        let w = 1.0 / points.len() as f64;
        points.iter_mut().for_each(|p| p.weight = w);
    }
    LabeledDataset::new(points, metric, epsilon)
}

pub fn write_csv_path(data: &LabeledDataset, path: &Path) -> Result<()> {
    write_csv(data, File::create(path)?)
}

pub fn read_csv_path(path: &Path, metric: Metric, epsilon: f64) -> Result<LabeledDataset> {
    read_csv(BufReader::new(File::open(path)?), metric, epsilon)
}
