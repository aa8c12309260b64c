#![allow(dead_code)]

use advgame::model::{Classifier, LabeledDataset, Metric, Mixture};
use advgame::rng;
use rand::Rng;

pub fn random_dataset(seed: u64, n: usize, d: usize, metric: Metric, epsilon: f64) -> LabeledDataset {
    let mut r = rng::stream(seed, 0);
    let xs = (0..n).map(|_| (0..d).map(|_| rng::uniform(&mut r, -2.0, 2.0)).collect()).collect();
    let ys = (0..n).map(|_| if r.gen_bool(0.5) { 1 } else { -1 }).collect();
    LabeledDataset::uniform(xs, ys, metric, epsilon).unwrap()
}

pub fn random_linear(seed: u64, count: usize, d: usize) -> Vec<Classifier> {
    let mut r = rng::stream(seed, 1);
    (0..count)
        .map(|k| {
            let w = (0..d).map(|_| rng::gaussian(&mut r)).collect();
            Classifier::linear(k, w, rng::uniform(&mut r, -1.0, 1.0)).unwrap()
        })
        .collect()
}

pub fn random_logistic(seed: u64, count: usize, d: usize) -> Vec<Classifier> {
    random_linear(seed, count, d)
        .into_iter()
        .map(|c| {
            let (w, b) = c.affine().unwrap();
            Classifier::logistic(c.id, w.to_vec(), b).unwrap()
        })
        .collect()
}

pub fn random_mixture(seed: u64, len: usize) -> Mixture {
    let mut r = rng::stream(seed, 2);
    let raw: Vec<f64> = (0..len).map(|_| r.gen::<f64>() + 1e-3).collect();
    let s: f64 = raw.iter().sum();
    Mixture::new(raw.into_iter().map(|v| v / s).collect()).unwrap()
}

/// Exact Euclidean projection onto the simplex by enumerating supports.
pub fn projection_by_supports(v: &[f64]) -> Vec<f64> {
    let l = v.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 1u32..(1 << l) {
        let idx: Vec<usize> = (0..l).filter(|k| mask >> k & 1 == 1).collect();
        let shift = (idx.iter().map(|&k| v[k]).sum::<f64>() - 1.0) / idx.len() as f64;
        let mut p = vec![0.0; l];
        let mut ok = true;
        for &k in &idx {
            p[k] = v[k] - shift;
            if p[k] < 0.0 {
                ok = false;
            }
        }
        if !ok {
            continue;
        }
        let dist: f64 = p.iter().zip(v).map(|(a, b)| (a - b).powi(2)).sum();
        if best.as_ref().is_none_or(|(d, _)| dist < *d) {
            best = Some((dist, p));
        }
    }
    best.unwrap().1
}
