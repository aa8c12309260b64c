mod common;

use advgame::attack::{adversarial_risk, CandidateSet, PgdParams};
use advgame::bounds::{
    approximation_bound, c_beta, grid_min_entropic, grid_min_primal, rademacher_exact, rademacher_monte_carlo,
    statistical_bound,
};
use advgame::datagen::{gen_random_linear_classifiers, gen_synthetic, random_game, random_tabular_instance, SyntheticSpec};
use advgame::game::{
    build_game, motivating_instance, nearest_neighbor_separation_check, solve_equilibrium_mw, solve_exact_two,
};
use advgame::model::{classifier_risks, Classifier, LabeledDataset, LabeledPoint, Loss, Metric, Mixture};
use advgame::solvers::{
    fista_minimize, oracle_subgradient, projected_gradient_minimize, subgradient_bound, Alpha, EntropicConfig,
    ExactOracle, SubgradientConfig,
};
use advgame::trainer::{evaluate_robust, train_from, MixtureModel, RobustEval, TrainConfig};
use common::*;

#[test]
fn rademacher_monte_carlo_matches_enumeration() {
    for s in 0..10 {
        // one point with five candidates
        let raw = random_game(100 + s, 5, 2, 1, 1.0).unwrap();
        let rows: Vec<Vec<f64>> = (0..5).map(|i| raw.row(i, 0).to_vec()).collect();
        let g = advgame::game::FiniteGame::new(vec![1.0], vec![rows], 1.0).unwrap();
        let exact = rademacher_exact(&g, 0);
        let draws = 10_000;
        let mc = rademacher_monte_carlo(&g, 0, draws, s).unwrap();
        // per-draw values lie in [-1, 1]; antithetic pairs only reduce variance
        let se = 1.0 / (draws as f64).sqrt();
        assert!((mc - exact).abs() <= 3.0 * se, "seed {s}: {mc} vs {exact}");
    }
}

#[test]
fn rademacher_single_classifier_is_near_zero() {
    let g = advgame::game::FiniteGame::new(
        vec![1.0],
        vec![(0..20).map(|j| vec![(j as f64 * 0.37) % 1.0]).collect()],
        1.0,
    )
    .unwrap();
    let draws = 10_000;
    let est = rademacher_monte_carlo(&g, 0, draws, 3).unwrap();
    assert!(est.abs() <= 3.0 / ((draws * 20) as f64).sqrt(), "{est}");
    // antithetic pairs make the linear case vanish exactly
    assert!(est.abs() < 1e-12);
}

#[test]
fn rademacher_identical_classifiers_vanish() {
    let g = advgame::game::FiniteGame::new(vec![1.0], vec![vec![vec![0.4, 0.4]; 6]], 1.0).unwrap();
    assert!(rademacher_exact(&g, 0).abs() < 1e-15);
}

#[test]
fn statistical_bound_matches_direct_formula() {
    let rows: Vec<Vec<f64>> = (0..100).map(|j| vec![(j as f64 * 0.613) % 1.0, (j as f64 * 0.291) % 1.0]).collect();
    let g = advgame::game::FiniteGame::new(vec![1.0], vec![rows], 1.0).unwrap();
    let r = rademacher_monte_carlo(&g, 0, 10_000, 1).unwrap();
    let b = statistical_bound(1.0, 1.0, 1, 100, 2, 0.05, r).unwrap();
    let e = std::f64::consts::E;
    let direct = 2.0 * e * r + 6.0 * 1.0 * e * ((4.0f64 / 0.05).ln() / 200.0).sqrt();
    assert!(b.is_finite() && b > 0.0);
    assert!((b - direct).abs() < 1e-12);
    // doubling m shrinks the confidence term by exactly sqrt(2)
    let b2 = statistical_bound(1.0, 1.0, 1, 200, 2, 0.05, r).unwrap();
    let conf = |m: f64| 6.0 * e * ((4.0f64 / 0.05).ln() / (2.0 * m)).sqrt();
    assert!(((b - 2.0 * e * r) / (b2 - 2.0 * e * r) - 2f64.sqrt()).abs() < 1e-12);
    assert!((b2 - 2.0 * e * r - conf(200.0)).abs() < 1e-12);
}

#[test]
fn approximation_bound_holds_on_motivating_game() {
    let g = motivating_instance().game;
    let (exact, _) = grid_min_primal(&g, 1000).unwrap();
    assert!((exact - 0.75).abs() < 1e-12);
    for beta in [0.0, 0.1, 0.5] {
        let c = c_beta(&g, beta, 1000).unwrap();
        for alpha in [1.0, 0.3, 0.1, 0.01] {
            let (reg, _) = grid_min_entropic(&g, &Alpha::Constant(alpha), 1000).unwrap();
            let bound = approximation_bound(alpha, c, beta).unwrap();
            assert!((exact - reg).abs() <= bound + 1e-12, "alpha {alpha} beta {beta}");
        }
    }
}

#[test]
fn motivating_regularized_values() {
    // at λ = (1/2, 1/2) the loss rows give ⟨λ, ℓ⟩ ∈ {1/2, 0, 1/2}, {1/2, 1/2, 1}, {1, 1/2, 1/2}
    let g = motivating_instance().game;
    let direct = |a: f64| {
        let lse = |v: &[f64]| a * (v.iter().map(|x| (x / a).exp()).sum::<f64>() / 3.0).ln();
        0.5 * lse(&[0.5, 0.0, 0.5]) + 0.25 * lse(&[0.5, 0.5, 1.0]) + 0.25 * lse(&[1.0, 0.5, 0.5])
    };
    for a in [1.0, 0.1, 0.01] {
        let (v, _) = advgame::solvers::entropic_objective(&g, &Alpha::Constant(a), &Mixture::uniform(2)).unwrap();
        assert!((v - direct(a)).abs() < 1e-12, "{v} vs {}", direct(a));
    }
}

#[test]
fn synthetic_law_of_large_numbers() {
    let n = 100_000;
    let d = gen_synthetic(&SyntheticSpec { n, seed: 42 }).unwrap();
    let mean = |pts: Vec<&LabeledPoint>| {
        let k = pts.len() as f64;
        (pts.iter().map(|p| p.x[0]).sum::<f64>() / k, pts.iter().map(|p| p.x[1]).sum::<f64>() / k)
    };
    let neg: Vec<_> = d.points().iter().filter(|p| p.y == -1).collect();
    let pos_right: Vec<_> = d.points().iter().filter(|p| p.y == 1 && p.x[0] > 0.0).collect();
    let pos_left: Vec<_> = d.points().iter().filter(|p| p.y == 1 && p.x[0] <= 0.0).collect();
    let balance = neg.len() as f64 / n as f64;
    assert!((balance - 0.5).abs() <= 4.0 / (n as f64).sqrt());
    let (a, b) = mean(neg);
    assert!(a.abs() < 0.05 && b.abs() < 0.05);
    let (a, b) = mean(pos_right);
    assert!((a - 3.0).abs() < 0.05 && b.abs() < 0.05, "{a} {b}");
    let (a, b) = mean(pos_left);
    assert!((a + 3.0).abs() < 0.05 && b.abs() < 0.05, "{a} {b}");
}

#[test]
fn generated_classifiers_pass_audit() {
    let d = gen_synthetic(&SyntheticSpec { n: 1000, seed: 7 }).unwrap();
    let clfs = gen_random_linear_classifiers(&d, 10, 0.4, 3).unwrap();
    assert_eq!(clfs.len(), 10);
    let risks = classifier_risks(&Loss::zero_one(), &clfs, &d).unwrap();
    assert!(risks.iter().all(|r| *r < 0.4), "{risks:?}");
    assert_eq!(clfs, gen_random_linear_classifiers(&d, 10, 0.4, 3).unwrap());
}

#[test]
fn subgradient_guarantee_on_random_games() {
    for s in 0..20 {
        let g = random_game(s, 6, 2, 5, 1.0).unwrap();
        let exact = solve_exact_two(&g).unwrap().primal_value;
        let t = 400;
        let run = oracle_subgradient(&g, &SubgradientConfig::new(t, 2, 1.0).unwrap(), &mut ExactOracle).unwrap();
        assert!(run.best_value - exact <= subgradient_bound(0.0, 1.0, 2, t) + 1e-12);
        assert!(run.best_value >= exact - 1e-12);
    }
}

#[test]
fn fista_not_worse_than_plain_gradient() {
    let mut wins = 0;
    for s in 0..20 {
        let g = random_game(s, 8, 4, 6, 1.0).unwrap();
        let cfg = EntropicConfig::new(0.05, 30);
        let f = fista_minimize(&g, &cfg).unwrap();
        let p = projected_gradient_minimize(&g, &cfg).unwrap();
        if f.value <= p.value + 1e-9 {
            wins += 1;
        }
        assert!(f.trace.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }
    assert!(wins >= 18, "FISTA matched or beat plain gradient on {wins}/20 games");
}

#[test]
fn mw_and_exact_agree() {
    for s in 0..10 {
        let g = random_game(s, 5, 2, 4, 1.0).unwrap();
        let exact = solve_exact_two(&g).unwrap();
        let mw = solve_equilibrium_mw(&g, 20_000).unwrap();
        assert!(mw.dual_value <= exact.primal_value + 1e-12);
        assert!(mw.primal_value >= exact.primal_value - 1e-12);
        assert!(mw.gap <= 0.02);
    }
}

#[test]
fn tabular_games_match_direct_evaluation() {
    for s in 0..10 {
        let t = random_tabular_instance(s, 6, 3, 7, 2).unwrap();
        let zo = Loss::zero_one();
        let g = build_game(&zo, &t.classifiers, &t.data, &t.candidates).unwrap();
        let mix = random_mixture(s, 3);
        let direct = adversarial_risk(&zo, &t.classifiers, &mix, &t.data, &t.candidates).unwrap();
        assert!((g.primal_value(&mix).unwrap() - direct).abs() < 1e-12);
    }
}

#[test]
fn separated_nearest_neighbor_has_zero_risk() {
    let pos = vec![vec![2.0, 0.0], vec![2.5, 1.0]];
    let neg = vec![vec![-2.0, 0.0], vec![-1.5, -1.0]];
    let mut pts = Vec::new();
    for p in &pos {
        pts.push(LabeledPoint { x: p.clone(), y: 1, weight: 0.25 });
    }
    for p in &neg {
        pts.push(LabeledPoint { x: p.clone(), y: -1, weight: 0.25 });
    }
    for metric in [Metric::L2, Metric::Linf] {
        let data = LabeledDataset::new(pts.clone(), metric, 0.0).unwrap();
        let check = nearest_neighbor_separation_check(&pos, &neg, 1.4, &data, 41).unwrap();
        assert!(check.guaranteed);
        assert_eq!(check.risk, 0.0);
    }
}

#[test]
fn robust_accuracy_on_separated_data() {
    // margin 1.5 on each side, budget 0.5, separator x1 = 0 through the midpoint
    let data = LabeledDataset::uniform(
        vec![vec![-1.5, 0.3], vec![-2.0, -1.0], vec![1.5, 0.0], vec![3.0, 2.0]],
        vec![-1, -1, 1, 1],
        Metric::L2,
        0.5,
    )
    .unwrap();
    let model = MixtureModel::new(vec![Classifier::logistic(0, vec![1.0, 0.0], 0.0).unwrap()], Mixture::uniform(1)).unwrap();
    let dense = RobustEval::Candidates(CandidateSet::dense_grid(&data, 41).unwrap());
    assert_eq!(evaluate_robust(&model, &data, &dense).unwrap(), (1.0, 1.0));
    let pgd = RobustEval::Pgd { params: PgdParams::with_steps(0.5, 20, 1, 0), ce_bound: 10.0 };
    assert_eq!(evaluate_robust(&model, &data, &pgd).unwrap(), (1.0, 1.0));
}

#[test]
fn motivating_mixture_robust_accuracy() {
    let inst = motivating_instance();
    let model = MixtureModel::new(inst.classifiers.clone(), Mixture::uniform(2)).unwrap();
    let (std_acc, rob) = evaluate_robust(&model, &inst.data, &RobustEval::Candidates(inst.candidates.clone())).unwrap();
    assert!((std_acc - 0.75).abs() < 1e-12);
    assert!((rob - 0.25).abs() < 1e-12);
}

#[test]
fn robust_accuracy_shrinks_with_budget() {
    let base = random_dataset(4, 60, 2, Metric::L2, 0.0);
    let model = MixtureModel::new(random_logistic(4, 1, 2), Mixture::uniform(1)).unwrap();
    let mut prev = f64::INFINITY;
    for k in 0..8 {
        let eps = 0.2 * k as f64;
        let data = base.with_epsilon(eps).unwrap();
        let eval = RobustEval::Pgd { params: PgdParams::with_steps(eps, 20, 1, 0), ce_bound: 10.0 };
        let (_, r) = evaluate_robust(&model, &data, &eval).unwrap();
        assert!(r <= prev + 1e-12, "eps {eps}: {r} > {prev}");
        prev = r;
    }
}

#[test]
fn zero_budget_training_is_standard_gradient_descent() {
    let data = random_dataset(8, 30, 2, Metric::L2, 0.0);
    let mut cfg = TrainConfig::new(1, 40, 0.0);
    cfg.t_theta = 10;
    cfg.lr_model = 0.3;
    let init = MixtureModel::init_logistic(1, 2, 1.0, 5).unwrap();
    let (trained, _) = train_from(&data, None, init.clone(), &cfg).unwrap();

    // plain full-batch gradient descent on the logistic loss
    let (w0, b0) = init.models[0].affine().unwrap();
    let (mut w, mut b) = (w0.to_vec(), b0);
    let model_steps = (1..=cfg.iterations).filter(|t| !cfg.is_lambda_step(*t)).count();
    for _ in 0..model_steps {
        let mut gw = [0.0; 2];
        let mut gb = 0.0;
        for p in data.points() {
            let y = p.y as f64;
            let margin = y * (w[0] * p.x[0] + w[1] * p.x[1] + b);
            let s = -y / (1.0 + margin.exp());
            gw[0] += p.weight * s * p.x[0];
            gw[1] += p.weight * s * p.x[1];
            gb += p.weight * s;
        }
        w[0] -= cfg.lr_model * gw[0];
        w[1] -= cfg.lr_model * gw[1];
        b -= cfg.lr_model * gb;
    }
    let (tw, tb) = trained.models[0].affine().unwrap();
    assert!((tw[0] - w[0]).abs() < 1e-12 && (tw[1] - w[1]).abs() < 1e-12 && (tb - b).abs() < 1e-12);
}

#[test]
fn single_model_training_keeps_unit_mixture() {
    let data = random_dataset(2, 20, 2, Metric::L2, 0.0);
    let mut cfg = TrainConfig::new(1, 30, 0.3);
    cfg.t_theta = 5;
    let (m, trace) = advgame::trainer::train(&data, &cfg).unwrap();
    assert_eq!(m.lambda.weights(), &[1.0]);
    assert!(trace.iter().all(|r| r.robust_acc <= r.standard_acc + 1e-12));
}
