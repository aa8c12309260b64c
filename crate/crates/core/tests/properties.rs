mod common;

use advgame::attack::{adversarial_risk, pgd_attack, AttackPlan, CandidateSet, PgdParams};
use advgame::bounds::{approximation_bound, rademacher_exact, rademacher_from_signs, statistical_bound};
use advgame::datagen::{random_game, read_csv, write_csv};
use advgame::game::{solve_exact_two, FiniteGame};
use advgame::model::{mixture_loss, standard_risk, Loss, Metric, Mixture};
use advgame::solvers::{alpha_limit_study, entropic_objective, project_simplex, Alpha};
use common::*;
use proptest::prelude::*;

fn config() -> ProptestConfig {
    ProptestConfig { cases: 64, ..ProptestConfig::default() }
}

fn game_strategy() -> impl Strategy<Value = FiniteGame> {
    (any::<u64>(), 1usize..8, 1usize..5, 1usize..6).prop_map(|(s, n, l, m)| random_game(s, n, l, m, 1.0).unwrap())
}

fn plan_for(game: &FiniteGame, seed: u64) -> AttackPlan {
    use rand::Rng;
    let mut r = advgame::rng::stream(seed, 9);
    let probs = (0..game.num_points())
        .map(|i| {
            let raw: Vec<f64> = (0..game.num_candidates(i)).map(|_| r.gen::<f64>() + 1e-3).collect();
            let s: f64 = raw.iter().sum();
            raw.into_iter().map(|v| v / s).collect()
        })
        .collect();
    AttackPlan::new(probs).unwrap()
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn projection_lands_in_simplex_and_is_idempotent(v in prop::collection::vec(-5.0f64..5.0, 1..8)) {
        let p = project_simplex(&v).unwrap();
        let w = p.weights();
        prop_assert!(w.iter().all(|x| *x >= 0.0));
        prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let q = project_simplex(w).unwrap();
        for (a, b) in q.weights().iter().zip(w) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        for (a, b) in w.iter().zip(projection_by_supports(&v)) {
            prop_assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn weak_duality(game in game_strategy(), s in any::<u64>()) {
        let lam = random_mixture(s, game.num_classifiers());
        let plan = plan_for(&game, s);
        prop_assert!(game.dual_value(&plan).unwrap() <= game.primal_value(&lam).unwrap() + 1e-12);
    }

    #[test]
    fn best_response_attains_primal(game in game_strategy(), s in any::<u64>()) {
        let lam = random_mixture(s, game.num_classifiers());
        let (plan, v) = game.best_response(&lam).unwrap();
        prop_assert!((v - game.primal_value(&lam).unwrap()).abs() < 1e-12);
        let g = game.expected_losses(&plan).unwrap();
        let inner: f64 = g.iter().zip(lam.weights()).map(|(a, b)| a * b).sum();
        prop_assert!((inner - v).abs() < 1e-12);
    }

    #[test]
    fn primal_is_convex_along_segments(game in game_strategy(), s in any::<u64>(), t in 0.0f64..1.0) {
        let l = game.num_classifiers();
        let a = random_mixture(s, l);
        let b = random_mixture(s.wrapping_add(1), l);
        let mid: Vec<f64> = a.weights().iter().zip(b.weights()).map(|(x, y)| t * x + (1.0 - t) * y).collect();
        let m = Mixture::new(mid).unwrap();
        let lhs = game.primal_value(&m).unwrap();
        let rhs = t * game.primal_value(&a).unwrap() + (1.0 - t) * game.primal_value(&b).unwrap();
        prop_assert!(lhs <= rhs + 1e-12);
    }

    #[test]
    fn reduction_preserves_values(game in game_strategy(), s in any::<u64>()) {
        let red = game.reduce();
        let lam = random_mixture(s, game.num_classifiers());
        prop_assert!((red.game.primal_value(&lam).unwrap() - game.primal_value(&lam).unwrap()).abs() < 1e-12);
        let (plan, _) = red.game.best_response(&lam).unwrap();
        let lifted = red.lift_plan(&plan, &game);
        prop_assert!((game.dual_value(&lifted).unwrap() - red.game.dual_value(&plan).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn scaling_scales_values(game in game_strategy(), s in any::<u64>(), c in 0.1f64..10.0) {
        let lam = random_mixture(s, game.num_classifiers());
        let scaled = game.scaled(c).unwrap();
        let a = scaled.primal_value(&lam).unwrap();
        let b = c * game.primal_value(&lam).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
    }

    #[test]
    fn exact_two_has_zero_gap(s in any::<u64>(), n in 1usize..8, m in 1usize..6) {
        let game = random_game(s, n, 2, m, 1.0).unwrap();
        let cert = solve_exact_two(&game).unwrap();
        prop_assert!(cert.gap.abs() < 1e-9, "gap {}", cert.gap);
        for step in 0..=100 {
            let a = step as f64 / 100.0;
            let v = game.primal_value(&Mixture::new(vec![a, 1.0 - a]).unwrap()).unwrap();
            prop_assert!(cert.primal_value <= v + 1e-12);
        }
    }

    #[test]
    fn entropic_sandwich(game in game_strategy(), s in any::<u64>(), alpha in 0.01f64..5.0) {
        let lam = random_mixture(s, game.num_classifiers());
        let (v, _) = entropic_objective(&game, &Alpha::Constant(alpha), &lam).unwrap();
        let primal = game.primal_value(&lam).unwrap();
        let mut mean = 0.0;
        let mut slack = 0.0;
        for i in 0..game.num_points() {
            let m = game.num_candidates(i) as f64;
            let w = game.weights()[i];
            mean += w * game.rows(i).map(|r| r.iter().zip(lam.weights()).map(|(a, b)| a * b).sum::<f64>()).sum::<f64>() / m;
            slack += w * alpha * m.ln();
        }
        prop_assert!(mean <= v + 1e-12);
        prop_assert!(v <= primal + 1e-12);
        prop_assert!(primal <= v + slack + 1e-12);
    }

    #[test]
    fn alpha_study_is_monotone(game in game_strategy(), s in any::<u64>()) {
        let lam = random_mixture(s, game.num_classifiers());
        let alphas = [4.0, 1.0, 0.3, 0.1, 0.01];
        let rows = alpha_limit_study(&game, &alphas, &lam).unwrap();
        for w in rows.windows(2) {
            prop_assert!(w[1].aggregate <= w[0].aggregate + 1e-12);
        }
        for row in &rows {
            for (i, d) in row.per_point.iter().enumerate() {
                prop_assert!(*d >= 0.0);
                prop_assert!(*d <= row.alpha * (game.num_candidates(i) as f64).ln() + 1e-12);
            }
        }
    }

    #[test]
    fn rademacher_enumeration_is_sign_symmetric(game in game_strategy(), p in 0usize..8) {
        let i = p % game.num_points();
        let m = game.num_candidates(i);
        let all: Vec<Vec<i8>> = (0..1u32 << m)
            .map(|bits| (0..m).map(|j| if bits >> j & 1 == 1 { 1 } else { -1 }).collect())
            .collect();
        let neg: Vec<Vec<i8>> = all.iter().map(|s| s.iter().map(|v| -v).collect()).collect();
        let a = rademacher_from_signs(&game, i, &all);
        prop_assert!((a - rademacher_from_signs(&game, i, &neg)).abs() < 1e-12);
        prop_assert!((a - rademacher_exact(&game, i)).abs() < 1e-12);
        prop_assert!(a >= -1e-12);
    }

    #[test]
    fn statistical_bound_monotonicity(
        m_bound in 0.1f64..5.0, alpha in 0.2f64..5.0, n in 1usize..50, m in 1usize..200, delta in 0.01f64..0.5, r in 0.0f64..1.0
    ) {
        let b = statistical_bound(m_bound, alpha, n, m, 2, delta, r).unwrap();
        prop_assert!(b >= 0.0);
        prop_assert!(statistical_bound(m_bound * 1.5, alpha, n, m, 2, delta, r).unwrap() >= b);
        prop_assert!(statistical_bound(m_bound, alpha, n, m + 1, 2, delta, r).unwrap() <= b);
        prop_assert!(statistical_bound(m_bound, alpha, n + 1, m, 2, delta, r).unwrap() <= b);
    }

    #[test]
    fn approximation_bound_monotonicity(alpha in 0.001f64..5.0, c in 0.01f64..1.0, beta in 0.0f64..2.0) {
        let b = approximation_bound(alpha, c, beta).unwrap();
        prop_assert!(b >= 0.0);
        prop_assert!(approximation_bound(alpha * 2.0, c, beta).unwrap() >= b);
        prop_assert!(approximation_bound(alpha, c * 0.5, beta).unwrap() >= b);
        prop_assert!(approximation_bound(alpha, c, beta + 0.1).unwrap() >= b);
    }

    #[test]
    fn adversarial_risk_dominates_standard(s in any::<u64>(), eps in 0.0f64..1.5, l in 1usize..4) {
        let data = random_dataset(s, 12, 2, Metric::L2, eps);
        let clfs = random_linear(s, l, 2);
        let mix = random_mixture(s, l);
        let cands = CandidateSet::uniform_ball(&data, 20, s).unwrap();
        let zo = Loss::zero_one();
        let adv = adversarial_risk(&zo, &clfs, &mix, &data, &cands).unwrap();
        prop_assert!(adv >= standard_risk(&zo, &clfs, &mix, &data).unwrap() - 1e-12);
    }

    #[test]
    fn pgd_stays_in_ball_and_never_lowers_loss(s in any::<u64>(), eps in 0.0f64..1.0, linf in any::<bool>()) {
        let metric = if linf { Metric::Linf } else { Metric::L2 };
        let data = random_dataset(s, 4, 3, metric, eps);
        let clfs = random_logistic(s, 3, 3);
        let mix = random_mixture(s, 3);
        let ce = Loss::cross_entropy(10.0).unwrap();
        let params = PgdParams::default_for(eps, s);
        for p in data.points() {
            let u = pgd_attack(&ce, &clfs, &mix, &p.x, p.y, eps, metric, &params).unwrap();
            prop_assert!(metric.distance(&u, &p.x) <= eps + 1e-9);
            let clean = mixture_loss(&ce, &clfs, &mix, &p.x, p.y).unwrap();
            prop_assert!(mixture_loss(&ce, &clfs, &mix, &u, p.y).unwrap() >= clean);
        }
    }

    #[test]
    fn dataset_csv_round_trip(s in any::<u64>(), n in 1usize..30, d in 1usize..4) {
        let data = random_dataset(s, n, d, Metric::L2, 0.0);
        let mut buf = Vec::new();
        write_csv(&data, &mut buf).unwrap();
        prop_assert_eq!(read_csv(buf.as_slice(), Metric::L2, 0.0).unwrap(), data);
    }

    #[test]
    fn game_csv_round_trip(game in game_strategy()) {
        let mut buf = Vec::new();
        game.write_csv(&mut buf).unwrap();
        prop_assert_eq!(FiniteGame::read_csv(buf.as_slice(), 1.0).unwrap(), game);
    }
}
