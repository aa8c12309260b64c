use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use advgame::game::motivating_instance;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_advgame")).args(args).output().expect("binary runs")
}

fn out_arg(dir: &Path) -> String {
    dir.to_str().unwrap().to_string()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn demo_default_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("demo");
    let o = run(&["demo", "--out", &out_arg(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&out.join("results.json"));
    assert!((r["value"].as_f64().unwrap() - 0.75).abs() < 1e-9);
    for f in ["results.csv", "results.json", "plot.svg", "run.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let run_json = json(&out.join("run.json"));
    assert_eq!(run_json["command"], "demo");
    assert_eq!(run_json["config"]["solver"], "exact");
}

#[test]
fn demo_mw_and_zero_budget() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["demo", "--solver", "mw", "--iters", "5000", "--out", &out_arg(&tmp.path().join("a"))]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&tmp.path().join("a/results.json"));
    assert!(r["gap"].as_f64().unwrap() <= 1e-3);
    let o = run(&["demo", "--epsilon", "0", "--out", &out_arg(&tmp.path().join("b"))]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&tmp.path().join("b/results.json"));
    assert!((r["value"].as_f64().unwrap() - 0.25).abs() < 1e-12);
}

#[test]
fn invalid_config_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.json");
    fs::write(&cfg, r#"{"epsilon": 1.0, "unknown": 3}"#).unwrap();
    let out = tmp.path().join("out");
    let o = run(&["demo", "--config", cfg.to_str().unwrap(), "--out", &out_arg(&out)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!out.exists());

    fs::write(&cfg, r#"{"epsilon": -1.0}"#).unwrap();
    let o = run(&["demo", "--config", cfg.to_str().unwrap(), "--out", &out_arg(&out)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!out.exists());

    let o = run(&["game-solve", "--input", tmp.path().join("missing.csv").to_str().unwrap(), "--out", &out_arg(&out)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!out.exists());
}

#[test]
fn game_solve_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let tensor = tmp.path().join("tensor.csv");
    motivating_instance().game.write_csv(fs::File::create(&tensor).unwrap()).unwrap();
    let out = tmp.path().join("gs");
    let o = run(&["game-solve", "--input", tensor.to_str().unwrap(), "--out", &out_arg(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let cert = json(&out.join("results.json"));
    assert!(cert["gap"].as_f64().unwrap().abs() < 1e-9);
    assert!((cert["primal"].as_f64().unwrap() - 0.75).abs() < 1e-9);

    let o = run(&["game-solve", "--input", tensor.to_str().unwrap(), "--solver", "mw", "--out", &out_arg(&out)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(json(&out.join("results.json"))["gap"].as_f64().unwrap() <= 1e-3);
}

#[test]
fn unreachable_tolerance_exits_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let tensor = tmp.path().join("tensor.csv");
    let game = advgame::datagen::random_game(3, 10, 5, 6, 1.0).unwrap();
    game.write_csv(fs::File::create(&tensor).unwrap()).unwrap();
    let out = tmp.path().join("gs");
    let o = run(&[
        "game-solve", "--input", tensor.to_str().unwrap(), "--tol", "0", "--max-iters", "10", "--out", &out_arg(&out),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(out.join("results.json").exists());
}

#[test]
fn convergence_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for dir in [&a, &b] {
        let o = run(&["convergence", "--seed", "5", "--out", &out_arg(dir)]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let csv_a = fs::read_to_string(a.join("results.csv")).unwrap();
    assert_eq!(csv_a, fs::read_to_string(b.join("results.csv")).unwrap());
    assert_eq!(fs::read(a.join("plot.svg")).unwrap(), fs::read(b.join("plot.svg")).unwrap());
    assert!(csv_a.starts_with("series,iter,value,gap_estimate\n"));
    // best-so-far oracle curve never increases
    let oracle: Vec<f64> = csv_a
        .lines()
        .filter(|l| l.starts_with("oracle,"))
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert!(oracle.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn rerun_from_run_json_is_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let o = run(&[
        "sweep-epsilon", "--n", "80", "--samples", "30", "--epsilons", "0,1,3", "--mw-iters", "300", "--seed", "3",
        "--out", &out_arg(&a),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let b = tmp.path().join("b");
    let o = run(&["sweep-epsilon", "--config", a.join("run.json").to_str().unwrap(), "--out", &out_arg(&b)]);
    assert_eq!(o.status.code(), Some(0));
    for f in ["results.csv", "results.json", "plot.svg", "run.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let csv = fs::read_to_string(a.join("results.csv")).unwrap();
    let first: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(first[1], first[2], "curves coincide at zero budget");

    let o = run(&["demo", "--config", a.join("run.json").to_str().unwrap(), "--out", &out_arg(&tmp.path().join("c"))]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn gen_train_and_bounds() {
    let tmp = tempfile::tempdir().unwrap();
    let g = tmp.path().join("gen");
    let o = run(&["gen", "--n", "120", "--classifiers", "2", "--seed", "4", "--out", &out_arg(&g)]);
    assert_eq!(o.status.code(), Some(0));
    let data = g.join("results.csv");
    assert!(fs::read_to_string(&data).unwrap().starts_with("x1,x2,y,weight\n"));

    let cfg = tmp.path().join("train.json");
    fs::write(
        &cfg,
        r#"{"n_test": 0, "train": {"models": 2, "iterations": 42, "epsilon": 0.5, "t_theta": 4}}"#,
    )
    .unwrap();
    let t = tmp.path().join("train");
    let o = run(&["train", "--config", cfg.to_str().unwrap(), "--data", data.to_str().unwrap(), "--out", &out_arg(&t)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let metrics = fs::read_to_string(t.join("results.csv")).unwrap();
    assert!(metrics.starts_with("phase,iter,standard_acc,robust_acc,lambda_1,lambda_2\n"));
    // initial row, 42 / 9 = 4 phases, final row
    assert_eq!(metrics.lines().count(), 1 + 1 + 4 + 1);
    let ckpt = json(&t.join("checkpoint.json"));
    assert_eq!(ckpt["models"].as_array().unwrap().len(), 2);

    let bcfg = tmp.path().join("bounds.json");
    fs::write(
        &bcfg,
        r#"{"family": {"points": 4, "classifiers": 2, "full_candidates": 40, "samples": 5, "alpha": 1.0,
            "bound": 1.0, "grid_steps": 100, "sigma_draws": 100}, "sample_sizes": [5, 20]}"#,
    )
    .unwrap();
    let b = tmp.path().join("bounds");
    let o = run(&["bounds", "--config", bcfg.to_str().unwrap(), "--trials", "10", "--out", &out_arg(&b)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rep = json(&b.join("results.json"));
    assert_eq!(rep.as_array().unwrap().len(), 2);
    assert!(rep[0]["violation_rate"].as_f64().unwrap() <= 1.0);
}
