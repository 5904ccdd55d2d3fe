use std::path::Path;
use std::process::Command;

use asymprox::harness::{
    compare, fit_rate, median, median_from_files, read_summary, read_trace, run_experiment, CompareConfig,
    ExperimentConfig, EXIT_CONFIG_ERROR, EXIT_OK, EXIT_RUN_FAILURE, OUTPUT_DIR_ENV,
};

fn sphere_config(out: &Path, extra_run: &str) -> String {
    format!(
        r#"
        [objective]
        name = "sphere"
        dim = 2

        [solver]
        name = "app_stable"
        rho = 0.9
        n = 40

        [run]
        max_iters = 100
        n_seeds = 10
        output = "{}"
        {extra_run}
        "#,
        out.display()
    )
}

fn run_toml(text: &str) -> asymprox::harness::Summary {
    let exp = ExperimentConfig::from_toml_str(text).unwrap().resolve().unwrap();
    run_experiment(&exp, exp.output.as_ref().unwrap()).unwrap()
}

fn strip_wall(text: &str) -> String {
    text.lines().map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head)).collect::<Vec<_>>().join("\n")
}

/// Frozen seeded regression. With variance `rho^k / lambda` the weighted
/// mean of 40 points sits near `sigma2_100 * d / n`, about 1e-6, so every
/// seed ends between 1e-8 and 1e-5.
#[test]
fn sphere_regression() {
    let dir = tempfile::tempdir().unwrap();
    let s = run_toml(&sphere_config(dir.path(), ""));
    assert_eq!(s.seeds.len(), 10);
    assert_eq!(s.failed_seeds, 0);
    let finals: Vec<f64> = s.seeds.iter().map(|r| r.final_err_sq.unwrap()).collect();
    assert!(finals.iter().all(|&e| e > 1e-8 && e < 1e-5), "{finals:?}");
    let m = s.median_final_err_sq.unwrap();
    assert!((1e-7..5e-6).contains(&m), "{m}");
    assert_eq!(s.seeds.iter().map(|r| r.seed).collect::<Vec<_>>(), (0..10).collect::<Vec<_>>());
}

#[test]
fn traces_round_trip_and_medians_match_files() {
    let dir = tempfile::tempdir().unwrap();
    let exp = ExperimentConfig::from_toml_str(&sphere_config(dir.path(), "seed = 5")).unwrap().resolve().unwrap();
    let summary = run_experiment(&exp, dir.path()).unwrap();
    let in_memory = asymprox::harness::run_seed(&exp, 7).trace.unwrap();
    let (prov, rows) = read_trace(&dir.path().join("trace_seed7.csv")).unwrap();
    assert_eq!(rows.len(), in_memory.records.len());
    for (a, b) in rows.iter().zip(in_memory.rows()) {
        assert_eq!(a.k, b.k);
        assert_eq!(a.eval_count, b.eval_count);
        assert_eq!(a.err_sq, b.err_sq);
        assert_eq!(a.f_best, b.f_best);
        assert_eq!(a.m_hat, b.m_hat);
        assert_eq!(a.sigma2_k, b.sigma2_k);
    }
    let get = |k: &str| prov.iter().find(|(key, _)| key == k).map(|(_, v)| v.clone());
    assert_eq!(get("objective").as_deref(), Some("sphere"));
    assert_eq!(get("solver").as_deref(), Some("app_stable"));
    assert_eq!(get("seed").as_deref(), Some("7"));
    assert_eq!(get("lambda").unwrap().parse::<f64>().unwrap(), 1.0 / 2f64.sqrt());
    assert!(get("init").unwrap().contains("sphere radius"));

    let reread = read_summary(dir.path()).unwrap();
    assert_eq!(reread, summary);
    let from_files = median_from_files(dir.path(), &summary).unwrap();
    assert_eq!(from_files, summary.median_final_err_sq);
    let finals: Vec<f64> = summary.seeds.iter().map(|s| s.final_err_sq.unwrap()).collect();
    assert_eq!(median(&finals), summary.median_final_err_sq);
}

#[test]
fn reruns_match_apart_from_wall_time() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_toml(&sphere_config(a.path(), "n_seeds = 3").replace("n_seeds = 10\n", ""));
    run_toml(&sphere_config(b.path(), "n_seeds = 3").replace("n_seeds = 10\n", ""));
    for seed in 0..3 {
        let name = format!("trace_seed{seed}.csv");
        let ta = std::fs::read_to_string(a.path().join(&name)).unwrap();
        let tb = std::fs::read_to_string(b.path().join(&name)).unwrap();
        assert_eq!(strip_wall(&ta), strip_wall(&tb));
    }
    let sa = std::fs::read_to_string(a.path().join("summary.json")).unwrap();
    let sb = std::fs::read_to_string(b.path().join("summary.json")).unwrap();
    assert_eq!(sa.replace(&a.path().display().to_string(), ""), sb.replace(&b.path().display().to_string(), ""));
}

#[test]
fn zero_iterations_gives_one_record() {
    let dir = tempfile::tempdir().unwrap();
    let text = sphere_config(dir.path(), "").replace("max_iters = 100", "max_iters = 0").replace("n_seeds = 10", "n_seeds = 1");
    let s = run_toml(&text);
    assert_eq!(s.seeds.len(), 1);
    assert_eq!(s.seeds[0].records, 1);
    let (_, rows) = read_trace(&dir.path().join("trace_seed0.csv")).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].k, 0);
    assert_eq!(rows[0].sigma2_k, None);
    assert!((rows[0].err_sq.unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn target_stops_trace_and_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let s = run_toml(&sphere_config(dir.path(), "target_err_sq = 1e-4"));
    assert_eq!(s.target_passed, Some(true));
    for seed in &s.seeds {
        let (_, rows) = read_trace(&dir.path().join(&seed.trace_file)).unwrap();
        let last = rows.last().unwrap().err_sq.unwrap();
        assert!(last <= 1e-4);
        assert!(rows[..rows.len() - 1].iter().all(|r| r.err_sq.unwrap() > 1e-4));
        assert_eq!(seed.target_met, Some(true));
    }
}

#[test]
fn failed_seed_is_recorded_without_aborting_others() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!(
        r#"
        [objective]
        name = "sphere"
        dim = 1
        [solver]
        name = "app_original_naive"
        rho = 0.5
        n = 5
        [run]
        max_iters = 60
        n_seeds = 2
        initial_point = [30.0]
        output = "{}"
        "#,
        dir.path().display()
    );
    let s = run_toml(&text);
    assert_eq!(s.failed_seeds, 2);
    assert!(s.seeds.iter().all(|r| r.error.as_deref().is_some_and(|e| e.contains("underflow") || e.contains("degenerate"))));
    assert!(dir.path().join("partial_trace_seed0.csv").exists());
    assert!(dir.path().join("partial_trace_seed1.csv").exists());
    assert_eq!(s.median_final_err_sq, None);
}

#[test]
fn fit_rate_on_sphere_trace() {
    let dir = tempfile::tempdir().unwrap();
    run_toml(&sphere_config(dir.path(), "").replace("n_seeds = 10", "n_seeds = 1"));
    let (_, rows) = read_trace(&dir.path().join("trace_seed0.csv")).unwrap();
    let f = fit_rate(&rows, None).unwrap();
    assert!((0.85..0.95).contains(&f.rho_hat) && f.r_squared > 0.5, "{f:?}");
}

fn compare_text(out: &Path, left_iters: usize, right: &str) -> String {
    format!(
        r#"
        output = "{}"
        [left]
        objective = {{ name = "revised_rastrigin", dim = 3 }}
        solver = {{ name = "app_stable", rho = 0.9, n = 30 }}
        run = {{ max_iters = {left_iters}, n_seeds = 4 }}
        [right]
        objective = {{ name = "revised_rastrigin", dim = 3 }}
        {right}
        "#,
        out.display()
    )
}

#[test]
fn identical_sides_tie() {
    let dir = tempfile::tempdir().unwrap();
    let text = compare_text(dir.path(), 40, "solver = { name = \"app_stable\", rho = 0.9, n = 30 }\nrun = { max_iters = 40, n_seeds = 4 }");
    let (l, r) = CompareConfig::from_toml_str(&text).unwrap().resolve().unwrap();
    let c = compare(&l, &r, dir.path()).unwrap().comparison;
    assert_eq!(c.verdict, "tie");
    assert_eq!((c.left_label.as_str(), c.right_label.as_str()), ("left", "right"));
    assert!(c.rows.iter().all(|row| row.left_median_err_sq == row.right_median_err_sq));
    assert_eq!(c.rows.last().unwrap().eval_count, 1200);
    assert_eq!((c.left_pair_wins, c.right_pair_wins), (0, 0));
    assert!(dir.path().join("comparison.csv").exists() && dir.path().join("left/summary.json").exists());
}

#[test]
fn zero_budget_has_only_initial_rows() {
    let dir = tempfile::tempdir().unwrap();
    let text = compare_text(dir.path(), 0, "solver = { name = \"app_original\", rho = 0.5, n = 7 }\nrun = { max_iters = 0, n_seeds = 4 }");
    let (l, r) = CompareConfig::from_toml_str(&text).unwrap().resolve().unwrap();
    let c = compare(&l, &r, dir.path()).unwrap().comparison;
    assert_eq!(c.budget, 0);
    assert_eq!(c.rows.len(), 1);
    assert_eq!(c.rows[0].eval_count, 0);
    let csv = std::fs::read_to_string(dir.path().join("comparison.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
}

#[test]
fn app_against_de_labels_families() {
    let dir = tempfile::tempdir().unwrap();
    // 30 * 40 = 1200 = 30 * (39 + 1)
    let text = compare_text(dir.path(), 40, "solver = { name = \"de_rand_1_bin\" }\nrun = { max_iters = 39, n_seeds = 4 }");
    let (l, r) = CompareConfig::from_toml_str(&text).unwrap().resolve().unwrap();
    let c = compare(&l, &r, dir.path()).unwrap().comparison;
    assert_eq!((c.left_label.as_str(), c.right_label.as_str()), ("app", "de"));
    assert!(["app", "de", "tie"].contains(&c.verdict.as_str()));
    assert_eq!(c.pairs, 4);
    assert!(c.rows.windows(2).all(|w| w[0].eval_count < w[1].eval_count));
    // DE has no record before its initial population is evaluated
    assert_eq!(c.rows[0].eval_count, 0);
    assert_eq!(c.rows[0].right_median_err_sq, None);
}

#[test]
fn mismatched_sides_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let text = compare_text(dir.path(), 40, "solver = { name = \"app_stable\", rho = 0.9, n = 30 }\nrun = { max_iters = 40 }")
        .replacen("dim = 3 }", "dim = 4 }", 2)
        .replacen("dim = 4 }", "dim = 3 }", 1);
    assert!(matches!(CompareConfig::from_toml_str(&text).unwrap().resolve(), Err(asymprox::Error::MismatchedObjectives(..))));
    let text = compare_text(dir.path(), 40, "solver = { name = \"app_stable\", rho = 0.9, n = 30 }\nrun = { max_iters = 41 }");
    assert!(matches!(CompareConfig::from_toml_str(&text).unwrap().resolve(), Err(asymprox::Error::Config(_))));
}

fn cli() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_asymprox"));
    c.env_remove(OUTPUT_DIR_ENV);
    c
}

#[test]
fn cli_run_and_fit_rate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    std::fs::write(&cfg, sphere_config(Path::new("ignored"), "").replace("n_seeds = 10", "n_seeds = 2")).unwrap();
    let out = dir.path().join("env_out");
    let st = cli().arg("run").arg(&cfg).env(OUTPUT_DIR_ENV, &out).current_dir(dir.path()).output().unwrap();
    assert_eq!(st.status.code(), Some(EXIT_OK), "{}", String::from_utf8_lossy(&st.stderr));
    assert!(out.join("trace_seed1.csv").exists());
    assert!(!dir.path().join("ignored").exists());

    let fit = cli().arg("fit-rate").arg(out.join("trace_seed0.csv")).args(["--window", "10:90"]).output().unwrap();
    assert_eq!(fit.status.code(), Some(EXIT_OK));
    assert!(String::from_utf8_lossy(&fit.stdout).contains("window 10:90"));
    let bad = cli().arg("fit-rate").arg(out.join("trace_seed0.csv")).args(["--window", "9:1"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_CONFIG_ERROR));
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[objective]\nname = \"nope\"\ndim = 2\n").unwrap();
    assert_eq!(cli().arg("run").arg(&bad).output().unwrap().status.code(), Some(EXIT_CONFIG_ERROR));
    assert_eq!(cli().arg("compare").arg(&bad).output().unwrap().status.code(), Some(EXIT_CONFIG_ERROR));
    assert_eq!(cli().arg("run").arg(dir.path().join("missing.toml")).output().unwrap().status.code(), Some(EXIT_CONFIG_ERROR));

    let failing = dir.path().join("fail.toml");
    std::fs::write(
        &failing,
        format!(
            "[objective]\nname = \"sphere\"\ndim = 1\n[solver]\nname = \"app_original_naive\"\nrho = 0.5\nn = 5\n\
             [run]\nmax_iters = 60\ninitial_point = [30.0]\noutput = \"{}\"\n",
            dir.path().join("f").display()
        ),
    )
    .unwrap();
    assert_eq!(cli().arg("run").arg(&failing).output().unwrap().status.code(), Some(EXIT_RUN_FAILURE));
}
