use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use contattn::attention::RbfBasis;
use contattn::value_fn::{design_matrix, locations_1d};
use nalgebra::DMatrix;
use serde_json::{json, Value};
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_contattn"))
        .args(args)
        .env_remove("CONTATTN_SEED")
        .output()
        .expect("failed to spawn contattn")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn read_csv(p: &Path) -> (String, Vec<Vec<f64>>) {
    let text = fs::read_to_string(p).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    (header, lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect())
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

fn write_matrix(dir: &TempDir, name: &str, m: &DMatrix<f64>) -> PathBuf {
    let p = dir.path().join(name);
    let data: Vec<Vec<f64>> = m.row_iter().map(|r| r.iter().copied().collect()).collect();
    fs::write(&p, json!({ "rows": m.nrows(), "cols": m.ncols(), "data": data }).to_string()).unwrap();
    p
}

#[test]
fn epanechnikov_sidecar() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("p.csv");
    let out = run(&["density", "--family", "parabola", "--mu", "0", "--sigma2", &(2.0f64 / 3.0).to_string(), "--out", path_str(&csv)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let side = read_json(&csv.with_extension("json"));
    assert!((side["lambda"].as_f64().unwrap() + 0.75).abs() < 1e-12);
    assert!((side["mass"].as_f64().unwrap() - 1.0).abs() < 1e-8);
    let (header, rows) = read_csv(&csv);
    assert_eq!(header, "t,p");
    assert_eq!(rows.len(), 1001);
    assert!(rows.iter().all(|r| r[1] >= 0.0));
}

#[test]
fn gaussian_grid_matches_the_pdf() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("g.csv");
    assert!(run(&["density", "--family", "gaussian", "--sigma2", "1", "--out", path_str(&csv)]).status.success());
    for r in read_csv(&csv).1 {
        let want = (-0.5 * r[0] * r[0]).exp() / (2.0 * std::f64::consts::PI).sqrt();
        assert!((r[1] - want).abs() < 1e-15);
    }
}

#[test]
fn triangular_peak() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("t.csv");
    assert!(run(&["density", "--family", "triangular", "--b", "1", "--out", path_str(&csv)]).status.success());
    let rows = read_csv(&csv).1;
    let peak = rows.iter().max_by(|a, b| a[1].total_cmp(&b[1])).unwrap();
    assert_eq!(peak[0], 0.0);
    assert!((peak[1] - 1.0).abs() < 1e-15);
}

#[test]
fn paraboloid_grid() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("pb.csv");
    let out = run(&["density", "--family", "paraboloid", "--mu", "0.5,0.5", "--cov", "0.1,0.02,0.05", "--out", path_str(&csv)]);
    assert!(out.status.success());
    let (header, rows) = read_csv(&csv);
    assert_eq!(header, "x,y,p");
    assert_eq!(rows.len(), 201 * 201);
    assert!(rows.iter().all(|r| r[2] >= 0.0));
    assert!(rows.iter().any(|r| r[2] == 0.0));
    assert_eq!(read_json(&csv.with_extension("json"))["support"]["kind"], "ellipse");
}

#[test]
fn invalid_density_parameters_exit_2() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("x.csv");
    for args in [
        vec!["density", "--family", "parabola", "--sigma2", "-1"],
        vec!["density", "--family", "triangular"],
        vec!["density", "--family", "paraboloid", "--mu", "0.5", "--cov", "1,0,1"],
        vec!["density", "--family", "gaussian-2d", "--mu", "0,0", "--cov", "1,2,1"],
    ] {
        let mut a = args.clone();
        a.extend(["--out", path_str(&csv)]);
        assert_eq!(run(&a).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn identity_values_give_back_r() {
    let dir = TempDir::new().unwrap();
    let b = write_matrix(&dir, "b.json", &DMatrix::identity(8, 8));
    let out_path = dir.path().join("a.json");
    let out = run(&[
        "attend", "--alpha", "1", "--mu", "0.5", "--sigma2", "0.05", "--basis-size", "8", "--values", path_str(&b), "--out",
        path_str(&out_path),
    ]);
    assert!(out.status.success());
    let v = read_json(&out_path);
    let (r, c) = (floats(&v["r"]), floats(&v["context"]));
    assert_eq!(r, c);
    // symmetric basis around a centred density
    for j in 0..4 {
        assert!((r[j] - r[7 - j]).abs() < 1e-12);
    }
    assert_eq!(v["jacobian"]["rows"], 2);
    assert_eq!(v["jacobian"]["cols"], 8);
}

#[test]
fn check_flag_reports_small_deltas() {
    let cases: [&[&str]; 4] = [
        &["--alpha", "1", "--mu", "0.4", "--sigma2", "0.03", "--basis-size", "6"],
        &["--alpha", "2", "--mu", "0.4", "--sigma2", "0.03", "--basis-size", "6"],
        &["--alpha", "1", "--mu", "0.5,0.4", "--cov", "0.05,0.01,0.03", "--basis-size", "9", "--basis-variance", "0.01"],
        &["--alpha", "2", "--mu", "0.5,0.4", "--cov", "0.05,0.01,0.03", "--basis-size", "9", "--basis-variance", "0.01"],
    ];
    for args in cases {
        let mut a = vec!["attend", "--check"];
        a.extend_from_slice(args);
        let out = run(&a);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        let v: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["check"]["passed"], true);
        for c in v["check"]["comparisons"].as_array().unwrap() {
            assert!(c["max_abs_delta"].as_f64().unwrap() <= c["tolerance"].as_f64().unwrap());
        }
    }
}

#[test]
fn angular_node_counts_agree() {
    let base = ["attend", "--alpha", "2", "--mu", "0.5,0.5", "--cov", "0.05,0.01,0.03", "--basis-size", "16", "--basis-variance", "0.01"];
    let r_at = |n: &str| {
        let mut a = base.to_vec();
        a.extend(["--angular-nodes", n]);
        let out = run(&a);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        floats(&serde_json::from_slice::<Value>(&out.stdout).unwrap()["r"])
    };
    let (coarse, fine) = (r_at("64"), r_at("512"));
    for (a, b) in coarse.iter().zip(&fine) {
        assert!((a - b).abs() <= 1e-7);
    }
}

#[test]
fn attend_input_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let b = write_matrix(&dir, "b.json", &DMatrix::identity(3, 3));
    for args in [
        vec!["attend", "--mu", "0.5"],
        vec!["attend", "--mu", "0.5", "--sigma2", "0"],
        vec!["attend", "--alpha", "1.5", "--mu", "0.5", "--sigma2", "0.1"],
        vec!["attend", "--theta", "1,2,3"],
        vec!["attend", "--mu", "0.5", "--sigma2", "0.1", "--basis-size", "8", "--values", path_str(&b)],
        vec!["attend", "--mu", "0.5,0.5", "--cov", "0.1,0,0.1", "--basis-size", "10"],
    ] {
        assert_eq!(run(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn fit_zero_observations() {
    let dir = TempDir::new().unwrap();
    let h = write_matrix(&dir, "h.json", &DMatrix::zeros(3, 20));
    let out = run(&["fit", "--h", path_str(&h), "--basis-size", "5"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["residual"], 0.0);
    assert!(v["b"]["data"].as_array().unwrap().iter().flat_map(floats).all(|x| x == 0.0));
}

#[test]
fn fit_recovers_coefficients_in_the_row_space() {
    let dir = TempDir::new().unwrap();
    let basis = RbfBasis::linspace_1d(6, 0.1).unwrap();
    let f = design_matrix(&basis, &locations_1d(30)).unwrap();
    let c = DMatrix::from_fn(2, 6, |i, j| ((3 * i + j) as f64).cos());
    let h = write_matrix(&dir, "h.json", &(&c * &f));
    let out = run(&["fit", "--h", path_str(&h), "--basis-size", "6", "--ridge", "0"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["residual"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn fit_residual_shrinks_with_nested_bases() {
    let dir = TempDir::new().unwrap();
    let h = write_matrix(&dir, "h.json", &DMatrix::from_fn(4, 40, |i, l| ((i + 1) as f64 * 0.37 * l as f64).sin()));
    let residuals: Vec<f64> = ["4", "8", "16"]
        .iter()
        .map(|n| {
            let out = run(&["fit", "--h", path_str(&h), "--basis-size", n, "--layout", "half-open", "--rbf-sigma", "0.05"]);
            assert!(out.status.success());
            serde_json::from_slice::<Value>(&out.stdout).unwrap()["residual"].as_f64().unwrap()
        })
        .collect();
    assert!(residuals.windows(2).all(|w| w[1] <= w[0]), "{residuals:?}");
}

#[test]
fn malformed_fit_input_exits_2() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"rows": 2, "cols": 3, "data": [[1, 2, 3]]}"#).unwrap();
    assert_eq!(run(&["fit", "--h", path_str(&bad)]).status.code(), Some(2));
    fs::write(&bad, "not json").unwrap();
    assert_eq!(run(&["fit", "--h", path_str(&bad)]).status.code(), Some(2));
    assert_eq!(run(&["fit", "--h", path_str(&dir.path().join("missing.json"))]).status.code(), Some(2));
}

fn demo(dir: &TempDir, alpha: &str, seed: &str, tag: &str) -> (Value, Vec<Vec<f64>>) {
    let (report, map) = (dir.path().join(format!("{tag}.json")), dir.path().join(format!("{tag}.csv")));
    let out = run(&["demo", "--alpha", alpha, "--seed", seed, "--out", path_str(&report), "--map-out", path_str(&map)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    (read_json(&report), read_csv(&map).1)
}

#[test]
fn demo_passes_and_has_the_right_support() {
    let dir = TempDir::new().unwrap();
    for seed in ["42", "43", "44"] {
        let (soft, soft_map) = demo(&dir, "1", seed, "soft");
        assert_eq!(soft["passed"], true);
        assert!(soft_map.iter().all(|r| r[2] > 0.0));
        let (sparse, sparse_map) = demo(&dir, "2", seed, "sparse");
        assert_eq!(sparse["passed"], true);
        if sparse["sigma2"].as_f64().unwrap().sqrt() < 0.2 {
            assert!(sparse_map.iter().any(|r| r[2] == 0.0));
        }
        for v in [&soft, &sparse] {
            let p = floats(&v["discrete"]);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(p.iter().all(|&x| x >= 0.0));
            let (c, cd, cc) = (floats(&v["context"]), floats(&v["context_discrete"]), floats(&v["context_continuous"]));
            for i in 0..c.len() {
                assert!((c[i] - cd[i] - cc[i]).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn outputs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let (a_json, a_csv) = (dir.path().join("a.json"), dir.path().join("a.csv"));
    let (b_json, b_csv) = (dir.path().join("b.json"), dir.path().join("b.csv"));
    for (j, c) in [(&a_json, &a_csv), (&b_json, &b_csv)] {
        assert!(run(&["demo", "--alpha", "2", "--out", path_str(j), "--map-out", path_str(c)]).status.success());
    }
    assert_eq!(fs::read(&a_json).unwrap(), fs::read(&b_json).unwrap());
    assert_eq!(fs::read(&a_csv).unwrap(), fs::read(&b_csv).unwrap());
    let grid = |p: &Path| {
        assert!(run(&["density", "--family", "paraboloid", "--mu", "0,0", "--cov", "1,0.3,0.5", "--out", path_str(p)]).status.success());
        (fs::read(p).unwrap(), fs::read(p.with_extension("json")).unwrap())
    };
    assert_eq!(grid(&dir.path().join("g1.csv")), grid(&dir.path().join("g2.csv")));
}

#[test]
fn seed_comes_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_contattn"))
        .args(["demo", "--alpha", "1"])
        .env("CONTATTN_SEED", "43")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(serde_json::from_slice::<Value>(&out.stdout).unwrap()["seed"], 43);
}

#[test]
fn filtered_check_runs_one_criterion() {
    let out = run(&["check", "--filter", "normalization", "--json"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 1);
    assert_eq!(checks[0]["name"], "density-normalization");
    assert_eq!(v["passed"], true);

    let table = run(&["check", "--filter", "anchor"]);
    let text = String::from_utf8(table.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("[PASS]") && l.contains("epanechnikov-anchor")));
    assert_eq!(run(&["check", "--filter", "no-such-check"]).status.code(), Some(2));
}
