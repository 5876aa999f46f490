use std::process::{Command, Output};

fn krcheck(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_krcheck")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn poly_mode_prints_the_density_polynomial() {
    // (1 - X)(1 - 3X) at q = 3.
    let o = krcheck(&["density", "--mode", "poly", "--target", "I:3:-1", "--gram", "H+diag(1)"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "1 - 4X + 3X^2");
}

#[test]
fn count_mode_reports_raw_counts() {
    let o = krcheck(&["density", "--mode", "count", "--d", "1", "--target", "I:3:-1", "--gram", "diag(1)"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("raw=162"), "{}", stdout(&o));
}

#[test]
fn closed_mode_names_the_formula() {
    let o = krcheck(&["density", "--mode", "closed", "--target", "I:3:1", "--gram", "diag(s*(-pi0)^2)"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let closed = stdout(&o);
    assert!(closed.starts_with("rank-one-sab: "), "{closed}");
    let poly = krcheck(&["density", "--mode", "poly", "--target", "I:3:1", "--gram", "diag(s*(-pi0)^2)"]);
    assert_eq!(closed.trim().trim_start_matches("rank-one-sab: "), stdout(&poly).trim());
}

#[test]
fn degenerate_and_malformed_input_fail() {
    let o = krcheck(&["density", "--target", "I:3:1", "--gram", "diag(0)"]);
    assert!(!o.status.success());
    let o = krcheck(&["pden", "--gram", "diag(1, qq)"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("`qq`"), "{}", stderr(&o));
}

#[test]
fn coefficient_tables() {
    let o = krcheck(&["coeffs", "--n", "3"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["C"], serde_json::json!(["9/4"]));
    let o = krcheck(&["coeffs", "--n", "2", "--eps", "-1"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["C"], serde_json::json!([]));
    let o = krcheck(&["coeffs", "--n", "2", "--eps", "1", "--q", "5"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["C"], serde_json::json!(["-25/12"]));
}

#[test]
fn non_integral_lattice_gives_zero_on_both_sides() {
    let o = krcheck(&["pden", "--gram", "H + diag(pi0)"]);
    assert!(stdout(&o).starts_with("pden = 0/1"), "{}", stdout(&o));
    let o = krcheck(&["int", "--gram", "H + diag(pi0)"]);
    assert!(stdout(&o).starts_with("int = 0 "), "{}", stdout(&o));
}

#[test]
fn primitive_split_on_plane_shapes() {
    // 1 - q^a for a ≤ 2c.
    let o = krcheck(&["pden", "--gram", "Hodd(1) + diag((-pi0)^1)", "--prim", "2"]);
    assert!(stdout(&o).starts_with("pden = -2/1"), "{}", stdout(&o));
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.json");
    let o = krcheck(&["int", "--gram", "Hodd(1) + diag((-pi0)^1)", "--prim", "2", "--support-graph", graph.to_str().unwrap()]);
    assert!(stdout(&o).starts_with("int = -2 "), "{}", stdout(&o));
    let g: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(graph).unwrap()).unwrap();
    assert_eq!(g["counts"]["v2"], 1);
    assert_eq!(g["nodes"].as_array().unwrap().len(), 5);
}

#[test]
fn verify_is_deterministic_and_reports_matches() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, format: &str| {
        let path = dir.path().join(name);
        let o = krcheck(&[
            "verify", "--max-exp", "1", "--units", "1,s", "--shapes", "diag,h-block,v-neg", "--twist", "one",
            "--format", format, "--no-timing", "--out", path.to_str().unwrap(),
        ]);
        (o, std::fs::read_to_string(path).unwrap())
    };
    let (o, first) = run("a.jsonl", "jsonl");
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("verify: 40 cases, 40 match, 0 mismatch, 0 errors"), "{}", stderr(&o));
    let (_, second) = run("b.jsonl", "jsonl");
    assert_eq!(first, second);
    let recs: Vec<serde_json::Value> = first.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(recs[0]["case_id"], "diag/a=0/b=0/c=0/u=111");
    assert!(recs.iter().all(|r| r["match"] == true && r["pden_integral"] == true && r["pden_method"] == "engine"));
    assert!(recs.iter().filter(|r| r["case_id"].as_str().unwrap().starts_with("vneg")).all(|r| r["int"] == "0"));
    let (_, csv) = run("c.csv", "csv");
    assert_eq!(csv.lines().count(), 41);
}

#[test]
fn empty_grid_succeeds() {
    let o = krcheck(&["verify", "--max-exp", "0", "--shapes", "h-block", "--no-timing"]);
    assert!(o.status.success());
    assert!(stderr(&o).contains("verify: 0 cases"), "{}", stderr(&o));
}
