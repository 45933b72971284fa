use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_saito-hodge"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn data(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/data").join(name);
    p.to_str().unwrap().to_string()
}

#[test]
fn catalog_lists_builtins() {
    let o = run(&["catalog", "list"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "A2\nB2\nG2\nA3\nB3\nB4\nD4\n");
    let o = run(&["catalog", "show", "--datum", "B3"]);
    assert!(stdout(&o).contains("|W|         48"));
}

#[test]
fn exported_datum_loads_as_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g2.datum");
    let o = run(&["catalog", "export", "--datum", "G2"]);
    std::fs::write(&path, &o.stdout).unwrap();
    let from_file = run(&["basis", "--datum", path.to_str().unwrap(), "-m", "2"]);
    let builtin = run(&["basis", "--datum", "G2", "-m", "2"]);
    assert!(from_file.status.success());
    assert_eq!(stdout(&from_file), stdout(&builtin));
}

#[test]
fn basis_in_degree_zero_is_the_coordinate_frame() {
    let o = run(&["basis", "--datum", "B2", "-m", "0"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "ω_1^(0) = (1)*dx\nω_2^(0) = (1)*dy\nη_1^(0) = (1)*∂x\nη_2^(0) = (1)*∂y\n");
}

#[test]
fn basis_json_has_both_frames() {
    let o = run(&["basis", "--datum", "B2", "-m", "-3", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["m"], -3);
    assert_eq!(v["omegaBasis"].as_array().unwrap().len(), 2);
    assert_eq!(v["etaBasis"].as_array().unwrap().len(), 2);
    let first = &v["omegaBasis"][0]["coeffs"][0];
    assert!(first["q_power"].is_u64());
    assert!(first["numerator"][0]["coeff"].is_string());
}

#[test]
fn decompose_example_file() {
    let o = run(&["decompose", "--datum", &data("b2.datum"), "--form", &data("b2_example.form")]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), "level -1 (ω^(-1)): [-8*P1^3, 8/3*P1^2]\nlevel 0 (ω^(1)): [-4*P1, 2]\nresidual 0\n");

    let o = run(&["decompose", "--datum", "B2", "--form", &data("b2_example.form"), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["decomposition"]["levels"]["-1"][1]["text"], "8/3*P1^2");
    assert_eq!(v["decomposition"]["residual"], "0");
}

#[test]
fn decompose_derivation_and_alias() {
    let o = run(&["decompose", "--datum", "B2", "--expr", "x*∂x + y*∂y"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("(η^("));
    let o = run(&["decompose", "--datum", "A2", "--expr", "P1*dP2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).ends_with("residual 0\n"));
}

#[test]
fn input_errors_exit_with_status_2() {
    let o = run(&["decompose", "--datum", "B2", "--expr", "dx + ∂x"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("dx and ∂x"), "{}", stderr(&o));

    let o = run(&["decompose", "--datum", "B2", "--expr", "(x + "]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 1, column"));

    let o = run(&["basis", "--datum", "E8", "-m", "0"]);
    assert_eq!(o.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.datum");
    let text = std::fs::read_to_string(data("b2.datum")).unwrap().replace("1/4*x^4 + 1/4*y^4", "x^3*y");
    std::fs::write(&bad, text).unwrap();
    let o = run(&["basis", "--datum", bad.to_str().unwrap(), "-m", "0"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn non_invariant_form_has_no_decomposition() {
    let o = run(&["decompose", "--datum", "B2", "--expr", "dx"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("invariant"));
}

#[test]
fn verify_reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for (path, threads) in [(&a, "1"), (&b, "3")] {
        let o = bin()
            .args(["verify", "--datum", "A2", "--k-min", "-1", "--k-max", "1", "--out", path.to_str().unwrap()])
            .env("SAITO_HODGE_THREADS", threads)
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(stderr(&o).contains("PASS det-r[m=1]"));
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let v: serde_json::Value = serde_json::from_slice(&ta).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["failed"], 0);
    assert_eq!(v["datum"]["name"], "A2");
    assert!(v["checks"][0].get("wall_ms").is_none());
}

#[test]
fn verify_with_timings_records_wall_time() {
    let o = run(&["verify", "--datum", "B2", "--k-min", "0", "--k-max", "1", "--trials", "3", "--timings"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["wall_ms"].is_u64()));
    assert_eq!(v["trials"], 3);
}

#[test]
fn verify_rejects_bad_ranges_and_thread_counts() {
    let o = run(&["verify", "--datum", "B2", "--k-min", "2", "--k-max", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = bin().args(["catalog", "list"]).env("SAITO_HODGE_THREADS", "zero").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn relations_cover_each_k() {
    let o = run(&["relations", "--datum", "B2", "--k", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let ids: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["id"].as_str().unwrap()).collect();
    assert_eq!(ids.len(), 9);
    assert!(ids.contains(&"relation-dp1[k=2]"));
    assert!(stderr(&o).ends_with("9 passed, 0 failed\n"));
}
