use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_fukaya-torus");

const THREE_SLOPES: &str = r#"{
  "ambient": {"n": 1, "area": [1.0], "b": ["1/4"]},
  "branes": [
    {"lines": [{"d": [1, 0], "c": ["0", "1/7"]}], "alpha_shift": [0], "holonomy": ["1/3"]},
    {"lines": [{"d": [1, -1], "c": ["1/5", "0"]}], "alpha_shift": [0], "holonomy": ["2/5"]},
    {"lines": [{"d": [1, -2], "c": ["0", "2/3"]}], "alpha_shift": [0], "holonomy": ["1/11"]}
  ],
  "isotopy": {"brane": 1, "path": [[["0", "0"]], [["0", "1/5"]]]}
}"#;

const FOUR_SLOPES: &str = r#"{
  "ambient": {"n": 1, "area": [0.7], "b": ["1/4"]},
  "branes": [
    {"lines": [{"d": [1, 0], "c": ["0", "1/7"]}], "alpha_shift": [0], "holonomy": ["1/3"]},
    {"lines": [{"d": [1, -1], "c": ["1/5", "0"]}], "alpha_shift": [0], "holonomy": ["2/5"]},
    {"lines": [{"d": [1, -2], "c": ["0", "2/3"]}], "alpha_shift": [0], "holonomy": ["1/11"]},
    {"lines": [{"d": [1, -3], "c": ["3/13", "1/9"]}], "alpha_shift": [0], "holonomy": ["5/7"]}
  ]
}"#;

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("FUKAYA_PRECISION").output().expect("binary runs")
}

fn json_stdout(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn grading_table_matches_slope_rule() {
    let out = run(&["grading-table", "--n", "2", "--k-range", "-3..3"]);
    assert!(out.status.success());
    let v = json_stdout(&out);
    assert_eq!(v["schema"], "fukaya-torus.grading-table/1");
    let rows = v["result"].as_array().unwrap();
    assert_eq!(rows.len(), 42);
    for r in rows {
        let (k0, k1, d) = (r["k0"].as_i64().unwrap(), r["k1"].as_i64().unwrap(), r["degree"].as_i64().unwrap());
        assert_eq!(d, if k1 > k0 { 0 } else { 2 });
    }
}

#[test]
fn mu_writes_coefficients_and_tail_bound() {
    let dir = tempfile::tempdir().unwrap();
    let sc = write(dir.path(), "mu.json", THREE_SLOPES);
    let out_path = dir.path().join("out.json");
    let out = run(&["mu", "--k", "2", "--scenario", &sc, "--out", out_path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(v["schema"], "fukaya-torus.mu/1");
    let r = &v["result"];
    assert!(r["tail_bound"].as_f64().unwrap() < 1e-12);
    assert_eq!(r["output"].as_array().unwrap().len(), 2);
    let wrong_k = run(&["mu", "--k", "3", "--scenario", &sc]);
    assert_eq!(wrong_k.status.code(), Some(2));
}

#[test]
fn malformed_brane_json_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{\"branes\": [\n  {\"lines\": [{\"d\": [1, 0]\n");
    let out = run(&["hom", "--branes", &bad]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.json") && err.contains("line 3"), "{err}");
    let non_primitive = write(
        dir.path(),
        "np.json",
        r#"{"branes": [{"lines": [{"d": [2, 4], "c": ["0", "0"]}], "alpha_shift": [0], "holonomy": ["0"]},
                       {"lines": [{"d": [1, 0], "c": ["0", "0"]}], "alpha_shift": [0], "holonomy": ["0"]}]}"#,
    );
    assert_eq!(run(&["hom", "--branes", &non_primitive]).status.code(), Some(2));
}

#[test]
fn hom_groups_generators_by_degree() {
    let dir = tempfile::tempdir().unwrap();
    let pair = write(
        dir.path(),
        "pair.json",
        r#"{"branes": [{"lines": [{"d": [1, 0], "c": ["0", "0"]}], "alpha_shift": [0], "holonomy": ["0"]},
                       {"lines": [{"d": [1, -2], "c": ["0", "0"]}], "alpha_shift": [0], "holonomy": ["0"]}]}"#,
    );
    let v = json_stdout(&run(&["hom", "--branes", &pair]));
    assert_eq!(v["result"]["degrees"]["0"].as_array().unwrap().len(), 2);
}

#[test]
fn assoc_and_isotopy_pass() {
    let dir = tempfile::tempdir().unwrap();
    let four = write(dir.path(), "four.json", FOUR_SLOPES);
    let out = run(&["assoc", "--scenario", &four]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(json_stdout(&out)["result"]["max_discrepancy"].as_f64().unwrap() < 1e-9);
    let three = write(dir.path(), "three.json", THREE_SLOPES);
    let out = run(&["isotopy", "--scenario", &three]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = &json_stdout(&out)["result"];
    assert!(r["worst_class_error"].as_f64().unwrap() < 1e-10);
    assert!(!r["classes"].as_array().unwrap().is_empty());
}

#[test]
fn circle_and_stokes_reports() {
    let out = run(&["circle", "--r0", "1", "--r1", "2"]);
    assert!(out.status.success());
    let v = json_stdout(&out);
    assert!(v["result"]["ratio_rel_error"].as_f64().unwrap() < 1e-6);
    // An unreachable tolerance turns the same computation into a mismatch.
    assert_eq!(run(&["circle", "--tol", "1e-300"]).status.code(), Some(1));
    assert_eq!(run(&["circle", "--b", "x +"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let mesh = dir.path().join("mesh.json");
    let out = run(&["stokes", "--levels", "3", "--counterexample", "--mesh-out", mesh.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json_stdout(&out);
    assert_eq!(v["result"]["disc"]["levels"].as_array().unwrap().len(), 3);
    assert_eq!(v["result"]["torus"]["exhibits_gap"], true);
    let m: Value = serde_json::from_str(&fs::read_to_string(mesh).unwrap()).unwrap();
    assert_eq!(m["triangles"].as_array().unwrap().len(), 2 * 8 * 32);
    assert!(m["boundary_edges"].as_array().unwrap().iter().all(|e| {
        let v0 = e[0].as_u64().unwrap() as usize;
        m["vertices"][v0]["l_param"].is_array()
    }));
}

#[test]
fn deterministic_mode_is_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let four = write(dir.path(), "four.json", FOUR_SLOPES);
    let mut outputs = Vec::new();
    for threads in ["1", "4"] {
        let out = dir.path().join(format!("out{threads}.json"));
        let man = dir.path().join(format!("man{threads}.json"));
        let status = run(&[
            "--deterministic",
            "--threads",
            threads,
            "--precision",
            "compensated",
            "--out",
            out.to_str().unwrap(),
            "--manifest",
            man.to_str().unwrap(),
            "assoc",
            "--scenario",
            &four,
        ]);
        assert!(status.status.success());
        let manifest: Value = serde_json::from_str(&fs::read_to_string(&man).unwrap()).unwrap();
        assert_eq!(manifest["precision"], "compensated");
        assert!(manifest["wall_clock_seconds"].is_null());
        assert_eq!(manifest["config"]["branes"].as_array().unwrap().len(), 4);
        outputs.push(fs::read(out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn precision_flag_is_validated() {
    assert_eq!(run(&["--precision", "quad", "grading-table"]).status.code(), Some(2));
}
