use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn symroot(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symroot")).args(args).output().expect("binary runs")
}

fn config(name: &str) -> String {
    repo_root().join("configs").join(name).to_string_lossy().into_owned()
}

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn golden(name: &str) -> String {
    fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)).unwrap()
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn not_pd_input_exits_one_with_integer_witness() {
    let out = symroot(&["check2d", &config("not_pd_465.json")]);
    assert_eq!(code(&out), 1);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("det A(1, -2) = -420"), "{text}");

    let j = json_of(&symroot(&["check2d", "--json", "--coefficients", "4,6,5"]));
    assert_eq!(j["det_hessian"]["c40"], 156.0);
    assert_eq!(j["det_hessian"]["c31"], 1368.0);
    assert_eq!(j["det_hessian"]["c22"], 2652.0);
    assert_eq!(j["verdict"], "not-pd");
    assert_eq!(j["classification"]["witness"]["integer_value"], -420.0);
}

#[test]
fn pd_inputs_exit_zero() {
    for (args, verdict) in [
        (vec!["--coefficients", "1,2,3"], "critical"),
        (vec!["--coefficients", "1,1,2"], "irreducible"),
        (vec![], "irreducible"),
    ] {
        let mut all = vec!["check2d", "--json"];
        let path = config("irrational_window.json");
        if args.is_empty() {
            all.push(&path);
        }
        all.extend(args.iter().copied());
        let out = symroot(&all);
        assert_eq!(code(&out), 0);
        assert_eq!(json_of(&out)["verdict"], verdict);
    }
}

#[test]
fn charpoly_basis_converts_to_monomials() {
    let j = json_of(&symroot(&["check2d", "--json", &config("charpoly_square.json")]));
    assert_eq!(j["coefficients"]["l"], 1.0);
    assert_eq!(j["coefficients"]["m"], 2.0);
    assert_eq!(j["coefficients"]["n"], 3.0);
}

#[test]
fn json_round_trips_through_the_echoed_config() {
    let dir = tempfile::tempdir().unwrap();
    for (cmd, cfg) in
        [("check2d", "irrational_window.json"), ("check2d", "not_pd_465.json"), ("check3d", "ternary_1234.json")]
    {
        let first = symroot(&[cmd, "--json", &config(cfg)]);
        let j1 = json_of(&first);
        let echoed = dir.path().join(cfg);
        fs::write(&echoed, serde_json::to_string(&j1["config"]).unwrap()).unwrap();
        let second = symroot(&[cmd, "--json", echoed.to_str().unwrap()]);
        assert_eq!(code(&first), code(&second));
        let j2 = json_of(&second);
        for key in ["verdict", "positive_definite", "coefficients"] {
            assert_eq!(j1[key], j2[key], "{cmd} {cfg} {key}");
        }
        assert_eq!(j1.to_string(), j2.to_string());
    }
}

#[test]
fn exit_codes_ignore_formatting_flags() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("r.csv");
    for cfg in ["not_pd_465.json", "irrational_window.json"] {
        let plain = code(&symroot(&["check2d", &config(cfg)]));
        assert_eq!(plain, code(&symroot(&["check2d", "--json", &config(cfg)])));
        assert_eq!(plain, code(&symroot(&["check2d", "--csv", csv.to_str().unwrap(), &config(cfg)])));
    }
}

#[test]
fn table_matches_golden_files() {
    let out = symroot(&["table", "--l", "1,2,3,4", "--m", "0..11"]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden("interval_table.txt"));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.csv");
    let out = symroot(&["table", "--l", "1,2,3,4", "--m", "0..11", "--csv", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let read = |text: &str| -> Vec<Vec<String>> {
        csv::Reader::from_reader(text.as_bytes())
            .records()
            .map(|r| r.unwrap().iter().map(str::to_string).collect())
            .collect()
    };
    let produced = read(&fs::read_to_string(&path).unwrap());
    let expected = read(&golden("interval_table.csv"));
    assert_eq!(produced.len(), 12);
    for (p, e) in produced.iter().zip(&expected) {
        assert_eq!(p, e);
    }
}

#[test]
fn curvature_of_tanh_solution() {
    let out = symroot(&["curvature", "--json", &config("tanh_minus_k1.json")]);
    assert_eq!(code(&out), 0);
    let j = json_of(&out);
    assert!(j["verification"]["worst"]["residual"].as_f64().unwrap() <= 1e-6);
    assert_eq!(j["verification"]["evaluated"].as_array().unwrap().len(), 100);

    let out = symroot(&["curvature", "--finite-difference", &config("tanh_minus_k1.json")]);
    assert_eq!(code(&out), 0);

    let out = symroot(&["curvature", "--constant-k", "-1", &config("tanh_minus_k1.json")]);
    assert_eq!(code(&out), 1);
}

#[test]
fn curvature_data_at_points() {
    let out = symroot(&["curvature", "--json", &config("second_root_curvature.json")]);
    assert_eq!(code(&out), 0);
    let points = json_of(&out)["points"].as_array().unwrap().clone();
    assert_eq!(points.len(), 3);
    for p in points {
        let (s, k) = (p["scalar"].as_f64().unwrap(), p["gauss"].as_f64().unwrap());
        assert!((s - 2.0 * k).abs() < 1e-12);
    }
}

#[test]
fn field_classification_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("field.csv");
    let out = symroot(&["classify-field", "--csv", path.to_str().unwrap(), &config("sin_cos_field.json")]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(&path).unwrap();
    assert!(!text.contains('\r'));
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>(),
        ["x1", "x2", "l", "m", "n", "verdict", "lower", "upper", "critical"]
    );
    let verdicts: Vec<String> = rdr.records().map(|r| r.unwrap()[5].to_string()).collect();
    assert_eq!(verdicts.len(), 61 * 61);
    assert!(verdicts.iter().any(|v| v == "reducible"));
    assert!(verdicts.iter().any(|v| v == "irreducible"));
    assert!(!verdicts.iter().any(|v| v == "not-pd"));
}

#[test]
fn oracle_compare_modes() {
    let out = symroot(&["oracle-compare", "--random", "300", "--seed", "5", "--json"]);
    assert_eq!(code(&out), 0);
    let j = json_of(&out);
    assert_eq!(j["report"]["compared"], 300);
    assert_eq!(j["report"]["config"]["seed"], 5);
    assert_eq!(out.stdout, symroot(&["oracle-compare", "--random", "300", "--seed", "5", "--json"]).stdout);

    for cfg in ["not_pd_465.json", "irrational_window.json", "ternary_1234.json"] {
        let out = symroot(&["oracle-compare", "--json", &config(cfg)]);
        assert_eq!(code(&out), 0, "{cfg}");
        assert_eq!(json_of(&out)["agree"], true);
    }
}

#[test]
fn check3d_reports_exact_coefficients() {
    let out = symroot(&["check3d", "--json", "--coefficients", "1,2,3,4"]);
    assert_eq!(code(&out), 0);
    let j = json_of(&out);
    assert_eq!(j["det_coeffs"]["a"], 96.0);
    assert_eq!(j["det_coeffs"]["g"], 2016.0);
    assert_eq!(j["base_minors"], serde_json::json!([12.0, 36.0, 96.0]));
    assert_eq!(j["numeric"]["pd_evidence"], true);

    assert_eq!(code(&symroot(&["check3d", "--coefficients", "1,2,3,7"])), 1);
}

#[test]
fn usage_and_config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    for body in [
        r#"{"dimension": 2, "coefficients": {"l": 1, "m": 2}}"#,
        r#"{"dimension": 2, "coefficients": {"l": 1, "m": 2, "n": 3, "q": 4}}"#,
        r#"{"dimension": 4, "coefficients": {}}"#,
        r#"{"dimension": 2, "coefficients": {"l": "1 +", "m": 0, "n": 1}}"#,
        r#"{"dimension": 2, "coefficients": {"l": "x1", "m": 0, "n": 1}}"#,
        "not json",
    ] {
        fs::write(&bad, body).unwrap();
        assert_eq!(code(&symroot(&["check2d", bad.to_str().unwrap()])), 2, "{body}");
    }
    assert_eq!(code(&symroot(&["check2d"])), 2);
    assert_eq!(code(&symroot(&["check2d", "--coefficients", "1,2"])), 2);
    assert_eq!(code(&symroot(&["check2d", "/no/such/file.json"])), 2);
    assert_eq!(code(&symroot(&["table", "--m", "5..2"])), 2);
    assert_eq!(code(&symroot(&["frobnicate"])), 2);
}
