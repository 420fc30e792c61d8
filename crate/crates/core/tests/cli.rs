mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::perturbed_rep;
use preserver_lab::json::{to_stable_string, MapSpec, MatrixJson};
use preserver_lab::preservers::random_canonical;
use preserver_lab::{MatrixClass, PreserverForm};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_preserver-lab"))
        .args(args)
        .env_remove("PRESERVER_LAB_SEED")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn report(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout)
        .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&o.stdout)))
}

/// Top-level keys in the order they appear in the pretty-printed report.
fn top_level_keys(o: &Output) -> Vec<String> {
    String::from_utf8_lossy(&o.stdout)
        .lines()
        .filter_map(|l| {
            l.strip_prefix("  \"")
                .and_then(|rest| rest.split_once('"'))
                .map(|(k, _)| k.to_string())
        })
        .collect()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let id = write(
        dir.path(),
        "id.json",
        r#"{"kind": "pn-congruence", "M": {"n": 3, "re": [[1,0,0],[0,1,0],[0,0,1]]}}"#,
    );
    let o = run(&[
        "verify",
        "--identity",
        "det-sum",
        "--class",
        "pd",
        "--n",
        "3",
        "--map",
        &id,
        "--samples",
        "100",
        "--seed",
        "7",
        "--tol",
        "1e-8",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&o);
    assert_eq!(r["pass"], true);
    assert_eq!(
        top_level_keys(&o),
        [
            "identity",
            "class",
            "n",
            "samples",
            "tol",
            "max_residual",
            "mean_residual",
            "pass",
            "failures"
        ]
    );

    let p = random_canonical(PreserverForm::PnCongruence, 3, 4, false);
    let rep = perturbed_rep(&p, MatrixClass::PositiveDefinite, 4, 1e-3);
    let spec = format!(
        r#"{{"kind": "linear-rep", "rep": {}}}"#,
        serde_json::to_string(&MatrixJson::from(&rep.rep)).unwrap()
    );
    let perturbed = write(dir.path(), "perturbed.json", &spec);
    let o = run(&[
        "verify",
        "--identity",
        "det-sum",
        "--class",
        "pd",
        "--map",
        &perturbed,
        "--samples",
        "100",
        "--seed",
        "7",
    ]);
    assert_eq!(code(&o), 2);
    let r = report(&o);
    assert!(r["max_residual"].as_f64().unwrap() >= 1e-5);
    assert!(!r["failures"].as_array().unwrap().is_empty());

    let tn = r#"{"kind":"tn-diagonal","alpha":{"re":0.5,"im":1.5},"sigma":[2,3,1],"lambdas":[{"re":2,"im":0},{"re":0.5,"im":0},{"re":1,"im":0}]}"#;
    let o = run(&[
        "verify",
        "--identity",
        "trace-inverse",
        "--class",
        "upper-triangular",
        "--map",
        tn,
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let o = run(&[
        "verify",
        "--identity",
        "det-pencil",
        "--class",
        "full",
        "--n",
        "2",
        "--weights",
        "1+i,-2,3i",
    ]);
    assert_eq!(code(&o), 0);
    let o = run(&[
        "verify",
        "--identity",
        "trace-power-k",
        "--k",
        "3",
        "--class",
        "symmetric",
        "--n",
        "3",
    ]);
    assert_eq!(report(&o)["identity"], "trace-power-3");
}

#[test]
fn recover_exit_codes_and_schema() {
    let dir = tempfile::tempdir().unwrap();
    let hidden = random_canonical(PreserverForm::MnTwoSided, 3, 12, true);
    let spec = write(
        dir.path(),
        "hidden.json",
        &to_stable_string(&MapSpec::from_preserver(&hidden)).unwrap(),
    );
    let o = run(&["recover", "--class", "full", "--map", &spec]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&o);
    assert_eq!(r["form"], "mn-two-sided");
    assert_eq!(r["branch"], "transpose");
    assert!(r["residual"].as_f64().unwrap() <= 1e-8);
    assert!(r["constraint_residuals"]["det_gauge"].as_f64().unwrap() <= 1e-8);
    assert_eq!(
        top_level_keys(&o),
        ["form", "branch", "alpha", "M", "N", "residual", "constraint_residuals"]
    );

    let o = run(&[
        "recover",
        "--class",
        "pd",
        "--n",
        "2",
        "--map",
        r#"{"kind": "remark1"}"#,
    ]);
    assert_eq!(code(&o), 3);
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("not linear"));

    let o = run(&["recover", "--class", "pd", "--n", "3"]);
    assert_eq!(code(&o), 0);
    let r = report(&o);
    assert_eq!(r["branch"], "plain");
    assert_eq!(r["alpha"]["re"].as_f64().unwrap(), 1.0);

    let tn = r#"{"kind":"tn-diagonal","sigma":[2,3,1],"lambdas":[{"re":2},{"re":0.5},{"re":1}]}"#;
    let r = report(&run(&["recover", "--class", "upper-triangular", "--map", tn]));
    assert_eq!(r["sigma"], serde_json::json!([2, 3, 1]));

    let o = run(&[
        "recover",
        "--class",
        "full",
        "--n",
        "2",
        "--map",
        r#"{"kind": "pinching"}"#,
    ]);
    assert_eq!(code(&o), 3);
}

#[test]
fn oracle_commands() {
    let o = run(&["oracle", "jacobi", "--n", "5", "--samples", "500", "--seed", "1"]);
    assert_eq!(code(&o), 0);
    assert!(report(&o)["max_residual"].as_f64().unwrap() <= 1e-6);
    let o = run(&["oracle", "minkowski", "--n", "4", "--samples", "1000"]);
    assert_eq!(code(&o), 0);
    assert_eq!(report(&o)["direction_violations"], 0);
    let o = run(&[
        "oracle",
        "dual-witness",
        "--class",
        "symmetric",
        "--n",
        "3",
        "--samples",
        "1000",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(report(&o)["found"], 1000);
    let o = run(&["oracle", "kadison-choi", "--n", "3", "--samples", "100"]);
    assert_eq!(code(&o), 0);
    // A ↦ 2A is not unital
    let o = run(&[
        "oracle",
        "kadison-choi",
        "--n",
        "2",
        "--map",
        r#"{"kind":"mn-two-sided","alpha":{"re":2,"im":0},"M":{"n":2,"re":[[1,0],[0,1]]},"N":{"n":2,"re":[[1,0],[0,1]]}}"#,
    ]);
    assert_eq!(code(&o), 2);
    let o = run(&["oracle", "dual-witness", "--class", "pd"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn counterexample_signature() {
    for n in ["2", "3"] {
        let o = run(&["counterexample", "--n", n]);
        assert_eq!(code(&o), 0);
        let r = report(&o);
        assert_eq!(
            r["signature"],
            serde_json::json!({"trace-square": "pass", "additivity": "fail", "det-sum": "fail"})
        );
    }
    let zero = r#"{"kind": "remark1", "M": {"n": 2, "re": [[0,0],[0,0]]}}"#;
    let o = run(&["counterexample", "--n", "2", "--map", zero]);
    assert_eq!(code(&o), 2);
    assert_eq!(report(&o)["expected_signature"], false);
}

#[test]
fn input_errors_exit_one_with_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let broken = write(dir.path(), "broken.json", "{\"kind\": ");
    let cases: Vec<Vec<&str>> = vec![
        vec!["verify", "--identity", "det-sum", "--class", "pd", "--map", &broken],
        vec!["verify", "--identity", "det-sum", "--class", "nope"],
        vec!["verify", "--identity", "det-sum", "--class", "pd", "--n", "0"],
        vec!["verify", "--identity", "det-sum", "--class", "pd", "--tol", "-1"],
        vec!["verify", "--identity", "det-everything", "--class", "pd"],
        vec![
            "verify",
            "--identity",
            "det-sum",
            "--class",
            "pd",
            "--map",
            "/no/such/file.json",
        ],
        vec![
            "recover",
            "--class",
            "full",
            "--n",
            "4",
            "--map",
            r#"{"kind":"pn-congruence","M":{"n":2,"re":[[1,0],[0,1]]}}"#,
        ],
        vec!["recover", "--class", "hermitian", "--n", "2"],
        vec!["oracle", "nope"],
        vec![],
    ];
    for args in cases {
        let o = run(&args);
        assert_eq!(code(&o), 1, "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
    let o = run(&["--help"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("counterexample"));
}

#[test]
fn out_flag_and_seed_env() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let o = run(&[
        "oracle",
        "minkowski",
        "--n",
        "2",
        "--samples",
        "10",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(written["oracle"], "minkowski");

    let bin = env!("CARGO_BIN_EXE_preserver-lab");
    let with_env = |extra: &[&str]| {
        let o = Command::new(bin)
            .args(["oracle", "jacobi", "--n", "2", "--samples", "3"])
            .args(extra)
            .env("PRESERVER_LAB_SEED", "41")
            .output()
            .unwrap();
        report(&o)["seed"].as_u64().unwrap()
    };
    assert_eq!(with_env(&[]), 41);
    assert_eq!(with_env(&["--seed", "9"]), 9);
}

#[test]
fn reports_are_byte_identical_across_runs_and_thread_counts() {
    let args = [
        "verify",
        "--identity",
        "det-convex",
        "--class",
        "symmetric",
        "--n",
        "4",
        "--samples",
        "300",
        "--seed",
        "3",
    ];
    let first = run(&args).stdout;
    assert_eq!(first, run(&args).stdout);
    let single = Command::new(env!("CARGO_BIN_EXE_preserver-lab"))
        .args(args)
        .env("RAYON_NUM_THREADS", "1")
        .env_remove("PRESERVER_LAB_SEED")
        .output()
        .unwrap()
        .stdout;
    assert_eq!(first, single);
}
