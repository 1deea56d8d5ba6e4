use std::process::{Command, Output};

use serde_json::Value;

fn superstar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_superstar")).args(args).env_remove("SUPERSTAR_SEED").output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn eps_suite_reports_cases() {
    let out = superstar(&["verify", "suite=eps", "--n", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["passed"], true);
    assert!(v["cases"].as_u64().unwrap() > 0);
    assert!(v["ledger"]["sigma"].is_object());
}

#[test]
fn normalize_moves_v_past_u() {
    let out = superstar(&["supertorus", "normalize", "V1 U1", "--theta", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["word"], "U1 V1");
    assert_eq!(v["phase"], "exp(-2*pi*i*0.5)");
}

#[test]
fn star_of_coordinates_has_central_term() {
    let out = superstar(&["star", "--theta", "1", "--m", "1", "--n", "0", "x1 star x2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let sigma = v["ledger"]["sigma"]["value"].as_f64().unwrap();
    let terms = v["result"]["terms"][0]["f"]["terms"].as_array().unwrap();
    let constant = terms.iter().find(|t| t["alpha"] == serde_json::json!([0, 0])).unwrap();
    assert_eq!(constant["c"][1].as_f64().unwrap(), sigma * 0.5);
    assert!(terms.iter().any(|t| t["alpha"] == serde_json::json!([1, 1]) && t["c"][0] == 1.0));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(superstar(&["verify", "suite=nope"]).status.code(), Some(2));
    assert_eq!(superstar(&["star", "x1 star"]).status.code(), Some(2));
    assert_eq!(superstar(&["verify", "eps", "--n", "2", "--signature", "2,1"]).status.code(), Some(2));
    assert_eq!(superstar(&["verify", "eps", "--signature", "two"]).status.code(), Some(2));
    assert_eq!(superstar(&["frobnicate"]).status.code(), Some(2));
    let err = String::from_utf8(superstar(&["star", "x1 star"]).stderr).unwrap();
    assert!(err.contains("line 1, column 8"), "{err}");
}

#[test]
fn identical_flags_give_identical_bytes() {
    let args = ["verify", "suite=heisenberg", "--seed", "5"];
    let (a, b) = (superstar(&args), superstar(&args));
    assert_eq!(a.stdout, b.stdout);
    let other = superstar(&["verify", "suite=heisenberg", "--seed", "6"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn seed_defaults_to_environment() {
    let run = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_superstar"))
            .args(["verify", "suite=torus"])
            .env("SUPERSTAR_SEED", seed)
            .output()
            .unwrap()
    };
    assert_eq!(json(&run("17"))["seed"], 17);
    assert_eq!(run("x").status.code(), Some(2));
}

#[test]
fn pentagon_subcommand_passes() {
    let out = superstar(&["qgroup", "pentagon", "--t-samples", "5", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["t_triples"].as_array().unwrap().len(), 5);
    assert!(v["ledger"]["qgroup_pi"].is_object());
}

#[test]
fn json_out_matches_stdout() {
    let path = std::env::temp_dir().join(format!("superstar-{}.json", std::process::id()));
    let out = superstar(&["supertorus", "normalize", "G1 G1 + X1 X1", "--json-out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let written = std::fs::read(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(written, out.stdout);
}
