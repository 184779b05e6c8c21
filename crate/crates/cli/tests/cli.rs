use std::path::PathBuf;
use std::process::{Command, Output};

use dpring::algebra::{Field, FreePoly};
use dpring::ore::{power_x0x, OrePoly};
use serde_json::Value;

fn dpring(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dpring"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("dpring-cli-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).unwrap();
    path
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn expand_round_trips() {
    let out = dpring(&["expand", "--m", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["coefficients"].as_array().unwrap().len(), 3);
    let parsed = OrePoly::<FreePoly>::parse(v["poly"].as_str().unwrap(), Field::Rationals).unwrap();
    assert_eq!(parsed, power_x0x(3, Field::Rationals, 16).unwrap());
}

#[test]
fn windowed_expand_keeps_top_exponents() {
    let out = dpring(&["expand", "--m", "99", "--window", "98"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let ts: Vec<u64> = v["coefficients"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["t"].as_u64().unwrap())
        .collect();
    assert_eq!(ts, vec![99, 98]);
}

#[test]
fn expansion_over_budget_exits_4() {
    assert_eq!(dpring(&["expand", "--m", "40"]).status.code(), Some(4));
}

#[test]
fn unknown_subcommand_exits_2() {
    assert_eq!(dpring(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn params_validation() {
    let bad = scratch("bad.cfg", "b = 2\nr = 3\nk_max = 2\n");
    let out = dpring(&["--config", bad.to_str().unwrap(), "params", "--validate"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not below"));

    let unknown = scratch("unknown.cfg", "b = 10\nshade = 4\n");
    let out = dpring(&["--config", unknown.to_str().unwrap(), "params", "--validate"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let original = scratch("original.cfg", "b = 100\nr = 3\nk_max = 1\n");
    let out = dpring(&["--config", original.to_str().unwrap(), "params", "--validate"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["levels"][0]["block_size"], 100);
}

#[test]
fn member_reports_certificates() {
    let input = scratch("member.txt", "1*x1.x0.x0.x0.x0.x0.x0.x0.x0\n+ 1*x0.x0.x1.x0.x0.x0.x0.x0.x0");
    let args = |space: &str| {
        vec![
            "member".to_string(),
            "--input".into(),
            input.to_str().unwrap().into(),
            "--space".into(),
            space.into(),
            "--k".into(),
            "1".into(),
            "--length".into(),
            "9".into(),
            "--degree".into(),
            "1".into(),
        ]
    };
    let run = |space: &str| {
        let a = args(space);
        dpring(&a.iter().map(String::as_str).collect::<Vec<_>>())
    };
    let out = run("B");
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdict"], "member");
    assert_eq!(v["verified"], true);
    let out = run("I");
    assert_eq!(json(&out)["verdict"], "non_member");
    assert_eq!(run("Q").status.code(), Some(3));
}

#[test]
fn ballot_campaign_passes_and_is_deterministic() {
    let a = dpring(&["verify", "--campaign", "ballot"]);
    let b = dpring(&["verify", "--campaign", "ballot"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["summary"]["passed"], true);
}

#[test]
fn unknown_campaign_exits_3() {
    assert_eq!(dpring(&["verify", "--campaign", "nope"]).status.code(), Some(3));
}

#[test]
fn series_command() {
    let out = dpring(&["series", "--dim", "3", "--trials", "5"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["checks"].as_array().unwrap().len(), 5);
    assert_eq!(dpring(&["series", "--dim", "9", "--trials", "1"]).status.code(), Some(3));
}

#[test]
fn output_file_matches_stdout() {
    let out_path = std::env::temp_dir().join(format!("dpring-cli-{}-report.json", std::process::id()));
    let cfg = scratch("out.cfg", &format!("output = {}\nm_max = 4\n", out_path.display()));
    let out = dpring(&["--config", cfg.to_str().unwrap(), "verify", "--campaign", "ballot"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read(&out_path).unwrap(), out.stdout);
}
