use std::path::Path;
use std::process::{Command, Output};

use effgap::config::RunConfig;
use effgap::CliError;
use effgap_core::Error;
use serde_json::Value;

fn effgap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_effgap"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn verify_algebra_exits_zero_with_findings() {
    let o = effgap(&["verify-algebra"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("[bound-v-symmetric]"));
    assert!(text.contains("residual:    -1/24*eta3*z^4*n^-3/2"));
    assert!(text.contains("printed terms cancel the gap: false"));
    assert_eq!(text.matches("status:      DIFFERS").count(), 2);
}

#[test]
fn verify_algebra_json() {
    let o = effgap(&["verify-algebra", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    let e = v["entries"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["id"] == "one-sided-gap-factored")
        .unwrap();
    assert_eq!(e["status"], "MATCHES");
    assert_eq!(
        e["derived"],
        "1/48*eta3*W*z^4*n^-3/2 - 1/12*eta3*W*z^2*n^-3/2"
    );
}

#[test]
fn gaussian_moments() {
    let o = effgap(&["moments", "--density", "gaussian"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["moments"]["eta3"]["value"].as_f64().unwrap().abs() < 1e-10);
    assert!(v["moments"]["w"]["value"].as_f64().unwrap().abs() < 1e-10);
    assert_eq!(v["checks"]["W"]["pass"], true);
    assert_eq!(v["cauchy_schwarz"]["inequality_pass"], true);
}

#[test]
fn simulate_twice_gives_identical_csv() {
    let args = [
        "simulate",
        "--density",
        "gaussian",
        "--n",
        "25",
        "--reps",
        "1000",
        "--seed",
        "7",
    ];
    let a = effgap(&args);
    let b = effgap(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("density,n,reps,seed,v,empirical_q,se,expansion_q,gap")
    );
    assert_eq!(lines.count(), 3);
}

#[test]
fn output_file_and_config_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"density": {"family": "logistic"}, "ns": [12], "reps": 1000, "seed": 5, "levels": [0.5, 0.8]}"#,
    )
    .unwrap();
    let out = dir.path().join("sim.csv");
    let cfg_s = cfg.to_str().unwrap();
    let out_s = out.to_str().unwrap();
    let o = effgap(&[
        "simulate", "--config", cfg_s, "--seed", "6", "--output", out_s,
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    // Flags win over the file: seed 6, everything else from the file.
    assert!(
        rows.iter().all(|r| r.starts_with("logistic,12,1000,6,")),
        "{rows:?}"
    );
}

#[test]
fn report_writes_plot_csv() {
    let dir = tempfile::tempdir().unwrap();
    let plot = dir.path().join("plot.csv");
    let o = effgap(&[
        "report",
        "--density",
        r#"{"family":"skew-normal","params":{"shape":2}}"#,
        "--n",
        "25,100,400",
        "--plot",
        plot.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
    assert!(v["simulation"].is_null());
    let csv = std::fs::read_to_string(&plot).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,gap,order3_prediction");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("25,,"));
}

#[test]
fn report_text_format() {
    let o = effgap(&["report", "--density", "logistic", "--format", "text"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("density: logistic\n"));
    assert!(text.contains("algebra (all recipes succeeded: true)"));
}

#[test]
fn gap_subcommand() {
    let o = effgap(&[
        "gap",
        "--density",
        "gaussian",
        "--alpha",
        "0.05,0.1",
        "--n",
        "10",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows
        .iter()
        .all(|r| r["third_order_gap"].as_f64().unwrap().abs() < 1e-12));
}

#[test]
fn expand_with_explicit_levels() {
    let o = effgap(&[
        "expand",
        "--equation",
        "two-sided-gap",
        "--v",
        "0.99",
        "--u",
        "0.04",
        "--n",
        "30",
        "--density",
        "logistic",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let row = &v["rows"][0];
    assert_eq!(row["n"], 30);
    // W = -1/5 for the logistic, so the n^-1 term is nonzero off the symmetric pair.
    assert!(row["strata"][2].as_f64().unwrap().abs() > 1e-4);
}

#[test]
fn exit_codes() {
    assert_eq!(effgap(&["nonsense"]).status.code(), Some(1));
    assert_eq!(effgap(&["--help"]).status.code(), Some(0));
    assert_eq!(
        effgap(&["moments", "--density", "cauchy"]).status.code(),
        Some(1)
    );
    assert_eq!(effgap(&["simulate", "--reps", "10"]).status.code(), Some(1));
    assert_eq!(
        effgap(&["expand", "--equation", "eq99"]).status.code(),
        Some(1)
    );
    assert_eq!(
        effgap(&[
            "moments",
            "--density",
            r#"{"family":"logistic","normalize":false}"#
        ])
        .status
        .code(),
        Some(1)
    );
    // Quadrature cannot meet an absurd tolerance.
    assert_eq!(
        effgap(&["moments", "--tolerance", "1e-300"]).status.code(),
        Some(2)
    );
    assert_eq!(
        CliError::from(Error::MleNoConvergence.context("batch")).exit_code(),
        3
    );
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, r#"{"reps": 2000, "replications": 3}"#).unwrap();
    let o = effgap(&["moments", "--config", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("replications"));
    assert!(RunConfig::load(Path::new("/nonexistent/run.json")).is_err());
}
