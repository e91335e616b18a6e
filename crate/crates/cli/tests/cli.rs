//! Runs the `hcurv` binary end to end.

use serde_json::Value;
use std::process::{Command, Output};

fn hcurv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hcurv")).args(args).output().expect("spawn hcurv")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON document")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn hopf_report_table() {
    let out = hcurv(&["report", "hopf:n=2", "--point", "1,0", "--table"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("s_C = 0.5\n"), "{text}");
    assert!(text.contains("  s = 0.75\n"), "{text}");
    assert!(!text.contains("FAIL"));
}

#[test]
fn flat_report_is_all_zero() {
    let out = hcurv(&["report", "flat:n=3", "--point", "0,0,0", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["pass"], true);
    for key in ["s", "s_r", "s_h", "s_lc", "s_c", "s_star"] {
        assert_eq!(v["scalars"][key].as_f64(), Some(0.0), "{key}");
    }
    for form in v["ricci"].as_object().unwrap().values() {
        for row in form.as_array().unwrap() {
            for z in row.as_array().unwrap() {
                assert_eq!(z[0].as_f64(), Some(0.0));
                assert_eq!(z[1].as_f64(), Some(0.0));
            }
        }
    }
}

#[test]
fn ricci_flat_family_member() {
    let out = hcurv(&["report", "hopf-family:n=2,lambda=-0.5", "--point", "1,0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    for row in v["ricci"]["lc1"].as_array().unwrap() {
        for z in row.as_array().unwrap() {
            assert!(z[0].as_f64().unwrap().abs() < 1e-12 && z[1].as_f64().unwrap().abs() < 1e-12);
        }
    }
}

#[test]
fn report_accepts_complex_points() {
    let out = hcurv(&["report", "random:n=2,seed=3", "--point", "0.1+0.05i,-0.2i", "--mode", "numeric"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["mode"], "numeric");
    assert_eq!(v["tol"].as_f64(), Some(1e-4));
    assert_eq!(v["point"][1][1].as_f64(), Some(-0.2));
}

#[test]
fn verify_suites() {
    let out = hcurv(&["verify", "hopf:n=3", "--points", "100"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["pass"], true);

    let out = hcurv(&["verify", "fubini-study:n=2", "--points", "100"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["ricci_spread_max"].as_f64().unwrap() < 1e-10);
    assert!(v["torsion_max"].as_f64().unwrap() < 1e-12);

    let out = hcurv(&["verify", "flat:n=2"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn verify_fails_with_impossible_tolerance() {
    let out = hcurv(&["verify", "random:n=3,seed=1", "--points", "5", "--tol", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["pass"], false);
}

#[test]
fn scan_lambda_csv() {
    let dir = std::env::temp_dir().join(format!("hcurv-scan-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("scan.csv");
    let out = hcurv(&["scan-lambda", "2", "-0.875,-0.75,-0.5,0,1,10", "--csv", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let mut r = csv::Reader::from_path(&path).unwrap();
    let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["lambda", "s", "s_C", "s_LC", "s_H", "s_R", "torsion_norm_sq", "predicted_s"]);
    let rows: Vec<Vec<f64>> =
        r.records().map(|rec| rec.unwrap().iter().map(|x| x.parse().unwrap()).collect()).collect();
    let s_at = |l: f64| rows.iter().find(|row| row[0] == l).unwrap()[1];
    assert!((s_at(-0.875) + 8.0).abs() < 1e-8);
    assert!(s_at(-0.75).abs() < 1e-8);
    assert!((s_at(-0.5) - 1.0).abs() < 1e-8);
    for row in &rows {
        assert!((row[1] - row[7]).abs() <= 1e-8 * row[7].abs().max(1.0));
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn scan_lambda_ranges_and_rejections() {
    let out = hcurv(&["scan-lambda", "3", "-0.5:1:4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().count(), 5);
    assert_eq!(hcurv(&["scan-lambda", "2", "-1"]).status.code(), Some(2));
    assert_eq!(hcurv(&["scan-lambda", "2", "-3,0"]).status.code(), Some(2));
}

#[test]
fn integrate_volume_and_determinism() {
    let args = ["integrate", "hopf:n=2", "volume", "--samples", "100000", "--seed", "11"];
    let a = hcurv(&args);
    let b = hcurv(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout, "identical inputs must give byte-identical JSON");
    let v = json(&a);
    let oracle = 128.0 * std::f64::consts::PI.powi(2) * std::f64::consts::LN_2;
    assert_eq!(v["identity"], "volume");
    assert_eq!(v["schema_version"], 1);
    assert!((v["rhs"].as_f64().unwrap() - oracle).abs() < 1e-9);
    for key in ["lhs", "rhs", "stderr_lhs", "stderr_rhs", "residual", "samples", "seed"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn integrate_k_gauduchon_and_balanced() {
    let out = hcurv(&["integrate", "hopf:n=3", "k-gauduchon", "--k", "1", "--samples", "20000"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["residual"].as_f64().unwrap() < 0.02);

    let out = hcurv(&["integrate", "hopf:n=2", "balanced-diagnostic", "--samples", "20000"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["details"]["balanced"], false);
    assert!((v["details"]["ratio_c_lc"].as_f64().unwrap() - 2.0).abs() < 0.04);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(hcurv(&["integrate", "hopf:n=2", "nonsense"]).status.code(), Some(2));
    assert_eq!(hcurv(&["integrate", "hopf:n=3", "k-gauduchon"]).status.code(), Some(2));
    assert_eq!(hcurv(&["report", "hopf:n=2", "--point", "0.1,0"]).status.code(), Some(2));
    assert_eq!(hcurv(&["report", "nope:n=2", "--point", "1,0"]).status.code(), Some(2));
    assert_eq!(hcurv(&["verify"]).status.code(), Some(2));
    assert_eq!(hcurv(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn catalog_lists_entries() {
    let out = hcurv(&["catalog"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let ids: Vec<&str> = v.as_array().unwrap().iter().map(|e| e["id"].as_str().unwrap()).collect();
    assert!(ids.iter().any(|id| id.starts_with("hopf-family")));
}
