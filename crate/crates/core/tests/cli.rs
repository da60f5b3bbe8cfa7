use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn oddaxis(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oddaxis"))
        .args(args)
        .env("ODDAXIS_LOG", "quiet")
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "{e}: stdout {:?}, stderr {:?}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn rh_report_shape() {
    let out = oddaxis(&["rh", "48"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let at = |key: &str| {
        text.find(&format!("\n  \"{key}\":"))
            .unwrap_or_else(|| panic!("{key} missing"))
    };
    let order = [
        "command",
        "config",
        "inputs_digest",
        "results",
        "pass",
        "flags",
    ]
    .map(at);
    assert!(order.windows(2).all(|w| w[0] < w[1]), "{order:?}");
    let r = report(&out);
    assert_eq!(r["results"]["rho"], 9);
    assert_eq!(r["results"]["decomposition"]["b"], 4);
    assert_eq!(r["inputs_digest"].as_str().unwrap().len(), 64);
}

#[test]
fn reports_are_reproducible() {
    let args = [
        "--mesh-level",
        "3",
        "--seed",
        "11",
        "bundle",
        "--case",
        "two-gamma-eps-rp2",
    ];
    let (a, b) = (oddaxis(&args), oddaxis(&args));
    assert_eq!(
        a.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&a.stderr)
    );
    assert_eq!(a.stdout, b.stdout);
    let r = report(&a);
    assert!(r["results"]["rank_drop"]["value"].as_f64().unwrap() < 1e-5);
    let rho = &r["results"]["rho"];
    assert_eq!(rho["both_odd"], true);
    assert_eq!(
        rho["negated_degree"].as_i64().unwrap(),
        -rho["degrees"][1].as_i64().unwrap()
    );
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(oddaxis(&["rh"]).status.code(), Some(2));
    assert_eq!(
        oddaxis(&["degree", "--map", "no-such"]).status.code(),
        Some(2)
    );
    assert_eq!(
        oddaxis(&["--tol", "bogus=1", "degree", "--map", "identity"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        oddaxis(&["--tol", "residual=-1", "degree", "--map", "identity"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        oddaxis(&["--mesh-level", "9", "rh", "3"]).status.code(),
        Some(2)
    );
    let bad_log = Command::new(env!("CARGO_BIN_EXE_oddaxis"))
        .args(["rh", "3"])
        .env("ODDAXIS_LOG", "loud")
        .output()
        .unwrap();
    assert_eq!(bad_log.status.code(), Some(2));
    assert_eq!(oddaxis(&["--help"]).status.code(), Some(0));
}

#[test]
fn tight_tolerance_gives_exit_4() {
    let out = oddaxis(&[
        "--mesh-level",
        "0",
        "--tol",
        "residual=1e-30",
        "degree",
        "--map",
        "power:k=3",
    ]);
    assert_eq!(out.status.code(), Some(4));
    let r = report(&out);
    assert_eq!(r["pass"], false);
    assert_eq!(r["results"]["lift"]["rounded"], 3);
}

#[test]
fn surface_degree_with_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("deg.json");
    let off = dir.path().join("mesh.off");
    let out = oddaxis(&[
        "--mesh-level",
        "2",
        "--out",
        json.to_str().unwrap(),
        "--emit-csv",
        "degree",
        "--map",
        "suspension:k=-2",
        "--emit-off",
        off.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(r["results"]["integral"]["rounded"], -2);
    assert_eq!(r["results"]["preimage"]["rounded"], -2);
    let csv = std::fs::read_to_string(dir.path().join("deg.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 320);
    assert!(std::fs::read_to_string(off).unwrap().starts_with("OFF"));
}

#[test]
fn sampled_degree_files() {
    let dir = tempfile::tempdir().unwrap();
    let m = 64;
    let values: Vec<[f64; 2]> = (0..m)
        .map(|k| {
            let t = 5.0 * std::f64::consts::TAU * k as f64 / m as f64;
            [t.cos(), t.sin()]
        })
        .collect();
    let path = write(
        dir.path(),
        "c.json",
        &serde_json::json!({ "m": m, "values": values }).to_string(),
    );
    let r = report(&oddaxis(&["degree", "--samples", &path]));
    assert_eq!(r["results"]["lift"]["rounded"], 5);

    let path = write(dir.path(), "bad.json", r#"{"m": 3, "values": [[1, 0]]}"#);
    assert_eq!(
        oddaxis(&["degree", "--samples", &path]).status.code(),
        Some(2)
    );
}

#[test]
fn swtable_highlights_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sw.csv");
    let flag = format!("--emit-csv={}", csv.display());
    let out = oddaxis(&[&flag, "swtable", "-k", "8", "-n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    for h in r["results"]["highlights"].as_array().unwrap() {
        assert_eq!(h["trivial"], h["expected_trivial"]);
    }
    let text = std::fs::read_to_string(csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,n=1,n=2,n=3"));
    assert_eq!(lines.nth(3), Some("4,trivial,trivial,trivial"));
}

#[test]
fn eigen_command() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "t.json",
        r#"{"q": 3, "matrices": [{"re": [[0,1,0],[0,0,1],[1,0,0]], "im": [[0,0,0],[0,0,0],[0,0,0]]}]}"#,
    );
    let out = oddaxis(&["--mesh-level", "3", "eigen", "--matrix", &path]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r = report(&out);
    let cert = &r["results"]["certificate"];
    assert!(cert["residual"].as_f64().unwrap() <= 1e-8);
    let (re, im) = (
        cert["eigenvalue"]["re"].as_f64().unwrap(),
        cert["eigenvalue"]["im"].as_f64().unwrap(),
    );
    assert!((re.hypot(im) - 1.0).abs() < 1e-8);

    let even = write(
        dir.path(),
        "e.json",
        r#"{"q": 2, "matrices": [[[1,0],[0,1]]]}"#,
    );
    let out = oddaxis(&["eigen", "--matrix", &even]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("odd"));
}

#[test]
fn span_command() {
    let dir = tempfile::tempdir().unwrap();
    let q = serde_json::json!({
        "q": 4,
        "matrices": [
            [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]],
            [[0,-1,0,0],[1,0,0,0],[0,0,0,-1],[0,0,1,0]],
            [[0,0,-1,0],[0,0,0,1],[1,0,0,0],[0,-1,0,0]]
        ]
    });
    let path = write(dir.path(), "quat.json", &q.to_string());
    let out = oddaxis(&["--mesh-level", "3", "span", "--matrices", &path]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert!((r["results"]["minimum"]["sigma_min"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    assert_eq!(r["results"]["singularity_expected"], false);
    assert!(r["flags"][0].as_str().unwrap().contains("no singularity"));

    let two = write(
        dir.path(),
        "two.json",
        r#"{"q": 1, "matrices": [[[1]], [[2]]]}"#,
    );
    assert_eq!(
        oddaxis(&["span", "--matrices", &two]).status.code(),
        Some(2)
    );
}

#[test]
fn bundle_trivializations() {
    for case in ["two-gamma-rp1", "four-gamma-rp2", "gamma-eps-rp1"] {
        let out = oddaxis(&["--mesh-level", "2", "bundle", "--case", case]);
        assert_eq!(out.status.code(), Some(0), "{case}");
        assert_eq!(report(&out)["pass"], true);
    }
}
