use std::path::Path;
use std::process::Command;

use serde_json::Value;
use wexsys::cli::{run, EXIT_IO, EXIT_OK, EXIT_USAGE};
use wexsys::report::REPORT_SCHEMA;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn wexsys(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(
        std::iter::once("wexsys").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    Run {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn json(args: &[&str]) -> (i32, Value) {
    let r = wexsys(args);
    let v = serde_json::from_str(&r.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}\n{}", r.stdout, r.stderr));
    assert_valid(&v);
    (r.code, v)
}

fn assert_valid(report: &Value) {
    let schema: Value = serde_json::from_str(REPORT_SCHEMA).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator
        .iter_errors(report)
        .map(|e| e.to_string())
        .collect();
    assert!(errors.is_empty(), "schema violations: {errors:?}");
}

fn csv_records(text: &str) -> Vec<csv::StringRecord> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.records().map(|x| x.unwrap()).collect()
}

fn regime(args: &[&str]) -> String {
    let (code, v) = json(args);
    assert_eq!(code, EXIT_OK);
    v["results"]["verdict"]["regime"]
        .as_str()
        .unwrap()
        .to_string()
}

#[test]
fn classify_examples() {
    assert_eq!(regime(&["classify", "--alpha", "0.5", "--m", "1"]), "Exact");
    assert_eq!(regime(&["classify", "--alpha", "2.5", "--m", "3"]), "Exact");
    assert_eq!(
        regime(&["classify", "--alpha", "2.5", "--m", "2"]),
        "CompleteNotMinimal"
    );
    assert_eq!(
        regime(&["classify", "--alpha", "0.4", "--exclude", "-1,3"]),
        "MinimalNotComplete"
    );
    let (_, v) = json(&["classify", "--alpha", "2.5", "--m", "3"]);
    assert_eq!(v["results"]["verdict"]["window"]["lower"], 2.5);
    assert_eq!(v["results"]["verdict"]["window"]["upper"], 3.5);
}

#[test]
fn classify_usage_errors() {
    assert_eq!(
        wexsys(&["classify", "--alpha", "0", "--m", "1"]).code,
        EXIT_USAGE
    );
    assert_eq!(
        wexsys(&["classify", "--alpha", "1", "--m", "0"]).code,
        EXIT_USAGE
    );
    assert_eq!(wexsys(&["classify", "--alpha", "1"]).code, EXIT_USAGE);
    assert_eq!(wexsys(&["classify", "--m", "1"]).code, EXIT_USAGE);
    assert_eq!(
        wexsys(&["classify", "--alpha", "x", "--m", "1"]).code,
        EXIT_USAGE
    );
    assert_eq!(wexsys(&["frobnicate"]).code, EXIT_USAGE);
    assert_eq!(wexsys(&["--help"]).code, EXIT_OK);
}

#[test]
fn coeffs_two_point_closed_form() {
    let r = wexsys(&[
        "coeffs",
        "--exclude",
        "0,1",
        "--window",
        "8",
        "--format",
        "csv",
    ]);
    assert_eq!(r.code, EXIT_OK);
    let rows = csv_records(&r.stdout);
    assert_eq!(rows.len(), 2 * 15);
    for row in rows {
        let n: f64 = row[0].parse().unwrap();
        let j: usize = row[1].parse().unwrap();
        let re: f64 = row[2].parse().unwrap();
        let expected = if j == 1 { n - 1.0 } else { -n };
        assert!((re - expected).abs() < 1e-12, "n={n} j={j}: {re}");
        assert_eq!(&row[3], "0");
    }
}

#[test]
fn coeffs_exact_single_point() {
    let (code, v) = json(&["coeffs", "--exclude", "0", "--window", "4", "--exact"]);
    assert_eq!(code, EXIT_OK);
    let rows = v["results"]["coefficients"].as_array().unwrap();
    assert_eq!(rows.len(), 8);
    for row in rows {
        assert_eq!(row["exact"], serde_json::json!(["-1"]));
    }
    let r = wexsys(&[
        "coeffs",
        "--exclude",
        "0",
        "--window",
        "4",
        "--exact",
        "--format",
        "csv",
    ]);
    for row in csv_records(&r.stdout) {
        assert_eq!(&row[5], "-1");
    }
}

#[test]
fn coeffs_validation() {
    assert_eq!(
        wexsys(&["coeffs", "--exclude", "0,1", "--window", "0"]).code,
        EXIT_USAGE
    );
    assert_eq!(
        wexsys(&["coeffs", "--exclude", "-3,4", "--window", "3"]).code,
        EXIT_USAGE
    );
    let r = wexsys(&["coeffs", "--exclude", "0", "--window", "0"]);
    assert_eq!(r.code, EXIT_USAGE, "{}", r.stderr);
    assert_eq!(wexsys(&["coeffs", "--window", "4"]).code, EXIT_USAGE);
}

#[test]
fn verify_examples() {
    let (code, v) = json(&["verify", "--exclude", "0,1", "--window", "16", "--exact"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["pass"], true);
    let orders = v["results"]["orders"].as_array().unwrap();
    assert_eq!(orders.len(), 31);
    assert!(orders.iter().all(|o| o["vanishing_order"] == 2));
    assert_eq!(v["results"]["max_biorthogonality_deviation"], 0.0);

    let (code, v) = json(&["verify", "--exclude", "5", "--window", "16"]);
    assert_eq!(code, EXIT_OK);
    let orders = v["results"]["orders"].as_array().unwrap();
    assert_eq!(orders.len(), 32);
    assert!(orders.iter().all(|o| o["vanishing_order"] == 1));
    assert!(
        v["results"]["max_biorthogonality_deviation"]
            .as_f64()
            .unwrap()
            <= 1e-10
    );

    assert_eq!(
        wexsys(&["verify", "--exclude", "0,0", "--window", "8"]).code,
        EXIT_USAGE
    );
    assert_eq!(
        wexsys(&[
            "verify",
            "--exclude",
            "0,1",
            "--window",
            "8",
            "--max-m-check",
            "2"
        ])
        .code,
        EXIT_USAGE
    );
}

#[test]
fn scan_regimes_for_single_exclusion() {
    let (code, v) = json(&[
        "scan",
        "--exclude",
        "0",
        "--alpha-grid",
        "0.4,0.5,1.0,1.4,1.5,2.0",
        "--probes",
        "witness,frame",
    ]);
    assert_eq!(code, EXIT_OK);
    let points = v["results"]["points"].as_array().unwrap();
    let regimes: Vec<&str> = points
        .iter()
        .map(|p| p["verdict"]["regime"].as_str().unwrap())
        .collect();
    assert_eq!(
        regimes,
        [
            "MinimalNotComplete",
            "Exact",
            "Exact",
            "Exact",
            "CompleteNotMinimal",
            "CompleteNotMinimal"
        ]
    );
    // Constant annihilator: |h|^2 = t^(-2 alpha), so the partial norms blow up like eps^(1 - 2 alpha).
    let witness_at_2 = &points[5]["witness"];
    let fitted = witness_at_2["fitted_exponent"].as_f64().unwrap();
    assert!((fitted - (-3.0)).abs() < 0.05, "{fitted}");
    assert_eq!(witness_at_2["predicted_exponent"], -3.0);
    for p in points {
        let exact = p["verdict"]["regime"] == "Exact";
        assert_eq!(p.get("frame").is_some(), exact, "{}", p["alpha"]);
        assert_eq!(p["consistent"], true);
    }
}

#[test]
fn scan_default_grid_and_range_syntax() {
    let (code, v) = json(&["scan", "--exclude", "0,1", "--probes", "minimality"]);
    assert_eq!(code, EXIT_OK);
    let alphas: Vec<f64> = v["input"]["alpha_grid"]
        .as_array()
        .unwrap()
        .iter()
        .map(|a| a.as_f64().unwrap())
        .collect();
    assert_eq!(alphas.first(), Some(&0.5));
    assert_eq!(alphas.last(), Some(&3.5));
    assert_eq!(alphas.len(), 13);

    let (_, v) = json(&[
        "scan",
        "--exclude",
        "0",
        "--alpha-grid",
        "0.3:1.7:0.1",
        "--probes",
        "minimality",
    ]);
    let points = v["results"]["points"].as_array().unwrap();
    assert_eq!(points.len(), 15);
    let at = |a: f64| points.iter().find(|p| p["alpha"] == a).unwrap()["verdict"]["regime"].clone();
    assert_eq!(at(0.5), "Exact");
    assert_eq!(at(1.5), "CompleteNotMinimal");

    assert_eq!(
        wexsys(&["scan", "--exclude", "0", "--alpha-grid", "-1:1:0.5"]).code,
        EXIT_USAGE
    );
    assert_eq!(
        wexsys(&["scan", "--exclude", "0", "--probes", "riesz"]).code,
        EXIT_USAGE
    );
}

#[test]
fn growth_examples() {
    let (code, v) = json(&["growth", "--exclude", "0,1", "--n-max", "4096"]);
    assert_eq!(code, EXIT_OK);
    let fits = v["results"]["fits"].as_array().unwrap();
    assert_eq!(fits.len(), 2);
    for f in fits {
        assert!(
            (f["fitted_slope"].as_f64().unwrap() - 1.0).abs() < 0.05,
            "{f}"
        );
        assert!(f["delta_estimate"].as_f64().unwrap() > 0.0);
    }

    let (code, v) = json(&["growth", "--exclude", "0", "--n-max", "1024"]);
    assert_eq!(code, EXIT_OK);
    let fit = &v["results"]["fits"][0];
    assert!(fit["fitted_slope"].as_f64().unwrap().abs() < 1e-12);
    let alpha = 1.0f64;
    let target = 1.0 / (2.0 * alpha + 1.0).sqrt();
    let ob = &v["results"]["obstruction"][0];
    assert_eq!(ob["non_decaying"], true);
    for value in ob["series"]["values"].as_array().unwrap() {
        assert!((value.as_f64().unwrap() - target).abs() < 1e-12);
    }

    assert_eq!(
        wexsys(&["growth", "--exclude", "0", "--n-max", "63"]).code,
        EXIT_USAGE
    );
}

#[test]
fn growth_csv_has_j_column() {
    let r = wexsys(&[
        "growth",
        "--exclude",
        "-1,2",
        "--n-max",
        "128",
        "--format",
        "csv",
    ]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.stdout.starts_with("j,abs_lambda,abs_a\n"));
    let js: std::collections::BTreeSet<String> = csv_records(&r.stdout)
        .iter()
        .map(|x| x[0].to_string())
        .collect();
    assert_eq!(js.into_iter().collect::<Vec<_>>(), ["1", "2"]);
}

#[test]
fn out_directory_receives_report_and_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let r = wexsys(&[
        "scan",
        "--exclude",
        "0",
        "--alpha-grid",
        "1.0",
        "--out",
        out.to_str().unwrap(),
        "--format",
        "both",
    ]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    assert!(r.stdout.is_empty());
    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_valid(&report);
    for name in [
        "scan.csv",
        "scan_000_minimality.csv",
        "scan_000_witness.csv",
    ] {
        let text = std::fs::read_to_string(out.join(name)).unwrap();
        assert!(
            text.lines().next().unwrap().contains(','),
            "{name} lacks a header"
        );
    }
}

#[test]
fn unwritable_output_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, b"x").unwrap();
    let target = blocker.join("sub");
    let r = wexsys(&[
        "coeffs",
        "--exclude",
        "0",
        "--window",
        "4",
        "--out",
        target.to_str().unwrap(),
    ]);
    assert_eq!(r.code, EXIT_IO, "{}", r.stderr);
    let missing = dir.path().join("absent.toml");
    assert_eq!(
        wexsys(&["classify", "--config", missing.to_str().unwrap()]).code,
        EXIT_IO
    );
}

#[test]
fn determinism() {
    let args = [
        "coeffs",
        "--exclude",
        "-2,0,3",
        "--window",
        "40",
        "--format",
        "csv",
    ];
    assert_eq!(wexsys(&args).stdout, wexsys(&args).stdout);
    let exact = [
        "coeffs",
        "--exclude",
        "-2,0,3",
        "--window",
        "20",
        "--exact",
        "--format",
        "csv",
    ];
    assert_eq!(wexsys(&exact).stdout, wexsys(&exact).stdout);

    let strip = |mut v: Value| {
        v["provenance"].as_object_mut().unwrap().remove("timestamp");
        v
    };
    let scan = [
        "scan",
        "--exclude",
        "0,1",
        "--alpha-grid",
        "1.0,2.0",
        "--probes",
        "minimality,witness,frame",
    ];
    assert_eq!(strip(json(&scan).1), strip(json(&scan).1));
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.toml");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn config_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "alpha = 2.5\nm = 2\nformat = \"json\"\n");
    assert_eq!(
        regime(&["classify", "--config", &cfg]),
        "CompleteNotMinimal"
    );
    assert_eq!(
        regime(&["classify", "--config", &cfg, "--alpha", "2.0"]),
        "Exact"
    );
    assert_eq!(regime(&["classify", "--config", &cfg, "--m", "3"]), "Exact");

    let cfg = write_config(dir.path(), "exclude = [0, 1]\nwindow = 8\n[tolerance]\nabs_tol = 1e-13\nrel_tol = 1e-11\nseries_terms_max = 400\nquadrature_subdivision_max = 1000\n");
    let (code, v) = json(&["verify", "--config", &cfg]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["input"]["window"], 8);
    assert_eq!(v["tolerance"]["abs_tol"], 1e-13);
    let (_, v) = json(&["verify", "--config", &cfg, "--window", "5"]);
    assert_eq!(v["input"]["window"], 5);

    let bad = write_config(dir.path(), "alpha = 1.0\nlambda = 2\n");
    assert_eq!(wexsys(&["classify", "--config", &bad]).code, EXIT_USAGE);
    let bad_tol = write_config(dir.path(), "alpha = 1.0\nm = 1\n[tolerance]\nabs_tol = -1.0\nrel_tol = 1e-10\nseries_terms_max = 400\nquadrature_subdivision_max = 1000\n");
    assert_eq!(wexsys(&["classify", "--config", &bad_tol]).code, EXIT_USAGE);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_wexsys");
    let status = |args: &[&str]| {
        Command::new(bin)
            .args(args)
            .output()
            .unwrap()
            .status
            .code()
            .unwrap()
    };
    assert_eq!(status(&["classify", "--alpha", "1.0", "--m", "1"]), EXIT_OK);
    assert_eq!(
        status(&["verify", "--exclude", "0,0", "--window", "8"]),
        EXIT_USAGE
    );
    assert_eq!(
        status(&[
            "classify",
            "--alpha",
            "1.0",
            "--m",
            "1",
            "--out",
            "/proc/wexsys-denied"
        ]),
        EXIT_IO
    );
    let out = Command::new(bin).args(["--version"]).output().unwrap();
    assert!(String::from_utf8_lossy(&out.stdout).contains(env!("CARGO_PKG_VERSION")));
}
