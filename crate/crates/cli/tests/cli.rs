//! Command-line interface behavior: flags, file formats, exit codes.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cpdetect"))
}

#[test]
fn simulate_writes_expected_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let output = bin()
        .args(["simulate", "--setting", "1cp", "--seed", "7", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("date,value"));
    assert_eq!(text.lines().count(), 1097);
}

#[test]
fn simulate_rejects_unknown_setting() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let output = bin()
        .args(["simulate", "--setting", "bogus", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("error"), "stderr: {stderr}");
    assert!(!out.exists());
}

#[test]
fn detect_full_round_trip_json() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    assert!(bin()
        .args(["simulate", "--setting", "1cp", "--seed", "3", "--out"])
        .arg(&csv)
        .status()
        .unwrap()
        .success());

    let json_path = dir.path().join("r.json");
    let plot_path = dir.path().join("p.csv");
    let output = bin()
        .args(["detect", "--in"])
        .arg(&csv)
        .args([
            "--threshold",
            "mean",
            "--family",
            "weibull",
            "--generations",
            "10",
            "--pop",
            "12",
            "--seed",
            "3",
            "--out",
        ])
        .arg(&json_path)
        .arg("--plot-data")
        .arg(&plot_path)
        .output()
        .unwrap();
    assert!(output.status.success());

    // Parsing and re-serializing reproduces the bytes exactly.
    let text = std::fs::read_to_string(&json_path).unwrap();
    let parsed = cpdetect_core::DetectionResult::from_json(&text).unwrap();
    assert_eq!(parsed.to_json(), text);
    assert_eq!(parsed.spec_version, cpdetect_core::SPEC_VERSION);
    assert_eq!(parsed.fit.len(), 1096);
    assert_eq!(parsed.trace.len(), 10);
    for point in &parsed.fit {
        assert!(point.lower <= point.mean && point.mean <= point.upper);
    }
    // Every frequency entry appears in some per-generation best trace; the
    // trace carries J per generation for panel (d).
    assert!(parsed.trace.iter().all(|t| t.bmdl.is_finite()));

    // Plot data: header plus the four panel-a series over the full grid,
    // two generation panels, and the frequency rows; nothing non-finite.
    let plot = std::fs::read_to_string(&plot_path).unwrap();
    let mut lines = plot.lines();
    assert_eq!(lines.next(), Some("panel,t,series,value"));
    let mut panel_a = 0usize;
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 4);
        let value: f64 = fields[3].parse().unwrap();
        assert!(value.is_finite(), "non-finite plot value in {line}");
        if fields[0] == "a" {
            panel_a += 1;
        }
    }
    assert_eq!(panel_a, 4 * 1096);
}

#[test]
fn detect_rejects_malformed_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bad.csv");
    std::fs::write(&csv, "date,value\n2018-01-01,1.0\n2018-01-02,oops\n").unwrap();
    let out = dir.path().join("r.json");
    let output = bin()
        .args(["detect", "--in"])
        .arg(&csv)
        .args(["--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("unparseable"), "stderr: {stderr}");
}

#[test]
fn detect_rejects_unknown_flags_and_bad_values() {
    let output = bin().args(["detect", "--nonsense"]).output().unwrap();
    assert!(!output.status.success());

    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    std::fs::write(&csv, "date,value\n1,1.0\n2,2.0\n3,3.0\n").unwrap();
    let out = dir.path().join("r.json");
    for bad in [
        vec!["--family", "cauchy"],
        vec!["--threshold", "everything"],
        vec!["--mutation", "0.4,0.3"],
        vec!["--hyper", "1,2,3"],
        vec!["--elitism", "maybe"],
    ] {
        let output = bin()
            .args(["detect", "--in"])
            .arg(&csv)
            .args(["--out"])
            .arg(&out)
            .args(&bad)
            .output()
            .unwrap();
        assert!(!output.status.success(), "accepted {bad:?}");
    }
}

#[test]
fn threshold_modes_parse() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    // Ten values straddling 37 so every mode yields sensible data.
    std::fs::write(
        &csv,
        "date,value\n1,30\n2,45\n3,33\n4,50\n5,20\n6,41\n7,36\n8,39\n9,44\n10,28\n",
    )
    .unwrap();
    for threshold in ["mean", "norm37", "35.5"] {
        let out = dir.path().join(format!("r_{threshold}.json"));
        let output = bin()
            .args(["detect", "--in"])
            .arg(&csv)
            .args([
                "--threshold",
                threshold,
                "--generations",
                "4",
                "--pop",
                "6",
                "--out",
            ])
            .arg(&out)
            .output()
            .unwrap();
        assert!(output.status.success(), "threshold {threshold} failed");
        let parsed = cpdetect_core::DetectionResult::from_json(
            &std::fs::read_to_string(&out).unwrap(),
        )
        .unwrap();
        if threshold == "norm37" {
            assert_eq!(parsed.input.threshold, 37.0);
        }
    }
}

#[test]
fn compare_emits_all_requested_methods() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    assert!(bin()
        .args(["simulate", "--setting", "2cp", "--seed", "5", "--out"])
        .arg(&csv)
        .status()
        .unwrap()
        .success());
    let out = dir.path().join("cmp.json");
    let output = bin()
        .args(["compare", "--in"])
        .arg(&csv)
        .args([
            "--methods",
            "ga,pelt,cusum,freqmdl",
            "--generations",
            "6",
            "--pop",
            "10",
            "--seed",
            "5",
            "--out",
        ])
        .arg(&out)
        .output()
        .unwrap();
    assert!(output.status.success());
    let value: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(value["spec_version"], "1.0");
    for method in ["ga", "pelt", "cusum", "freqmdl"] {
        assert!(value["methods"][method].is_object(), "missing {method}");
    }
    assert!(value["methods"]["pelt"]["tau"].is_array());

    let output = bin()
        .args(["compare", "--in"])
        .arg(&csv)
        .args(["--methods", "telepathy", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(!output.status.success());
}
