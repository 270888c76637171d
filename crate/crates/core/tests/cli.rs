use std::path::Path;
use std::process::{Command, Output};

use qudit_phase::scenario::TraceRecord;

fn qp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qudit-phase"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn scenario(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(name)
        .display()
        .to_string()
}

#[test]
fn lattice_lines() {
    for (a, b, want) in [
        ("2", "2", "0, π"),
        ("3", "3", "0, 2π/3, 4π/3"),
        ("2", "3", "0, π/3, 2π/3, π, 4π/3, 5π/3"),
    ] {
        let o = qp(&["lattice", a, b]);
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(stdout(&o).lines().next().unwrap(), want);
    }
    assert_eq!(qp(&["lattice", "1", "2"]).status.code(), Some(2));
}

#[test]
fn figure_prints_config_and_rejects_unknown_names() {
    let o = qp(&["figure", "fig4d"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("rates = [100.0, -100.0]"), "{text}");
    assert!(text.contains("steps = 40000"), "{text}");

    let o = qp(&["figure", "fig9"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("fig1a, fig1b"), "{}", stderr(&o));
}

#[test]
fn run_writes_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("fig1a.csv");
    let o = qp(&[
        "run",
        &scenario("fig1a.toml"),
        "--output",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let record = TraceRecord::from_csv(&std::fs::read_to_string(&csv).unwrap()).unwrap();
    assert_eq!(record.rows(), 4001);
    assert_eq!(record.cycles.len(), 3);
    assert!(record.diagnostic("concurrence").is_some());
    assert!(record.diagnostic("max_unitarity_residual").unwrap()[0] < 1e-12);

    let json = dir.path().join("fig1a.json");
    let o = qp(&[
        "figure",
        "fig1a",
        "--output",
        json.to_str().unwrap(),
        "--format",
        "json",
        "--steps",
        "600",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(
        v["columns"]["geometric_phase"].as_array().unwrap().len(),
        601
    );
}

#[test]
fn run_to_stdout_without_output() {
    let o = qp(&["run", "fig1d", "--steps", "20"]);
    assert_eq!(o.status.code(), Some(0));
    let record = TraceRecord::from_csv(&stdout(&o)).unwrap();
    assert_eq!(record.rows(), 21);
    assert!(record.continuum);
}

#[test]
fn config_and_numerical_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    let text = std::fs::read_to_string(scenario("fig1a.toml"))
        .unwrap()
        .replace("rates = [1.0, 1.0, -2.0]", "rates = [1.0, 1.0, -1.0]");
    std::fs::write(&bad, text).unwrap();
    let o = qp(&["run", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("evolution.a[0]"), "{}", stderr(&o));

    std::fs::write(&bad, "name = \"x\"\ndims = [3, 3]\n[grid]\n").unwrap();
    let o = qp(&["run", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line"), "{}", stderr(&o));

    let o = qp(&["run", "fig1a", "--steps", "10"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("grid too coarse"));

    let o = qp(&["run", "no_such_file.toml"]);
    assert_eq!(o.status.code(), Some(2));

    let out = dir.path().join("missing").join("x.csv");
    let o = qp(&["run", "fig1d", "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn odd_steps_warn() {
    let o = qp(&["run", "fig1d", "--steps", "41"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(
        stderr(&o).contains("raised from 41 to 42"),
        "{}",
        stderr(&o)
    );
    assert_eq!(TraceRecord::from_csv(&stdout(&o)).unwrap().rows(), 43);
}

#[test]
fn verify_exit_codes() {
    let o = qp(&["verify", "fig1a"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("on lattice"));

    let o = qp(&["verify", "qubit_pair"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    let o = qp(&["verify", &scenario("qutrit_coset.toml")]);
    assert_eq!(o.status.code(), Some(4), "{}", stdout(&o));
    assert!(stdout(&o).contains("engine-only"));

    let o = qp(&["verify", "fig1a", "--tolerance", "1e-20"]);
    assert_eq!(o.status.code(), Some(1));
    let again = qp(&["verify", "fig1a", "--tolerance", "1e-20"]);
    assert_eq!(stdout(&o), stdout(&again));
}

#[test]
fn split_half_matches_a_only() {
    let a = qp(&["run", "fig1b", "--steps", "900"]);
    let h = qp(&["run", "fig1b", "--steps", "900", "--split", "half"]);
    let (a, h) = (
        TraceRecord::from_csv(&stdout(&a)).unwrap(),
        TraceRecord::from_csv(&stdout(&h)).unwrap(),
    );
    for (x, y) in a.columns.iter().flatten().zip(h.columns.iter().flatten()) {
        assert!((x - y).abs() <= 1e-9);
    }
    let o = qp(&["run", "fig6a", "--split", "half"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn batch_runs_a_directory() {
    let dir = tempfile::tempdir().unwrap();
    for f in ["fig1a.toml", "fig4b.toml", "qutrit_coset.toml"] {
        std::fs::copy(scenario(f), dir.path().join(f)).unwrap();
    }
    let out = dir.path().join("out");
    let o = qp(&[
        "batch",
        dir.path().to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
        "--steps",
        "1200",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    for stem in ["fig1a", "fig4b", "qutrit_coset"] {
        let text = std::fs::read_to_string(out.join(format!("{stem}.csv"))).unwrap();
        assert_eq!(TraceRecord::from_csv(&text).unwrap().rows(), 1201);
    }
    assert!(stdout(&o).contains("3 scenarios processed"));

    std::fs::write(dir.path().join("broken.toml"), "not toml [").unwrap();
    let o = qp(&[
        "batch",
        dir.path().to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
        "--steps",
        "1200",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("broken.toml"));
}
