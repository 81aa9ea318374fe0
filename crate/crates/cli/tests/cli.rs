use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command as Process;

use gcs_cli::{CliError, Command, Payload};
use serde_json::Value;

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn load_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn schema_validator(name: &str) -> jsonschema::Validator {
    let dir = manifest_dir().join("schema");
    let config = load_json(&dir.join("config.schema.json"));
    let schema = load_json(&dir.join(name));
    jsonschema::options()
        .with_resource(
            "https://gcs.invalid/schema/config.schema.json",
            jsonschema::Resource::from_contents(config).unwrap(),
        )
        .build(&schema)
        .unwrap()
}

fn assert_valid(validator: &jsonschema::Validator, doc: &Value, what: &str) {
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    assert!(errors.is_empty(), "{what} fails the schema:\n{}", errors.join("\n"));
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn gcs(args: &[&str]) -> std::process::Output {
    Process::new(env!("CARGO_BIN_EXE_gcs")).args(args).output().unwrap()
}

/// Every shipped config, with the command it names.
fn shipped_configs() -> Vec<(PathBuf, Command)> {
    let mut out = Vec::new();
    for entry in fs::read_dir(manifest_dir().join("configs")).unwrap() {
        let path = entry.unwrap().path();
        let doc = load_json(&path);
        if let Some(c) = doc.get("command") {
            let command: Command = serde_json::from_value(c.clone()).unwrap();
            out.push((path, command));
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

#[test]
fn shipped_configs_match_the_config_schema() {
    let v = schema_validator("config.schema.json");
    let configs = shipped_configs();
    assert!(configs.len() >= 8);
    for (path, _) in &configs {
        assert_valid(&v, &load_json(path), &path.display().to_string());
    }
}

#[test]
fn every_command_report_matches_the_report_schema() {
    let v = schema_validator("report.schema.json");
    let mut seen = Vec::new();
    for (path, command) in shipped_configs() {
        let report = gcs_cli::run(command, &path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let doc: Value = serde_json::from_str(&report.to_json()).unwrap();
        assert_valid(&v, &doc, &path.display().to_string());
        seen.push(command);
    }
    for c in [Command::Analyze, Command::Evolve, Command::Identity, Command::Berry, Command::Pathint] {
        assert!(seen.contains(&c), "no shipped config for {c}");
    }
}

#[test]
fn schema_rejects_a_tampered_report() {
    let v = schema_validator("report.schema.json");
    let path = manifest_dir().join("configs/analyze_matsumoto.json");
    let report = gcs_cli::run(Command::Analyze, &path).unwrap();
    let mut doc: Value = serde_json::from_str(&report.to_json()).unwrap();
    doc["result"]["isotropy"]["informative"] = Value::from("no");
    assert!(!v.is_valid(&doc));
    let mut doc: Value = serde_json::from_str(&report.to_json()).unwrap();
    doc["wall_time"] = Value::from(1.0);
    assert!(!v.is_valid(&doc));
}

#[test]
fn analyze_matsumoto_preset() {
    let path = manifest_dir().join("configs/analyze_matsumoto.json");
    let report = gcs_cli::run(Command::Analyze, &path).unwrap();
    let Payload::Analyze(a) = &report.result else { panic!("wrong payload") };
    assert_eq!(a.isotropy_dims, [0, 1]);
    assert!(!a.isotropy.informative);
    let (r, i) = (a.fiducial[0], a.fiducial[2]);
    assert_eq!(r, [(2.0f64 / 3.0).sqrt(), 0.0]);
    assert_eq!(i, [(1.0f64 / 3.0).sqrt(), 0.0]);
}

#[test]
fn evolve_with_zero_hamiltonian_is_trivial() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        dir.path(),
        "zero.json",
        r#"{"rep": {"spin": "1"}, "fiducial": {"preset": "highest-weight"},
            "schedule": [{"until": 1.0, "h": [0, 0, 0]}], "dt": 0.01,
            "initial_point": {"theta": 0.8, "phi": 1.1}}"#,
    );
    let report = gcs_cli::run(Command::Evolve, &path).unwrap();
    let Payload::Evolve(e) = &report.result else { panic!("wrong payload") };
    assert!(e.trajectory.fidelity.iter().all(|f| (f - 1.0).abs() < 1e-12));
    assert!(e.trajectory.action.iter().all(|s| s.abs() < 1e-12));
}

#[test]
fn evolve_canonicalizes_a_tilted_fiducial() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        dir.path(),
        "tilted.json",
        r#"{"rep": {"spin": "1/2"}, "fiducial": {"amplitudes": [[0.6, 0], [0, 0.8]]},
            "schedule": [{"until": 2.0, "h": [0.3, -0.2, 1.0]}], "dt": 0.001}"#,
    );
    let report = gcs_cli::run(Command::Evolve, &path).unwrap();
    let Payload::Evolve(e) = &report.result else { panic!("wrong payload") };
    assert!(e.canonicalized && e.informative);
    assert!(e.summary.max_fidelity_deficit < 1e-8);
}

#[test]
fn berry_matsumoto_preset() {
    let path = manifest_dir().join("configs/berry_matsumoto.json");
    let report = gcs_cli::run(Command::Berry, &path).unwrap();
    let Payload::Berry(b) = &report.result else { panic!("wrong payload") };
    assert!((b.verdict.coefficient - 1.0 / 3.0).abs() < 1e-8);
    assert!(!b.verdict.admissible);
}

#[test]
fn unknown_key_is_a_parse_error_naming_it() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "typo.json", "{\n \"rep\": {\"spin\": \"1\"},\n \"fidutial\": {}\n}\n");
    match gcs_cli::run(Command::Analyze, &path) {
        Err(CliError::Parse { line, message, .. }) => {
            assert_eq!(line, 3);
            assert!(message.contains("fidutial"));
        }
        other => panic!("expected a parse error, got {other:?}"),
    }
    let out = gcs(&["analyze", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("PARSE_ERROR") && stderr.contains("fidutial"), "{stderr}");
}

#[test]
fn negative_dt_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        dir.path(),
        "neg.json",
        r#"{"rep": {"spin": "1"}, "fiducial": {"preset": "highest-weight"},
            "schedule": [{"until": 1.0, "h": [0, 0, 1]}], "dt": -0.001, "t_final": -1}"#,
    );
    match gcs_cli::run(Command::Evolve, &path) {
        Err(CliError::Validation { violations, .. }) => {
            assert_eq!(violations.len(), 2, "{violations:?}");
            assert!(violations[0].starts_with("dt"));
        }
        other => panic!("expected a validation error, got {other:?}"),
    }
    let out = gcs(&["evolve", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("VALIDATION_ERROR"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // Usage errors.
    assert_eq!(gcs(&["frobnicate", "--config", "x.json"]).status.code(), Some(1));
    assert_eq!(gcs(&["analyze"]).status.code(), Some(1));
    assert_eq!(gcs(&["analyze", "--config", "/nonexistent/config.json"]).status.code(), Some(1));
    assert_eq!(gcs(&["--help"]).status.code(), Some(0));

    // |1,0⟩ has a vanishing moment: no orbit to put a section on.
    let degenerate = write_config(
        dir.path(),
        "degenerate.json",
        r#"{"rep": {"spin": "1"}, "fiducial": {"amplitudes": [[0, 0], [1, 0], [0, 0]]}}"#,
    );
    let out = gcs(&["berry", "--config", degenerate.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("DEGENERATE_ORBIT"));

    // A rotation about axis 1 carries the north pole through the south pole.
    let exit = write_config(
        dir.path(),
        "exit.json",
        r#"{"rep": {"spin": "1"}, "fiducial": {"preset": "highest-weight"},
            "schedule": [{"until": 4.0, "h": [1, 0, 0]}], "dt": 0.01}"#,
    );
    let out = gcs(&["evolve", "--config", exit.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("CHART_EXIT") && stderr.contains("evolve"), "{stderr}");

    // Under-resolved path-integral quadrature is a usage error.
    let coarse = write_config(
        dir.path(),
        "coarse.json",
        r#"{"rep": {"spin": "1"}, "fiducial": {"preset": "highest-weight"},
            "schedule": [{"until": 1.0, "h": [0, 0, 1]}], "quadrature": [2, 3, 3], "slice_counts": [2]}"#,
    );
    let out = gcs(&["pathint", "--config", coarse.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("QUADRATURE_UNDERRESOLVED"));
}

#[test]
fn output_directory_and_formats() {
    let dir = tempfile::tempdir().unwrap();
    let config = manifest_dir().join("configs/pathint_spin_half.json");
    let cfg = config.to_str().unwrap();

    let out_dir = dir.path().join("csv");
    let out = gcs(&["pathint", "--config", cfg, "--out", out_dir.to_str().unwrap(), "--format", "csv"]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("arg A_N") && stdout.contains("wall time"), "{stdout}");
    let csv = fs::read_to_string(out_dir.join("pathint.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert!(out_dir.join("report.json").is_file() && out_dir.join("timing.json").is_file());

    let out_dir = dir.path().join("text");
    let out = gcs(&["pathint", "--config", cfg, "--out", out_dir.to_str().unwrap(), "--format", "text"]);
    assert!(out.status.success());
    assert!(fs::read_to_string(out_dir.join("report.txt")).unwrap().contains("empirical order"));

    let out = gcs(&["pathint", "--config", cfg]);
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["command"], "pathint");

    let evolve = manifest_dir().join("configs/evolve_matsumoto.json");
    let out_dir = dir.path().join("jsonl");
    let out = gcs(&["evolve", "--config", evolve.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success());
    let lines = fs::read_to_string(out_dir.join("trajectory.jsonl")).unwrap();
    let first: Value = serde_json::from_str(lines.lines().next().unwrap()).unwrap();
    for key in ["time", "mu", "theta", "phi", "action", "fidelity", "phase_residual"] {
        assert!(first.get(key).is_some(), "missing {key}");
    }
}
