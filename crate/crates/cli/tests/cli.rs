use assert_cmd::Command;
use predicates::prelude::*;

fn erange() -> Command {
    Command::cargo_bin("erange").unwrap()
}

fn write_config(dir: &tempfile::TempDir, body: &str) -> std::path::PathBuf {
    let path = dir.path().join("run.toml");
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn phase_shift_emits_requested_rows() {
    let out = erange()
        .args(["phase-shift", "--kpoints", "7", "--kmin", "0.1", "--kmax", "2.0"])
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    let text = String::from_utf8(out).unwrap();
    let lines: Vec<&str> = text.trim_end().split("\r\n").collect();
    assert_eq!(lines.len(), 8, "header + 7 rows: {text}");
    assert!(lines[0].starts_with("k [1/length],delta_integral [rad],delta_matching [rad]"));
    for line in &lines[1..] {
        assert_eq!(line.split(',').count(), 4);
    }
}

#[test]
fn integral_method_rejects_attractive_potential() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        "[potential]\ntype = \"square_well\"\ndepth = 5.0\nradius = 1.0\n",
    );
    erange()
        .args(["phase-shift", "--config"])
        .arg(&cfg)
        .args(["--method", "integral"])
        .assert()
        .code(2)
        .stderr(predicate::str::contains("V >= 0"));
}

#[test]
fn free_potential_gives_zero_phase() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        "[potential]\ntype = \"square_barrier\"\nheight = 0.0\nradius = 1.0\n",
    );
    let out = erange()
        .args(["phase-shift", "--config"])
        .arg(&cfg)
        .args(["--kpoints", "5"])
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    let text = String::from_utf8(out).unwrap();
    for line in text.trim_end().split("\r\n").skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        for c in &cols[1..] {
            assert_eq!(c.parse::<f64>().unwrap(), 0.0, "line {line}");
        }
    }
}

#[test]
fn effective_range_reports_barrier_a0() {
    erange()
        .arg("effective-range")
        .assert()
        .success()
        .stdout(predicate::str::contains("5.179862"));
}

#[test]
fn effective_range_marks_divergence_with_exponent() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        "[potential]\ntype = \"power_tail\"\namplitude = 1.0\ncore = 1.0\nexponent_s = 4.0\n",
    );
    let out = erange()
        .args(["effective-range", "--config"])
        .arg(&cfg)
        .args(["--method", "integral"])
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    let text = String::from_utf8(out).unwrap();
    let row = text.trim_end().split("\r\n").nth(1).unwrap();
    let cols: Vec<&str> = row.split(',').collect();
    assert_eq!(cols[5], "divergent", "{row}");
    let exponent: f64 = cols[6].parse().unwrap();
    assert!((exponent - 1.0).abs() < 0.1, "scan exponent {exponent} (predicted 5 - s = 1)");
}

#[test]
fn effective_range_flags_a_equals_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        "[potential]\ntype = \"square_barrier\"\nheight = 0.0\nradius = 1.0\n",
    );
    erange()
        .args(["effective-range", "--config"])
        .arg(&cfg)
        .assert()
        .success()
        .stdout(predicate::str::contains("a=0: undefined"));
}

#[test]
fn scan_single_cell() {
    let out = erange()
        .args(["scan", "--s-list", "6", "--ell-list", "0"])
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    let text = String::from_utf8(out).unwrap();
    let lines: Vec<&str> = text.trim_end().split("\r\n").collect();
    assert_eq!(lines.len(), 2, "{text}");
    assert!(lines[1].contains("convergent"));
}

#[test]
fn bound_states_empty_for_barrier_and_populated_for_well() {
    let out = erange().arg("bound-states").assert().success().get_output().stdout.clone();
    let text = String::from_utf8(out).unwrap();
    assert_eq!(text.trim_end().split("\r\n").count(), 1, "barrier: header only");

    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        "[potential]\ntype = \"square_well\"\ndepth = 5.0\nradius = 1.0\n",
    );
    let out = erange()
        .args(["bound-states", "--config"])
        .arg(&cfg)
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    let text = String::from_utf8(out).unwrap();
    assert_eq!(text.trim_end().split("\r\n").count(), 2, "well{{5,1}} has one bound state");
}

#[test]
fn levinson_well() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        "[potential]\ntype = \"square_well\"\ndepth = 5.0\nradius = 1.0\n",
    );
    let out = erange()
        .args(["levinson", "--config"])
        .arg(&cfg)
        .args(["--kmin", "0.001"])
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    let text = String::from_utf8(out).unwrap();
    let cols: Vec<&str> = text.trim_end().split("\r\n").nth(1).unwrap().split(',').collect();
    assert_eq!(cols[0], "1");
    let residual: f64 = cols[2].parse().unwrap();
    assert!(residual < 0.05, "residual {residual}");
}

#[test]
fn output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let (p1, p2) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for p in [&p1, &p2] {
        erange()
            .args(["phase-shift", "--kpoints", "20", "--out"])
            .arg(p)
            .env("ERANGE_THREADS", "4")
            .assert()
            .success();
    }
    assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
}

#[test]
fn json_output_carries_resolved_config() {
    let out = erange()
        .args(["effective-range", "--format", "json", "--ell", "1"])
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    let doc: serde_json::Value = serde_json::from_slice(&out).unwrap();
    assert_eq!(doc["config"]["potential"]["type"], "square_barrier");
    assert_eq!(doc["config"]["ell"], 1);
    assert!(doc["results"].as_array().unwrap().len() == 2);
    assert!(doc["diagnostics"]["grid_nodes"].as_i64().unwrap() > 0);
    // floats serialized at 17 significant digits
    let raw = String::from_utf8(out).unwrap();
    assert!(raw.contains("e-1") || raw.contains("e0"), "{raw}");
}

#[test]
fn malformed_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, "[potential]\ntype = \"square_barrier\"\nheight = -3.0\nradius = 1.0\n");
    erange()
        .args(["phase-shift", "--config"])
        .arg(&cfg)
        .assert()
        .code(2)
        .stderr(predicate::str::contains("height"));

    let cfg = write_config(&dir, "[potential\n");
    erange().args(["phase-shift", "--config"]).arg(&cfg).assert().code(2);
}

#[test]
fn bad_thread_env_exits_2() {
    erange()
        .arg("bound-states")
        .env("ERANGE_THREADS", "many")
        .assert()
        .code(2)
        .stderr(predicate::str::contains("ERANGE_THREADS"));
}

#[test]
fn validate_passes_on_fresh_checkout() {
    let out = erange()
        .env("ERANGE_THREADS", "0")
        .arg("validate")
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    let text = String::from_utf8(out).unwrap();
    assert!(text.split("\r\n").count() > 15);
    assert!(!text.contains("FAIL"), "{text}");
}
