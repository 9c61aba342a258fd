use std::path::Path;
use std::process::{Command, Output};

fn xducer(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xducer"))
        .args(args)
        .env_remove("XDUCER_SCENARIO_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn bundled(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name).display().to_string()
}

#[test]
fn analyze_prints_four_significant_figures() {
    let o = xducer(&["analyze", "gaas_2el.scn"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("Electromechanical cooperativity"));
    let line = out.lines().find(|l| l.starts_with("Thermal phonon number")).unwrap();
    assert!(line.ends_with("0.4863"), "{line}");
    assert!(!out.contains("Reverse added"));
}

#[test]
fn analyze_reverse_adds_reverse_noise_rows() {
    let o = xducer(&["analyze", "gaas_2el.scn", "--direction", "reverse"]);
    let out = stdout(&o);
    assert!(out.contains("Reverse added total noise"));
    assert!(out.contains("Reverse added mechanical noise"));
}

#[test]
fn analyze_json_uses_slugified_labels() {
    let o = xducer(&["analyze", &bundled("aln.scn"), "--json", "--direction", "reverse"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let m = v.as_object().unwrap();
    assert!(m.values().all(|x| !x.is_object() && !x.is_array()));
    let n = m["added_total_noise"].as_f64().unwrap();
    assert!((n / 12.0 - 1.0).abs() < 0.05, "{n}");
    assert_eq!(m["network"], "bare");
    assert!(m.contains_key("reverse_added_optical_noise"));
    assert!(m.contains_key("impedance_imaginary_part"));
}

#[test]
fn missing_file_exits_one() {
    let o = xducer(&["analyze", "missing.scn"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("file not found"));
}

#[test]
fn invalid_scenarios_exit_one_with_reason() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(bundled("gaas_2el_k2.scn")).unwrap();
    let cases = [
        (text.replace("k2_pct = 0.022", "k2_pct = 150"), "k2 out of (0,1)"),
        (text.replace("q_i = 77000", "q_i = 77000\nkappa_i_hz = 2.5e9"), "mutually exclusive keys"),
        (text.replace("t_k = 0.1", "t_k = 0.1\ncolour = red"), "line 21"),
    ];
    for (i, (body, needle)) in cases.iter().enumerate() {
        let p = dir.path().join(format!("bad{i}.scn"));
        std::fs::write(&p, body).unwrap();
        let o = xducer(&["analyze", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(1));
        assert!(stderr(&o).contains(needle), "{}", stderr(&o));
    }
}

#[test]
fn match_emits_a_scenario_that_reproduces_the_design() {
    let dir = tempfile::tempdir().unwrap();
    let emitted = dir.path().join("out.scn");
    let o = xducer(&["match", "gaas_2el.scn", "--json", "--emit", emitted.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let designed: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(designed["network"], "rlc");
    let o = xducer(&["analyze", emitted.to_str().unwrap(), "--json"]);
    let analyzed: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    for key in ["peak_transfer_efficiency", "added_total_noise", "tuning_capacitance", "reflection"] {
        assert_eq!(designed[key], analyzed[key], "{key}");
    }
}

#[test]
fn match_reports_rc_fallback_as_a_note() {
    let o = xducer(&["match", "linbo3.scn"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("note: RC fallback"));
    let o = xducer(&["match", "linbo3.scn", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["network"], "rc");
    assert!(v["notes"].as_str().unwrap().contains("RC fallback"));
}

#[test]
fn match_min_noise_uses_an_inductor_only() {
    let o = xducer(&["match", "gaas_2el_k2.scn", "--mode", "min-noise", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["network"], "rl");
    assert_eq!(v["transduction_bandwidth"], "mode splitting");
}

#[test]
fn sweep_writes_header_plus_one_line_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let args = ["sweep", "gaas_2el.scn", "--from-hz", "2.3279e9", "--to-hz", "2.3281e9", "--points", "2", "--out"];
    let o = xducer(&[&args[..], &[out.to_str().unwrap()]].concat());
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(!csv.contains('\r'));
    assert_eq!(csv.lines().next().unwrap(), "omega_hz,eta,N,re_z_ohm,im_z_ohm,s11");
    let first: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(first.len(), 6);
    assert_eq!(first[0], "2.32790000e9");
    let again = xducer(&[&args[..], &["-"]].concat());
    assert_eq!(stdout(&again), csv, "sweep output is deterministic");
}

#[test]
fn sweep_rejects_grid_outside_domain() {
    let o = xducer(&["sweep", "gaas_2el.scn", "--from-hz", "1e9", "--to-hz", "5e9", "--points", "4"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("grid"));
}

#[test]
fn tables_check_passes_for_every_table() {
    for which in ["1", "2", "3", "4"] {
        let o = xducer(&["tables", "--which", which, "--check"]);
        assert_eq!(o.status.code(), Some(0), "table {which}:\n{}", stdout(&o));
        assert!(stdout(&o).contains("check passed"));
    }
}

#[test]
fn tables_rejects_unknown_table_as_usage_error() {
    let o = xducer(&["tables", "--which", "9"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("1..=4"));
}

#[test]
fn scenario_dir_override_and_breach_listing() {
    let dir = tempfile::tempdir().unwrap();
    let src = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    std::fs::copy(src.join("gaas_2el.scn"), dir.path().join("gaas_2el.scn")).unwrap();
    std::fs::copy(src.join("aln.scn"), dir.path().join("aln.scn")).unwrap();
    let manifest = r#"
[[table]]
which = 1
title = "Tampered"
mode = "evaluate"
columns = ["gaas_2el.scn", "aln.scn"]
headers = ["A", "B"]

[[table.row]]
key = "electromechanical_cooperativity"
rel_tol = 0.05
values = [1.0, 2.0]

[[table.row]]
key = "added_total_noise"
rel_tol = 0.05
values = [557, 12]
"#;
    std::fs::write(dir.path().join("manifest.toml"), manifest).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_xducer"))
        .args(["tables", "--which", "1", "--check"])
        .env("XDUCER_SCENARIO_DIR", dir.path())
        .output()
        .unwrap();
    let out = stdout(&o);
    assert_eq!(o.status.code(), Some(2), "{out}");
    assert!(out.contains("Table 1: Tampered"));
    assert!(out.contains("FAIL A electromechanical_cooperativity"));
    assert!(out.contains("FAIL B electromechanical_cooperativity"));
    assert!(!out.contains("FAIL A added_total_noise"));
    assert!(out.contains("2 of 4 cells"));
}
