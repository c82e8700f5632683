use std::path::Path;
use std::process::{Command, Output};

fn tripartite(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tripartite"))
        .args(args)
        .env("TRIPARTITE_WORKERS", "1")
        .output()
        .expect("binary runs")
}

fn point_json(args: &[&str]) -> serde_json::Value {
    let mut a = vec!["point"];
    a.extend_from_slice(args);
    let out = tripartite(&a);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn small_config(dir: &Path) -> std::path::PathBuf {
    let out = tripartite(&["preset", "show", "fig3b"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap().replace("points = 60", "points = 5");
    let path = dir.join("small.toml");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn fig2_ground_state_point_is_fully_inseparable() {
    let v = point_json(&["-k", "0.05", "-T", "0.05", "--gamma", "0.01", "--cutoff", "50"]);
    assert_eq!(v["class"], "C1");
    assert_eq!(v["report"]["class"], "C1");
}

#[test]
fn uncoupled_point_is_fully_separable() {
    assert_eq!(point_json(&["-k", "0", "-T", "0.3"])["class"], "C5");
}

#[test]
fn both_engines_agree_on_a_point() {
    let v = point_json(&["--engine", "both", "-k", "0.08", "-T", "0.5", "--dt=-0.4", "--delta", "0.7"]);
    let d = v["engine_deviation"].as_f64().expect("deviation reported");
    assert!(d <= 1.0, "{d}");
    assert_eq!(v["engine_agreement"], true);
    assert!(v["residue"].is_object() && v["quadrature"].is_object());
}

#[test]
fn sweep_writes_outputs_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let run = |sub: &str| {
        let out_dir = dir.path().join(sub);
        let out = tripartite(&["sweep", "--config", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        out_dir
    };
    let (a, b) = (run("a"), run("b"));
    let csv = std::fs::read(a.join("fig3b.csv")).unwrap();
    assert_eq!(csv, std::fs::read(b.join("fig3b.csv")).unwrap());
    let text = String::from_utf8(csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "axis1,axis2,class,nu_L,nu_C,nu_R,EN_L,EN_C,EN_R,phys_margin,boundary");
    assert_eq!(lines.count(), 25);
    let side: serde_json::Value = serde_json::from_slice(&std::fs::read(a.join("fig3b.json")).unwrap()).unwrap();
    assert!(side.to_string().contains("\"dT\""));
    assert!(a.join("fig3b_plot.py").exists());
}

#[test]
fn config_errors_exit_with_two() {
    assert_eq!(tripartite(&["sweep", "--preset", "no-such-preset"]).status.code(), Some(2));
    assert_eq!(tripartite(&["point", "--gamma=-1"]).status.code(), Some(2));
    assert_eq!(tripartite(&["point", "--engine", "fast"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let text = std::fs::read_to_string(&cfg).unwrap().replace("param = \"dT\"", "param = \"k\"");
    std::fs::write(&cfg, text).unwrap();
    assert_eq!(tripartite(&["sweep", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn preset_list_names_every_preset() {
    let out = tripartite(&["preset", "list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["fig2", "fig2-inset", "fig3a", "fig3b", "fig3c"] {
        assert!(text.lines().any(|l| l.split_whitespace().next() == Some(name)), "{name}");
    }
}

#[test]
fn validate_passes_and_catches_a_sign_flip() {
    let ok = tripartite(&["validate", "--samples", "10"]);
    assert!(ok.status.success(), "{}", String::from_utf8_lossy(&ok.stdout));
    let bad = tripartite(&["validate", "--samples", "2", "--reversed-susceptibility"]);
    assert_eq!(bad.status.code(), Some(1));
    let text = String::from_utf8(bad.stdout).unwrap();
    let line = text.lines().find(|l| l.starts_with("equipartition")).unwrap();
    assert!(line.contains("FAIL"), "{line}");
}
