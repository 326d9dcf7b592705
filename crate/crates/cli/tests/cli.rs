use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const OSC: &str = r#"
family = "oscillator"
[osc]
omega1 = 0.6
m1 = 0.5
omega2 = 1.0
m2 = 0.3
[spectrum]
n_max = 2
[spinor]
n = 1
"#;

const QUAD: &str = r#"
family = "quadratic"
[quad]
a1 = 0.0
b1 = 0.0
a2 = 1.0
[spectrum]
n_max = 0
"#;

const RM: &str = r#"
family = "rosen_morse"
[rm]
m0 = 0.0
m1 = 0.0
p0 = 0.288675134594813
p1 = 0.866025403784439
mu = 1.0
[spectrum]
n_max = 2
"#;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ptdirac"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("records output is JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Rows of a CSV table with `#` comment lines.
fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn oscillator_spectrum_agrees_with_shooting() {
    let d = TempDir::new().unwrap();
    write(d.path(), "osc.toml", OSC);
    let out = run(d.path(), &["spectrum", "--config", "osc.toml", "--verify"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let rec = stdout_json(&out);
    let comps = rec["comparisons"].as_array().unwrap();
    let shooting: Vec<&Value> = comps.iter().filter(|c| c["method"] == "shooting").collect();
    assert_eq!(shooting.len(), 6);
    for c in shooting {
        assert!(c["abs_diff"].as_f64().unwrap() < 1e-6, "{c}");
    }
}

#[test]
fn spurious_quadratic_root_is_reported_invalid() {
    let d = TempDir::new().unwrap();
    write(d.path(), "q.toml", QUAD);
    let out = run(d.path(), &["spectrum", "--config", "q.toml"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let states = stdout_json(&out)["states"].as_array().unwrap().clone();
    let bad: Vec<&Value> = states.iter().filter(|s| s["valid"] == false).collect();
    assert_eq!(bad.len(), 1);
    assert!((bad[0]["energy"].as_f64().unwrap() - 0.4410348192).abs() < 1e-9);
    assert!(bad[0]["note"].as_str().unwrap().contains("unsquared-equation residual"));
}

#[test]
fn hyperbolic_family_without_a_well_is_an_input_error() {
    let d = TempDir::new().unwrap();
    let cfg = RM.replace("m1 = 0.0", "m1 = 2.0");
    write(d.path(), "rm.toml", &cfg);
    let out = run(d.path(), &["spectrum", "--config", "rm.toml"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("no binding well"), "{}", stderr(&out));
}

#[test]
fn unknown_keys_and_missing_level_are_input_errors() {
    let d = TempDir::new().unwrap();
    write(d.path(), "typo.toml", &OSC.replace("omega2", "omega_2"));
    assert_eq!(code(&run(d.path(), &["spectrum", "--config", "typo.toml"])), 2);
    write(d.path(), "q.toml", QUAD);
    let out = run(d.path(), &["spinor", "--config", "q.toml"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("spinor.n"));
}

#[test]
fn spinor_table_is_normalised() {
    let d = TempDir::new().unwrap();
    write(d.path(), "osc.toml", OSC);
    let out = run(d.path(), &["spinor", "--config", "osc.toml", "--out", "psi.csv"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = std::fs::read_to_string(d.path().join("psi.csv")).unwrap();
    assert!(text.lines().nth(1).unwrap().starts_with("x,re_psi_plus"));
    let rows = csv_rows(&text);
    let h = rows[1][0] - rows[0][0];
    // trapezoid; the tails are negligible
    let total: f64 = rows.iter().map(|r| r[5]).sum::<f64>() * h;
    assert!((total - 1.0).abs() < 1e-6, "∫|ψ|² = {total}");
}

#[test]
fn zero_lambda_spinor_phase_steps_by_a_quarter_turn() {
    let d = TempDir::new().unwrap();
    let cfg = OSC.replace("m1 = 0.5", "m1 = 0.0").replace("m2 = 0.3", "m2 = 0.0").replace("n = 1", "n = 0");
    write(d.path(), "odd.toml", &cfg);
    // an odd symmetric grid puts a point on the branch point
    assert_eq!(code(&run(d.path(), &["spinor", "--config", "odd.toml", "--grid-n", "401"])), 2);

    let out = run(d.path(), &["spinor", "--config", "odd.toml", "--grid-n", "400", "--box", "6"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let rows = csv_rows(&String::from_utf8_lossy(&out.stdout));
    let phase = |r: &Vec<f64>| r[2].atan2(r[1]);
    let (left, right) = (phase(&rows[199]), phase(&rows[200]));
    assert!(rows[199][0] < 0.0 && rows[200][0] > 0.0);
    assert!(((right - left) - std::f64::consts::FRAC_PI_2).abs() < 1e-12, "{left} -> {right}");
}

#[test]
fn verify_passes_on_reference_parameter_sets() {
    let d = TempDir::new().unwrap();
    for (name, cfg) in [("osc.toml", OSC), ("q.toml", QUAD), ("rm.toml", RM)] {
        write(d.path(), name, cfg);
        let out = run(d.path(), &["verify", "--config", name]);
        assert_eq!(code(&out), 0, "{name}: {}", stderr(&out));
        let rec = stdout_json(&out);
        assert_eq!(rec["pass"], true);
        assert!(rec["checks"].as_array().unwrap().iter().all(|c| c["status"] != "fail"));
    }
}

fn table(dir: &Path, name: &str, re_m: impl Fn(f64) -> f64) {
    let mut t = String::from("x,re_m,im_m,re_p,im_p,re_vt,im_vt\n");
    for i in 0..101 {
        let x = -5.0 + 0.1 * i as f64;
        t += &format!("{x},{},0,{},0,0,0\n", re_m(x), 0.2 * x);
    }
    write(dir, name, &t);
}

#[test]
fn parity_violating_table_fails_the_pt_check() {
    let d = TempDir::new().unwrap();
    table(d.path(), "even.csv", |x| 1.0 + 0.1 * x * x);
    table(d.path(), "odd.csv", |x| 1.0 + 0.1 * x);
    for (csv, want) in [("even.csv", 0), ("odd.csv", 1)] {
        let cfg = format!("family = \"sampled\"\n[sampled]\ntable = \"{csv}\"\n");
        write(d.path(), "s.toml", &cfg);
        let out = run(d.path(), &["ptcheck", "--config", "s.toml"]);
        assert_eq!(code(&out), want, "{csv}: {}", stderr(&out));
        if want == 1 {
            assert!(stderr(&out).contains("pt_check"));
            let rec = stdout_json(&out);
            assert!(rec["checks"][0]["detail"].as_str().unwrap().contains("re_m_even"));
        }
    }
}

#[test]
fn table_grid_cannot_be_overridden() {
    let d = TempDir::new().unwrap();
    table(d.path(), "even.csv", |x| 1.0 + 0.1 * x * x);
    write(d.path(), "s.toml", "family = \"sampled\"\n[sampled]\ntable = \"even.csv\"\n");
    assert_eq!(code(&run(d.path(), &["ptcheck", "--config", "s.toml", "--grid-n", "51"])), 2);
}

#[test]
fn output_is_deterministic_and_written_whole() {
    let d = TempDir::new().unwrap();
    write(d.path(), "osc.toml", OSC);
    let mut texts = Vec::new();
    for _ in 0..2 {
        let out = run(d.path(), &["spectrum", "--config", "osc.toml", "--verify", "--out", "spec.json"]);
        assert_eq!(code(&out), 0);
        assert!(out.stdout.is_empty());
        texts.push(std::fs::read(d.path().join("spec.json")).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
    let mut names: Vec<String> = std::fs::read_dir(d.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert_eq!(names, ["osc.toml", "spec.json"]);
}

#[test]
fn norm_reports_corrected_and_printed_constants() {
    let d = TempDir::new().unwrap();
    write(d.path(), "osc.toml", &OSC.replace("n = 1", "n = 0"));
    let out = run(d.path(), &["norm", "--config", "osc.toml"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let lvl = &stdout_json(&out)["levels"][0];
    assert!((lvl["spinor_quadrature"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert!((lvl["printed"].as_f64().unwrap() - 0.57321849).abs() < 1e-8);
    assert!((lvl["value"].as_f64().unwrap() - lvl["printed"].as_f64().unwrap()).abs() > 1e-3);
}
