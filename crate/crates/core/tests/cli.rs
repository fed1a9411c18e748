use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn perivar(args: &[&str], env_cap: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_perivar"));
    cmd.args(args).env_remove("PERIVAR_EXHAUSTIVE_CAP");
    if let Some(cap) = env_cap {
        cmd.env("PERIVAR_EXHAUSTIVE_CAP", cap);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

// θ = 2 on the boundary faces of the central 2×2 square of a 4×4 grid
const SQUARE: &str = r#"{
  "grid": {"dims": [4, 4]},
  "mu_minus": {"faces": [
    {"axis": 0, "slot": 1, "at": [1], "w": 2}, {"axis": 0, "slot": 1, "at": [2], "w": 2},
    {"axis": 0, "slot": 3, "at": [1], "w": 2}, {"axis": 0, "slot": 3, "at": [2], "w": 2},
    {"axis": 1, "slot": 1, "at": [1], "w": 2}, {"axis": 1, "slot": 1, "at": [2], "w": 2},
    {"axis": 1, "slot": 3, "at": [1], "w": 2}, {"axis": 1, "slot": 3, "at": [2], "w": 2}
  ]},
  "problem": {"kind": "free"}
}"#;

const SQUARE_MASK: &str = "P2\n4 4\n255\n0 0 0 0\n0 255 255 0\n0 255 255 0\n0 0 0 0\n";

fn heavy_line(cap: Option<usize>) -> String {
    let faces: Vec<String> = (0..5)
        .map(|x| format!(r#"{{"axis": 1, "slot": 2, "at": [{x}], "w": 3}}"#))
        .collect();
    let options = cap
        .map(|c| format!(r#", "options": {{"exhaustive_cap": {c}}}"#))
        .unwrap_or_default();
    format!(
        r#"{{"grid": {{"dims": [5, 4]}}, "mu_minus": {{"faces": [{}]}}, "problem": {{"kind": "free"}}{options}}}"#,
        faces.join(", ")
    )
}

#[test]
fn eval_prints_value_and_terms() {
    let dir = TempDir::new().unwrap();
    let problem = write(dir.path(), "p.json", SQUARE);
    let mask = write(dir.path(), "a.pgm", SQUARE_MASK);
    let o = perivar(&["eval", "-p", s(&problem), "--set", s(&mask)], None);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "-8\nperimeter 8\nmu_plus 0\nmu_minus 16\n");
}

#[test]
fn minimize_with_no_data_gives_the_empty_set() {
    let dir = TempDir::new().unwrap();
    let problem = write(dir.path(), "p.json", r#"{"grid": {"dims": [3, 2]}, "problem": {"kind": "free"}}"#);
    let out = dir.path().join("out");
    let o = perivar(&["minimize", "-p", s(&problem), "-o", s(&out)], None);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "0\n");
    let pgm = fs::read_to_string(out.join("minimizer.pgm")).unwrap();
    assert_eq!(pgm, "P2\n3 2\n255\n0 0 0\n0 0 0\n");
}

#[test]
fn minimizer_reimports_to_the_reported_value() {
    let dir = TempDir::new().unwrap();
    let problem = write(dir.path(), "p.json", SQUARE.replace("\"w\": 2", "\"w\": 3").as_str());
    let out = dir.path().join("out");
    let o = perivar(&["minimize", "-p", s(&problem), "-o", s(&out)], Some("30"));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let result: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("result.json")).unwrap()).unwrap();
    let value = stdout(&o).trim().to_string();
    assert_eq!(value, "-16");
    assert_eq!(result["value"].as_str().unwrap(), value);
    let e = perivar(&["eval", "-p", s(&problem), "--set", s(&out.join("minimizer.pgm"))], None);
    assert_eq!(stdout(&e).lines().next().unwrap(), value);
}

#[test]
fn profile_finds_first_positive_volume() {
    let dir = TempDir::new().unwrap();
    let faces: Vec<String> = (0..10)
        .map(|x| format!(r#"{{"axis": 1, "slot": 1, "at": [{x}], "w": "9/4"}}"#))
        .collect();
    let text = format!(
        r#"{{"grid": {{"dims": [10, 2]}}, "mu_minus": {{"faces": [{}]}}, "problem": {{"kind": "ic"}}}}"#,
        faces.join(", ")
    );
    let problem = write(dir.path(), "p.json", &text);
    let out = dir.path().join("out");
    let o = perivar(&["ic", "profile", "-p", s(&problem), "-o", s(&out), "--v-max", "12"], None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o), "first positive at v = 9\n");
    let csv = fs::read_to_string(out.join("profile.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("v,phi,method"));
    let row9 = lines.nth(8).unwrap();
    assert!(row9.starts_with("9,1/4,"), "{row9}");
}

#[test]
fn strong_and_divcert_agree_on_a_light_line() {
    let dir = TempDir::new().unwrap();
    let text = SQUARE.replace("\"kind\": \"free\"", "\"kind\": \"ic\"");
    let problem = write(dir.path(), "p.json", &text);
    let out = dir.path().join("strong");
    let o = perivar(&["ic", "strong", "-p", s(&problem), "-o", s(&out), "--c", "1"], None);
    assert!(o.status.success());
    let excess: String = stdout(&o).trim().into();
    let d = perivar(&["ic", "divcert", "-p", s(&problem), "-o", s(&dir.path().join("div")), "--c", "1"], None);
    assert!(d.status.success());
    let feasible = stdout(&d) == "feasible\n";
    let positive = excess != "0" && !excess.starts_with('-');
    assert_eq!(feasible, !positive);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["excess"].as_str().unwrap(), excess);
}

#[test]
fn validation_errors_exit_with_2() {
    let dir = TempDir::new().unwrap();
    let problem = write(dir.path(), "p.json", r#"{"grid": {"dims": [2]}, "problem": {"kind": "free", "x": 1}}"#);
    let o = perivar(&["minimize", "-p", s(&problem), "-o", s(&dir.path().join("o"))], None);
    assert_eq!(o.status.code(), Some(2));
    let neg = write(dir.path(), "n.json", &SQUARE.replacen("\"w\": 2", "\"w\": -2", 1));
    let o = perivar(&["minimize", "-p", s(&neg), "-o", s(&dir.path().join("o"))], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn non_submodular_over_cap_exits_with_3_and_a_report() {
    let dir = TempDir::new().unwrap();
    let problem = write(dir.path(), "p.json", &heavy_line(None));
    let o = perivar(&["minimize", "-p", s(&problem), "-o", s(&dir.path().join("o")), "--cap", "4"], None);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("violations"), "{err}");
}

#[test]
fn cap_precedence_flag_env_file() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("o");
    let file_small = write(dir.path(), "small.json", &heavy_line(Some(4)));
    let file_large = write(dir.path(), "large.json", &heavy_line(Some(30)));
    let run = |p: &Path, flag: Option<&str>, env: Option<&str>| {
        let mut args = vec!["minimize", "-p", s(p), "-o", s(&out)];
        if let Some(f) = flag {
            args.extend(["--cap", f]);
        }
        perivar(&args, env).status.code()
    };
    assert_eq!(run(&file_small, None, None), Some(3));
    assert_eq!(run(&file_large, None, None), Some(0));
    assert_eq!(run(&file_small, None, Some("30")), Some(0));
    assert_eq!(run(&file_large, None, Some("4")), Some(3));
    assert_eq!(run(&file_large, Some("4"), Some("30")), Some(3));
    assert_eq!(run(&file_small, Some("30"), Some("4")), Some(0));
}

#[test]
fn render_and_experiment_write_files() {
    let dir = TempDir::new().unwrap();
    let problem = write(dir.path(), "p.json", SQUARE);
    let mask = write(dir.path(), "a.pgm", SQUARE_MASK);
    let svg = dir.path().join("fig/square.svg");
    let o = perivar(&["render", "-p", s(&problem), "--set", s(&mask), "-o", s(&svg), "--title", "a<b"], None);
    assert!(o.status.success());
    let text = fs::read_to_string(&svg).unwrap();
    assert!(text.contains("<svg") && text.contains("a&lt;b"), "{text}");

    let out = dir.path().join("exp");
    let o = perivar(
        &["experiment", "runaway_slab", "--param", "l=3", "--param", "shifts=0,2,4", "-o", s(&out)],
        None,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("lsc_fails: true"));
    assert!(out.join("series.csv").exists() && out.join("report.json").exists());
    let bad = perivar(&["experiment", "runaway_slab", "--param", "nope=1", "-o", s(&out)], None);
    assert_eq!(bad.status.code(), Some(2));
}
