use std::f64::consts::TAU;
use std::path::{Path, PathBuf};
use std::process::Command;

use polyharm_cli::{CertificateFile, EXIT_FAILED, EXIT_INVALID, EXIT_OK};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_polyharm"))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&dyn AsRef<std::ffi::OsStr>]) -> (i32, String, String) {
    let out = bin().args(args.iter().map(|a| a.as_ref())).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

const L_SHAPE: &str = r#"{"vertices": [[0,0],[2,0],[2,1],[1,1],[1,2],[0,2]]}"#;

fn load(path: &Path) -> CertificateFile {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn triangle_gets_equal_arcs() {
    let dir = tempfile::tempdir().unwrap();
    let poly = write(dir.path(), "t.json", r#"{"vertices": [[0,0],[4,0],[1,3]]}"#);
    let cert = dir.path().join("t.cert.json");
    let (code, stdout, _) = run(&[&"solve", &poly, &"--out", &cert]);
    assert_eq!(code, EXIT_OK, "{stdout}");
    let file = load(&cert);
    assert_eq!(file.angles, vec![0.0, TAU / 3.0, 2.0 * TAU / 3.0, TAU]);
    assert!(file.ear_trace.is_empty());
}

#[test]
fn l_shape_has_three_ear_steps_and_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let poly = write(dir.path(), "l.json", L_SHAPE);
    let cert = dir.path().join("l.cert.json");
    let (code, stdout, _) = run(&[&"solve", &poly, &"--out", &cert]);
    assert_eq!(code, EXIT_OK);
    assert!(stdout.contains("exterior margin"));
    assert_eq!(stdout.lines().filter(|l| l.starts_with("ear ")).count(), 3);
    let file = load(&cert);
    assert_eq!(file.ear_trace.len(), 3);
    assert!(file.margin() > 1e-9);
    assert!(file.ear_trace.iter().all(|e| e.w0[0] > 0.0 && e.epsilon > 0.0));

    let (code, stdout, _) = run(&[&"verify", &poly, &cert]);
    assert_eq!(code, EXIT_OK);
    let report: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(report["pass"], true);
}

#[test]
fn clockwise_input_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let poly = write(dir.path(), "cw.json", r#"{"vertices": [[0,2],[1,2],[1,1],[2,1],[2,0],[0,0]]}"#);
    assert_eq!(run(&[&"solve", &poly]).0, EXIT_OK);
}

#[test]
fn malformed_and_invalid_inputs_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{\"vertices\": [[0,0],[1,");
    assert_eq!(run(&[&"solve", &bad]).0, EXIT_INVALID);
    let bow = write(dir.path(), "bow.json", r#"{"vertices": [[0,0],[1,1],[1,0],[0,1]]}"#);
    assert_eq!(run(&[&"solve", &bow]).0, EXIT_INVALID);
    let two = write(dir.path(), "two.json", r#"{"vertices": [[0,0],[1,1]]}"#);
    assert_eq!(run(&[&"ears", &two]).0, EXIT_INVALID);
    let missing = dir.path().join("nope.json");
    assert_eq!(run(&[&"solve", &missing]).0, EXIT_INVALID);
    assert_eq!(run(&[&"solve"]).0, EXIT_INVALID);
}

#[test]
fn perturbed_angle_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let poly = write(dir.path(), "l.json", L_SHAPE);
    let cert = dir.path().join("l.cert.json");
    assert_eq!(run(&[&"solve", &poly, &"--out", &cert]).0, EXIT_OK);
    // Shrink the arc of the reflex vertex (index 3) from the left by 0.5.
    let mut file = load(&cert);
    file.angles[3] += 0.5;
    assert!(file.angles[3] < file.angles[4]);
    let bad = write(dir.path(), "bad.cert.json", &serde_json::to_string(&file).unwrap());
    let (code, stdout, _) = run(&[&"verify", &poly, &bad]);
    assert_eq!(code, EXIT_FAILED, "{stdout}");
    let report: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(report["pass"], false);
    assert!(report["zero_margin"].as_f64().unwrap() < 0.0);
    assert!(report["jacobian_min"].as_f64().unwrap() < 0.0);
}

#[test]
fn mismatched_vertices_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let poly = write(dir.path(), "l.json", L_SHAPE);
    let cert = dir.path().join("l.cert.json");
    assert_eq!(run(&[&"solve", &poly, &"--out", &cert]).0, EXIT_OK);
    let other = write(dir.path(), "o.json", r#"{"vertices": [[0,0],[2,0],[2,1],[1,1],[1,2.5],[0,2]]}"#);
    assert_eq!(run(&[&"verify", &other, &cert]).0, EXIT_INVALID);
    assert_eq!(run(&[&"render", &other, &cert, &"--svg", &dir.path().join("x.svg")]).0, EXIT_INVALID);
}

#[test]
fn ears_of_simple_shapes() {
    let dir = tempfile::tempdir().unwrap();
    let ears = |text: &str| {
        let p = write(dir.path(), "p.json", text);
        let (code, stdout, _) = run(&[&"ears", &p]);
        assert_eq!(code, EXIT_OK);
        let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
        v["ear_indices"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect::<Vec<_>>()
    };
    assert_eq!(ears(r#"{"vertices": [[0,0],[1,0],[1,1],[0,1]]}"#), vec![0, 1, 2, 3]);
    assert_eq!(ears(r#"{"vertices": [[0,0],[1,0],[0,1]]}"#), vec![0, 1, 2]);
    assert_eq!(ears(L_SHAPE), vec![1, 2, 4, 5]);
}

#[test]
fn render_outline_only_and_missing_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let poly = write(dir.path(), "p.json", r#"{"vertices": [[1,0],[0.309,0.951],[-0.809,0.588],[-0.809,-0.588],[0.309,-0.951]]}"#);
    let cert = dir.path().join("p.cert.json");
    let svg = dir.path().join("p.svg");
    assert_eq!(run(&[&"solve", &poly, &"--out", &cert]).0, EXIT_OK);
    assert_eq!(run(&[&"render", &poly, &cert, &"--grid", &"0x0", &"--svg", &svg]).0, EXIT_OK);
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.contains("<polygon"));
    assert!(!text.contains("<polyline"));
    assert_eq!(text.matches("<text").count(), 5);

    assert_eq!(run(&[&"render", &poly, &cert, &"--grid", &"3x5", &"--svg", &svg]).0, EXIT_OK);
    assert_eq!(std::fs::read_to_string(&svg).unwrap().matches("<polyline").count(), 8);

    let missing = dir.path().join("none.json");
    assert_eq!(run(&[&"render", &poly, &missing, &"--svg", &svg]).0, EXIT_INVALID);
}

#[test]
fn los_table_rows_converge() {
    let (code, stdout, _) = run(&[&"los-table", &"-a", &"1", &"-b", &"1", &"--ys", &"1e-2,1e-3,1e-4"]);
    assert_eq!(code, EXIT_OK);
    let mut lines = stdout.lines();
    assert_eq!(lines.next(), Some("angle,y,omega_over_y,limit,abs_error"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 9);
    for row in &rows {
        assert_eq!(row[3], 0.5);
    }
    // Oblique rows: error falls tenfold per decade of y.
    for chunk in [&rows[0..3], &rows[6..9]] {
        for pair in chunk.windows(2) {
            let ratio = pair[0][4] / pair[1][4];
            assert!((5.0..20.0).contains(&ratio), "{ratio}");
        }
    }
    assert_eq!(run(&[&"los-table", &"-a", &"0", &"-b", &"1"]).0, EXIT_INVALID);
    assert_eq!(run(&[&"los-table", &"-a", &"1", &"-b", &"1", &"--ys", &"-1e-3"]).0, EXIT_INVALID);
}

#[test]
fn solve_flags_are_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let poly = write(dir.path(), "l.json", L_SHAPE);
    let svg = dir.path().join("l.svg");
    let (code, _, _) = run(&[&"solve", &poly, &"--svg", &svg, &"--eps0", &"0.25", &"--seed-grid", &"2"]);
    assert_eq!(code, EXIT_OK);
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<?xml"));
    // A margin no map can reach is reported as not certified.
    let (code, _, stderr) = run(&[&"solve", &poly, &"--min-margin", &"100", &"--max-halvings", &"3"]);
    assert_eq!(code, EXIT_FAILED);
    assert!(stderr.contains("not certified"));
}
