use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use quick_xml::events::Event;
use quick_xml::Reader;

fn nsamg(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nsamg"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn polylines(svg: &str) -> usize {
    let mut reader = Reader::from_str(svg);
    let mut count = 0;
    loop {
        match reader.read_event().expect("well-formed svg") {
            Event::Eof => break,
            Event::Start(e) | Event::Empty(e) if e.name().as_ref() == b"polyline" => {
                let class = e
                    .try_get_attribute("class")
                    .unwrap()
                    .map(|a| a.unescape_value().unwrap().into_owned());
                if class.as_deref() == Some("series") {
                    count += 1;
                }
            }
            _ => {}
        }
    }
    count
}

#[test]
fn analyze_is_byte_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = nsamg(&["analyze", "--n", "8", "--seed", "3"], d.path());
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for name in ["fap_constants.csv", "projection_norms.csv", "theory.json", "fap_P.svg", "projection_QA.svg"] {
        assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap(), "{name}");
    }
}

#[test]
fn analyze_svgs_are_valid_with_declared_series() {
    let d = tempfile::tempdir().unwrap();
    assert!(nsamg(&["analyze", "--n", "6"], d.path()).status.success());
    // P side: classical and laip, R side: classical_t and lair, three constants each
    for (name, series) in [("fap_P.svg", 6), ("fap_R.svg", 6), ("projection_QA.svg", 3), ("projection_l2.svg", 3)] {
        let text = fs::read_to_string(d.path().join(name)).unwrap();
        assert!(text.contains("version=\"1.1\""));
        assert_eq!(polylines(&text), series, "{name}");
    }
}

#[test]
fn projection_marker_is_the_operator_norm() {
    let d = tempfile::tempdir().unwrap();
    assert!(nsamg(&["analyze", "--n", "6"], d.path()).status.success());
    let theory: serde_json::Value =
        serde_json::from_slice(&fs::read(d.path().join("theory.json")).unwrap()).unwrap();
    let csv = fs::read_to_string(d.path().join("projection_norms.csv")).unwrap();
    let mut max_amp = 0.0_f64;
    let mut norm = 0.0;
    for line in csv.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        if f[0] == "petrov_galerkin" && f[1] == "QA" {
            max_amp = max_amp.max(f[4].parse().unwrap());
            norm = f[5].parse().unwrap();
        }
    }
    assert_eq!(norm, theory["pi_qa"].as_f64().unwrap());
    assert!(max_amp <= norm * (1.0 + 1e-8));
}

#[test]
fn csv_rows_end_with_crlf() {
    let d = tempfile::tempdir().unwrap();
    assert!(nsamg(&["analyze", "--n", "4", "--formats", "csv"], d.path()).status.success());
    let bytes = fs::read(d.path().join("fap_constants.csv")).unwrap();
    assert!(bytes.ends_with(b"\r\n"));
    assert!(!d.path().join("theory.json").exists());
}

#[test]
fn exit_codes() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(nsamg(&["analyze", "--interp", "bogus"], d.path()).status.code(), Some(2));
    assert_eq!(nsamg(&["analyze", "--n", "4,6"], d.path()).status.code(), Some(2));
    assert_eq!(nsamg(&["solve", "--disc", "dg"], d.path()).status.code(), Some(2));
    let o = nsamg(&["solve", "--n", "8", "--nu", "0"], d.path());
    assert_eq!(o.status.code(), Some(4));
    let csv = fs::read_to_string(d.path().join("convergence.csv")).unwrap();
    assert!(csv.lines().count() > 10);
    let bad = Command::new(env!("CARGO_BIN_EXE_nsamg"))
        .args(["block-bound", "1", "1", "1", "1", "1", "1"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn solve_reaches_tolerance() {
    let d = tempfile::tempdir().unwrap();
    assert!(nsamg(&["solve", "--n", "8", "--tol", "1e-9"], d.path()).status.success());
    let s: serde_json::Value = serde_json::from_slice(&fs::read(d.path().join("summary.json")).unwrap()).unwrap();
    assert!(s["converged"].as_bool().unwrap());
    let r = s["final_residual"].as_f64().unwrap();
    assert!(r <= 1e-9 * s["rhs_norm"].as_f64().unwrap());
    assert_eq!(s["level_sizes"][0], 64);
}

#[test]
fn exact_svd_two_grid_respects_bound() {
    let d = tempfile::tempdir().unwrap();
    let args = ["solve", "--n", "6", "--interp", "svd", "--restrict", "svd", "--levels", "2", "--nu", "4"];
    assert!(nsamg(&args, d.path()).status.success());
    let s: serde_json::Value = serde_json::from_slice(&fs::read(d.path().join("summary.json")).unwrap()).unwrap();
    let bounds = s["bounds"].as_array().unwrap();
    assert!(!bounds.is_empty());
    for b in bounds {
        assert_eq!(b["satisfied"], serde_json::Value::Bool(true), "{b}");
    }
}

#[test]
fn sweep_keeps_going_past_failing_rows() {
    let d = tempfile::tempdir().unwrap();
    let o = nsamg(&["sweep", "--n", "6,6", "--pairs", "lair+classical,counterexample"], d.path());
    assert!(o.status.success());
    let csv = fs::read_to_string(d.path().join("sweep.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[0].ends_with(",ok") && rows[2].ends_with(",ok"));
    assert!(rows[1].contains("error:") && rows[1].contains("singular"));
}

#[test]
fn config_file_and_flags() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("run.cfg");
    fs::write(&cfg, "# comment\nn = 4\ninterp = laip\nformats = json\n").unwrap();
    let o = nsamg(&["analyze", "--config", cfg.to_str().unwrap(), "--interp", "classical"], d.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let t: serde_json::Value = serde_json::from_slice(&fs::read(d.path().join("theory.json")).unwrap()).unwrap();
    assert_eq!(t["interp"], "classical");
    assert_eq!(t["problem"]["unknowns"], 16);
    fs::write(&cfg, "colour = red\n").unwrap();
    assert_eq!(nsamg(&["analyze", "--config", cfg.to_str().unwrap()], d.path()).status.code(), Some(2));
}

#[test]
fn generate_round_trips_through_matrix_input() {
    let d = tempfile::tempdir().unwrap();
    assert!(nsamg(&["generate", "--n", "5"], d.path()).status.success());
    let mtx = d.path().join("matrix.mtx");
    let out = d.path().join("from_file");
    assert!(nsamg(&["analyze", "--matrix", mtx.to_str().unwrap(), "--formats", "json"], &out).status.success());
    let gen = d.path().join("generated");
    assert!(nsamg(&["analyze", "--n", "5", "--formats", "json"], &gen).status.success());
    let a: serde_json::Value = serde_json::from_slice(&fs::read(out.join("theory.json")).unwrap()).unwrap();
    let b: serde_json::Value = serde_json::from_slice(&fs::read(gen.join("theory.json")).unwrap()).unwrap();
    assert_eq!(a["pi_qa"], b["pi_qa"]);
    assert_eq!(a["fap"], b["fap"]);
}

#[test]
fn block_bound_table_and_fuzz() {
    let o = Command::new(env!("CARGO_BIN_EXE_nsamg"))
        .args(["block-bound", "2", "2", "1", "1", "2", "2"])
        .output()
        .unwrap();
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("ab+cd") && text.contains("9e0"));
    let o = Command::new(env!("CARGO_BIN_EXE_nsamg"))
        .args(["block-bound", "--fuzz", "1000", "--seed", "2"])
        .output()
        .unwrap();
    assert!(String::from_utf8(o.stdout).unwrap().contains("ab+cd violations 0"));
}
