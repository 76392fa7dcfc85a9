use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::{Command, Output};

use coexact::models::berger::{berger_mesh, BergerModel};
use coexact::models::fixtures::octahedron;
use coexact::models::torus::flat_torus;
use coexact_cli::config::{Args, CommandKind, ExperimentConfig, ModelName};
use coexact_cli::formats::{Mesh, MeshFile};
use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coexact"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("coexact-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is a JSON report")
}

#[test]
fn berger_reports_invariant_eigenvalue() {
    let o = bin(&["berger", "--epsilon", "0.5"]);
    assert!(o.status.success());
    let r = stdout_json(&o);
    assert_eq!(r["result"]["invariant_eigenvalue"].as_f64(), Some(1.0));
    assert_eq!(r["config"]["epsilon"].as_f64(), Some(0.5));
    assert_eq!(r["version"].as_str(), Some(env!("CARGO_PKG_VERSION")));
}

#[test]
fn torus_spectrum_report_and_table() {
    let out = scratch("r.json");
    let o = bin(&["spectrum", "--model", "torus", "--n", "16", "--count", "5", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let ev = r["result"]["eigenvalues"].as_array().unwrap();
    assert_eq!(ev.len(), 5);
    let first = ev[0].as_f64().unwrap();
    assert!((first - 4.0 * PI * PI).abs() / (4.0 * PI * PI) < 0.10, "{first}");
    let csv = std::fs::read_to_string(scratch("r.eigenvalues.csv")).unwrap();
    assert!(csv.starts_with("index,eigenvalue,residual\n"));
    assert_eq!(csv.lines().count(), 6);
}

#[test]
fn montecarlo_is_byte_identical() {
    let a = scratch("mc_a.json");
    let b = scratch("mc_b.json");
    for (p, threads) in [(&a, "1"), (&b, "2")] {
        let o = bin(&[
            "montecarlo", "--model", "torus", "--n-traj", "256", "--T", "32", "--seed", "7", "--threads", threads,
            "--out", p.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(
        std::fs::read(scratch("mc_a.items.csv")).unwrap(),
        std::fs::read(scratch("mc_b.items.csv")).unwrap()
    );
    let r: Value = serde_json::from_slice(&std::fs::read(&a).unwrap()).unwrap();
    assert_eq!(r["config"]["seed"].as_u64(), Some(7));
    assert!(r["config"].get("threads").is_none() && r["config"].get("out").is_none());
}

#[test]
fn invalid_config_exits_two_with_error_object() {
    for args in [
        &["montecarlo", "--model", "torus"][..],
        &["spectrum", "--model", "torus", "--n", "2"],
        &["berger", "--epsilon", "1.5"],
        &["cusp", "--n", "4"],
        &["spectrum", "--tol", "0"],
    ] {
        let o = bin(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let e: Value = serde_json::from_slice(&o.stderr).expect("stderr is a JSON error object");
        assert_eq!(e["kind"].as_str(), Some("config"));
        assert_eq!(e["exit_code"].as_i64(), Some(2));
    }
    assert_eq!(bin(&["spectrum", "--bogus"]).status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_three() {
    // An axis loop of the torus does not bound.
    let o = bin(&["filling", "--model", "torus", "--n", "3", "--cycle", "0,1,2,0"]);
    assert_eq!(o.status.code(), Some(3));
    let e: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(e["module"].as_str(), Some("filling"));
}

#[test]
fn malformed_mesh_exits_two() {
    let p = scratch("bad.off");
    std::fs::write(&p, "OFF\n3 1 0\n0 0 0\n1 0 0\n").unwrap();
    let o = bin(&["homology", "--mesh", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn homology_and_filling_on_an_off_mesh() {
    let (cx, pos) = octahedron();
    let file = MeshFile::from_complex(&cx, Value::Null, pos.iter().map(|p| p.to_vec()).collect());
    let p = scratch("oct.off");
    std::fs::write(&p, file.to_off().unwrap()).unwrap();
    let o = bin(&["homology", "--mesh", p.to_str().unwrap()]);
    assert!(o.status.success());
    let r = stdout_json(&o);
    assert_eq!(r["result"]["betti"], serde_json::json!([1, 0, 1, 0]));
    // Equator +x, +y, −x, −y bounds a hemisphere of area 2√3.
    let o = bin(&["filling", "--mesh", p.to_str().unwrap(), "--cycle", "0,2,1,3,0"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let area = stdout_json(&o)["result"]["area"].as_f64().unwrap();
    assert!((area - 2.0 * 3f64.sqrt()).abs() < 1e-9);
}

#[test]
fn exported_mesh_reloads_and_reproduces_the_spectrum() {
    let mesh = scratch("torus4.json");
    let a = bin(&["spectrum", "--model", "torus", "--n", "4", "--count", "3", "--export-mesh", mesh.to_str().unwrap()]);
    assert!(a.status.success());
    let b = bin(&["spectrum", "--mesh", mesh.to_str().unwrap(), "--count", "3"]);
    assert!(b.status.success(), "{}", String::from_utf8_lossy(&b.stderr));
    let (ra, rb) = (stdout_json(&a), stdout_json(&b));
    assert_eq!(ra["result"]["eigenvalues"], rb["result"]["eigenvalues"]);
    let header: Value = serde_json::from_str(&std::fs::read_to_string(&mesh).unwrap()).unwrap();
    assert_eq!(header["header"]["model"]["model"].as_str(), Some("torus"));
    assert_eq!(header["header"]["model"]["n"].as_u64(), Some(4));
}

#[test]
fn cusp_command_matches_analytic_value() {
    let o = bin(&["cusp", "--epsilon", "0.1", "--n", "512", "--layers", "4", "--sphere-level", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = stdout_json(&o);
    let ev = &r["result"]["eigenvalue"];
    let analytic = (PI / (2.0 * 10f64.ln())).powi(2);
    assert!((ev["analytic"].as_f64().unwrap() - analytic).abs() < 1e-12);
    assert!(ev["relative_error"].as_f64().unwrap() < 1e-4);
    let meshed = &r["result"]["meshed"];
    let (v, exact) = (meshed["central_volume"].as_f64().unwrap(), meshed["exact_central_volume"].as_f64().unwrap());
    assert!((v - exact).abs() / exact < 0.01);
}

#[test]
fn config_file_with_overrides() {
    let p = scratch("exp.toml");
    std::fs::write(&p, "model = \"torus\"\nn = 5\nn_traj = 10\nT = 2.5\nseed = 3\n").unwrap();
    let args = Args {
        config: Some(p.clone()),
        n: Some(6),
        ..Args::default()
    };
    let c = ExperimentConfig::resolve(CommandKind::Montecarlo, &args).unwrap();
    assert_eq!(c.model, Some(ModelName::Torus));
    assert_eq!(c.n, Some(6));
    assert_eq!((c.n_traj, c.time, c.seed), (10, 2.5, Some(3)));
    std::fs::write(&p, "nn = 5\n").unwrap();
    let e = ExperimentConfig::resolve(CommandKind::Spectrum, &args).unwrap_err();
    assert_eq!(e.exit_code(), 2);
}

#[test]
fn mesh_formats_round_trip_exactly() {
    let m = flat_torus(3).unwrap();
    let file = MeshFile::from_metric(&m, serde_json::json!({"note": "t"}), Vec::new());
    let back = MeshFile::from_json(&file.to_json()).unwrap();
    assert_eq!(back, file);
    let Mesh::Metric(b) = back.to_mesh().unwrap() else {
        panic!("expected metric data")
    };
    assert_eq!(b.complex().to_data(), m.complex().to_data());
    assert!(m.cells().iter().zip(b.cells()).all(|(x, y)| x.gram == y.gram));
    assert_eq!(b.measures(), m.measures());

    // 4D positions through OFF, orientation carried by index order.
    let bm = berger_mesh(&BergerModel::new(0.5).unwrap(), 2).unwrap();
    let verts: Vec<Vec<f64>> = bm.positions.iter().map(|p| p.to_vec()).collect();
    let mut file = MeshFile::from_complex(bm.metric.complex(), Value::Null, verts.clone());
    let off = file.to_off().unwrap();
    assert!(off.starts_with("4OFF\n"));
    let back = MeshFile::from_off(&off).unwrap();
    assert_eq!(back.vertices, verts);
    let Mesh::Metric(b) = back.to_mesh().unwrap() else {
        panic!("expected metric data")
    };
    assert_eq!(b.complex().to_data(), bm.metric.complex().to_data());
    // Round metric from the chords: positive volume on every cell.
    assert!(b.volumes().iter().all(|&v| v > 0.0));

    file.orientation.clear();
    file.vertices.clear();
    assert!(file.to_off().is_err());
}

#[test]
fn off_parser_handles_comments_and_rejects_garbage() {
    let text = "OFF # header\n# a comment line\n4 4 6\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n3 0 2 1\n3 0 1 3\n3 0 3 2\n3 1 2 3\n";
    let f = MeshFile::from_off(text).unwrap();
    assert_eq!(f.triangles.len(), 4);
    let Mesh::Complex { complex, measures } = f.to_mesh().unwrap() else {
        panic!("surface expected")
    };
    assert_eq!(complex.count(1), 6);
    assert!((measures.unwrap().face_areas[0] - 0.5).abs() < 1e-15);
    assert!(MeshFile::from_off("PLY\n").is_err());
    assert!(MeshFile::from_off("OFF\n1 1 0\n0 0 0\n5 0 0 0 0 0\n").is_err());
}
