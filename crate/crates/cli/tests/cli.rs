use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fembench::mesh::{generate_box_grid, write_msh, CellKind, Mesh};
use serde_json::Value;
use tempfile::TempDir;

fn fembench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fembench")).args(args).output().unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).unwrap()
}

fn franke_config(family: &str, kind: &str, n: usize) -> String {
    format!(
        r#"{{"problem": {{"preset": {{"name": "poisson_franke", "params": {{"kind": "{kind}", "resolution": [{n}, {n}, {n}]}}}}}},
            "family": "{family}"}}"#
    )
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn run_reports_errors_and_timings() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "job.json", &franke_config("P2", "tet", 4));
    let csv = dir.path().join("out.csv");
    let vtk = dir.path().join("u.vtk");
    let out = fembench(&["run", p(&cfg), "--csv", p(&csv), "--vtk", p(&vtk)]);
    let r = stdout_json(&out);
    assert!(r["errors"]["l2"].as_f64().unwrap() > 0.0);
    for t in ["t_b", "t_a", "t_s", "t_total"] {
        assert!(r["timings"][t].as_f64().unwrap() > 0.0, "{t}");
    }
    assert_eq!(r["family"], "P2");
    let rows = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(rows.lines().count(), 2);
    assert!(rows.starts_with("schema_version,problem,family,"));
    let dump = std::fs::read_to_string(&vtk).unwrap();
    assert!(dump.contains("POINT_DATA 125"));
    assert!(dump.contains("solution"));
}

#[test]
fn run_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "job.json", &franke_config("Q1", "hex", 3));
    let a = stdout_json(&fembench(&["run", p(&cfg)]));
    let b = stdout_json(&fembench(&["run", p(&cfg)]));
    assert_eq!(a["errors"], b["errors"]);
    assert_eq!(a["num_dofs"], b["num_dofs"]);
}

#[test]
fn incompatible_family_is_a_configuration_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "job.json", &franke_config("Q2", "tet", 2));
    let out = fembench(&["run", p(&cfg)]);
    assert_eq!(out.status.code(), Some(2));
    let e = stderr_json(&out);
    assert_eq!(e["exit_code"], 2);
    assert!(e["message"].as_str().unwrap().contains("incompatible discretization"));
}

#[test]
fn io_and_config_failures() {
    let out = fembench(&["run", "/nonexistent/job.json"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stderr_json(&out)["error"], "io");

    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "bad.json", "{\"family\": \"P1\"}");
    assert_eq!(fembench(&["run", p(&cfg)]).status.code(), Some(2));

    let missing_mesh = r#"{"problem": {"preset": {"name": "patch_poisson"}}, "family": "P1",
        "mesh": {"file": "/nonexistent/cube.msh"}}"#;
    let cfg = write(&dir, "mesh.json", missing_mesh);
    assert_eq!(fembench(&["run", p(&cfg)]).status.code(), Some(3));
}

#[test]
fn converge_fits_quadratic_rate() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "job.json", &franke_config("P2", "tet", 4));
    let csv = dir.path().join("sweep.csv");
    let s = stdout_json(&fembench(&["converge", p(&cfg), "--levels", "3", "--csv", p(&csv)]));
    let rate = s["rates"]["l2"].as_f64().unwrap();
    assert!((rate - 3.0).abs() <= 0.3, "{rate}");
    assert_eq!(s["records"].as_array().unwrap().len(), 3);
    let h: Vec<f64> = s["avg_edge"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    // the diagonal edges of the tet split shift the average slightly
    for w in h.windows(2) {
        assert!((w[0] / w[1] - 2.0).abs() < 0.05, "{h:?}");
    }
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 4);
}

#[test]
fn converge_needs_two_levels() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "job.json", &franke_config("P1", "tet", 2));
    let out = fembench(&["converge", p(&cfg), "--levels", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn converge_refines_mesh_files() {
    let dir = TempDir::new().unwrap();
    let mesh = generate_box_grid([0.0; 3], [1.0; 3], [2, 2, 2], CellKind::Hex).unwrap();
    let file = write(&dir, "cube.msh", &write_msh(&mesh));
    let cfg = format!(
        r#"{{"problem": {{"preset": {{"name": "poisson_franke"}}}}, "family": "Q1", "mesh": {{"file": "{}"}}}}"#,
        p(&file)
    );
    let cfg = write(&dir, "job.json", &cfg);
    let s = stdout_json(&fembench(&["converge", p(&cfg), "--levels", "2"]));
    let cells: Vec<u64> = s["records"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["mesh_stats"]["num_cells"].as_u64().unwrap())
        .collect();
    assert_eq!(cells, vec![8, 64]);
}

#[test]
fn mesh_stats_on_clean_grid() {
    let dir = TempDir::new().unwrap();
    let mesh = generate_box_grid([0.0; 3], [1.0; 3], [3, 3, 3], CellKind::Hex).unwrap();
    let file = write(&dir, "cube.msh", &write_msh(&mesh));
    let r = stdout_json(&fembench(&["mesh-stats", p(&file)]));
    assert_eq!(r["flipped"].as_array().unwrap().len(), 0);
    let counts = r["aspect_ratio_histogram"]["counts"].as_array().unwrap();
    assert_eq!(counts.len(), 32);
    assert_eq!(counts[0], 27);
    assert_eq!(r["stats"]["num_cells"], 27);
}

#[test]
fn mesh_stats_flags_inverted_hex() {
    let dir = TempDir::new().unwrap();
    let unit = CellKind::Hex.reference_vertices().to_vec();
    let mirrored = unit.iter().map(|v| [-v[0], v[1], v[2]]).collect();
    let mesh = Mesh::new(CellKind::Hex, mirrored, (0..8).collect()).unwrap();
    let file = write(&dir, "flipped.msh", &write_msh(&mesh));
    let r = stdout_json(&fembench(&["mesh-stats", p(&file)]));
    assert_eq!(r["flipped"], serde_json::json!([0]));
}

#[test]
fn custom_problem_from_config() {
    let dir = TempDir::new().unwrap();
    // uniaxial tension of a bar, free lateral faces
    let cfg = r#"{
        "problem": {"custom": {
            "name": "bar",
            "pde": "linear_elasticity",
            "material": {"model": "hooke", "E": 100.0, "nu": 0.0},
            "dirichlet": [{"tag": 1, "value": [0, 0, 0], "components": [0]},
                          {"tag": 3, "value": [0, 0, 0], "components": [1]},
                          {"tag": 5, "value": [0, 0, 0], "components": [2]}],
            "neumann": [{"tag": 2, "traction": [10, 0, 0]}]
        }},
        "mesh": {"generate": {"shape": "box", "kind": "hex", "lower": [0,0,0], "upper": [2,1,1], "resolution": [2,1,1]}},
        "family": "Q1"
    }"#;
    let cfg = write(&dir, "job.json", cfg);
    let vtk = dir.path().join("bar.vtk");
    let r = stdout_json(&fembench(&["run", p(&cfg), "--vtk", p(&vtk)]));
    assert!(r["errors"].is_null());
    let dump = std::fs::read_to_string(&vtk).unwrap();
    assert!(dump.contains("von_mises"));
}
