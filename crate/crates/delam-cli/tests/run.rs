use delam::mesh::{Case, GridPolicy};
use delam_cli::config::RunConfig;
use delam_cli::curve_io::read_curve;
use delam_cli::runner::{run, RunMeta};

fn small_dcb(dir: &std::path::Path, name: &str) -> RunConfig {
    let mut c = RunConfig::new(Case::Dcb, 10.0);
    c.strip_width = Some(5.0);
    c.target_displacement = Some(3.0);
    c.output.curve = Some(dir.join(name));
    c
}

#[test]
fn identical_inputs_write_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    run(&small_dcb(dir.path(), "a.csv"), |_| {}).unwrap();
    run(&small_dcb(dir.path(), "b.csv"), |_| {}).unwrap();
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b.csv")).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn curve_and_metadata_agree() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&small_dcb(dir.path(), "dcb.csv"), |_| {}).unwrap();
    let rows = read_curve(&dir.path().join("dcb.csv")).unwrap();
    assert_eq!(rows, out.rows);
    assert!(rows.windows(2).all(|w| w[1].displacement > w[0].displacement));
    assert!(rows.windows(2).all(|w| w[1].dissipation >= w[0].dissipation));
    let meta = RunMeta::load(&dir.path().join("dcb.meta.toml")).unwrap();
    assert_eq!(meta, out.meta);
    assert!(meta.completed);
    assert_eq!(meta.increments, rows.len());
    assert_eq!(meta.solver.tol_r, 5e-3);
}

#[test]
fn metadata_reports_the_snapped_crack_length() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = small_dcb(dir.path(), "snap.csv");
    c.grid = GridPolicy::Snap;
    c.target_displacement = Some(0.2);
    let out = run(&c, |_| {}).unwrap();
    assert_eq!(out.meta.mesh.a0_requested, 30.5);
    assert_eq!(out.meta.mesh.a0_actual, 30.0);
}
