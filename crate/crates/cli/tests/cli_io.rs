//! File-format and resume contracts of the front end.

use cuboid_lbm::domain::BoundarySpec;
use cuboid_lbm::solver::{self, Forcing, RateSpec, SimulationConfig};

#[path = "../src/config.rs"]
mod config;
#[path = "../src/output.rs"]
mod output;

fn small_config() -> SimulationConfig {
    let mut c = SimulationConfig::new(0.5, 1.0, 6, 8, 6);
    c.shear = RateSpec::Omega(1.3);
    c.boundary = BoundarySpec::lid_driven_cavity(0.04);
    c.forcing = Forcing::Constant([1e-6, 0.0, 0.0]);
    c.max_steps = 2_000;
    c.convergence_tol = None;
    c
}

#[test]
fn checkpoint_resume_is_bitwise_exact() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_config();

    // uninterrupted run
    let full = solver::run(&config).unwrap();

    // interrupted at half way, checkpointed, resumed
    let mut half_config = config.clone();
    half_config.max_steps = 1_000;
    let half = solver::run_state(solver::initialize(&half_config).unwrap(), &half_config, |_| {})
        .unwrap();
    let path = dir.path().join("checkpoint.bin");
    output::write_checkpoint(&path, &half.state, &config).unwrap();

    let (config2, resumed_state) = output::read_checkpoint(&path).unwrap();
    assert_eq!(resumed_state.step, 1_000);
    let resumed = solver::run_state(resumed_state, &config2, |_| {}).unwrap();

    assert_eq!(full.state.step, resumed.state.step);
    assert_eq!(full.state.field.current(), resumed.state.field.current());
    assert_eq!(full.state.hydro.ux, resumed.state.hydro.ux);
}

#[test]
fn checkpoint_rejects_garbage() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.bin");
    std::fs::write(&path, b"not a checkpoint").unwrap();
    assert!(output::read_checkpoint(&path).is_err());
}

#[test]
fn vtk_snapshot_carries_cuboid_spacing() {
    let dir = tempfile::tempdir().unwrap();
    let config = {
        let mut c = small_config();
        c.max_steps = 1;
        c
    };
    let report = solver::run(&config).unwrap();
    let path = dir.path().join("snap.vtk");
    output::write_vtk(&path, &report.state, "test").unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("DATASET STRUCTURED_POINTS"));
    let spacing = text
        .lines()
        .find(|l| l.starts_with("SPACING"))
        .expect("spacing line");
    let vals: Vec<f64> = spacing
        .split_whitespace()
        .skip(1)
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(vals, vec![1.0, 0.5, 1.0]);
    assert!(text.contains("SCALARS rho double"));
    assert!(text.contains("VECTORS u double"));
    let n_points: usize = text
        .lines()
        .find(|l| l.starts_with("POINT_DATA"))
        .and_then(|l| l.split_whitespace().nth(1))
        .and_then(|v| v.parse().ok())
        .unwrap();
    assert_eq!(n_points, 6 * 8 * 6);
}

#[test]
fn profiles_are_ordered_and_commented() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("profile.txt");
    let samples: Vec<(f64, f64)> = (0..10).map(|i| (i as f64 * 0.5, (i as f64).sin())).collect();
    output::write_profile(&path, "duct midline", &samples).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# duct midline\n"));
    let coords: Vec<f64> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split_whitespace().next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(coords.len(), 10);
    assert!(coords.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn config_file_round_trip_through_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.ini");
    let config = small_config();
    std::fs::write(&path, config::render_config(&config)).unwrap();
    let parsed = config::parse_config(&path).unwrap();
    assert_eq!(format!("{config:?}"), format!("{parsed:?}"));
}

#[test]
fn atomic_writes_leave_no_temp_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("file.txt");
    output::write_atomic(&path, b"hello").unwrap();
    output::write_atomic(&path, b"replaced").unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "replaced");
    let leftovers: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().contains("tmp"))
        .collect();
    assert!(leftovers.is_empty());
}
