use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;
use touchscan::meshio::{read_stl, read_xyz, write_stl_binary};
use touchscan::metrics::{chamfer_distance, sample_mesh_surface, SampleSize};
use touchscan::targets::plate;
use touchscan::{Point, PointCloud};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_touchscan")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn job_in(dir: &Path, name: &str) -> PathBuf {
    let src = Path::new(env!("CARGO_MANIFEST_DIR")).join("jobs").join(name);
    let dst = dir.join(name);
    fs::copy(src, &dst).unwrap();
    dst
}

fn kv(text: &str, key: &str) -> f64 {
    let prefix = format!("{key}=");
    text.lines().find_map(|l| l.strip_prefix(&prefix)).unwrap_or_else(|| panic!("{key} missing in\n{text}")).parse().unwrap()
}

#[test]
fn airfoil_job_writes_full_grid() {
    let dir = TempDir::new().unwrap();
    let cfg = job_in(dir.path(), "airfoil.toml");
    let o = bin(&["scan", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = dir.path().join("out");
    let xyz = fs::read_to_string(out.join("airfoil.xyz")).unwrap();
    assert_eq!(xyz.lines().count(), 500);
    let stl = fs::read(out.join("airfoil.stl")).unwrap();
    assert_eq!(stl.len(), 84 + 50 * 912);
    assert_eq!(read_stl(&stl).unwrap().len(), 912);
    let trace = fs::read_to_string(out.join("airfoil_trace.csv")).unwrap();
    assert!(trace.starts_with("index,theta1_deg,"));
    assert!(stdout(&o).contains("triangles=912"));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let cfg = job_in(dir.path(), "airfoil.toml");
    let text = fs::read_to_string(&cfg).unwrap().replace("sigma_contact = 0.0", "sigma_contact = 0.03").replace("drift_per_contact = 0.0", "drift_per_contact = 0.0001");
    fs::write(&cfg, text).unwrap();
    let names = ["airfoil.stl", "airfoil.xyz", "airfoil_trace.csv", "airfoil_report.txt"];
    let read_all = || names.map(|n| fs::read(dir.path().join("out").join(n)).unwrap());
    assert!(bin(&["scan", cfg.to_str().unwrap()]).status.success());
    let first = read_all();
    assert!(bin(&["scan", cfg.to_str().unwrap()]).status.success());
    assert_eq!(first, read_all());
}

#[test]
fn echoed_config_reproduces_run() {
    let dir = TempDir::new().unwrap();
    let cfg = job_in(dir.path(), "plate.toml");
    assert!(bin(&["scan", cfg.to_str().unwrap()]).status.success());
    let report = fs::read_to_string(dir.path().join("out/plate_report.txt")).unwrap();
    let start = report.find("== configuration ==\n").unwrap() + "== configuration ==\n".len();
    let end = report.find("\n== result ==").unwrap();
    let echoed = dir.path().join("echoed.toml");
    fs::write(&echoed, &report[start..end]).unwrap();
    let stl = fs::read(dir.path().join("out/plate.stl")).unwrap();
    fs::remove_file(dir.path().join("out/plate.stl")).unwrap();
    assert!(bin(&["scan", echoed.to_str().unwrap()]).status.success());
    assert_eq!(stl, fs::read(dir.path().join("out/plate.stl")).unwrap());
    assert_eq!(report, fs::read_to_string(dir.path().join("out/plate_report.txt")).unwrap());
}

#[test]
fn unreachable_corner_aborts_without_geometry() {
    let dir = TempDir::new().unwrap();
    let cfg = job_in(dir.path(), "airfoil.toml");
    // corner (20, 1) sits at x = 580, y = -150, 599 mm out: beyond the wrist workspace at safe height
    let text = fs::read_to_string(&cfg).unwrap().replace("corner = [263.0, -72.0]", "corner = [466.0, -150.0]");
    fs::write(&cfg, text).unwrap();
    let o = bin(&["scan", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("[reachability]"), "{err}");
    let out = dir.path().join("out");
    assert!(!out.join("airfoil.stl").exists());
    assert!(!out.join("airfoil.xyz").exists());
    assert!(!out.join("airfoil_trace.csv").exists());
    let report = fs::read_to_string(out.join("airfoil_report.txt")).unwrap();
    assert!(report.contains("status=aborted"));
    assert!(report.contains("(20, 1)"));
}

#[test]
fn config_errors_exit_2_with_line() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[grid]\ncorner = [0.0, 0.0]\nrows = twenty\n").unwrap();
    let o = bin(&["scan", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
    let missing = bin(&["scan", dir.path().join("nope.toml").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(4));
}

#[test]
fn compare_file_with_itself() {
    let dir = TempDir::new().unwrap();
    let xyz = dir.path().join("a.xyz");
    fs::write(&xyz, "0 0 0\n1 2 3\n4.5 -1 2\n").unwrap();
    let o = bin(&["compare", xyz.to_str().unwrap(), xyz.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(kv(&stdout(&o), "cd"), 0.0);
}

#[test]
fn compare_plate_scan_against_plate_mesh() {
    let dir = TempDir::new().unwrap();
    let cfg = job_in(dir.path(), "plate.toml");
    assert!(bin(&["scan", cfg.to_str().unwrap()]).status.success());
    let mesh = plate(25.0, (263.0, -72.0), (263.0 + 19.0 * 6.0, -72.0 + 24.0 * 6.0));
    let stl = dir.path().join("plane.stl");
    fs::write(&stl, write_stl_binary(&mesh).unwrap()).unwrap();
    let xyz = dir.path().join("out/plate.xyz");
    let o = bin(&["compare", xyz.to_str().unwrap(), stl.to_str().unwrap(), "--seed", "3"]);
    assert!(o.status.success());
    let cd = kv(&stdout(&o), "cd");

    // sampling floor: the exact lattice against the same 10,000 samples
    let lattice: PointCloud = (0..25)
        .flat_map(|k| (0..20).map(move |i| Point::new(263.0 + 6.0 * i as f64, -72.0 + 6.0 * k as f64, 25.0)))
        .collect();
    let samples = sample_mesh_surface(&mesh, SampleSize::Count(10_000), 3).unwrap();
    let floor = chamfer_distance(&lattice, &samples).unwrap().cd;
    assert!(cd - floor < 1e-6, "{cd} vs floor {floor}");
    let scanned = read_xyz(&fs::read_to_string(&xyz).unwrap()).unwrap();
    assert_eq!(scanned.len(), 500);
}

#[test]
fn compare_rejects_empty_input() {
    let dir = TempDir::new().unwrap();
    let empty = dir.path().join("e.xyz");
    fs::write(&empty, "\n").unwrap();
    let o = bin(&["compare", empty.to_str().unwrap(), empty.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn test_a_ideal_and_repeatable() {
    let dir = TempDir::new().unwrap();
    let cfg = job_in(dir.path(), "probe_tests.toml");
    let noisy = stdout(&bin(&["test-a", cfg.to_str().unwrap()]));
    assert_eq!(noisy, stdout(&bin(&["test-a", cfg.to_str().unwrap()])));
    assert!(kv(&noisy, "average_dd") > 0.0);
    let text = fs::read_to_string(&cfg).unwrap().replace("sigma_contact = 0.02", "sigma_contact = 0.0");
    fs::write(&cfg, text).unwrap();
    let ideal = stdout(&bin(&["test-a", cfg.to_str().unwrap()]));
    assert!(kv(&ideal, "average_dd") < 1e-9);
}

#[test]
fn test_b_default_distances() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("b.toml");
    fs::write(&cfg, "[noise]\nsigma_contact = 0.02\nseed = 4\n").unwrap();
    let o = bin(&["test-b", cfg.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    for d in ["120", "300", "500"] {
        assert!(kv(&text, &format!("repeatability_{d}")) > 0.0);
    }
    assert_eq!(text, stdout(&bin(&["test-b", cfg.to_str().unwrap()])));
}

#[test]
fn test_b_calibrated_matches_targets() {
    let dir = TempDir::new().unwrap();
    let cfg = job_in(dir.path(), "probe_tests.toml");
    let text = stdout(&bin(&["test-b", cfg.to_str().unwrap()]));
    for (d, want) in [(120, 0.0387), (300, 0.0544), (500, 0.0712)] {
        let got = kv(&text, &format!("repeatability_{d}"));
        assert!((got / want - 1.0).abs() < 0.2, "{d}: {got}");
    }
    assert!(dir.path().join("out/probe_report.txt").exists());
}

#[test]
fn fk_home_and_ik_roundtrip() {
    let o = bin(&["fk", "0", "0", "0", "0", "0", "0"]);
    assert!(stdout(&o).starts_with("position 65.000000 0.000000 767.000000\n"));
    let o = bin(&["ik", "65", "0", "767", "--approach", "0", "0", "1"]);
    assert!(stdout(&o).starts_with("0.000000 0.000000 0.000000 0.000000 0.000000 0.000000\n"));
    let o = bin(&["ik", "300", "-40", "20"]);
    let angles: Vec<String> = stdout(&o).split_whitespace().map(String::from).collect();
    let mut args = vec!["fk"];
    args.extend(angles.iter().map(String::as_str));
    let back = stdout(&bin(&args));
    let pos: Vec<f64> = back.lines().next().unwrap().split_whitespace().skip(1).map(|v| v.parse().unwrap()).collect();
    // six-decimal degrees limit the round trip to about 1e-5 mm
    assert!((pos[0] - 300.0).abs() < 1e-4 && (pos[1] + 40.0).abs() < 1e-4 && (pos[2] - 20.0).abs() < 1e-4, "{pos:?}");
    let far = bin(&["ik", "900", "0", "0"]);
    assert_eq!(far.status.code(), Some(3));
}
