//! Scan jobs: configuration files, end-to-end runs and their reports.
//!
//! A job is a TOML document with these sections (all lengths mm, angles deg):
//!
//! ```toml
//! [robot]                 # optional, defaults shown
//! d1 = 170.0
//! l1 = 65.0
//! l2 = 305.0
//! d4 = 222.0
//! d6 = 70.0
//! joint_limits_deg = [[-170, 170], [0, 120], [0, 170], [-180, 180], [-150, 150], [-180, 180]]
//!
//! [scene]
//! table_z = 0.0
//! floor_mode = "table"    # or "skip"
//! [scene.target]
//! kind = "stl"            # "stl" (path), "plate" (z, min, max) or "naca" (profile, chord, span, origin)
//! path = "part.stl"
//!
//! [grid]
//! corner = [270.0, -72.0]
//! safe_z = 60.0
//! rows = 20
//! cols = 25
//! row_spacing = 6.0
//! col_spacing = 6.0
//! step = 5.0
//!
//! [noise]                 # optional, ideal robot by default
//! sigma_contact = 0.0
//! sigma_per_reach = 0.0
//! drift_per_contact = 0.0
//! seed = 0
//!
//! [output]                # paths relative to the config file
//! stl = "scan.stl"
//! xyz = "scan.xyz"
//! trace = "trace.csv"
//! report = "report.txt"
//! flip_normals = false
//! ascii_stl = false
//!
//! [test_a]
//! center = [300.0, 0.0, 60.0]
//! diameter = 25.0
//! trials = 1
//!
//! [test_b]
//! distances = [120.0, 300.0, 500.0]
//! repeats = 30
//! height = 0.0
//! calibrate_to = [[120.0, 0.0387], [300.0, 0.0544], [500.0, 0.0712]]   # optional
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kinematics::{JointLimit, KinematicsError, RobotGeometry};
use crate::mesh::{PointCloud, Triangle, TriangleMesh};
use crate::meshio::{self, MeshIoError};
use crate::metrics::{self, ChamferReport, MetricsError, ReferenceSphere, SampleSize};
use crate::scanner::{self, ScanError, ScanGrid, ScanOutput};
use crate::scene::{FloorMode, NoiseModel, SceneError, TargetScene};
use crate::targets::{self, Naca4, WingSpec};

/// Minimum reference sample count for Chamfer comparisons.
pub const MIN_REFERENCE_SAMPLES: usize = 10_000;
/// Reference samples per scanned point.
pub const REFERENCE_OVERSAMPLING: usize = 10;

#[derive(Debug, Error)]
pub enum JobError {
    #[error("{origin}: {message}")]
    Config { origin: String, message: String },
    #[error("{0}")]
    Unreachable(String),
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("{0}")]
    Numerical(String),
}

impl JobError {
    pub fn exit_code(&self) -> i32 {
        match self {
            JobError::Config { .. } => 2,
            JobError::Unreachable(_) => 3,
            JobError::Io { .. } => 4,
            JobError::Numerical(_) => 5,
        }
    }

    pub fn stage(&self) -> &'static str {
        match self {
            JobError::Config { .. } => "config",
            JobError::Unreachable(_) => "reachability",
            JobError::Io { .. } => "io",
            JobError::Numerical(_) => "compute",
        }
    }

    fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        JobError::Io { path: path.to_path_buf(), message: e.to_string() }
    }
}

impl From<MetricsError> for JobError {
    fn from(e: MetricsError) -> Self {
        match e {
            MetricsError::Unreachable { .. } => JobError::Unreachable(e.to_string()),
            MetricsError::InvalidInput(_) | MetricsError::Scene(SceneError::InvalidNoise(_)) => {
                JobError::Config { origin: "config".into(), message: e.to_string() }
            }
            other => JobError::Numerical(other.to_string()),
        }
    }
}

impl From<ScanError> for JobError {
    fn from(e: ScanError) -> Self {
        match e {
            ScanError::Unreachable { .. } | ScanError::SafeHeightTooLow { .. } => JobError::Unreachable(e.to_string()),
            ScanError::InvalidGrid(_) | ScanError::Scene(_) => JobError::Config { origin: "config".into(), message: e.to_string() },
            ScanError::Motion(_) => JobError::Numerical(e.to_string()),
        }
    }
}

fn default_limits() -> [[f64; 2]; 6] {
    RobotGeometry::default_limits().map(|l| [l.lo.to_degrees(), l.hi.to_degrees()])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RobotConfig {
    pub d1: f64,
    pub l1: f64,
    pub l2: f64,
    pub d4: f64,
    pub d6: f64,
    pub joint_limits_deg: [[f64; 2]; 6],
}

impl Default for RobotConfig {
    fn default() -> Self {
        let g = RobotGeometry::default();
        Self { d1: g.d1, l1: g.l1, l2: g.l2, d4: g.d4, d6: g.d6, joint_limits_deg: default_limits() }
    }
}

impl RobotConfig {
    pub fn geometry(&self) -> Result<RobotGeometry, KinematicsError> {
        let limits = self.joint_limits_deg.map(|[lo, hi]| JointLimit::degrees(lo, hi));
        RobotGeometry::new(self.d1, self.l1, self.l2, self.d4, self.d6, limits)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum TargetConfig {
    Stl {
        path: PathBuf,
    },
    Plate {
        z: f64,
        min: [f64; 2],
        max: [f64; 2],
    },
    Naca {
        profile: String,
        chord: f64,
        span: f64,
        /// Leading edge x and first span y.
        origin: [f64; 2],
        #[serde(default = "default_stations")]
        stations: usize,
    },
}

fn default_stations() -> usize {
    120
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    #[serde(default)]
    pub table_z: f64,
    #[serde(default)]
    pub floor_mode: FloorMode,
    pub target: TargetConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub corner: [f64; 2],
    pub safe_z: f64,
    pub rows: usize,
    pub cols: usize,
    pub row_spacing: f64,
    pub col_spacing: f64,
    #[serde(default = "default_step")]
    pub step: f64,
}

fn default_step() -> f64 {
    5.0
}

impl GridConfig {
    pub fn grid(&self) -> ScanGrid {
        ScanGrid {
            x0: self.corner[0],
            y0: self.corner[1],
            safe_z: self.safe_z,
            n_rows: self.rows,
            n_cols: self.cols,
            row_spacing: self.row_spacing,
            col_spacing: self.col_spacing,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stl: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xyz: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
    pub flip_normals: bool,
    pub ascii_stl: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestAConfig {
    pub center: [f64; 3],
    pub diameter: f64,
    #[serde(default = "one")]
    pub trials: usize,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TestBConfig {
    pub distances: Vec<f64>,
    pub repeats: usize,
    pub height: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub calibrate_to: Option<Vec<[f64; 2]>>,
}

impl Default for TestBConfig {
    fn default() -> Self {
        Self {
            distances: metrics::DEFAULT_TEST_B_DISTANCES.to_vec(),
            repeats: metrics::DEFAULT_TEST_B_REPEATS,
            height: 0.0,
            calibrate_to: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    #[serde(default)]
    pub robot: RobotConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scene: Option<SceneConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub noise: NoiseModel,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test_a: Option<TestAConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test_b: Option<TestBConfig>,
}

/// A parsed configuration plus the directory its relative paths refer to.
#[derive(Debug, Clone, PartialEq)]
pub struct Job {
    pub config: JobConfig,
    pub base_dir: PathBuf,
    origin: String,
}

impl Job {
    pub fn load(path: &Path) -> Result<Self, JobError> {
        let text = fs::read_to_string(path).map_err(|e| JobError::io(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, &base, &path.display().to_string())
    }

    /// Parses and validates every section that is present. Input paths must exist.
    pub fn parse(text: &str, base_dir: &Path, origin: &str) -> Result<Self, JobError> {
        let config: JobConfig = toml::from_str(text).map_err(|e| JobError::Config {
            origin: origin.to_string(),
            message: e.to_string().trim_end().to_string(),
        })?;
        let job = Self { config, base_dir: base_dir.to_path_buf(), origin: origin.to_string() };
        job.validate()?;
        Ok(job)
    }

    fn config_error(&self, message: impl std::fmt::Display) -> JobError {
        JobError::Config { origin: self.origin.clone(), message: message.to_string() }
    }

    fn validate(&self) -> Result<(), JobError> {
        let c = &self.config;
        c.robot.geometry().map_err(|e| self.config_error(format_args!("[robot] {e}")))?;
        c.noise.validate().map_err(|e| self.config_error(format_args!("[noise] {e}")))?;
        if let Some(scene) = &c.scene {
            if !scene.table_z.is_finite() {
                return Err(self.config_error("[scene] table_z must be finite"));
            }
            match &scene.target {
                TargetConfig::Stl { path } => {
                    let p = self.resolve(path);
                    if !p.is_file() {
                        return Err(self.config_error(format_args!("[scene.target] mesh file {} does not exist", p.display())));
                    }
                }
                TargetConfig::Plate { z, min, max } => {
                    if !(min[0] < max[0] && min[1] < max[1]) || !z.is_finite() {
                        return Err(self.config_error("[scene.target] plate needs finite z and min < max"));
                    }
                }
                TargetConfig::Naca { profile, chord, span, stations, .. } => {
                    if Naca4::parse(profile).is_none() {
                        return Err(self.config_error(format_args!("[scene.target] `{profile}` is not a NACA four-digit designation")));
                    }
                    if !(*chord > 0.0 && *span > 0.0) || *stations < 8 {
                        return Err(self.config_error("[scene.target] chord and span must be positive, stations >= 8"));
                    }
                }
            }
        }
        if let Some(g) = &c.grid {
            g.grid().validate().map_err(|e| self.config_error(format_args!("[grid] {e}")))?;
            if !(g.step > 0.0 && g.step.is_finite()) {
                return Err(self.config_error("[grid] step must be positive"));
            }
        }
        if let Some(a) = &c.test_a {
            self.sphere(a).validate().map_err(|e| self.config_error(format_args!("[test_a] {e}")))?;
            if a.trials == 0 {
                return Err(self.config_error("[test_a] trials must be at least 1"));
            }
        }
        if let Some(b) = &c.test_b {
            if b.distances.is_empty() || b.repeats == 0 || b.distances.iter().any(|d| !(*d > 0.0)) {
                return Err(self.config_error("[test_b] needs positive distances and repeats >= 1"));
            }
        }
        Ok(())
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn geometry(&self) -> RobotGeometry {
        self.config.robot.geometry().expect("validated at load")
    }

    fn sphere(&self, a: &TestAConfig) -> ReferenceSphere {
        ReferenceSphere { center: a.center.into(), diameter: a.diameter }
    }

    /// Builds the target scene, reading the STL if the target is a file.
    pub fn scene(&self) -> Result<TargetScene, JobError> {
        let s = self.config.scene.as_ref().ok_or_else(|| self.config_error("missing [scene] section"))?;
        let mesh = match &s.target {
            TargetConfig::Stl { path } => {
                let p = self.resolve(path);
                let bytes = fs::read(&p).map_err(|e| JobError::io(&p, e))?;
                meshio::read_stl(&bytes).map_err(|e| JobError::io(&p, e))?
            }
            TargetConfig::Plate { z, min, max } => targets::plate(*z, (min[0], min[1]), (max[0], max[1])),
            TargetConfig::Naca { profile, chord, span, origin, stations } => targets::naca_wing(&WingSpec {
                profile: Naca4::parse(profile).expect("validated at load"),
                chord: *chord,
                span: *span,
                origin: (origin[0], origin[1]),
                base_z: s.table_z,
                stations: *stations,
            }),
        };
        TargetScene::new(mesh, s.table_z, s.floor_mode).map_err(|e| self.config_error(format_args!("[scene] {e}")))
    }

    /// The configuration with every default filled in, as TOML.
    pub fn resolved_config(&self) -> String {
        toml::to_string(&self.config).expect("config serializes")
    }
}

/// Artifacts and statistics of a completed scan.
#[derive(Debug, Clone)]
pub struct ScanJobOutcome {
    pub output: ScanOutput,
    pub chamfer: Option<ChamferReport>,
    pub report: String,
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), JobError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| JobError::io(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| JobError::io(path, e))
}

fn flipped(mesh: &TriangleMesh) -> TriangleMesh {
    TriangleMesh::new(
        mesh.triangles
            .iter()
            .map(|t| {
                let [a, b, c] = t.vertices;
                Triangle { normal: -t.normal, vertices: [a, c, b] }
            })
            .collect(),
    )
}

/// Reference cloud for a scan: the surface visible from above over the grid
/// footprint, resampled finely and sampled by area.
pub fn visible_reference(scene: &TargetScene, grid: &ScanGrid, scan_points: usize, seed: u64) -> Result<PointCloud, MetricsError> {
    let max = (grid.x0 + (grid.n_rows - 1) as f64 * grid.row_spacing, grid.y0 + (grid.n_cols - 1) as f64 * grid.col_spacing);
    let resolution = grid.row_spacing.min(grid.col_spacing) / 8.0;
    let patch = targets::height_field_patch(scene, (grid.x0, grid.y0), max, resolution);
    let count = MIN_REFERENCE_SAMPLES.max(REFERENCE_OVERSAMPLING * scan_points);
    metrics::sample_mesh_surface(&patch, SampleSize::Count(count), seed)
}

fn kv_block(out: &mut String, pairs: &[(&str, String)]) {
    for (k, v) in pairs {
        let _ = writeln!(out, "{k}={v}");
    }
}

/// Runs a full scan and writes every configured artifact.
///
/// On any abort no geometry is written; the report, if configured, still
/// records the failure.
pub fn run_scan_job(job: &Job) -> Result<ScanJobOutcome, JobError> {
    let c = &job.config;
    let gc = c.grid.as_ref().ok_or_else(|| job.config_error("missing [grid] section"))?;
    let grid = gc.grid();
    let geom = job.geometry();
    let scene = job.scene()?;

    let mut report = String::from("touchscan scan report\n\n== configuration ==\n");
    report.push_str(&job.resolved_config());
    report.push_str("\n== result ==\n");

    let output = match scanner::run_scan(&grid, gc.step, &geom, &scene, &c.noise) {
        Ok(o) => o,
        Err(e) => {
            let err = JobError::from(e.clone());
            let _ = writeln!(report, "status: aborted at stage {}", err.stage());
            let _ = writeln!(report, "reason: {e}");
            if let ScanError::Unreachable { points, .. } = &e {
                let _ = writeln!(report, "unreachable grid points (row, col):");
                for (i, k) in points {
                    let (x, y) = grid.point(*i, *k);
                    let _ = writeln!(report, "  ({i}, {k}) at x={x:.3} y={y:.3}");
                }
            }
            report.push_str("\n== summary ==\n");
            kv_block(&mut report, &[("status", "aborted".into()), ("stage", err.stage().into()), ("exit_code", err.exit_code().to_string())]);
            if let Some(p) = &c.output.report {
                write_file(&job.resolve(p), report.as_bytes())?;
            }
            return Err(err);
        }
    };

    let cloud = output.points.measured_cloud();
    let chamfer = if cloud.is_empty() || grid.n_rows < 2 || grid.n_cols < 2 {
        None
    } else {
        let reference = visible_reference(&scene, &grid, cloud.len(), c.noise.seed)?;
        Some(metrics::chamfer_distance(&cloud, &reference)?)
    };

    let s = &output.summary;
    let rows: [(&str, String); 8] = [
        ("grid", format!("{} x {}", grid.n_rows, grid.n_cols)),
        ("points probed", s.points_probed.to_string()),
        ("mesh contacts", s.mesh_contacts.to_string()),
        ("table contacts", s.table_contacts.to_string()),
        ("misses", s.misses.to_string()),
        ("unreachable", s.unreachable.to_string()),
        ("triangles", s.triangles.to_string()),
        ("trace waypoints", s.trace_waypoints.to_string()),
    ];
    for (k, v) in &rows {
        let _ = writeln!(report, "{k:<22}{v:>12}");
    }
    if let Some(cd) = &chamfer {
        report.push_str("\n== chamfer distance vs visible target surface ==\n");
        let _ = writeln!(report, "{:<22}{:>12}", "reference samples", cd.n);
        let _ = writeln!(report, "{:<22}{:>12.6}", "scan -> target (mm)", cd.forward_mean);
        let _ = writeln!(report, "{:<22}{:>12.6}", "target -> scan (mm)", cd.backward_mean);
        let _ = writeln!(report, "{:<22}{:>12.6}", "CD (mm)", cd.cd);
    }
    report.push_str("\n== summary ==\n");
    let mut pairs = vec![
        ("status", "ok".to_string()),
        ("points_probed", s.points_probed.to_string()),
        ("mesh_contacts", s.mesh_contacts.to_string()),
        ("table_contacts", s.table_contacts.to_string()),
        ("misses", s.misses.to_string()),
        ("unreachable", s.unreachable.to_string()),
        ("triangles", s.triangles.to_string()),
        ("trace_waypoints", s.trace_waypoints.to_string()),
    ];
    if let Some(cd) = &chamfer {
        pairs.push(("chamfer_mm", format!("{:.9}", cd.cd)));
        pairs.push(("chamfer_forward_mm", format!("{:.9}", cd.forward_mean)));
        pairs.push(("chamfer_backward_mm", format!("{:.9}", cd.backward_mean)));
    }
    kv_block(&mut report, &pairs);

    let o = &c.output;
    if let Some(p) = &o.stl {
        let mesh = if o.flip_normals { flipped(&output.mesh) } else { output.mesh.clone() };
        let bytes = if o.ascii_stl {
            meshio::write_stl_ascii(&mesh, "touchscan").into_bytes()
        } else {
            meshio::write_stl_binary(&mesh).map_err(|e: MeshIoError| JobError::Numerical(e.to_string()))?
        };
        write_file(&job.resolve(p), &bytes)?;
    }
    if let Some(p) = &o.xyz {
        write_file(&job.resolve(p), meshio::write_xyz(&cloud).as_bytes())?;
    }
    if let Some(p) = &o.trace {
        write_file(&job.resolve(p), output.trace.to_csv().as_bytes())?;
    }
    if let Some(p) = &o.report {
        write_file(&job.resolve(p), report.as_bytes())?;
    }
    Ok(ScanJobOutcome { output, chamfer, report })
}

/// Runs the sphere test from `[test_a]` and returns (and writes) its report.
pub fn run_test_a_job(job: &Job) -> Result<String, JobError> {
    let c = &job.config;
    let a = c.test_a.as_ref().ok_or_else(|| job.config_error("missing [test_a] section"))?;
    let geom = job.geometry();
    let sphere = job.sphere(a);
    let result = metrics::test_a(&sphere, &geom, &c.noise)?;
    let mut report = String::from("touchscan test-a report\n\n== configuration ==\n");
    report.push_str(&job.resolved_config());
    report.push_str("\n== result ==\n");
    let _ = writeln!(report, "{result}");
    if a.trials > 1 {
        let mean = metrics::test_a_trials(&sphere, &geom, &c.noise, a.trials)?;
        let _ = writeln!(report, "trials={}", a.trials);
        let _ = writeln!(report, "mean_average_dd={mean:.9}");
    }
    if let Some(p) = &c.output.report {
        write_file(&job.resolve(p), report.as_bytes())?;
    }
    Ok(report)
}

/// Runs the repeatability test from `[test_b]` (defaults if the section is
/// absent), calibrating the noise first when `calibrate_to` is given.
pub fn run_test_b_job(job: &Job) -> Result<String, JobError> {
    let c = &job.config;
    let b = c.test_b.clone().unwrap_or_default();
    let geom = job.geometry();
    let mut report = String::from("touchscan test-b report\n\n== configuration ==\n");
    report.push_str(&job.resolved_config());
    report.push_str("\n== result ==\n");
    let noise = match &b.calibrate_to {
        Some(targets) => {
            let pairs: Vec<(f64, f64)> = targets.iter().map(|t| (t[0], t[1])).collect();
            let m = metrics::calibrate_test_b(&pairs, b.repeats, b.height, &geom, c.noise.seed)?;
            let _ = writeln!(report, "calibrated sigma_contact={:.9} sigma_per_reach={:.12}\n", m.sigma_contact, m.sigma_per_reach);
            m
        }
        None => c.noise,
    };
    let results = metrics::test_b(&b.distances, b.repeats, b.height, &geom, &noise)?;
    report.push_str(&metrics::format_test_b(&results));
    if let Some(p) = &c.output.report {
        write_file(&job.resolve(p), report.as_bytes())?;
    }
    Ok(report)
}

/// Sampling used when a compare operand is an STL file.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CompareOptions {
    /// Fixed sample count; otherwise at least [`MIN_REFERENCE_SAMPLES`] and
    /// [`REFERENCE_OVERSAMPLING`] times the other operand's point count.
    pub samples: Option<usize>,
    /// Points per mm², overrides `samples`.
    pub density: Option<f64>,
    pub seed: u64,
}


enum Operand {
    Mesh(TriangleMesh),
    Cloud(PointCloud),
}

fn read_operand(path: &Path) -> Result<Operand, JobError> {
    let bytes = fs::read(path).map_err(|e| JobError::io(path, e))?;
    let is_stl = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("stl"));
    let op = if is_stl {
        Operand::Mesh(meshio::read_stl(&bytes).map_err(|e| JobError::io(path, e))?)
    } else {
        let text = String::from_utf8(bytes).map_err(|e| JobError::io(path, e))?;
        Operand::Cloud(meshio::read_xyz(&text).map_err(|e| JobError::io(path, e))?)
    };
    let empty = match &op {
        Operand::Mesh(m) => m.is_empty(),
        Operand::Cloud(c) => c.is_empty(),
    };
    if empty {
        return Err(JobError::io(path, "no geometry in file"));
    }
    Ok(op)
}

/// Chamfer distance between two STL or XYZ files.
pub fn compare_paths(a: &Path, b: &Path, opts: &CompareOptions) -> Result<ChamferReport, JobError> {
    let (oa, ob) = (read_operand(a)?, read_operand(b)?);
    let count_of = |o: &Operand| match o {
        Operand::Cloud(c) => c.len(),
        Operand::Mesh(_) => 0,
    };
    let (na, nb) = (count_of(&oa), count_of(&ob));
    let to_cloud = |o: Operand, other: usize| -> Result<PointCloud, JobError> {
        match o {
            Operand::Cloud(c) => Ok(c),
            Operand::Mesh(m) => {
                let size = match (opts.density, opts.samples) {
                    (Some(d), _) => SampleSize::Density(d),
                    (None, Some(n)) => SampleSize::Count(n),
                    (None, None) => SampleSize::Count(MIN_REFERENCE_SAMPLES.max(REFERENCE_OVERSAMPLING * other)),
                };
                Ok(metrics::sample_mesh_surface(&m, size, opts.seed)?)
            }
        }
    };
    let (ca, cb) = (to_cloud(oa, nb)?, to_cloud(ob, na)?);
    Ok(metrics::chamfer_distance(&ca, &cb)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const PLATE_JOB: &str = r#"
[scene]
table_z = 0.0
[scene.target]
kind = "plate"
z = 25.0
min = [200.0, -120.0]
max = [480.0, 120.0]

[grid]
corner = [270.0, -72.0]
safe_z = 60.0
rows = 4
cols = 3
row_spacing = 6.0
col_spacing = 6.0
"#;

    fn parse(text: &str) -> Result<Job, JobError> {
        Job::parse(text, Path::new("."), "job.toml")
    }

    #[test]
    fn defaults_fill_in() {
        let job = parse(PLATE_JOB).unwrap();
        assert_eq!(job.config.robot, RobotConfig::default());
        assert_eq!(job.config.noise, NoiseModel::ideal());
        assert_eq!(job.config.grid.as_ref().unwrap().step, 5.0);
        let echoed = parse(&job.resolved_config()).unwrap();
        assert_eq!(echoed.config, job.config);
    }

    #[test]
    fn parse_error_has_line() {
        let err = parse("[grid]\ncorner = [1.0, 2.0]\nrows = \"x\"\n").unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn unknown_key_rejected() {
        let err = parse("[noise]\nsigma = 0.1\n").unwrap_err();
        assert!(err.to_string().contains("sigma"), "{err}");
    }

    #[test]
    fn semantic_errors_are_config() {
        let bad = PLATE_JOB.replace("rows = 4", "rows = 0");
        assert_eq!(parse(&bad).unwrap_err().exit_code(), 2);
        let missing = "[scene.target]\nkind = \"stl\"\npath = \"nope.stl\"\n";
        assert!(parse(missing).unwrap_err().to_string().contains("does not exist"));
        let naca = "[scene.target]\nkind = \"naca\"\nprofile = \"64x9\"\nchord = 1.0\nspan = 1.0\norigin = [0.0, 0.0]\n";
        assert_eq!(parse(naca).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn plate_scan_in_memory() {
        let out = run_scan_job(&parse(PLATE_JOB).unwrap()).unwrap();
        assert_eq!(out.output.summary.points_probed, 12);
        assert_eq!(out.output.mesh.len(), 12);
        assert!(out.report.contains("status=ok"));
        assert!(out.report.contains("chamfer_mm="));
    }

    #[test]
    fn unreachable_scan_maps_to_code_3() {
        let job = parse(&PLATE_JOB.replace("corner = [270.0, -72.0]", "corner = [580.0, -72.0]")).unwrap();
        let err = run_scan_job(&job).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert_eq!(err.stage(), "reachability");
    }
}
