//! Browser bindings: arm pose solver, wing scan preview and sphere test.

use touchscan::kinematics::{arm_points, inverse_kinematics, Pose, RobotGeometry};
use touchscan::metrics::{test_a, ReferenceSphere};
use touchscan::scanner::{run_scan, ScanGrid, ScanOutput};
use touchscan::scene::{FloorMode, NoiseModel, TargetScene};
use touchscan::targets::{naca_wing, Naca4, WingSpec};
use touchscan::Point;
use wasm_bindgen::prelude::*;

const WING_ORIGIN: (f64, f64) = (250.0, -75.0);
const CHORD: f64 = 140.0;
const SPAN: f64 = 150.0;
const SAFE_Z: f64 = 40.0;

/// Joint angles (deg) followed by base, shoulder, elbow, wrist and tip positions.
pub fn solve_arm(x: f64, y: f64, z: f64) -> Result<Vec<f64>, String> {
    let geom = RobotGeometry::default();
    let sol = inverse_kinematics(&Pose::tool_down(Point::new(x, y, z)), &geom).map_err(|e| e.to_string())?;
    let pts = arm_points(&sol.angles, &geom);
    let mut out = sol.angles.to_degrees().to_vec();
    for p in [pts.base, pts.shoulder, pts.elbow, pts.wrist, pts.tip] {
        out.extend_from_slice(p.as_slice());
    }
    Ok(out)
}

#[wasm_bindgen(js_name = solveArm)]
pub fn solve_arm_js(x: f64, y: f64, z: f64) -> Result<Vec<f64>, JsError> {
    solve_arm(x, y, z).map_err(|e| JsError::new(&e))
}

fn wing_scene() -> TargetScene {
    let spec = WingSpec {
        profile: Naca4::parse("6409").expect("valid designation"),
        chord: CHORD,
        span: SPAN,
        origin: WING_ORIGIN,
        base_z: 0.0,
        stations: 120,
    };
    TargetScene::new(naca_wing(&spec), 0.0, FloorMode::Table).expect("wing rests on the table")
}

/// A finished wing scan, laid out row-major by (column, row).
#[wasm_bindgen]
pub struct ScanPreview {
    output: ScanOutput,
    scene: TargetScene,
}

/// Scans the wing with the given lattice spacing and probe error.
pub fn scan_wing(spacing: f64, sigma: f64, drift: f64, seed: u64) -> Result<ScanPreview, String> {
    if !(1.0..=30.0).contains(&spacing) {
        return Err("spacing must be between 1 and 30 mm".into());
    }
    let (w, h) = (CHORD - 26.0, SPAN - 6.0);
    let grid = ScanGrid {
        x0: WING_ORIGIN.0 + 13.0,
        y0: WING_ORIGIN.1 + 3.0,
        safe_z: SAFE_Z,
        n_rows: (w / spacing).floor() as usize + 1,
        n_cols: (h / spacing).floor() as usize + 1,
        row_spacing: spacing,
        col_spacing: spacing,
    };
    let noise = NoiseModel { sigma_contact: sigma, sigma_per_reach: 0.0, drift_per_contact: drift, seed };
    let scene = wing_scene();
    let output = run_scan(&grid, 10.0, &RobotGeometry::default(), &scene, &noise).map_err(|e| e.to_string())?;
    Ok(ScanPreview { output, scene })
}

#[wasm_bindgen(js_name = scanWing)]
pub fn scan_wing_js(spacing: f64, sigma: f64, drift: f64, seed: u32) -> Result<ScanPreview, JsError> {
    scan_wing(spacing, sigma, drift, seed as u64).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
impl ScanPreview {
    pub fn rows(&self) -> usize {
        self.output.points.n_rows()
    }

    pub fn cols(&self) -> usize {
        self.output.points.n_cols()
    }

    pub fn triangles(&self) -> usize {
        self.output.mesh.len()
    }

    /// x, y, measured z for every probe in scan order.
    pub fn points(&self) -> Vec<f64> {
        self.output.points.cells().iter().flat_map(|c| [c.x, c.y, c.z_measured]).collect()
    }

    /// x, true z, measured z down column `k` (1-based), plus the target
    /// profile sampled every 0.5 mm along the same line.
    #[wasm_bindgen(js_name = crossSection)]
    pub fn cross_section(&self, k: usize) -> Vec<f64> {
        let k = k.clamp(1, self.cols());
        let col = self.output.points.column(k);
        let mut out: Vec<f64> = col.iter().flat_map(|c| [c.x, c.z_true, c.z_measured]).collect();
        out.push(f64::NAN);
        let y = col[0].y;
        let mut x = WING_ORIGIN.0 - 5.0;
        while x <= WING_ORIGIN.0 + CHORD + 5.0 {
            out.extend_from_slice(&[x, self.scene.raycast_down(x, y).unwrap_or(0.0)]);
            x += 0.5;
        }
        out
    }
}

/// Nine per-point diameter differences then their average, in mm.
pub fn sphere_test(diameter: f64, sigma: f64, seed: u64) -> Result<Vec<f64>, String> {
    let sphere = ReferenceSphere { center: Point::new(300.0, 0.0, 60.0), diameter };
    let report = test_a(&sphere, &RobotGeometry::default(), &NoiseModel::gaussian(sigma, seed)).map_err(|e| e.to_string())?;
    let mut out: Vec<f64> = report.rows.iter().map(|r| r.dd).collect();
    out.push(report.average_dd());
    Ok(out)
}

#[wasm_bindgen(js_name = sphereTest)]
pub fn sphere_test_js(diameter: f64, sigma: f64, seed: u32) -> Result<Vec<f64>, JsError> {
    sphere_test(diameter, sigma, seed as u64).map_err(|e| JsError::new(&e))
}
