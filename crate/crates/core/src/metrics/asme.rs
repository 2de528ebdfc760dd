//! Sphere accuracy (Test A) and single-point repeatability (Test B).

use std::fmt::{self, Write as _};

use nalgebra::Vector3;

use super::sphere::{fit_sphere, SphereFit};
use super::MetricsError;
use crate::kinematics::{inverse_kinematics, is_reachable, Pose, RobotGeometry};
use crate::mesh::Point;
use crate::scene::{NoiseModel, NoiseStream};

pub const MIN_SPHERE_DIAMETER: f64 = 10.0;
pub const MAX_SPHERE_DIAMETER: f64 = 50.0;
/// Reach distances of the repeatability test, mm.
pub const DEFAULT_TEST_B_DISTANCES: [f64; 3] = [120.0, 300.0, 500.0];
pub const DEFAULT_TEST_B_REPEATS: usize = 30;

/// The nine probe directions as (latitude, longitude) in degrees.
pub const TEST_A_DIRECTIONS: [(f64, f64); 9] = [
    (0.0, 0.0),
    (0.0, 90.0),
    (0.0, 180.0),
    (0.0, -90.0),
    (45.0, 0.0),
    (45.0, 90.0),
    (45.0, 180.0),
    (45.0, -90.0),
    (90.0, 0.0),
];

fn direction(lat_deg: f64, lon_deg: f64) -> Vector3<f64> {
    let (la, lo) = (lat_deg.to_radians(), lon_deg.to_radians());
    Vector3::new(la.cos() * lo.cos(), la.cos() * lo.sin(), la.sin())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceSphere {
    pub center: Point,
    pub diameter: f64,
}

impl ReferenceSphere {
    pub fn validate(&self) -> Result<(), MetricsError> {
        if !(MIN_SPHERE_DIAMETER..=MAX_SPHERE_DIAMETER).contains(&self.diameter) {
            return Err(MetricsError::InvalidInput(format!(
                "sphere diameter {} mm outside [{MIN_SPHERE_DIAMETER}, {MAX_SPHERE_DIAMETER}]",
                self.diameter
            )));
        }
        if !self.center.iter().all(|v| v.is_finite()) {
            return Err(MetricsError::InvalidInput("sphere center is not finite".into()));
        }
        Ok(())
    }

    /// Contact point and outward normal for one probe direction.
    pub fn probe_point(&self, lat_deg: f64, lon_deg: f64) -> (Point, Vector3<f64>) {
        let n = direction(lat_deg, lon_deg);
        (self.center + 0.5 * self.diameter * n, n)
    }

    /// Checks every probe pose, with the tool approaching along the inward normal.
    pub fn check_reachable(&self, geom: &RobotGeometry) -> Result<(), MetricsError> {
        for (idx, &(lat, lon)) in TEST_A_DIRECTIONS.iter().enumerate() {
            let (p, n) = self.probe_point(lat, lon);
            let pose = Pose::with_approach(p, -n)?;
            inverse_kinematics(&pose, geom).map_err(|reason| MetricsError::Unreachable {
                what: format!("test A point {} (lat {lat}, lon {lon})", idx + 1),
                reason,
            })?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestARow {
    pub lat_deg: f64,
    pub lon_deg: f64,
    pub measured: Point,
    pub dd: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestAReport {
    pub sphere: ReferenceSphere,
    pub rows: Vec<TestARow>,
    pub fit: SphereFit,
}

impl TestAReport {
    pub fn average_dd(&self) -> f64 {
        self.fit.mean_dd
    }
}

/// Measures the nine points once, drawing from `noise`. Noise acts along the
/// surface normal, positive outward.
pub fn test_a_with_stream(sphere: &ReferenceSphere, noise: &mut NoiseStream) -> Result<TestAReport, MetricsError> {
    let measured: Vec<(f64, f64, Point)> = TEST_A_DIRECTIONS
        .iter()
        .enumerate()
        .map(|(idx, &(lat, lon))| {
            let (p, n) = sphere.probe_point(lat, lon);
            let offset = noise.next_offset(idx, p.x.hypot(p.y));
            (lat, lon, p + offset * n)
        })
        .collect();
    let pts: Vec<Point> = measured.iter().map(|m| m.2).collect();
    let fit = fit_sphere(&pts)?;
    let rows = measured
        .iter()
        .zip(&fit.per_point_dd)
        .map(|(&(lat_deg, lon_deg, measured), &dd)| TestARow { lat_deg, lon_deg, measured, dd })
        .collect();
    Ok(TestAReport { sphere: *sphere, rows, fit })
}

/// One Test A run with a fresh noise stream.
pub fn test_a(sphere: &ReferenceSphere, geom: &RobotGeometry, noise: &NoiseModel) -> Result<TestAReport, MetricsError> {
    sphere.validate()?;
    noise.validate()?;
    sphere.check_reachable(geom)?;
    test_a_with_stream(sphere, &mut noise.stream())
}

/// Mean of the average diameter difference over `trials` consecutive runs sharing one stream.
pub fn test_a_trials(sphere: &ReferenceSphere, geom: &RobotGeometry, noise: &NoiseModel, trials: usize) -> Result<f64, MetricsError> {
    if trials == 0 {
        return Err(MetricsError::InvalidInput("trials must be positive".into()));
    }
    sphere.validate()?;
    noise.validate()?;
    sphere.check_reachable(geom)?;
    let mut stream = noise.stream();
    let mut sum = 0.0;
    for _ in 0..trials {
        sum += test_a_with_stream(sphere, &mut stream)?.average_dd();
    }
    Ok(sum / trials as f64)
}

impl fmt::Display for TestAReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ACCURACY TEST (TEST A)")?;
        writeln!(
            f,
            "sphere center ({:.3}, {:.3}, {:.3}) mm, nominal diameter {:.3} mm",
            self.sphere.center.x, self.sphere.center.y, self.sphere.center.z, self.sphere.diameter
        )?;
        writeln!(f)?;
        writeln!(f, "{:>5} {:>10} {:>10} {:>12} {:>12} {:>12} {:>10}", "point", "lat (deg)", "lon (deg)", "x (mm)", "y (mm)", "z (mm)", "dd (mm)")?;
        for (i, r) in self.rows.iter().enumerate() {
            writeln!(
                f,
                "{:>5} {:>10.1} {:>10.1} {:>12.4} {:>12.4} {:>12.4} {:>10.5}",
                i + 1,
                r.lat_deg,
                r.lon_deg,
                r.measured.x,
                r.measured.y,
                r.measured.z,
                r.dd
            )?;
        }
        writeln!(f, "{:>5} {:>69.5}", "avg", self.average_dd())?;
        writeln!(f)?;
        writeln!(f, "fit_center={:.9},{:.9},{:.9}", self.fit.center.x, self.fit.center.y, self.fit.center.z)?;
        writeln!(f, "fit_diameter={:.9}", 2.0 * self.fit.radius)?;
        let dd: Vec<String> = self.rows.iter().map(|r| format!("{:.9}", r.dd)).collect();
        writeln!(f, "dd={}", dd.join(","))?;
        write!(f, "average_dd={:.9}", self.average_dd())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepeatabilityReport {
    pub distance_from_base: f64,
    pub repeats: usize,
    /// Largest distance from a measurement to the centroid of all measurements.
    pub repeatability: f64,
    pub measured: Vec<Point>,
}

/// Largest distance from any point to the centroid.
pub fn max_centroid_deviation(points: &[Point]) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    let c = points.iter().sum::<Vector3<f64>>() / points.len() as f64;
    points.iter().map(|p| (p - c).norm()).fold(0.0, f64::max)
}

/// Probes `(d, 0, height)` straight down `repeats` times for every distance `d`.
/// Each distance starts a fresh stream from the model's seed.
pub fn test_b(distances: &[f64], repeats: usize, height: f64, geom: &RobotGeometry, noise: &NoiseModel) -> Result<Vec<RepeatabilityReport>, MetricsError> {
    if distances.is_empty() || repeats == 0 {
        return Err(MetricsError::InvalidInput("need at least one distance and one repeat".into()));
    }
    noise.validate()?;
    for &d in distances {
        let reach = is_reachable(&Vector3::new(d, 0.0, height), geom);
        if let Some(reason) = reach.reason {
            return Err(MetricsError::Unreachable { what: format!("test B distance {d} mm"), reason });
        }
    }
    Ok(distances
        .iter()
        .map(|&d| {
            let mut stream = noise.stream();
            let measured: Vec<Point> = (0..repeats).map(|i| Point::new(d, 0.0, height + stream.next_offset(i, d))).collect();
            RepeatabilityReport { distance_from_base: d, repeats, repeatability: max_centroid_deviation(&measured), measured }
        })
        .collect())
}

/// Renders a list of repeatability results as a table plus key-value lines.
pub fn format_test_b(reports: &[RepeatabilityReport]) -> String {
    let mut out = String::from("REPEATABILITY TEST (TEST B)\n\n");
    let _ = writeln!(out, "{:>20} {:>8} {:>20}", "distance (mm)", "repeats", "repeatability (mm)");
    for r in reports {
        let _ = writeln!(out, "{:>20.1} {:>8} {:>20}", r.distance_from_base, r.repeats, format!("±{:.5}", r.repeatability));
    }
    out.push('\n');
    for r in reports {
        let _ = writeln!(out, "repeatability_{}={:.9}", r.distance_from_base, r.repeatability);
    }
    out
}

/// Chooses `sigma_contact` and `sigma_per_reach` so that [`test_b`] reproduces
/// `targets` as `(distance, repeatability)` pairs. Fits a line to the required
/// sigmas with relative weights, keeping the constant term non-negative.
pub fn calibrate_test_b(targets: &[(f64, f64)], repeats: usize, height: f64, geom: &RobotGeometry, seed: u64) -> Result<NoiseModel, MetricsError> {
    if targets.len() < 2 || targets.iter().any(|&(d, r)| !(d > 0.0) || !(r > 0.0)) {
        return Err(MetricsError::InvalidInput("calibration needs two or more positive (distance, repeatability) pairs".into()));
    }
    let distances: Vec<f64> = targets.iter().map(|t| t.0).collect();
    let unit = NoiseModel { sigma_contact: 1.0, sigma_per_reach: 0.0, drift_per_contact: 0.0, seed };
    let base = test_b(&distances, repeats, height, geom, &unit)?;
    let needed: Vec<(f64, f64)> = base.iter().zip(targets).map(|(b, &(d, r))| (d, r / b.repeatability)).collect();

    // minimise sum(((s0 + s1 d) / s - 1)^2)
    let (mut a00, mut a01, mut a11, mut b0, mut b1) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(d, s) in &needed {
        let w = 1.0 / (s * s);
        a00 += w;
        a01 += w * d;
        a11 += w * d * d;
        b0 += w * s;
        b1 += w * s * d;
    }
    let det = a00 * a11 - a01 * a01;
    let (mut s0, mut s1) = ((b0 * a11 - b1 * a01) / det, (a00 * b1 - a01 * b0) / det);
    if !(det.abs() > 0.0) || s0 < 0.0 {
        s0 = 0.0;
        s1 = b1 / a11;
    }
    let model = NoiseModel { sigma_contact: s0, sigma_per_reach: s1.max(0.0), drift_per_contact: 0.0, seed };
    model.validate()?;
    Ok(model)
}
