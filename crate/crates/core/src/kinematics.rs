//! Closed-form kinematics of a 6-DoF arm with a spherical wrist.
//!
//! Arm layout (all lengths in mm):
//!
//! * joint 1 rotates about the vertical base axis;
//! * the shoulder (joint 2) sits `d1` above the base and `l1` out from the axis;
//! * the upper arm has length `l2`, the elbow (joint 3) carries a forearm of
//!   length `d4` ending at the wrist center;
//! * joints 4-6 form a Z-Y-Z spherical wrist and the probe tip lies `d6`
//!   along the approach axis.
//!
//! Joint zeros put the whole arm straight up with the probe pointing up. Joint 2
//! is the forward lean of the upper arm from vertical and joint 3 the elbow bend
//! away from straight, so the geometric angles of the planar triangle map to
//! joint variables by
//!
//! ```text
//! theta2 = pi/2 - (alpha + beta)        theta3 = pi - elbow_interior
//! ```
//!
//! The wrist angles are read from the wrist-relative rotation `R36 = R03^T R`:
//!
//! ```text
//! theta4 = atan2(r23, r13)   theta5 = acos(r33)   theta6 = atan2(r32, -r31)
//! ```

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use nalgebra::{Matrix3, Matrix4, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Orthonormality tolerance accepted for a pose rotation.
pub const ROTATION_TOLERANCE: f64 = 1e-9;
/// Law-of-cosines arguments this close outside `[-1, 1]` are clamped.
pub const ACOS_CLAMP: f64 = 1e-12;
/// Joint angles this far outside a limit interval are still accepted.
pub const LIMIT_TOLERANCE: f64 = 1e-9;
/// Below this `hypot(r13, r23)` the wrist is treated as singular.
pub const WRIST_SINGULAR_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KinematicsError {
    #[error("pose rotation is not orthonormal (deviation {deviation:.3e})")]
    InvalidPose { deviation: f64 },
    #[error("target outside the position workspace: R1 = {r1:.6} mm, admissible [{min:.6}, {max:.6}]")]
    Unreachable { r1: f64, min: f64, max: f64 },
    #[error("joint {joint} = {value_deg:.6} deg outside [{lo_deg:.3}, {hi_deg:.3}]")]
    JointLimit {
        joint: usize,
        value_deg: f64,
        lo_deg: f64,
        hi_deg: f64,
    },
    #[error("invalid robot geometry: {0}")]
    InvalidGeometry(String),
}

/// Homogeneous end-effector frame: rotation columns are the normal, orientation
/// and approach vectors; the translation is the probe tip position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub rotation: Matrix3<f64>,
    pub position: Vector3<f64>,
}

impl Pose {
    /// Builds a pose after checking `R^T R = I` and `det R = +1`.
    pub fn new(rotation: Matrix3<f64>, position: Vector3<f64>) -> Result<Self, KinematicsError> {
        let deviation = rotation_deviation(&rotation);
        if !(deviation <= ROTATION_TOLERANCE) || !position.iter().all(|v| v.is_finite()) {
            return Err(KinematicsError::InvalidPose { deviation });
        }
        Ok(Self { rotation, position })
    }

    /// Probe pointing straight down (`a = (0, 0, -1)`) with its tip at `point`.
    pub fn tool_down(point: Vector3<f64>) -> Self {
        Self {
            rotation: Matrix3::from_diagonal(&Vector3::new(1.0, -1.0, -1.0)),
            position: point,
        }
    }

    /// Probe with approach vector `approach` and tip at `point`. The normal
    /// vector is chosen as the projection of base `x` (or base `y` when the
    /// approach is parallel to `x`).
    pub fn with_approach(point: Vector3<f64>, approach: Vector3<f64>) -> Result<Self, KinematicsError> {
        let norm = approach.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(KinematicsError::InvalidPose { deviation: f64::INFINITY });
        }
        let a = approach / norm;
        let seed = if a.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
        let n = (seed - a * a.dot(&seed)).normalize();
        let o = a.cross(&n);
        Self::new(Matrix3::from_columns(&[n, o, a]), point)
    }

    pub fn approach(&self) -> Vector3<f64> {
        self.rotation.column(2).into_owned()
    }

    pub fn to_homogeneous(&self) -> Matrix4<f64> {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.rotation);
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.position);
        m
    }

    /// Largest absolute difference over rotation entries.
    pub fn rotation_error(&self, other: &Pose) -> f64 {
        (self.rotation - other.rotation).amax()
    }

    pub fn position_error(&self, other: &Pose) -> f64 {
        (self.position - other.position).norm()
    }
}

fn rotation_deviation(r: &Matrix3<f64>) -> f64 {
    let ortho = (r.transpose() * r - Matrix3::identity()).amax();
    let det = (r.determinant() - 1.0).abs();
    if ortho.is_nan() || det.is_nan() {
        f64::NAN
    } else {
        ortho.max(det)
    }
}

/// The six joint variables, radians.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct JointAngles(pub [f64; 6]);

impl JointAngles {
    pub fn from_degrees(deg: [f64; 6]) -> Self {
        Self(deg.map(f64::to_radians))
    }

    pub fn to_degrees(&self) -> [f64; 6] {
        self.0.map(f64::to_degrees)
    }

    pub fn theta(&self, joint: usize) -> f64 {
        self.0[joint - 1]
    }
}

impl fmt::Display for JointAngles {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.to_degrees().iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(&fixed6(*d))?;
        }
        Ok(())
    }
}

/// Six-decimal fixed point without a sign on values that round to zero.
pub(crate) fn fixed6(v: f64) -> String {
    let s = format!("{v:.6}");
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
        _ => s,
    }
}

/// Closed joint interval in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointLimit {
    pub lo: f64,
    pub hi: f64,
}

impl JointLimit {
    pub fn degrees(lo: f64, hi: f64) -> Self {
        Self {
            lo: lo.to_radians(),
            hi: hi.to_radians(),
        }
    }

    pub fn contains(&self, value: f64) -> bool {
        value >= self.lo - LIMIT_TOLERANCE && value <= self.hi + LIMIT_TOLERANCE
    }
}

/// Link lengths (mm) and joint limits of the arm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobotGeometry {
    pub d1: f64,
    pub l1: f64,
    pub l2: f64,
    pub d4: f64,
    pub d6: f64,
    pub limits: [JointLimit; 6],
}

impl Default for RobotGeometry {
    /// A desktop arm in the 600 mm reach class.
    fn default() -> Self {
        Self {
            d1: 170.0,
            l1: 65.0,
            l2: 305.0,
            d4: 222.0,
            d6: 70.0,
            limits: Self::default_limits(),
        }
    }
}

impl RobotGeometry {
    /// Joint 2 never leans back and joint 3 only bends one way, which keeps
    /// every in-limit configuration on the elbow-up branch with the wrist
    /// center in front of the base axis.
    pub fn default_limits() -> [JointLimit; 6] {
        [
            JointLimit::degrees(-170.0, 170.0),
            JointLimit::degrees(0.0, 120.0),
            JointLimit::degrees(0.0, 170.0),
            JointLimit::degrees(-180.0, 180.0),
            JointLimit::degrees(-150.0, 150.0),
            JointLimit::degrees(-180.0, 180.0),
        ]
    }

    pub fn new(d1: f64, l1: f64, l2: f64, d4: f64, d6: f64, limits: [JointLimit; 6]) -> Result<Self, KinematicsError> {
        let geom = Self {
            d1,
            l1,
            l2,
            d4,
            d6,
            limits,
        };
        geom.validate()?;
        Ok(geom)
    }

    pub fn validate(&self) -> Result<(), KinematicsError> {
        let bad = |msg: String| Err(KinematicsError::InvalidGeometry(msg));
        for (name, v) in [("d1", self.d1), ("l2", self.l2), ("d4", self.d4), ("d6", self.d6)] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive and finite, got {v}"));
            }
        }
        if !(self.l1 >= 0.0 && self.l1.is_finite()) {
            return bad(format!("l1 must be non-negative and finite, got {}", self.l1));
        }
        for (j, lim) in self.limits.iter().enumerate() {
            if !(lim.lo <= lim.hi) || !lim.lo.is_finite() || !lim.hi.is_finite() {
                return bad(format!("joint {} limit interval is empty or not finite", j + 1));
            }
        }
        Ok(())
    }

    pub fn max_reach(&self) -> f64 {
        self.l1 + self.l2 + self.d4 + self.d6
    }

    pub fn check_limits(&self, angles: &JointAngles) -> Result<(), KinematicsError> {
        for (j, (lim, &v)) in self.limits.iter().zip(angles.0.iter()).enumerate() {
            if !lim.contains(v) {
                return Err(KinematicsError::JointLimit {
                    joint: j + 1,
                    value_deg: v.to_degrees(),
                    lo_deg: lim.lo.to_degrees(),
                    hi_deg: lim.hi.to_degrees(),
                });
            }
        }
        Ok(())
    }
}

/// End of the positioning arm; the three wrist axes intersect here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WristCenter(pub Vector3<f64>);

/// Intermediates of the planar position solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IkTrace {
    /// Wrist center elevation above the shoulder.
    pub z: f64,
    /// Radial wrist center distance beyond the shoulder offset.
    pub r: f64,
    /// Shoulder-to-wrist chord.
    pub r1: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Interior elbow angle of the shoulder-elbow-wrist triangle.
    pub elbow: f64,
}

impl IkTrace {
    /// Upper-arm elevation above horizontal on the elbow-up branch.
    pub fn shoulder_elevation(&self) -> f64 {
        self.alpha + self.beta
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IkSolution {
    pub angles: JointAngles,
    pub trace: IkTrace,
    /// Wrist axes 4 and 6 aligned; theta4 was fixed to zero.
    pub wrist_singular: bool,
}

/// Joint origins of the chain, useful for drawing the arm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmPoints {
    pub base: Vector3<f64>,
    pub shoulder: Vector3<f64>,
    pub elbow: Vector3<f64>,
    pub wrist: Vector3<f64>,
    pub tip: Vector3<f64>,
}

pub(crate) fn rot_z(t: f64) -> Matrix3<f64> {
    let (s, c) = t.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

pub(crate) fn rot_y(t: f64) -> Matrix3<f64> {
    let (s, c) = t.sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

fn positioning_rotation(theta1: f64, theta2: f64, theta3: f64) -> Matrix3<f64> {
    rot_z(theta1) * rot_y(theta2 + theta3)
}

fn wrist_rotation(theta4: f64, theta5: f64, theta6: f64) -> Matrix3<f64> {
    rot_z(theta4) * rot_y(theta5) * rot_z(theta6)
}

/// Evaluates the joint chain and returns every joint origin.
pub fn arm_points(angles: &JointAngles, geom: &RobotGeometry) -> ArmPoints {
    let [t1, t2, t3, t4, t5, t6] = angles.0;
    let r1 = rot_z(t1);
    let shoulder = r1 * Vector3::new(geom.l1, 0.0, geom.d1);
    let upper = r1 * rot_y(t2);
    let elbow = shoulder + upper * Vector3::new(0.0, 0.0, geom.l2);
    let r03 = positioning_rotation(t1, t2, t3);
    let wrist = elbow + r03 * Vector3::new(0.0, 0.0, geom.d4);
    let r06 = r03 * wrist_rotation(t4, t5, t6);
    let tip = wrist + r06 * Vector3::new(0.0, 0.0, geom.d6);
    ArmPoints {
        base: Vector3::zeros(),
        shoulder,
        elbow,
        wrist,
        tip,
    }
}

/// Probe-tip frame for the given joint angles.
pub fn forward_kinematics(angles: &JointAngles, geom: &RobotGeometry) -> Pose {
    let [t1, t2, t3, t4, t5, t6] = angles.0;
    let rotation = positioning_rotation(t1, t2, t3) * wrist_rotation(t4, t5, t6);
    let pts = arm_points(angles, geom);
    Pose {
        rotation,
        position: pts.tip,
    }
}

/// `p - d6 * a`.
pub fn wrist_center(pose: &Pose, geom: &RobotGeometry) -> WristCenter {
    let r = &pose.rotation;
    let p = &pose.position;
    WristCenter(Vector3::new(
        p.x - geom.d6 * r[(0, 2)],
        p.y - geom.d6 * r[(1, 2)],
        p.z - geom.d6 * r[(2, 2)],
    ))
}

/// Angle between sides `adj_a` and `adj_b` of a triangle whose third side is
/// `opposite`, using Kahan's needle-safe half-angle form. Slight violations of
/// the triangle inequality collapse to 0 or pi.
fn triangle_angle(adj_a: f64, adj_b: f64, opposite: f64) -> f64 {
    let (a, b) = if adj_a >= adj_b { (adj_a, adj_b) } else { (adj_b, adj_a) };
    let c = opposite;
    let mu = if b >= c { c - (a - b) } else { b - (a - c) };
    let num = (((a - b) + c) * mu).max(0.0);
    let den = ((a + (b + c)) * ((a - c) + b)).max(0.0);
    2.0 * num.sqrt().atan2(den.sqrt())
}

fn wrap_pi(t: f64) -> f64 {
    let w = t.rem_euclid(2.0 * PI);
    if w > PI {
        w - 2.0 * PI
    } else {
        w
    }
}

/// Elbow-up closed-form inverse kinematics.
pub fn inverse_kinematics(pose: &Pose, geom: &RobotGeometry) -> Result<IkSolution, KinematicsError> {
    let deviation = rotation_deviation(&pose.rotation);
    if !(deviation <= ROTATION_TOLERANCE) {
        return Err(KinematicsError::InvalidPose { deviation });
    }
    let WristCenter(wc) = wrist_center(pose, geom);

    let theta1 = wc.y.atan2(wc.x);
    let z = wc.z - geom.d1;
    let r = (wc.x * wc.x + wc.y * wc.y).sqrt() - geom.l1;
    let r1 = (r * r + z * z).sqrt();
    let alpha = z.atan2(r);

    let (l2, d4) = (geom.l2, geom.d4);
    let cos_beta = (l2 * l2 + r1 * r1 - d4 * d4) / (2.0 * l2 * r1);
    let cos_elbow = (l2 * l2 + d4 * d4 - r1 * r1) / (2.0 * l2 * d4);
    let in_range = |c: f64| c.abs() <= 1.0 + ACOS_CLAMP;
    if !(r1 > 0.0) || !in_range(cos_beta) || !in_range(cos_elbow) {
        return Err(KinematicsError::Unreachable {
            r1,
            min: (l2 - d4).abs(),
            max: l2 + d4,
        });
    }
    let beta = triangle_angle(l2, r1, d4);
    let elbow = triangle_angle(l2, d4, r1);

    let theta2 = FRAC_PI_2 - (alpha + beta);
    let theta3 = PI - elbow;

    let r36 = positioning_rotation(theta1, theta2, theta3).transpose() * pose.rotation;
    let (s13, s23, s33) = (r36[(0, 2)], r36[(1, 2)], r36[(2, 2)]);
    let sin5 = s13.hypot(s23);
    let wrist_singular = sin5 < WRIST_SINGULAR_EPS;
    let theta5 = sin5.atan2(s33);
    let (theta4, theta6) = if wrist_singular {
        // theta4 and theta6 rotate about the same axis; all of it goes to theta6.
        (0.0, r36[(1, 0)].atan2(r36[(1, 1)]))
    } else {
        (s23.atan2(s13), r36[(2, 1)].atan2(-r36[(2, 0)]))
    };

    let angles = JointAngles([theta1, theta2, theta3, wrap_pi(theta4), theta5, wrap_pi(theta6)]);
    geom.check_limits(&angles)?;
    Ok(IkSolution {
        angles,
        trace: IkTrace {
            z,
            r,
            r1,
            alpha,
            beta,
            elbow,
        },
        wrist_singular,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reachability {
    pub reachable: bool,
    pub reason: Option<KinematicsError>,
}

impl fmt::Display for Reachability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.reason {
            None => f.write_str("reachable"),
            Some(e) => write!(f, "unreachable: {e}"),
        }
    }
}

/// Whether a tool-down pose at `point` has an in-limit elbow-up solution.
pub fn is_reachable(point: &Vector3<f64>, geom: &RobotGeometry) -> Reachability {
    match inverse_kinematics(&Pose::tool_down(*point), geom) {
        Ok(_) => Reachability {
            reachable: true,
            reason: None,
        },
        Err(e) => Reachability {
            reachable: false,
            reason: Some(e),
        },
    }
}
