//! Straight-line Cartesian moves and the probe approach/descend/retract cycle.
//!
//! The planner is quasi-static: positions are interpolated uniformly along the
//! segment with a fixed tool orientation and IK is solved at every waypoint.

use std::fmt::Write as _;

use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

use crate::kinematics::{fixed6, inverse_kinematics, JointAngles, KinematicsError, Pose, RobotGeometry};
use crate::scene::{probe_contact, ContactKind, ContactResult, NoiseStream, TargetScene};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MotionError {
    #[error("waypoint {waypoint} at ({x:.3}, {y:.3}, {z:.3}): {source}")]
    Waypoint {
        waypoint: usize,
        x: f64,
        y: f64,
        z: f64,
        #[source]
        source: KinematicsError,
    },
    #[error("step must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("contact at z = {contact_z:.6} is not below the safe height {safe_z:.6}")]
    ContactAboveSafeHeight { contact_z: f64, safe_z: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearPath {
    pub start: Vector3<f64>,
    pub end: Vector3<f64>,
    pub orientation: Matrix3<f64>,
    /// Largest allowed spacing between consecutive waypoints, mm.
    pub step: f64,
}

impl LinearPath {
    pub fn tool_down(start: Vector3<f64>, end: Vector3<f64>, step: f64) -> Self {
        Self {
            start,
            end,
            orientation: Pose::tool_down(Vector3::zeros()).rotation,
            step,
        }
    }

    /// Interpolated positions, endpoints included.
    pub fn waypoints(&self) -> Result<Vec<Vector3<f64>>, MotionError> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(MotionError::InvalidStep(self.step));
        }
        let delta = self.end - self.start;
        let segments = (delta.norm() / self.step).ceil() as usize;
        if segments == 0 {
            return Ok(vec![self.start]);
        }
        Ok((0..=segments)
            .map(|i| {
                if i == segments {
                    self.end
                } else {
                    self.start + delta * (i as f64 / segments as f64)
                }
            })
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    pub index: usize,
    pub position: Vector3<f64>,
    pub angles: JointAngles,
}

/// Ordered joint-space log of a motion.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct JointTrace {
    pub entries: Vec<TraceEntry>,
}

impl JointTrace {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Appends `other`, renumbering its waypoints after ours.
    pub fn append(&mut self, other: JointTrace) {
        let base = self.entries.len();
        self.entries.extend(other.entries.into_iter().enumerate().map(|(i, e)| TraceEntry { index: base + i, ..e }));
    }

    /// `index,theta1..theta6` in degrees with six decimals.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("index,theta1_deg,theta2_deg,theta3_deg,theta4_deg,theta5_deg,theta6_deg\n");
        for e in &self.entries {
            write!(s, "{}", e.index).unwrap();
            for d in e.angles.to_degrees() {
                write!(s, ",{}", fixed6(d)).unwrap();
            }
            s.push('\n');
        }
        s
    }
}

pub fn plan_line(path: &LinearPath, geom: &RobotGeometry) -> Result<JointTrace, MotionError> {
    let entries = path
        .waypoints()?
        .into_iter()
        .enumerate()
        .map(|(i, p)| {
            let pose = Pose {
                rotation: path.orientation,
                position: p,
            };
            inverse_kinematics(&pose, geom)
                .map(|sol| TraceEntry {
                    index: i,
                    position: p,
                    angles: sol.angles,
                })
                .map_err(|source| MotionError::Waypoint {
                    waypoint: i,
                    x: p.x,
                    y: p.y,
                    z: p.z,
                    source,
                })
        })
        .collect::<Result<_, _>>()?;
    Ok(JointTrace { entries })
}

/// Travel height and waypoint spacing of a probe cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleParams {
    pub safe_z: f64,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeCycle {
    pub contact: ContactResult,
    pub trace: JointTrace,
}

/// Travels at safe height from `from` to above `(x, y)`, descends until
/// contact (or the table in skip mode), and retracts to the safe height.
///
/// The contact height comes from the exact raycast; the descent is logged at
/// the configured step only for the joint trace. A cycle that cannot be driven
/// reports [`ContactKind::Unreachable`] with an empty trace.
#[allow(clippy::too_many_arguments)]
pub fn probe_cycle(
    x: f64,
    y: f64,
    from: Option<Vector3<f64>>,
    params: &CycleParams,
    geom: &RobotGeometry,
    scene: &TargetScene,
    noise: &mut NoiseStream,
    contact_index: usize,
) -> Result<ProbeCycle, MotionError> {
    let contact = probe_contact(x, y, contact_index, scene, noise);
    let bottom_z = if contact.kind.has_point() { contact.z_true } else { scene.table_z() };
    if !(bottom_z < params.safe_z) {
        return Err(MotionError::ContactAboveSafeHeight {
            contact_z: bottom_z,
            safe_z: params.safe_z,
        });
    }
    let above = Vector3::new(x, y, params.safe_z);
    let bottom = Vector3::new(x, y, bottom_z);

    let plan = || -> Result<JointTrace, MotionError> {
        let mut trace = JointTrace::default();
        if let Some(start) = from {
            if start != above {
                let mut travel = plan_line(&LinearPath::tool_down(start, above, params.step), geom)?;
                // the first waypoint is where the previous cycle ended
                travel.entries.remove(0);
                trace.append(travel);
            }
        }
        let descent = plan_line(&LinearPath::tool_down(above, bottom, params.step), geom)?;
        let mut retract = plan_line(&LinearPath::tool_down(bottom, above, params.step), geom)?;
        retract.entries.remove(0);
        trace.append(descent);
        trace.append(retract);
        Ok(trace)
    };
    match plan() {
        Ok(trace) => Ok(ProbeCycle { contact, trace }),
        Err(MotionError::Waypoint { .. }) => Ok(ProbeCycle {
            contact: ContactResult {
                z_true: f64::NAN,
                z_measured: f64::NAN,
                kind: ContactKind::Unreachable,
                ..contact
            },
            trace: JointTrace::default(),
        }),
        Err(e) => Err(e),
    }
}
