//! Simulation of a contact-probe 3D scanner driven by a six-axis arm.
//!
//! The arm is solved in closed form ([`kinematics`]), moved along straight
//! lines ([`motion`]) and lowered onto a target mesh ([`scene`]) over a
//! rectangular grid ([`scanner`]). Results are written as STL/XYZ ([`meshio`])
//! and scored with Chamfer distance and sphere/repeatability tests ([`metrics`]).

// `!(x > 0.0)` style checks are used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod job;
pub mod kinematics;
pub mod mesh;
pub mod meshio;
pub mod metrics;
pub mod motion;
pub mod scanner;
pub mod scene;
pub mod targets;

pub use mesh::{Point, PointCloud, Triangle, TriangleMesh};
