//! Point-cloud comparison, surface sampling and probe accuracy tests.

mod asme;
mod chamfer;
mod kdtree;
mod sampling;
mod sphere;

pub use asme::{
    calibrate_test_b, format_test_b, max_centroid_deviation, test_a, test_a_trials, test_a_with_stream, test_b, ReferenceSphere,
    RepeatabilityReport, TestAReport, TestARow, DEFAULT_TEST_B_DISTANCES, DEFAULT_TEST_B_REPEATS, MAX_SPHERE_DIAMETER,
    MIN_SPHERE_DIAMETER, TEST_A_DIRECTIONS,
};
pub use chamfer::{chamfer_distance, chamfer_distance_brute, ChamferReport};
pub use kdtree::KdTree;
pub use sampling::{sample_mesh_surface, SampleSize};
pub use sphere::{fit_sphere, SphereFit, SPHERE_RANK_TOL};

use crate::kinematics::KinematicsError;
use crate::scene::SceneError;

#[derive(Debug, thiserror::Error)]
pub enum MetricsError {
    #[error("empty point set or mesh")]
    EmptyOperand,
    #[error("mesh has zero surface area")]
    ZeroArea,
    #[error("degenerate sphere fit: {0}")]
    Degenerate(String),
    #[error("{0}")]
    InvalidInput(String),
    #[error("{what} is unreachable: {reason}")]
    Unreachable { what: String, reason: KinematicsError },
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
    #[error(transparent)]
    Scene(#[from] SceneError),
}
