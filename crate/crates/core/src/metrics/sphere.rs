//! Algebraic least-squares sphere fit.

use nalgebra::{DMatrix, DVector, Vector3};

use super::MetricsError;
use crate::mesh::Point;

/// Relative singular value below which the fit is reported as degenerate.
pub const SPHERE_RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SphereFit {
    pub center: Point,
    pub radius: f64,
    /// `2 * | |p_i - center| - radius |` per input point.
    pub per_point_dd: Vec<f64>,
    pub mean_dd: f64,
}

/// Solves `|p|^2 = 2 c.p + k` in the least-squares sense with `k = r^2 - |c|^2`.
/// Points are centred on their mean first so large offsets do not spoil the conditioning.
pub fn fit_sphere(points: &[Point]) -> Result<SphereFit, MetricsError> {
    if points.len() < 4 {
        return Err(MetricsError::Degenerate(format!("{} points, need at least 4", points.len())));
    }
    let mean = points.iter().sum::<Vector3<f64>>() / points.len() as f64;
    let n = points.len();
    let mut a = DMatrix::<f64>::zeros(n, 4);
    let mut b = DVector::<f64>::zeros(n);
    for (row, p) in points.iter().enumerate() {
        let q = p - mean;
        a[(row, 0)] = 2.0 * q.x;
        a[(row, 1)] = 2.0 * q.y;
        a[(row, 2)] = 2.0 * q.z;
        a[(row, 3)] = 1.0;
        b[row] = q.norm_squared();
    }
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > SPHERE_RANK_TOL * smax) {
        return Err(MetricsError::Degenerate("points are coplanar or coincident".into()));
    }
    let x = svd.solve(&b, 0.0).map_err(|e| MetricsError::Degenerate(e.to_string()))?;
    let c = Vector3::new(x[0], x[1], x[2]);
    let r2 = x[3] + c.norm_squared();
    if !(r2 > 0.0) {
        return Err(MetricsError::Degenerate(format!("fitted squared radius {r2}")));
    }
    let center = c + mean;
    let radius = r2.sqrt();
    let per_point_dd: Vec<f64> = points.iter().map(|p| 2.0 * ((p - center).norm() - radius).abs()).collect();
    let mean_dd = per_point_dd.iter().sum::<f64>() / n as f64;
    Ok(SphereFit { center, radius, per_point_dd, mean_dd })
}
