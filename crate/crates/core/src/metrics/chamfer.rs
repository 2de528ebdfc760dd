//! Chamfer distance between point clouds.

use std::fmt;

use serde::Serialize;

use super::kdtree::KdTree;
use super::MetricsError;
use crate::mesh::{Point, PointCloud};

/// Both directed mean nearest-neighbour distances and their sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChamferReport {
    pub cd: f64,
    /// Mean over P of the distance to the nearest point of Q.
    pub forward_mean: f64,
    /// Mean over Q of the distance to the nearest point of P.
    pub backward_mean: f64,
    pub m: usize,
    pub n: usize,
}

impl fmt::Display for ChamferReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<16}{:>14}", "quantity", "value")?;
        writeln!(f, "{:<16}{:>14}", "points_a", self.m)?;
        writeln!(f, "{:<16}{:>14}", "points_b", self.n)?;
        writeln!(f, "{:<16}{:>14.6}", "forward (mm)", self.forward_mean)?;
        writeln!(f, "{:<16}{:>14.6}", "backward (mm)", self.backward_mean)?;
        writeln!(f, "{:<16}{:>14.6}", "CD (mm)", self.cd)?;
        writeln!(f)?;
        writeln!(f, "cd={:.9}", self.cd)?;
        writeln!(f, "forward_mean={:.9}", self.forward_mean)?;
        writeln!(f, "backward_mean={:.9}", self.backward_mean)?;
        writeln!(f, "m={}", self.m)?;
        write!(f, "n={}", self.n)
    }
}

fn directed_mean(from: &[Point], to: &KdTree) -> f64 {
    let sum: f64 = from.iter().map(|p| to.nearest_sq(p).unwrap_or(f64::NAN).sqrt()).sum();
    sum / from.len() as f64
}

/// `CD(P, Q) = mean_p min_q |p - q| + mean_q min_p |q - p|`.
pub fn chamfer_distance(p: &PointCloud, q: &PointCloud) -> Result<ChamferReport, MetricsError> {
    if p.is_empty() || q.is_empty() {
        return Err(MetricsError::EmptyOperand);
    }
    let tp = KdTree::new(&p.points);
    let tq = KdTree::new(&q.points);
    let forward_mean = directed_mean(&p.points, &tq);
    let backward_mean = directed_mean(&q.points, &tp);
    Ok(ChamferReport {
        cd: forward_mean + backward_mean,
        forward_mean,
        backward_mean,
        m: p.len(),
        n: q.len(),
    })
}

/// Quadratic reference implementation.
pub fn chamfer_distance_brute(p: &PointCloud, q: &PointCloud) -> Result<ChamferReport, MetricsError> {
    if p.is_empty() || q.is_empty() {
        return Err(MetricsError::EmptyOperand);
    }
    let directed = |a: &[Point], b: &[Point]| {
        let sum: f64 = a
            .iter()
            .map(|x| b.iter().map(|y| (x - y).norm_squared()).fold(f64::INFINITY, f64::min).sqrt())
            .sum();
        sum / a.len() as f64
    };
    let forward_mean = directed(&p.points, &q.points);
    let backward_mean = directed(&q.points, &p.points);
    Ok(ChamferReport {
        cd: forward_mean + backward_mean,
        forward_mean,
        backward_mean,
        m: p.len(),
        n: q.len(),
    })
}
