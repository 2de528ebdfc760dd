//! Area-weighted random sampling of mesh surfaces.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::MetricsError;
use crate::mesh::{PointCloud, TriangleMesh};

/// How many samples to draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SampleSize {
    Count(usize),
    /// Points per square millimetre, rounded up.
    Density(f64),
}

impl SampleSize {
    pub fn resolve(self, area: f64) -> usize {
        match self {
            SampleSize::Count(n) => n,
            SampleSize::Density(d) => (d * area).ceil().max(0.0) as usize,
        }
    }
}

/// Uniform samples over the surface; every triangle is hit in proportion to its area.
pub fn sample_mesh_surface(mesh: &TriangleMesh, size: SampleSize, seed: u64) -> Result<PointCloud, MetricsError> {
    if mesh.is_empty() {
        return Err(MetricsError::EmptyOperand);
    }
    let mut cumulative = Vec::with_capacity(mesh.len());
    let mut total = 0.0;
    for t in &mesh.triangles {
        total += t.area();
        cumulative.push(total);
    }
    if !(total > 0.0) || !total.is_finite() {
        return Err(MetricsError::ZeroArea);
    }
    let count = size.resolve(total);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = (0..count)
        .map(|_| {
            let u: f64 = rng.random_range(0.0..total);
            let idx = cumulative.partition_point(|&c| c <= u).min(mesh.len() - 1);
            let [a, b, c] = mesh.triangles[idx].vertices;
            let (r1, r2): (f64, f64) = (rng.random(), rng.random());
            let s = r1.sqrt();
            a * (1.0 - s) + b * (s * (1.0 - r2)) + c * (s * r2)
        })
        .collect();
    Ok(PointCloud::new(points))
}
