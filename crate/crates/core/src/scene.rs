//! The virtual workcell: a target mesh resting on a table, vertical contact
//! queries against it and the contact error model.

use nalgebra::Vector3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mesh::{Triangle, TriangleMesh};

/// Parallel/degenerate threshold on the projected triangle determinant.
pub const RAY_DET_EPS: f64 = 1e-12;
/// Barycentric slack that still counts as a hit on an edge or vertex.
pub const RAY_EDGE_EPS: f64 = 1e-12;
/// Mesh vertices may sit this far below the table.
pub const TABLE_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SceneError {
    #[error("target mesh is empty")]
    EmptyMesh,
    #[error("target mesh has a non-finite vertex in triangle {0}")]
    NonFinite(usize),
    #[error("triangle {index} dips to z = {z} below the table at {table_z}")]
    BelowTable { index: usize, z: f64, table_z: f64 },
    #[error("invalid noise model: {0}")]
    InvalidNoise(String),
}

/// What a probe that misses the target records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FloorMode {
    /// The probe lands on the table plane.
    #[default]
    Table,
    /// No point is recorded.
    Skip,
}

/// Vertical-ray intersection with a single triangle, returning the hit height.
/// Edge and vertex grazes count; triangles seen edge-on from above never hit.
pub fn vertical_hit(t: &Triangle, x: f64, y: f64) -> Option<f64> {
    let [a, b, c] = t.vertices;
    let det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
    if det.abs() < RAY_DET_EPS {
        return None;
    }
    let u = ((x - a.x) * (c.y - a.y) - (c.x - a.x) * (y - a.y)) / det;
    let v = ((b.x - a.x) * (y - a.y) - (x - a.x) * (b.y - a.y)) / det;
    let w = 1.0 - u - v;
    if u < -RAY_EDGE_EPS || v < -RAY_EDGE_EPS || w < -RAY_EDGE_EPS {
        return None;
    }
    // exact on horizontal facets
    Some(a.z + u * (b.z - a.z) + v * (c.z - a.z))
}

/// Uniform xy bucket grid over triangle footprints.
#[derive(Debug, Clone)]
struct XyIndex {
    min: [f64; 2],
    cell: [f64; 2],
    dims: [usize; 2],
    buckets: Vec<Vec<u32>>,
}

impl XyIndex {
    fn build(mesh: &TriangleMesh) -> Self {
        let (lo, hi) = mesh.bounds().expect("non-empty mesh");
        let n = mesh.len() as f64;
        let side = n.sqrt().ceil().clamp(1.0, 512.0) as usize;
        let extent = [hi.x - lo.x, hi.y - lo.y];
        let dims = [side, side];
        let cell = [0, 1].map(|k| if extent[k] > 0.0 { extent[k] / dims[k] as f64 } else { 1.0 });
        let mut index = Self {
            min: [lo.x, lo.y],
            cell,
            dims,
            buckets: vec![Vec::new(); side * side],
        };
        for (i, t) in mesh.triangles.iter().enumerate() {
            let tlo = t.vertices.iter().fold([f64::INFINITY; 2], |m, v| [m[0].min(v.x), m[1].min(v.y)]);
            let thi = t.vertices.iter().fold([f64::NEG_INFINITY; 2], |m, v| [m[0].max(v.x), m[1].max(v.y)]);
            let pad = [0, 1].map(|k| 1e-9 * (1.0 + thi[k].abs().max(tlo[k].abs())));
            let c0 = index.cell_of(tlo[0] - pad[0], tlo[1] - pad[1]);
            let c1 = index.cell_of(thi[0] + pad[0], thi[1] + pad[1]);
            for cx in c0[0]..=c1[0] {
                for cy in c0[1]..=c1[1] {
                    index.buckets[cy * dims[0] + cx].push(i as u32);
                }
            }
        }
        index
    }

    fn axis(&self, k: usize, v: f64) -> usize {
        let f = ((v - self.min[k]) / self.cell[k]).floor();
        if f <= 0.0 {
            0
        } else {
            (f as usize).min(self.dims[k] - 1)
        }
    }

    fn cell_of(&self, x: f64, y: f64) -> [usize; 2] {
        [self.axis(0, x), self.axis(1, y)]
    }

    fn candidates(&self, x: f64, y: f64) -> &[u32] {
        let [cx, cy] = self.cell_of(x, y);
        &self.buckets[cy * self.dims[0] + cx]
    }
}

/// Target mesh on a table plane, with an xy index for vertical raycasts.
#[derive(Debug, Clone)]
pub struct TargetScene {
    mesh: TriangleMesh,
    table_z: f64,
    floor_mode: FloorMode,
    index: XyIndex,
    top_z: f64,
}

impl TargetScene {
    pub fn new(mesh: TriangleMesh, table_z: f64, floor_mode: FloorMode) -> Result<Self, SceneError> {
        if mesh.is_empty() {
            return Err(SceneError::EmptyMesh);
        }
        for (i, t) in mesh.triangles.iter().enumerate() {
            if !t.vertices.iter().all(|v| v.iter().all(|c| c.is_finite())) {
                return Err(SceneError::NonFinite(i));
            }
            let z = t.vertices.iter().map(|v| v.z).fold(f64::INFINITY, f64::min);
            if z < table_z - TABLE_SLACK {
                return Err(SceneError::BelowTable { index: i, z, table_z });
            }
        }
        let index = XyIndex::build(&mesh);
        let top_z = mesh.bounds().map(|(_, hi)| hi.z).unwrap_or(table_z).max(table_z);
        Ok(Self {
            mesh,
            table_z,
            floor_mode,
            index,
            top_z,
        })
    }

    pub fn mesh(&self) -> &TriangleMesh {
        &self.mesh
    }

    pub fn table_z(&self) -> f64 {
        self.table_z
    }

    pub fn floor_mode(&self) -> FloorMode {
        self.floor_mode
    }

    /// Highest point of the scene, table included.
    pub fn top_z(&self) -> f64 {
        self.top_z
    }

    /// Highest intersection of the vertical line through `(x, y)` with the mesh.
    pub fn raycast_down(&self, x: f64, y: f64) -> Option<f64> {
        self.index
            .candidates(x, y)
            .iter()
            .filter_map(|&i| vertical_hit(&self.mesh.triangles[i as usize], x, y))
            .fold(None, |best, z| Some(best.map_or(z, |b: f64| b.max(z))))
    }
}

/// Per-contact error: Gaussian scatter whose standard deviation may grow with
/// the horizontal reach of the contact point, plus a bias that grows linearly
/// with the number of earlier contacts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseModel {
    /// Standard deviation of the contact height error, mm.
    #[serde(default)]
    pub sigma_contact: f64,
    /// Additional standard deviation per mm of horizontal reach from the base axis.
    #[serde(default)]
    pub sigma_per_reach: f64,
    /// Bias added per preceding contact, mm.
    #[serde(default)]
    pub drift_per_contact: f64,
    #[serde(default)]
    pub seed: u64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self::ideal()
    }
}

impl NoiseModel {
    pub fn ideal() -> Self {
        Self {
            sigma_contact: 0.0,
            sigma_per_reach: 0.0,
            drift_per_contact: 0.0,
            seed: 0,
        }
    }

    pub fn gaussian(sigma: f64, seed: u64) -> Self {
        Self {
            sigma_contact: sigma,
            seed,
            ..Self::ideal()
        }
    }

    pub fn validate(&self) -> Result<(), SceneError> {
        let ok = |v: f64| v >= 0.0 && v.is_finite();
        if !ok(self.sigma_contact) || !ok(self.sigma_per_reach) {
            return Err(SceneError::InvalidNoise("standard deviations must be finite and >= 0".into()));
        }
        if !self.drift_per_contact.is_finite() {
            return Err(SceneError::InvalidNoise("drift must be finite".into()));
        }
        Ok(())
    }

    /// Standard deviation at horizontal distance `reach` from the base axis.
    pub fn sigma_at(&self, reach: f64) -> f64 {
        self.sigma_contact + self.sigma_per_reach * reach
    }

    pub fn stream(&self) -> NoiseStream {
        NoiseStream {
            model: *self,
            rng: ChaCha8Rng::seed_from_u64(self.seed),
        }
    }
}

/// Sequential draw source for one scan job. Every contact consumes exactly one
/// standard normal draw, hit or miss, so the stream stays aligned with the
/// contact index.
#[derive(Debug, Clone)]
pub struct NoiseStream {
    model: NoiseModel,
    rng: ChaCha8Rng,
}

impl NoiseStream {
    pub fn model(&self) -> &NoiseModel {
        &self.model
    }

    /// Error for the next contact.
    pub fn next_offset(&mut self, contact_index: usize, reach: f64) -> f64 {
        let g: f64 = StandardNormal.sample(&mut self.rng);
        self.model.sigma_at(reach) * g + self.model.drift_per_contact * contact_index as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContactKind {
    Mesh,
    Table,
    /// Skip-mode miss; no point recorded.
    None,
    /// The probe could not be driven to this point.
    Unreachable,
}

impl ContactKind {
    pub fn has_point(self) -> bool {
        matches!(self, Self::Mesh | Self::Table)
    }
}

/// One probe reading. Heights are NaN when `kind` has no point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactResult {
    pub x: f64,
    pub y: f64,
    pub z_true: f64,
    pub z_measured: f64,
    pub kind: ContactKind,
}

impl ContactResult {
    pub fn measured(&self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z_measured)
    }

    pub fn truth(&self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z_true)
    }

    pub fn reach(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

/// Simulated touch at `(x, y)`; `contact_index` counts earlier contacts of the
/// same scan.
pub fn probe_contact(x: f64, y: f64, contact_index: usize, scene: &TargetScene, noise: &mut NoiseStream) -> ContactResult {
    let offset = noise.next_offset(contact_index, x.hypot(y));
    let (z_true, kind) = match (scene.raycast_down(x, y), scene.floor_mode()) {
        (Some(z), _) => (z, ContactKind::Mesh),
        (None, FloorMode::Table) => (scene.table_z(), ContactKind::Table),
        (None, FloorMode::Skip) => (f64::NAN, ContactKind::None),
    };
    ContactResult {
        x,
        y,
        z_true,
        z_measured: z_true + offset,
        kind,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Point;

    fn right_triangle(z: f64) -> TriangleMesh {
        TriangleMesh::new(vec![Triangle::from_vertices(
            Point::new(0.0, 0.0, z),
            Point::new(1.0, 0.0, z),
            Point::new(0.0, 1.0, z),
        )
        .unwrap()])
    }

    #[test]
    fn planar_hit_and_miss() {
        let scene = TargetScene::new(right_triangle(7.0), 0.0, FloorMode::Table).unwrap();
        assert_eq!(scene.raycast_down(0.25, 0.25), Some(7.0));
        assert_eq!(scene.raycast_down(0.9, 0.9), None);
        assert_eq!(scene.raycast_down(-3.0, 5.0), None);
    }

    #[test]
    fn edge_and_vertex_grazes_hit() {
        let scene = TargetScene::new(right_triangle(2.0), 0.0, FloorMode::Table).unwrap();
        assert_eq!(scene.raycast_down(0.5, 0.5), Some(2.0));
        assert_eq!(scene.raycast_down(0.0, 0.0), Some(2.0));
        assert_eq!(scene.raycast_down(1.0, 0.0), Some(2.0));
        assert_eq!(scene.raycast_down(0.5, 0.0), Some(2.0));
    }

    #[test]
    fn vertical_triangle_never_hits() {
        let t = Triangle::from_vertices(Point::new(0.0, 0.0, 0.0), Point::new(1.0, 0.0, 0.0), Point::new(0.0, 0.0, 1.0)).unwrap();
        assert_eq!(vertical_hit(&t, 0.2, 0.0), None);
    }

    #[test]
    fn highest_layer_wins() {
        let mut mesh = right_triangle(1.0);
        mesh.extend(right_triangle(4.0));
        mesh.extend(right_triangle(3.0));
        let scene = TargetScene::new(mesh, 0.0, FloorMode::Table).unwrap();
        assert_eq!(scene.raycast_down(0.1, 0.1), Some(4.0));
        assert_eq!(scene.top_z(), 4.0);
    }

    #[test]
    fn rejects_bad_meshes() {
        assert_eq!(TargetScene::new(TriangleMesh::default(), 0.0, FloorMode::Table).unwrap_err(), SceneError::EmptyMesh);
        assert!(matches!(
            TargetScene::new(right_triangle(-1.0), 0.0, FloorMode::Table),
            Err(SceneError::BelowTable { index: 0, .. })
        ));
        assert!(TargetScene::new(right_triangle(-1e-7), 0.0, FloorMode::Table).is_ok());
    }

    #[test]
    fn floor_modes() {
        let table = TargetScene::new(right_triangle(5.0), 0.0, FloorMode::Table).unwrap();
        let skip = TargetScene::new(right_triangle(5.0), 0.0, FloorMode::Skip).unwrap();
        let mut noise = NoiseModel::ideal().stream();
        let c = probe_contact(3.0, 3.0, 0, &table, &mut noise);
        assert_eq!((c.z_true, c.z_measured, c.kind), (0.0, 0.0, ContactKind::Table));
        let c = probe_contact(3.0, 3.0, 1, &skip, &mut noise);
        assert_eq!(c.kind, ContactKind::None);
        assert!(c.z_measured.is_nan());
        let c = probe_contact(0.1, 0.1, 2, &skip, &mut noise);
        assert_eq!((c.z_true, c.kind), (5.0, ContactKind::Mesh));
    }

    #[test]
    fn noise_off_and_pure_drift() {
        let scene = TargetScene::new(right_triangle(5.0), 0.0, FloorMode::Table).unwrap();
        let mut ideal = NoiseModel::ideal().stream();
        let c = probe_contact(0.2, 0.2, 17, &scene, &mut ideal);
        assert_eq!(c.z_measured, c.z_true);
        let drift = NoiseModel {
            drift_per_contact: 0.001,
            ..NoiseModel::ideal()
        };
        let c = probe_contact(0.2, 0.2, 500, &scene, &mut drift.stream());
        assert!((c.z_measured - (c.z_true + 0.5)).abs() < 1e-12);
    }

    #[test]
    fn sample_std_matches_sigma() {
        let scene = TargetScene::new(right_triangle(5.0), 0.0, FloorMode::Table).unwrap();
        let mut stream = NoiseModel::gaussian(0.02, 7).stream();
        let z: Vec<f64> = (0..10_000)
            .map(|i| probe_contact(0.2, 0.2, i, &scene, &mut stream).z_measured)
            .collect();
        let mean = z.iter().sum::<f64>() / z.len() as f64;
        let sd = (z.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (z.len() - 1) as f64).sqrt();
        assert!((sd - 0.02).abs() < 0.02 * 0.05, "sd = {sd}");
    }

    #[test]
    fn seeded_streams_repeat() {
        let a: Vec<f64> = {
            let mut s = NoiseModel::gaussian(0.1, 42).stream();
            (0..50).map(|i| s.next_offset(i, 300.0)).collect()
        };
        let mut s = NoiseModel::gaussian(0.1, 42).stream();
        let b: Vec<f64> = (0..50).map(|i| s.next_offset(i, 300.0)).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn reach_dependent_sigma() {
        let m = NoiseModel {
            sigma_contact: 0.01,
            sigma_per_reach: 1e-4,
            ..NoiseModel::ideal()
        };
        assert!((m.sigma_at(300.0) - 0.04).abs() < 1e-15);
        assert!(NoiseModel { sigma_contact: -1.0, ..m }.validate().is_err());
    }
}
