//! Grid scanning: column-major probing of a rectangular work envelope and
//! on-the-fly triangulation of the height lattice.
//!
//! Grid point `(i, k)` (1-based row, column) sits at
//! `(x0 + (i-1) * row_spacing, y0 + (k-1) * col_spacing)`. Column 1 is probed
//! row by row, then column 2, and so on; once cell `(i, k)` with `i > 1` and
//! `k > 1` is known, two facets are emitted:
//!
//! ```text
//! Q(i,k) -> Q(i-1,k) -> Q(i-1,k-1)
//! Q(i,k) -> Q(i-1,k-1) -> Q(i,k-1)
//! ```

use nalgebra::Vector3;
use thiserror::Error;

use crate::kinematics::{is_reachable, KinematicsError, RobotGeometry};
use crate::mesh::{PointCloud, Triangle, TriangleMesh};
use crate::motion::{probe_cycle, CycleParams, JointTrace, MotionError};
use crate::scene::{ContactKind, ContactResult, NoiseModel, SceneError, TargetScene};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScanError {
    #[error("invalid scan grid: {0}")]
    InvalidGrid(String),
    #[error("{} grid point(s) unreachable at safe height, first (row {}, col {}): {}", .points.len(), .points[0].0, .points[0].1, .first_reason)]
    Unreachable {
        /// 1-based (row, column) pairs.
        points: Vec<(usize, usize)>,
        first_reason: KinematicsError,
    },
    #[error("safe height {safe_z} is not above the scene top {top_z}")]
    SafeHeightTooLow { safe_z: f64, top_z: f64 },
    #[error(transparent)]
    Motion(#[from] MotionError),
    #[error(transparent)]
    Scene(#[from] SceneError),
}

/// Work envelope: first corner, lattice counts and spacings, travel height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanGrid {
    pub x0: f64,
    pub y0: f64,
    pub safe_z: f64,
    pub n_rows: usize,
    pub n_cols: usize,
    pub row_spacing: f64,
    pub col_spacing: f64,
}

impl ScanGrid {
    pub fn validate(&self) -> Result<(), ScanError> {
        let bad = |m: &str| Err(ScanError::InvalidGrid(m.to_string()));
        if self.n_rows < 1 || self.n_cols < 1 {
            return bad("rows and cols must be at least 1");
        }
        if !(self.row_spacing > 0.0 && self.col_spacing > 0.0) || !self.row_spacing.is_finite() || !self.col_spacing.is_finite() {
            return bad("spacings must be positive and finite");
        }
        if ![self.x0, self.y0, self.safe_z].iter().all(|v| v.is_finite()) {
            return bad("corner and safe height must be finite");
        }
        if self.n_rows.checked_mul(self.n_cols).is_none() {
            return bad("grid too large");
        }
        Ok(())
    }

    /// Position of 1-based grid point `(i, k)`.
    pub fn point(&self, i: usize, k: usize) -> (f64, f64) {
        (
            self.x0 + (i - 1) as f64 * self.row_spacing,
            self.y0 + (k - 1) as f64 * self.col_spacing,
        )
    }

    /// Probe order of `(i, k)`.
    pub fn contact_index(&self, i: usize, k: usize) -> usize {
        (k - 1) * self.n_rows + (i - 1)
    }

    pub fn len(&self) -> usize {
        self.n_rows * self.n_cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Every grid point whose tool-down pose at safe height has no solution.
    pub fn unreachable_points(&self, geom: &RobotGeometry) -> Vec<((usize, usize), KinematicsError)> {
        let mut out = Vec::new();
        for k in 1..=self.n_cols {
            for i in 1..=self.n_rows {
                let (x, y) = self.point(i, k);
                if let Some(reason) = is_reachable(&Vector3::new(x, y, self.safe_z), geom).reason {
                    out.push(((i, k), reason));
                }
            }
        }
        out
    }
}

/// Scanned lattice `Q(i, k)`, stored column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointGrid {
    n_rows: usize,
    n_cols: usize,
    cells: Vec<ContactResult>,
}

impl PointGrid {
    pub fn from_cells(n_rows: usize, n_cols: usize, cells: Vec<ContactResult>) -> Self {
        assert_eq!(cells.len(), n_rows * n_cols, "cell count must match the lattice");
        Self { n_rows, n_cols, cells }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    /// 1-based access.
    pub fn get(&self, i: usize, k: usize) -> &ContactResult {
        &self.cells[(k - 1) * self.n_rows + (i - 1)]
    }

    /// Cells in probe order.
    pub fn cells(&self) -> &[ContactResult] {
        &self.cells
    }

    /// Measured points of every contacted cell, in probe order.
    pub fn measured_cloud(&self) -> PointCloud {
        self.cells.iter().filter(|c| c.kind.has_point()).map(|c| c.measured()).collect()
    }

    /// All cells of column `k` as measured points (contacted cells only).
    pub fn column(&self, k: usize) -> Vec<&ContactResult> {
        (1..=self.n_rows).map(|i| self.get(i, k)).collect()
    }
}

/// The two facets of lattice cell `(i, k)`, or none if any corner lacks a point.
pub fn cell_triangles(grid: &PointGrid, i: usize, k: usize) -> Option<[Triangle; 2]> {
    cell_facets(|i, k| grid.get(i, k), i, k)
}

fn cell_facets<'a>(q: impl Fn(usize, usize) -> &'a ContactResult, i: usize, k: usize) -> Option<[Triangle; 2]> {
    let corners = [q(i, k), q(i - 1, k), q(i - 1, k - 1), q(i, k - 1)];
    if !corners.iter().all(|c| c.kind.has_point()) {
        return None;
    }
    let [a, b, c, d] = corners.map(|c| c.measured());
    Some([Triangle::from_vertices(a, b, c)?, Triangle::from_vertices(a, c, d)?])
}

/// Batch triangulation of a populated lattice, in the same order as a scan
/// emits facets.
pub fn triangulate(grid: &PointGrid) -> TriangleMesh {
    let mut tris = Vec::with_capacity(2 * grid.n_rows.saturating_sub(1) * grid.n_cols.saturating_sub(1));
    for k in 2..=grid.n_cols {
        for i in 2..=grid.n_rows {
            if let Some(pair) = cell_triangles(grid, i, k) {
                tris.extend(pair);
            }
        }
    }
    TriangleMesh::new(tris)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ScanSummary {
    pub points_probed: usize,
    pub mesh_contacts: usize,
    pub table_contacts: usize,
    pub misses: usize,
    pub unreachable: usize,
    pub triangles: usize,
    pub trace_waypoints: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanOutput {
    pub points: PointGrid,
    pub mesh: TriangleMesh,
    pub trace: JointTrace,
    pub summary: ScanSummary,
}

/// Probes the whole grid and triangulates as it goes.
///
/// Aborts before probing if any grid point is unreachable at safe height or
/// the scene pokes through the safe height.
pub fn run_scan(
    grid: &ScanGrid,
    step: f64,
    geom: &RobotGeometry,
    scene: &TargetScene,
    noise: &NoiseModel,
) -> Result<ScanOutput, ScanError> {
    grid.validate()?;
    noise.validate()?;
    if !(grid.safe_z > scene.top_z()) {
        return Err(ScanError::SafeHeightTooLow {
            safe_z: grid.safe_z,
            top_z: scene.top_z(),
        });
    }
    let unreachable = grid.unreachable_points(geom);
    if let Some((_, first_reason)) = unreachable.first() {
        return Err(ScanError::Unreachable {
            first_reason: first_reason.clone(),
            points: unreachable.into_iter().map(|(p, _)| p).collect(),
        });
    }

    let params = CycleParams {
        safe_z: grid.safe_z,
        step,
    };
    let mut stream = noise.stream();
    let mut cells = Vec::with_capacity(grid.len());
    let mut trace = JointTrace::default();
    let mut mesh = TriangleMesh::default();
    let mut at: Option<Vector3<f64>> = None;
    for k in 1..=grid.n_cols {
        for i in 1..=grid.n_rows {
            let (x, y) = grid.point(i, k);
            let cycle = probe_cycle(x, y, at, &params, geom, scene, &mut stream, grid.contact_index(i, k))?;
            if cycle.contact.kind != ContactKind::Unreachable {
                at = Some(Vector3::new(x, y, grid.safe_z));
            }
            trace.append(cycle.trace);
            cells.push(cycle.contact);
            if i > 1 && k > 1 {
                // Columns 1..k-1 are complete and column k is filled through row i.
                let n_rows = grid.n_rows;
                if let Some(pair) = cell_facets(|i, k| &cells[(k - 1) * n_rows + (i - 1)], i, k) {
                    mesh.triangles.extend(pair);
                }
            }
        }
    }

    let points = PointGrid::from_cells(grid.n_rows, grid.n_cols, cells);
    let count = |kind| points.cells().iter().filter(|c| c.kind == kind).count();
    let summary = ScanSummary {
        points_probed: points.cells().len(),
        mesh_contacts: count(ContactKind::Mesh),
        table_contacts: count(ContactKind::Table),
        misses: count(ContactKind::None),
        unreachable: count(ContactKind::Unreachable),
        triangles: mesh.len(),
        trace_waypoints: trace.len(),
    };
    Ok(ScanOutput {
        points,
        mesh,
        trace,
        summary,
    })
}
