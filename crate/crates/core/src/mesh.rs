//! Triangle soups and point clouds.

use nalgebra::Vector3;

pub type Point = Vector3<f64>;

/// One STL facet. Facets built with [`Triangle::from_vertices`] carry the
/// right-hand-rule unit normal of their vertex order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triangle {
    pub normal: Vector3<f64>,
    pub vertices: [Point; 3],
}

impl Triangle {
    /// Returns `None` for collinear (zero-area) vertex triples.
    pub fn from_vertices(v1: Point, v2: Point, v3: Point) -> Option<Self> {
        let n = (v2 - v1).cross(&(v3 - v1));
        let len = n.norm();
        if !(len > 0.0) || !len.is_finite() {
            return None;
        }
        Some(Self {
            normal: n / len,
            vertices: [v1, v2, v3],
        })
    }

    pub fn area(&self) -> f64 {
        let [a, b, c] = self.vertices;
        0.5 * (b - a).cross(&(c - a)).norm()
    }

    /// Swaps winding so the normal has a non-negative z component.
    pub fn oriented_up(&self) -> Self {
        if self.normal.z >= 0.0 {
            *self
        } else {
            let [a, b, c] = self.vertices;
            Self {
                normal: -self.normal,
                vertices: [a, c, b],
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TriangleMesh {
    pub triangles: Vec<Triangle>,
}

impl TriangleMesh {
    pub fn new(triangles: Vec<Triangle>) -> Self {
        Self { triangles }
    }

    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn area(&self) -> f64 {
        self.triangles.iter().map(Triangle::area).sum()
    }

    pub fn bounds(&self) -> Option<(Point, Point)> {
        let mut it = self.triangles.iter().flat_map(|t| t.vertices.iter());
        let first = *it.next()?;
        Some(it.fold((first, first), |(lo, hi), v| (lo.inf(v), hi.sup(v))))
    }

    pub fn translated(&self, offset: Vector3<f64>) -> Self {
        Self::new(
            self.triangles
                .iter()
                .map(|t| Triangle {
                    normal: t.normal,
                    vertices: t.vertices.map(|v| v + offset),
                })
                .collect(),
        )
    }

    pub fn oriented_up(&self) -> Self {
        Self::new(self.triangles.iter().map(Triangle::oriented_up).collect())
    }

    pub fn extend(&mut self, other: TriangleMesh) {
        self.triangles.extend(other.triangles);
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PointCloud {
    pub points: Vec<Point>,
}

impl PointCloud {
    pub fn new(points: Vec<Point>) -> Self {
        Self { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn translated(&self, offset: Vector3<f64>) -> Self {
        Self::new(self.points.iter().map(|p| p + offset).collect())
    }

    pub fn centroid(&self) -> Option<Point> {
        if self.points.is_empty() {
            return None;
        }
        let sum = self.points.iter().fold(Vector3::zeros(), |acc, p| acc + p);
        Some(sum / self.points.len() as f64)
    }
}

impl FromIterator<Point> for PointCloud {
    fn from_iter<I: IntoIterator<Item = Point>>(iter: I) -> Self {
        Self::new(iter.into_iter().collect())
    }
}
