//! Built-in scan targets: a flat plate and an extruded NACA 4-digit wing.

use nalgebra::Vector3;

use crate::mesh::{Point, Triangle, TriangleMesh};
use crate::scene::TargetScene;

/// Horizontal rectangle at height `z` with upward normals.
pub fn plate(z: f64, min: (f64, f64), max: (f64, f64)) -> TriangleMesh {
    let a = Point::new(min.0, min.1, z);
    let b = Point::new(max.0, min.1, z);
    let c = Point::new(max.0, max.1, z);
    let d = Point::new(min.0, max.1, z);
    TriangleMesh::new([Triangle::from_vertices(a, b, c), Triangle::from_vertices(a, c, d)].into_iter().flatten().collect())
}

/// NACA four-digit section, chord-normalized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Naca4 {
    /// Maximum camber as a fraction of chord.
    pub camber: f64,
    /// Chordwise position of maximum camber.
    pub camber_pos: f64,
    /// Maximum thickness as a fraction of chord.
    pub thickness: f64,
}

impl Naca4 {
    /// Parses a designation such as `"6409"`.
    pub fn parse(code: &str) -> Option<Self> {
        let d: Vec<u32> = code.chars().map(|c| c.to_digit(10)).collect::<Option<_>>()?;
        if d.len() != 4 {
            return None;
        }
        let thickness = (d[2] * 10 + d[3]) as f64 / 100.0;
        if thickness <= 0.0 || (d[0] == 0) != (d[1] == 0) {
            return None;
        }
        Some(Self {
            camber: d[0] as f64 / 100.0,
            camber_pos: d[1] as f64 / 10.0,
            thickness,
        })
    }

    fn half_thickness(&self, xi: f64) -> f64 {
        if xi >= 1.0 {
            return 0.0;
        }
        // closed trailing edge coefficient
        5.0 * self.thickness * (0.2969 * xi.sqrt() - 0.1260 * xi - 0.3516 * xi.powi(2) + 0.2843 * xi.powi(3) - 0.1036 * xi.powi(4))
    }

    fn camber_line(&self, xi: f64) -> (f64, f64) {
        let (m, p) = (self.camber, self.camber_pos);
        if m == 0.0 {
            return (0.0, 0.0);
        }
        if xi < p {
            (m / (p * p) * (2.0 * p * xi - xi * xi), 2.0 * m / (p * p) * (p - xi))
        } else {
            let q = (1.0 - p) * (1.0 - p);
            (m / q * ((1.0 - 2.0 * p) + 2.0 * p * xi - xi * xi), 2.0 * m / q * (p - xi))
        }
    }

    /// Upper and lower surface points `(x, z)` at chord station `xi` in `[0, 1]`.
    pub fn surfaces(&self, xi: f64) -> ((f64, f64), (f64, f64)) {
        let yt = self.half_thickness(xi);
        let (yc, slope) = self.camber_line(xi);
        let (s, c) = slope.atan().sin_cos();
        ((xi - yt * s, yc + yt * c), (xi + yt * s, yc - yt * c))
    }
}

/// Placement and resolution of an extruded wing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WingSpec {
    pub profile: Naca4,
    pub chord: f64,
    pub span: f64,
    /// Leading edge x and span start y.
    pub origin: (f64, f64),
    /// Lowest point of the wing rests at this height.
    pub base_z: f64,
    pub stations: usize,
}

/// Closed wing: chord along +x, span along +y, resting on `base_z`.
pub fn naca_wing(spec: &WingSpec) -> TriangleMesh {
    let n = spec.stations.max(8);
    let c = spec.chord;
    // cosine spacing clusters stations at both edges
    let sections: Vec<((f64, f64), (f64, f64))> = (0..=n)
        .map(|j| {
            let xi = 0.5 * (1.0 - (std::f64::consts::PI * j as f64 / n as f64).cos());
            let ((xu, zu), (xl, zl)) = spec.profile.surfaces(xi);
            ((xu * c, zu * c), (xl * c, zl * c))
        })
        .collect();
    let lowest = sections.iter().map(|(u, l)| u.1.min(l.1)).fold(f64::INFINITY, f64::min);
    let (x0, y0) = spec.origin;
    let lift = spec.base_z - lowest;
    let at = |(x, z): (f64, f64), y: f64| Point::new(x0 + x, y, z + lift);
    let span_div = (spec.span / 10.0).ceil().max(1.0) as usize;
    let ys: Vec<f64> = (0..=span_div).map(|s| y0 + spec.span * s as f64 / span_div as f64).collect();

    let mut tris = Vec::new();
    let mut quad = |a: Point, b: Point, cc: Point, d: Point| {
        tris.extend(Triangle::from_vertices(a, b, cc));
        tris.extend(Triangle::from_vertices(a, cc, d));
    };
    for w in sections.windows(2) {
        let ((u0, l0), (u1, l1)) = (w[0], w[1]);
        for s in ys.windows(2) {
            let (ya, yb) = (s[0], s[1]);
            // upper surface faces up, lower faces down
            quad(at(u0, ya), at(u1, ya), at(u1, yb), at(u0, yb));
            quad(at(l0, ya), at(l0, yb), at(l1, yb), at(l1, ya));
        }
        // end caps
        quad(at(u0, y0), at(l0, y0), at(l1, y0), at(u1, y0));
        let ye = y0 + spec.span;
        quad(at(u0, ye), at(u1, ye), at(l1, ye), at(l0, ye));
    }
    TriangleMesh::new(tris)
}

/// The surface a vertical probe sees over `[min, max]`, resampled on a lattice
/// with at most `resolution` spacing and triangulated. Points where the ray
/// misses every triangle fall back to the table.
pub fn height_field_patch(scene: &TargetScene, min: (f64, f64), max: (f64, f64), resolution: f64) -> TriangleMesh {
    let nx = (((max.0 - min.0) / resolution).ceil() as usize).max(1);
    let ny = (((max.1 - min.1) / resolution).ceil() as usize).max(1);
    let p = |i: usize, j: usize| {
        let x = min.0 + (max.0 - min.0) * i as f64 / nx as f64;
        let y = min.1 + (max.1 - min.1) * j as f64 / ny as f64;
        Vector3::new(x, y, scene.raycast_down(x, y).unwrap_or(scene.table_z()))
    };
    let mut tris = Vec::with_capacity(2 * nx * ny);
    for j in 1..=ny {
        for i in 1..=nx {
            tris.extend(Triangle::from_vertices(p(i, j), p(i - 1, j), p(i - 1, j - 1)));
            tris.extend(Triangle::from_vertices(p(i, j), p(i - 1, j - 1), p(i, j - 1)));
        }
    }
    TriangleMesh::new(tris)
}
