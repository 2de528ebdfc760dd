//! STL (binary and ASCII) and XYZ point-cloud encoding.
//!
//! Binary layout: 80-byte header, little-endian `u32` facet count, then 50
//! bytes per facet (normal and three vertices as little-endian `f32`, followed
//! by a zero `u16` attribute word). Coordinates are held as `f64` in memory and
//! narrowed to `f32` on write.

use std::fmt::Write as _;

use nalgebra::Vector3;
use thiserror::Error;

use crate::mesh::{Point, PointCloud, Triangle, TriangleMesh};

pub const STL_HEADER_LEN: usize = 80;
pub const STL_FACET_LEN: usize = 50;
const HEADER_TEXT: &[u8] = b"touchscan binary STL";

#[derive(Debug, Error, PartialEq)]
pub enum MeshIoError {
    #[error("binary STL truncated at byte {offset}: need {needed} bytes")]
    Truncated { offset: usize, needed: usize },
    #[error("binary STL declares {declared} facets ({expected} bytes) but file has {actual} bytes")]
    CountMismatch {
        declared: u32,
        expected: usize,
        actual: usize,
    },
    #[error("ASCII STL line {line}: {message}")]
    Ascii { line: usize, message: String },
    #[error("XYZ line {line}: {message}")]
    Xyz { line: usize, message: String },
    #[error("{0} triangles exceed the binary STL facet count limit")]
    TooManyTriangles(usize),
}

/// Binary STL byte size for `count` facets.
pub fn stl_binary_size(count: usize) -> usize {
    STL_HEADER_LEN + 4 + STL_FACET_LEN * count
}

fn facet_count(len: usize) -> Result<u32, MeshIoError> {
    u32::try_from(len).map_err(|_| MeshIoError::TooManyTriangles(len))
}

pub fn write_stl_binary(mesh: &TriangleMesh) -> Result<Vec<u8>, MeshIoError> {
    let count = facet_count(mesh.len())?;
    let mut out = Vec::with_capacity(stl_binary_size(mesh.len()));
    let mut header = [0u8; STL_HEADER_LEN];
    header[..HEADER_TEXT.len()].copy_from_slice(HEADER_TEXT);
    out.extend_from_slice(&header);
    out.extend_from_slice(&count.to_le_bytes());
    for t in &mesh.triangles {
        for v in std::iter::once(&t.normal).chain(t.vertices.iter()) {
            for c in v.iter() {
                out.extend_from_slice(&(*c as f32).to_le_bytes());
            }
        }
        out.extend_from_slice(&0u16.to_le_bytes());
    }
    debug_assert_eq!(out.len(), stl_binary_size(mesh.len()));
    Ok(out)
}

fn read_vec3(chunk: &[u8]) -> Vector3<f64> {
    let f = |i: usize| f32::from_le_bytes(chunk[4 * i..4 * i + 4].try_into().unwrap()) as f64;
    Vector3::new(f(0), f(1), f(2))
}

pub fn read_stl_binary(bytes: &[u8]) -> Result<TriangleMesh, MeshIoError> {
    let prefix = STL_HEADER_LEN + 4;
    if bytes.len() < prefix {
        return Err(MeshIoError::Truncated {
            offset: bytes.len(),
            needed: prefix,
        });
    }
    let declared = u32::from_le_bytes(bytes[STL_HEADER_LEN..prefix].try_into().unwrap());
    let expected = stl_binary_size(declared as usize);
    if bytes.len() < expected {
        return Err(MeshIoError::Truncated {
            offset: bytes.len(),
            needed: expected,
        });
    }
    if bytes.len() > expected {
        return Err(MeshIoError::CountMismatch {
            declared,
            expected,
            actual: bytes.len(),
        });
    }
    let triangles = bytes[prefix..]
        .chunks_exact(STL_FACET_LEN)
        .map(|rec| Triangle {
            normal: read_vec3(&rec[0..12]),
            vertices: [read_vec3(&rec[12..24]), read_vec3(&rec[24..36]), read_vec3(&rec[36..48])],
        })
        .collect();
    Ok(TriangleMesh::new(triangles))
}

pub fn write_stl_ascii(mesh: &TriangleMesh, name: &str) -> String {
    let mut s = String::new();
    let v = |c: f64| c as f32;
    writeln!(s, "solid {name}").unwrap();
    for t in &mesh.triangles {
        let n = t.normal;
        writeln!(s, "  facet normal {:e} {:e} {:e}", v(n.x), v(n.y), v(n.z)).unwrap();
        s.push_str("    outer loop\n");
        for p in &t.vertices {
            writeln!(s, "      vertex {:e} {:e} {:e}", v(p.x), v(p.y), v(p.z)).unwrap();
        }
        s.push_str("    endloop\n  endfacet\n");
    }
    writeln!(s, "endsolid {name}").unwrap();
    s
}

struct Tokens<'a> {
    iter: Box<dyn Iterator<Item = (usize, &'a str)> + 'a>,
    line: usize,
}

impl<'a> Tokens<'a> {
    /// Tokens of `text`, skipping the first `skip_lines` lines.
    fn new(text: &'a str, skip_lines: usize) -> Self {
        let iter = text
            .lines()
            .enumerate()
            .skip(skip_lines)
            .flat_map(|(i, l)| l.split_whitespace().map(move |t| (i + 1, t)));
        Self {
            iter: Box::new(iter),
            line: skip_lines.max(1),
        }
    }

    fn err(&self, message: impl Into<String>) -> MeshIoError {
        MeshIoError::Ascii {
            line: self.line,
            message: message.into(),
        }
    }

    fn next(&mut self) -> Option<&'a str> {
        let (line, tok) = self.iter.next()?;
        self.line = line;
        Some(tok)
    }

    fn expect(&mut self, word: &str) -> Result<(), MeshIoError> {
        match self.next() {
            Some(t) if t == word => Ok(()),
            Some(t) => Err(self.err(format!("expected `{word}`, found `{t}`"))),
            None => Err(self.err(format!("expected `{word}`, found end of file"))),
        }
    }

    fn number(&mut self) -> Result<f64, MeshIoError> {
        let tok = self.next().ok_or_else(|| self.err("expected number, found end of file"))?;
        let v: f64 = tok.parse().map_err(|_| self.err(format!("malformed number `{tok}`")))?;
        if !v.is_finite() {
            return Err(self.err(format!("non-finite number `{tok}`")));
        }
        Ok(v)
    }

    fn vec3(&mut self) -> Result<Vector3<f64>, MeshIoError> {
        Ok(Vector3::new(self.number()?, self.number()?, self.number()?))
    }
}

pub fn read_stl_ascii(text: &str) -> Result<TriangleMesh, MeshIoError> {
    let mut lines = text.lines().enumerate().skip_while(|(_, l)| l.trim().is_empty());
    let (first_idx, first) = lines.next().ok_or(MeshIoError::Ascii {
        line: 1,
        message: "empty file".into(),
    })?;
    if first.split_whitespace().next() != Some("solid") {
        return Err(MeshIoError::Ascii {
            line: first_idx + 1,
            message: "expected `solid`".into(),
        });
    }
    // The solid name runs to the end of its line.
    let mut tok = Tokens::new(text, first_idx + 1);
    let mut triangles = Vec::new();
    loop {
        match tok.next() {
            Some("facet") => {
                let parse = |tok: &mut Tokens| -> Result<Triangle, MeshIoError> {
                    tok.expect("normal")?;
                    let normal = tok.vec3()?;
                    tok.expect("outer")?;
                    tok.expect("loop")?;
                    let mut vertices = [Point::zeros(); 3];
                    for v in vertices.iter_mut() {
                        tok.expect("vertex")?;
                        *v = tok.vec3()?;
                    }
                    tok.expect("endloop")?;
                    tok.expect("endfacet")?;
                    Ok(Triangle { normal, vertices })
                };
                triangles.push(parse(&mut tok)?);
            }
            Some("endsolid") => return Ok(TriangleMesh::new(triangles)),
            Some(t) => return Err(tok.err(format!("expected `facet` or `endsolid`, found `{t}`"))),
            None => return Err(tok.err("missing `endsolid`")),
        }
    }
}

fn looks_ascii(bytes: &[u8]) -> bool {
    let start = bytes.iter().position(|b| !b.is_ascii_whitespace()).unwrap_or(bytes.len());
    bytes[start..].starts_with(b"solid")
}

/// Reads either STL flavour. A file is ASCII iff it parses as the ASCII
/// grammar; binary files whose header happens to start with `solid` still
/// load as binary.
pub fn read_stl(bytes: &[u8]) -> Result<TriangleMesh, MeshIoError> {
    if looks_ascii(bytes) {
        let ascii = std::str::from_utf8(bytes)
            .map_err(|e| MeshIoError::Ascii {
                line: bytes[..e.valid_up_to()].iter().filter(|&&b| b == b'\n').count() + 1,
                message: "invalid UTF-8".into(),
            })
            .and_then(read_stl_ascii);
        match ascii {
            Ok(mesh) => return Ok(mesh),
            Err(e) => {
                let binary_sized = bytes.len() >= STL_HEADER_LEN + 4 && {
                    let n = u32::from_le_bytes(bytes[STL_HEADER_LEN..STL_HEADER_LEN + 4].try_into().unwrap());
                    bytes.len() == stl_binary_size(n as usize)
                };
                if !binary_sized {
                    return Err(e);
                }
            }
        }
    }
    read_stl_binary(bytes)
}

/// One `x y z` line per point, six fractional digits.
pub fn write_xyz(cloud: &PointCloud) -> String {
    let mut s = String::with_capacity(cloud.len() * 36);
    for p in &cloud.points {
        writeln!(s, "{:.6} {:.6} {:.6}", p.x, p.y, p.z).unwrap();
    }
    s
}

/// Blank lines are ignored; fields may be separated by any whitespace.
pub fn read_xyz(text: &str) -> Result<PointCloud, MeshIoError> {
    let mut points = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        let err = |message: String| MeshIoError::Xyz { line: i + 1, message };
        if fields.len() != 3 {
            return Err(err(format!("expected 3 fields, found {}", fields.len())));
        }
        let mut c = [0.0f64; 3];
        for (slot, f) in c.iter_mut().zip(&fields) {
            *slot = f.parse().map_err(|_| err(format!("malformed number `{f}`")))?;
            if !slot.is_finite() {
                return Err(err(format!("non-finite number `{f}`")));
            }
        }
        points.push(Point::new(c[0], c[1], c[2]));
    }
    Ok(PointCloud::new(points))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_facet() -> TriangleMesh {
        TriangleMesh::new(vec![Triangle::from_vertices(
            Point::new(0.0, 0.0, 1.5),
            Point::new(2.0, 0.0, 1.5),
            Point::new(0.0, 3.0, 1.5),
        )
        .unwrap()])
    }

    #[test]
    fn empty_mesh_is_84_bytes() {
        let bytes = write_stl_binary(&TriangleMesh::default()).unwrap();
        assert_eq!(bytes.len(), 84);
        assert_eq!(&bytes[80..84], &[0, 0, 0, 0]);
        assert_eq!(&bytes[..HEADER_TEXT.len()], HEADER_TEXT);
        assert!(bytes[HEADER_TEXT.len()..80].iter().all(|&b| b == 0));
        assert!(read_stl(&bytes).unwrap().is_empty());
    }

    #[test]
    fn size_for_default_grid() {
        assert_eq!(stl_binary_size(912), 45_684);
    }

    #[test]
    fn facet_record_layout() {
        let bytes = write_stl_binary(&one_facet()).unwrap();
        assert_eq!(bytes.len(), 134);
        assert_eq!(u32::from_le_bytes(bytes[80..84].try_into().unwrap()), 1);
        // normal z, then v2.x
        assert_eq!(f32::from_le_bytes(bytes[92..96].try_into().unwrap()), 1.0);
        assert_eq!(f32::from_le_bytes(bytes[108..112].try_into().unwrap()), 2.0);
        assert_eq!(&bytes[132..134], &[0, 0]);
    }

    #[test]
    fn binary_errors_carry_positions() {
        let bytes = write_stl_binary(&one_facet()).unwrap();
        assert_eq!(
            read_stl(&bytes[..100]),
            Err(MeshIoError::Truncated { offset: 100, needed: 134 })
        );
        assert_eq!(read_stl(&bytes[..40]), Err(MeshIoError::Truncated { offset: 40, needed: 84 }));
        let mut long = bytes.clone();
        long.push(0);
        assert!(matches!(read_stl(&long), Err(MeshIoError::CountMismatch { declared: 1, .. })));
    }

    #[test]
    fn ascii_single_facet() {
        let text = "solid part\n facet normal 0 0 1\n  outer loop\n   vertex 0 0 0\n   vertex 1 0 0\n   vertex 0 1 0\n  endloop\n endfacet\nendsolid part\n";
        let mesh = read_stl(text.as_bytes()).unwrap();
        assert_eq!(mesh.len(), 1);
        assert_eq!(mesh.triangles[0].normal, Vector3::z());
        assert_eq!(mesh.triangles[0].vertices[1], Point::x());
    }

    #[test]
    fn ascii_round_trip() {
        let mesh = one_facet();
        assert_eq!(read_stl(write_stl_ascii(&mesh, "t").as_bytes()).unwrap(), mesh);
    }

    #[test]
    fn ascii_error_line_numbers() {
        let text = "solid x\nfacet normal 0 0 1\nouter loop\nvertex 0 0 zero\n";
        assert_eq!(
            read_stl(text.as_bytes()),
            Err(MeshIoError::Ascii {
                line: 4,
                message: "malformed number `zero`".into()
            })
        );
        let text = "solid x\nfacet normal 0 0 1\nouter loop\nvertex 0 0 0\nvertex 0 0 0\nvertex 0 0 0\nendloop\nendfacet\n";
        assert!(matches!(read_stl(text.as_bytes()), Err(MeshIoError::Ascii { line: 8, .. })));
    }

    #[test]
    fn binary_header_starting_with_solid() {
        let mut bytes = write_stl_binary(&one_facet()).unwrap();
        bytes[..5].copy_from_slice(b"solid");
        assert_eq!(read_stl(&bytes).unwrap(), one_facet());
    }

    #[test]
    fn count_overflow_rejected() {
        assert_eq!(facet_count(u32::MAX as usize), Ok(u32::MAX));
        assert_eq!(
            facet_count(u32::MAX as usize + 1),
            Err(MeshIoError::TooManyTriangles(u32::MAX as usize + 1))
        );
    }

    #[test]
    fn xyz_format() {
        assert_eq!(write_xyz(&PointCloud::default()), "");
        let cloud = PointCloud::new(vec![Point::new(1.0, -2.5, 1.0 / 3.0)]);
        assert_eq!(write_xyz(&cloud), "1.000000 -2.500000 0.333333\n");
        let parsed = read_xyz("  1\t2   3 \n\n4 5 6\n").unwrap();
        assert_eq!(parsed.points, vec![Point::new(1.0, 2.0, 3.0), Point::new(4.0, 5.0, 6.0)]);
    }

    #[test]
    fn xyz_errors() {
        assert_eq!(
            read_xyz("1 2 3\n1 2\n"),
            Err(MeshIoError::Xyz {
                line: 2,
                message: "expected 3 fields, found 2".into()
            })
        );
        assert!(matches!(read_xyz("1 2 x\n"), Err(MeshIoError::Xyz { line: 1, .. })));
    }
}
