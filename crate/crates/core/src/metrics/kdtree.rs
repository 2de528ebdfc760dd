//! Exact nearest-neighbour queries over a static point set.

use crate::mesh::Point;

const LEAF_SIZE: usize = 8;

enum Node {
    Leaf { start: usize, end: usize },
    Split { axis: usize, value: f64, left: Box<Node>, right: Box<Node> },
}

/// Static 3-d tree. Queries return exact squared distances.
pub struct KdTree {
    points: Vec<Point>,
    root: Node,
}

impl KdTree {
    pub fn new(points: &[Point]) -> Self {
        let mut points = points.to_vec();
        let n = points.len();
        let root = build(&mut points, 0, n);
        Self { points, root }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Squared distance to the closest stored point, `None` when empty.
    pub fn nearest_sq(&self, q: &Point) -> Option<f64> {
        if self.points.is_empty() {
            return None;
        }
        let mut best = f64::INFINITY;
        self.search(&self.root, q, &mut best);
        Some(best)
    }

    fn search(&self, node: &Node, q: &Point, best: &mut f64) {
        match node {
            Node::Leaf { start, end } => {
                for p in &self.points[*start..*end] {
                    let d = (p - q).norm_squared();
                    if d < *best {
                        *best = d;
                    }
                }
            }
            Node::Split { axis, value, left, right } => {
                let diff = q[*axis] - value;
                let (near, far) = if diff < 0.0 { (left, right) } else { (right, left) };
                self.search(near, q, best);
                if diff * diff <= *best {
                    self.search(far, q, best);
                }
            }
        }
    }
}

fn build(points: &mut [Point], start: usize, end: usize) -> Node {
    let slice = &mut points[start..end];
    if slice.len() <= LEAF_SIZE {
        return Node::Leaf { start, end };
    }
    let mut lo = slice[0];
    let mut hi = slice[0];
    for p in slice.iter() {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    let axis = (hi - lo).imax();
    let mid = slice.len() / 2;
    slice.select_nth_unstable_by(mid, |a, b| a[axis].total_cmp(&b[axis]));
    let value = slice[mid][axis];
    // left holds [start, start+mid), all <= value; right starts at the pivot
    Node::Split {
        axis,
        value,
        left: Box::new(build(points, start, start + mid)),
        right: Box::new(build(points, start + mid, end)),
    }
}
