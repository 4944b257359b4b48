//! Polygonal domains, boundary point placement and triangulation.

mod boundary;
mod triangulate;

pub use boundary::{amano_sources, discretize_boundary, CornerRefinement, PointSet, SourceRule};
pub use triangulate::{triangulate, triangulate_from, triangulate_with, Triangle, TriangulationMode};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(self, o: Point) -> f64 {
        (self.x - o.x).hypot(self.y - o.y)
    }

    pub fn lerp(self, o: Point, t: f64) -> Point {
        Point::new(self.x + t * (o.x - self.x), self.y + t * (o.y - self.y))
    }

    fn coord(self) -> robust::Coord<f64> {
        robust::Coord { x: self.x, y: self.y }
    }
}

impl From<[f64; 2]> for Point {
    fn from(p: [f64; 2]) -> Self {
        Point::new(p[0], p[1])
    }
}

/// Exact orientation: positive if `a, b, c` turn counterclockwise.
pub fn orient(a: Point, b: Point, c: Point) -> f64 {
    robust::orient2d(a.coord(), b.coord(), c.coord())
}

/// True if `p` lies on the closed segment `[a, b]` (exact).
pub fn on_segment(a: Point, b: Point, p: Point) -> bool {
    orient(a, b, p) == 0.0
        && p.x >= a.x.min(b.x)
        && p.x <= a.x.max(b.x)
        && p.y >= a.y.min(b.y)
        && p.y <= a.y.max(b.y)
}

fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
        return true;
    }
    on_segment(a, b, c) || on_segment(a, b, d) || on_segment(c, d, a) || on_segment(c, d, b)
}

fn segment_distance(a: Point, b: Point, p: Point) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    let t = (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0);
    p.dist(a.lerp(b, t))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    Inside,
    Outside,
    Boundary,
}

/// A simple polygon with counterclockwise vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct Polygon {
    vertices: Vec<Point>,
}

impl Polygon {
    /// Validates and stores a simple polygon, reversing clockwise input.
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::Geometry(format!("polygon needs at least 3 vertices, got {n}")));
        }
        if let Some(p) = vertices.iter().find(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::Geometry(format!("non-finite vertex {p:?}")));
        }
        for i in 0..n {
            if vertices[i] == vertices[(i + 1) % n] {
                return Err(Error::Geometry(format!("consecutive vertices {i} and {} coincide", (i + 1) % n)));
            }
        }
        for i in 0..n {
            let (a, b) = (vertices[i], vertices[(i + 1) % n]);
            for j in i + 1..n {
                let (c, d) = (vertices[j], vertices[(j + 1) % n]);
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    // Adjacent edges may only share their common vertex.
                    let (shared, other_a, other_b) = if j == i + 1 { (b, a, d) } else { (a, b, c) };
                    if orient(other_a, shared, other_b) == 0.0
                        && (on_segment(shared, other_b, other_a) || on_segment(shared, other_a, other_b))
                    {
                        return Err(Error::Geometry(format!("edges {i} and {j} overlap")));
                    }
                } else if segments_intersect(a, b, c, d) {
                    return Err(Error::Geometry(format!("edges {i} and {j} intersect; polygon is not simple")));
                }
            }
        }
        let mut poly = Polygon { vertices };
        let a = poly.signed_area();
        if a == 0.0 {
            return Err(Error::Geometry("polygon has zero area".into()));
        }
        if a < 0.0 {
            poly.vertices.reverse();
        }
        Ok(poly)
    }

    pub fn from_coords(coords: &[[f64; 2]]) -> Result<Self> {
        Polygon::new(coords.iter().map(|&c| c.into()).collect())
    }

    /// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
    pub fn rectangle(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        Polygon::from_coords(&[[x0, y0], [x1, y0], [x1, y1], [x0, y1]])
    }

    /// `(−1, 1)² \ [0, 1]²`, reentrant corner at the origin.
    pub fn l_shape() -> Self {
        Polygon::from_coords(&[[-1.0, -1.0], [1.0, -1.0], [1.0, 0.0], [0.0, 0.0], [0.0, 1.0], [-1.0, 1.0]])
            .expect("L-shape is a valid polygon")
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Edges `(v_i, v_{i+1})` in order, closing back to vertex 0.
    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn signed_area(&self) -> f64 {
        0.5 * self.edges().map(|(a, b)| a.x * b.y - b.x * a.y).sum::<f64>()
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| a.dist(b)).sum()
    }

    pub fn diameter(&self) -> f64 {
        let v = &self.vertices;
        let mut d: f64 = 0.0;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                d = d.max(v[i].dist(v[j]));
            }
        }
        d
    }

    /// `(min, max)` corners of the bounding box.
    pub fn bbox(&self) -> (Point, Point) {
        let mut lo = self.vertices[0];
        let mut hi = lo;
        for p in &self.vertices {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        (lo, hi)
    }

    /// Exact point location.
    pub fn locate(&self, p: Point) -> Location {
        let mut winding = 0i32;
        for (a, b) in self.edges() {
            if on_segment(a, b, p) {
                return Location::Boundary;
            }
            if a.y <= p.y {
                if b.y > p.y && orient(a, b, p) > 0.0 {
                    winding += 1;
                }
            } else if b.y <= p.y && orient(a, b, p) < 0.0 {
                winding -= 1;
            }
        }
        if winding != 0 {
            Location::Inside
        } else {
            Location::Outside
        }
    }

    pub fn contains_strict(&self, p: Point) -> bool {
        self.locate(p) == Location::Inside
    }

    pub fn distance_to_boundary(&self, p: Point) -> f64 {
        self.edges().map(|(a, b)| segment_distance(a, b, p)).fold(f64::INFINITY, f64::min)
    }

    /// Index of the vertex equal to `p` up to `tol`.
    pub fn vertex_index(&self, p: Point, tol: f64) -> Option<usize> {
        self.vertices.iter().position(|v| v.dist(p) <= tol)
    }

    /// Vertices with interior angle above π.
    pub fn reentrant_corners(&self) -> Vec<Point> {
        let n = self.vertices.len();
        (0..n)
            .filter(|&i| orient(self.vertices[(i + n - 1) % n], self.vertices[i], self.vertices[(i + 1) % n]) < 0.0)
            .map(|i| self.vertices[i])
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clockwise_input_is_reversed() {
        let p = Polygon::from_coords(&[[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]]).unwrap();
        assert!(p.signed_area() > 0.0);
        assert_eq!(p.area(), 1.0);
    }

    #[test]
    fn invalid_polygons_are_rejected() {
        assert!(Polygon::from_coords(&[[0.0, 0.0], [1.0, 0.0]]).is_err());
        assert!(Polygon::from_coords(&[[0.0, 0.0], [1.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).is_err());
        assert!(Polygon::from_coords(&[[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]]).is_err());
        assert!(Polygon::from_coords(&[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]).is_err());
        assert!(Polygon::from_coords(&[[0.0, 0.0], [2.0, 0.0], [1.0, 0.0], [1.0, 1.0]]).is_err());
    }

    #[test]
    fn location() {
        let l = Polygon::l_shape();
        assert_eq!(l.locate(Point::new(-0.5, -0.5)), Location::Inside);
        assert_eq!(l.locate(Point::new(0.5, 0.5)), Location::Outside);
        assert_eq!(l.locate(Point::new(0.0, 0.5)), Location::Boundary);
        assert_eq!(l.locate(Point::new(0.0, 0.0)), Location::Boundary);
        assert_eq!(l.locate(Point::new(1.0, -1.0)), Location::Boundary);
        assert_eq!(l.locate(Point::new(2.0, -0.5)), Location::Outside);
        assert_eq!(l.area(), 3.0);
        assert_eq!(l.reentrant_corners(), vec![Point::new(0.0, 0.0)]);
        assert!((l.diameter() - 8f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn distance() {
        let sq = Polygon::rectangle(-0.5, -0.5, 0.5, 0.5).unwrap();
        assert_eq!(sq.distance_to_boundary(Point::new(0.0, 0.0)), 0.5);
        assert_eq!(sq.distance_to_boundary(Point::new(0.0, 0.5)), 0.0);
    }
}
