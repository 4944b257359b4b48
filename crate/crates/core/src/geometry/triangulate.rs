use super::{on_segment, orient, Location, Point, Polygon};
use crate::error::{Error, Result};

/// A counterclockwise triangle, optionally marking which vertex is the
/// evaluation point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Triangle {
    pub v: [Point; 3],
    pub singular_vertex: Option<usize>,
}

impl Triangle {
    pub fn new(a: Point, b: Point, c: Point, singular_vertex: Option<usize>) -> Result<Self> {
        if orient(a, b, c) <= 0.0 {
            return Err(Error::Geometry(format!("triangle {a:?}, {b:?}, {c:?} is not counterclockwise")));
        }
        if singular_vertex.is_some_and(|i| i > 2) {
            return Err(Error::Invalid("singular vertex index must be 0, 1 or 2".into()));
        }
        Ok(Triangle { v: [a, b, c], singular_vertex })
    }

    pub fn area(&self) -> f64 {
        let [a, b, c] = self.v;
        0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y))
    }

    /// Closed-triangle membership (exact).
    pub fn contains(&self, p: Point) -> bool {
        let [a, b, c] = self.v;
        orient(a, b, p) >= 0.0 && orient(b, c, p) >= 0.0 && orient(c, a, p) >= 0.0
    }

    pub fn contains_strict(&self, p: Point) -> bool {
        let [a, b, c] = self.v;
        orient(a, b, p) > 0.0 && orient(b, c, p) > 0.0 && orient(c, a, p) > 0.0
    }

    /// Rotates the vertex order so the singular vertex comes first.
    pub fn singular_first(&self) -> Triangle {
        match self.singular_vertex {
            Some(i) => Triangle { v: [self.v[i], self.v[(i + 1) % 3], self.v[(i + 2) % 3]], singular_vertex: Some(0) },
            None => *self,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TriangulationMode {
    /// Fan from the evaluation point when the polygon is star-shaped with
    /// respect to it, ear clipping otherwise.
    #[default]
    Auto,
    /// Always ear clip, then split the triangles containing the point.
    EarClip,
}

/// Triangulates `poly` so that `s_int` is a vertex of every triangle that
/// contains it.
pub fn triangulate_from(poly: &Polygon, s_int: Point) -> Result<Vec<Triangle>> {
    triangulate_with(poly, s_int, TriangulationMode::Auto)
}

pub fn triangulate_with(poly: &Polygon, s_int: Point, mode: TriangulationMode) -> Result<Vec<Triangle>> {
    match poly.locate(s_int) {
        Location::Inside => {}
        Location::Boundary => {
            return Err(Error::Geometry(format!("evaluation point {s_int:?} lies on the boundary")));
        }
        Location::Outside => {
            return Err(Error::Geometry(format!("evaluation point {s_int:?} lies outside the domain")));
        }
    }
    let star = poly.edges().all(|(a, b)| orient(s_int, a, b) > 0.0);
    if star && mode == TriangulationMode::Auto {
        return poly.edges().map(|(a, b)| Triangle::new(s_int, a, b, Some(0))).collect();
    }
    let ears = ear_clip(poly)?;
    let mut out = Vec::with_capacity(ears.len() + 3);
    for t in ears {
        let [a, b, c] = t.v;
        if t.contains_strict(s_int) {
            for (p, q) in [(a, b), (b, c), (c, a)] {
                out.push(Triangle::new(s_int, p, q, Some(0))?);
            }
        } else if t.contains(s_int) {
            // On an interior edge: split into the two parts not degenerate.
            for (p, q) in [(a, b), (b, c), (c, a)] {
                if !on_segment(p, q, s_int) {
                    out.push(Triangle::new(s_int, p, q, Some(0))?);
                }
            }
        } else {
            out.push(t);
        }
    }
    Ok(out)
}

/// Triangulates `poly` without regard to any evaluation point.
pub fn triangulate(poly: &Polygon) -> Result<Vec<Triangle>> {
    ear_clip(poly)
}

/// Ear clipping with exact predicates.
fn ear_clip(poly: &Polygon) -> Result<Vec<Triangle>> {
    let mut idx: Vec<Point> = poly.vertices().to_vec();
    let mut out = Vec::with_capacity(idx.len());
    let mut guard = 0usize;
    while idx.len() > 3 {
        let n = idx.len();
        let mut clipped = false;
        for i in 0..n {
            let (a, b, c) = (idx[(i + n - 1) % n], idx[i], idx[(i + 1) % n]);
            let o = orient(a, b, c);
            if o == 0.0 {
                // Collinear vertex: dropping it leaves the region unchanged.
                idx.remove(i);
                clipped = true;
                break;
            }
            if o < 0.0 {
                continue;
            }
            let blocked = idx.iter().any(|&p| {
                p != a && p != b && p != c && orient(a, b, p) >= 0.0 && orient(b, c, p) >= 0.0 && orient(c, a, p) >= 0.0
            });
            if !blocked {
                out.push(Triangle::new(a, b, c, None)?);
                idx.remove(i);
                clipped = true;
                break;
            }
        }
        guard += 1;
        if !clipped || guard > 10 * poly.len() {
            return Err(Error::Geometry("ear clipping failed; polygon may not be simple".into()));
        }
    }
    if orient(idx[0], idx[1], idx[2]) > 0.0 {
        out.push(Triangle::new(idx[0], idx[1], idx[2], None)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn total_area(ts: &[Triangle]) -> f64 {
        ts.iter().map(Triangle::area).sum()
    }

    #[test]
    fn square_fan_from_centre() {
        let sq = Polygon::rectangle(-0.5, -0.5, 0.5, 0.5).unwrap();
        let ts = triangulate_from(&sq, Point::new(0.0, 0.0)).unwrap();
        assert_eq!(ts.len(), 4);
        assert!(ts.iter().all(|t| t.singular_vertex == Some(0) && t.v[0] == Point::new(0.0, 0.0)));
        assert!((total_area(&ts) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn l_shape_star_point_gives_fan() {
        let l = Polygon::l_shape();
        let s = Point::new(-0.5, -0.5);
        let ts = triangulate_from(&l, s).unwrap();
        assert_eq!(ts.len(), 6);
        assert!(ts.iter().all(|t| t.v[0] == s));
        assert!((total_area(&ts) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn l_shape_non_star_point() {
        let l = Polygon::l_shape();
        let s = Point::new(0.5, -0.5);
        let ts = triangulate_from(&l, s).unwrap();
        assert!((total_area(&ts) - 3.0).abs() < 1e-12);
        assert!(ts.iter().any(|t| t.singular_vertex.is_none()));
        // The point is a vertex of every triangle that contains it.
        for t in &ts {
            if t.contains(s) {
                assert_eq!(t.singular_vertex, Some(0));
                assert_eq!(t.v[0], s);
            }
        }
    }

    #[test]
    fn point_on_interior_diagonal() {
        let sq = Polygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap();
        let s = Point::new(0.5, 0.5);
        let ts = triangulate_with(&sq, s, TriangulationMode::EarClip).unwrap();
        assert_eq!(ts.len(), 4);
        assert!((total_area(&ts) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn boundary_and_exterior_points_fail() {
        let l = Polygon::l_shape();
        assert!(triangulate_from(&l, Point::new(0.0, 0.5)).is_err());
        assert!(triangulate_from(&l, Point::new(0.5, 0.5)).is_err());
    }

    #[test]
    fn singular_first_rotation() {
        let t = Triangle::new(Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0), Some(2)).unwrap();
        let r = t.singular_first();
        assert_eq!(r.v[0], Point::new(0.0, 1.0));
        assert_eq!(r.singular_vertex, Some(0));
        assert!(r.area() > 0.0);
    }
}
