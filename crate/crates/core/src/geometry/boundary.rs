use super::{Location, Point, Polygon};
use crate::error::{Error, Result};

/// Geometric grading of boundary points toward designated corners.
///
/// The target spacing at arc distance `d` from the nearest flagged corner is
/// `min(H, h0 + g·d)` with `g = 1/ratio − 1`, so neighbouring spacings shrink
/// by roughly `ratio` per step toward the corner. `h0 = ratio ·
/// min_spacing_factor · diameter`, and `H` is chosen so that exactly `n`
/// points fit on the boundary.
#[derive(Clone, Debug, PartialEq)]
pub struct CornerRefinement {
    pub corners: Vec<Point>,
    pub ratio: f64,
    pub min_spacing_factor: f64,
}

impl CornerRefinement {
    pub fn new(corners: Vec<Point>) -> Self {
        CornerRefinement { corners, ratio: 0.7, min_spacing_factor: 0.02 }
    }
}

/// Arc-length position of each vertex, starting at vertex 0.
fn vertex_arcs(poly: &Polygon) -> (Vec<f64>, f64) {
    let mut s = Vec::with_capacity(poly.len() + 1);
    let mut acc = 0.0;
    s.push(0.0);
    for (a, b) in poly.edges() {
        acc += a.dist(b);
        s.push(acc);
    }
    let total = s.pop().expect("nonempty");
    (s, total)
}

fn point_at(poly: &Polygon, arcs: &[f64], s: f64) -> Point {
    let i = arcs.partition_point(|&a| a <= s).saturating_sub(1);
    let v = poly.vertices();
    let a = v[i];
    let b = v[(i + 1) % v.len()];
    let len = a.dist(b);
    a.lerp(b, ((s - arcs[i]) / len).clamp(0.0, 1.0))
}

/// Places `n` points on the boundary in counterclockwise order.
///
/// Without refinement the points are equally spaced in arc length, offset by
/// half a spacing from vertex 0. No point is placed on a vertex.
pub fn discretize_boundary(poly: &Polygon, n: usize, refine: Option<&CornerRefinement>) -> Result<Vec<Point>> {
    if n < 3 {
        return Err(Error::Invalid(format!("need at least 3 boundary points, got {n}")));
    }
    let (arcs, total) = vertex_arcs(poly);
    let positions = match refine {
        None => (0..n).map(|i| (i as f64 + 0.5) * total / n as f64).collect(),
        Some(r) => graded_positions(poly, &arcs, total, n, r)?,
    };
    let positions = avoid_vertices(positions, &arcs, total);
    Ok(positions.into_iter().map(|s| point_at(poly, &arcs, s)).collect())
}

/// Shifts all positions slightly if any of them sits on a vertex.
fn avoid_vertices(mut pos: Vec<f64>, arcs: &[f64], total: f64) -> Vec<f64> {
    let near = |s: f64| {
        arcs.iter().any(|&a| {
            let d = (s - a).abs();
            d.min(total - d) <= 1e-9 * total
        })
    };
    let min_gap = pos
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(total - pos.last().unwrap_or(&0.0) + pos.first().unwrap_or(&0.0), f64::min);
    let mut shift = 0.0;
    let mut step = 0.25 * min_gap;
    for _ in 0..8 {
        if !pos.iter().any(|&s| near((s + shift).rem_euclid(total))) {
            break;
        }
        shift += step;
        step *= 0.5;
    }
    for s in &mut pos {
        *s = (*s + shift).rem_euclid(total);
    }
    pos.sort_by(f64::total_cmp);
    pos
}

fn graded_positions(poly: &Polygon, arcs: &[f64], total: f64, n: usize, r: &CornerRefinement) -> Result<Vec<f64>> {
    if !(r.ratio > 0.0 && r.ratio < 1.0) || !(r.min_spacing_factor > 0.0) {
        return Err(Error::Invalid("refinement ratio must be in (0, 1) and spacing factor positive".into()));
    }
    let tol = 1e-9 * poly.diameter();
    let mut corner_arcs = Vec::new();
    for c in &r.corners {
        let i = poly
            .vertex_index(*c, tol)
            .ok_or_else(|| Error::Geometry(format!("refinement corner {c:?} is not a polygon vertex")))?;
        corner_arcs.push(arcs[i]);
    }
    if corner_arcs.is_empty() {
        return Ok((0..n).map(|i| (i as f64 + 0.5) * total / n as f64).collect());
    }
    let h0 = r.ratio * r.min_spacing_factor * poly.diameter();
    let g = 1.0 / r.ratio - 1.0;
    let dist = |s: f64| {
        corner_arcs
            .iter()
            .map(|&c| {
                let d = (s - c).abs();
                d.min(total - d)
            })
            .fold(f64::INFINITY, f64::min)
    };
    const SAMPLES: usize = 1 << 14;
    let ds = total / SAMPLES as f64;
    let density = |h: f64| -> Vec<f64> {
        // Cumulative point count at each sample, trapezoid rule.
        let mut cum = Vec::with_capacity(SAMPLES + 1);
        cum.push(0.0);
        let mut prev = 1.0 / h.min(h0 + g * dist(0.0));
        for k in 1..=SAMPLES {
            let s = k as f64 * ds;
            let cur = 1.0 / h.min(h0 + g * dist(s));
            let last = *cum.last().expect("nonempty");
            cum.push(last + 0.5 * (prev + cur) * ds);
            prev = cur;
        }
        cum
    };
    let (mut lo, mut hi) = (h0 * 1e-3, total);
    if density(lo)[SAMPLES] < n as f64 {
        return Err(Error::Invalid(format!(
            "{n} points are too many for the refinement spacing; lower min_spacing_factor"
        )));
    }
    if density(hi)[SAMPLES] > n as f64 {
        return Err(Error::Invalid(format!(
            "{n} points are too few for the refinement spacing; raise min_spacing_factor"
        )));
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if density(mid)[SAMPLES] > n as f64 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let cum = density(0.5 * (lo + hi));
    let scale = n as f64 / cum[SAMPLES];
    let mut out = Vec::with_capacity(n);
    let mut k = 0;
    for i in 0..n {
        let target = (i as f64 + 0.5) / scale;
        while k + 1 < SAMPLES && cum[k + 1] < target {
            k += 1;
        }
        let t = (target - cum[k]) / (cum[k + 1] - cum[k]);
        out.push((k as f64 + t) * ds);
    }
    Ok(out)
}

/// Dilation factor `R_k > 1` for the source at each collocation point.
#[derive(Clone, Debug, PartialEq)]
pub enum SourceRule {
    Uniform(f64),
    /// `near` for collocation points within max-norm distance `radius` of
    /// `corner`, `far` elsewhere.
    NearCorner { corner: Point, radius: f64, near: f64, far: f64 },
}

impl SourceRule {
    pub fn factor(&self, p: Point) -> f64 {
        match *self {
            SourceRule::Uniform(r) => r,
            SourceRule::NearCorner { corner, radius, near, far } => {
                if (p.x - corner.x).abs() <= radius && (p.y - corner.y).abs() <= radius {
                    near
                } else {
                    far
                }
            }
        }
    }
}

/// Places one exterior source per collocation point by rotating the chord
/// between its neighbours outward:
/// `s_k = x_k + (r_k/2)·(Δy, −Δx)` with `(Δx, Δy) = x_{k+1} − x_{k−1}` and
/// `r_k = (R_k − 1)/sin(2π/n)`.
pub fn amano_sources(poly: &Polygon, collocation: &[Point], rule: &SourceRule) -> Result<Vec<Point>> {
    let n = collocation.len();
    if n < 3 {
        return Err(Error::Invalid("need at least 3 collocation points".into()));
    }
    let sin = (2.0 * std::f64::consts::PI / n as f64).sin();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let x = collocation[k];
        let next = collocation[(k + 1) % n];
        let prev = collocation[(k + n - 1) % n];
        let big_r = rule.factor(x);
        if !(big_r > 1.0) {
            return Err(Error::Invalid(format!("source factor R must exceed 1, got {big_r}")));
        }
        let r = (big_r - 1.0) / sin;
        let (dx, dy) = (next.x - prev.x, next.y - prev.y);
        let s = Point::new(x.x + 0.5 * r * dy, x.y - 0.5 * r * dx);
        if poly.locate(s) != Location::Outside {
            return Err(Error::Placement(format!(
                "source {k} at ({}, {}) for collocation point ({}, {}) is not outside the domain",
                s.x, s.y, x.x, x.y
            )));
        }
        out.push(s);
    }
    Ok(out)
}

/// Collocation points on the boundary paired with exterior sources.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    collocation: Vec<Point>,
    sources: Vec<Point>,
}

impl PointSet {
    pub fn new(poly: &Polygon, collocation: Vec<Point>, sources: Vec<Point>) -> Result<Self> {
        if collocation.len() != sources.len() {
            return Err(Error::Invalid("collocation and source counts differ".into()));
        }
        let tol = 1e-12 * poly.diameter();
        if let Some(p) = collocation.iter().find(|p| poly.distance_to_boundary(**p) > tol) {
            return Err(Error::Geometry(format!("collocation point {p:?} is not on the boundary")));
        }
        if let Some(s) = sources.iter().find(|s| poly.locate(**s) != Location::Outside) {
            return Err(Error::Placement(format!("source {s:?} is not outside the domain")));
        }
        Ok(PointSet { collocation, sources })
    }

    /// Boundary discretization followed by Amano source placement.
    pub fn amano(poly: &Polygon, n: usize, refine: Option<&CornerRefinement>, rule: &SourceRule) -> Result<Self> {
        let collocation = discretize_boundary(poly, n, refine)?;
        let sources = amano_sources(poly, &collocation, rule)?;
        PointSet::new(poly, collocation, sources)
    }

    pub fn collocation(&self) -> &[Point] {
        &self.collocation
    }

    pub fn sources(&self) -> &[Point] {
        &self.sources
    }

    pub fn len(&self) -> usize {
        self.collocation.len()
    }

    pub fn is_empty(&self) -> bool {
        self.collocation.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Polygon {
        Polygon::rectangle(-0.5, -0.5, 0.5, 0.5).unwrap()
    }

    #[test]
    fn four_points_on_square_are_edge_midpoints() {
        let pts = discretize_boundary(&square(), 4, None).unwrap();
        let expect = [(0.0, -0.5), (0.5, 0.0), (0.0, 0.5), (-0.5, 0.0)];
        for (p, e) in pts.iter().zip(expect) {
            assert!((p.x - e.0).abs() < 1e-15 && (p.y - e.1).abs() < 1e-15, "{p:?}");
        }
    }

    #[test]
    fn sixty_nine_points_lie_on_boundary() {
        let sq = square();
        let pts = discretize_boundary(&sq, 69, None).unwrap();
        assert_eq!(pts.len(), 69);
        for p in &pts {
            assert!(sq.distance_to_boundary(*p) <= 1e-12);
            assert!(sq.vertex_index(*p, 1e-9).is_none());
        }
    }

    #[test]
    fn graded_spacing_is_finer_near_corner() {
        let l = Polygon::l_shape();
        let r = CornerRefinement::new(vec![Point::new(0.0, 0.0)]);
        let pts = discretize_boundary(&l, 69, Some(&r)).unwrap();
        assert_eq!(pts.len(), 69);
        let origin = Point::new(0.0, 0.0);
        let mut near = f64::INFINITY;
        let mut far: f64 = 0.0;
        for i in 0..pts.len() {
            let gap = pts[i].dist(pts[(i + 1) % pts.len()]);
            if pts[i].dist(origin) < 0.1 {
                near = near.min(gap);
            }
            if pts[i].dist(origin) > 1.0 {
                far = far.max(gap);
            }
        }
        assert!(near < 0.5 * far, "near {near} far {far}");
        for p in &pts {
            assert!(l.distance_to_boundary(*p) <= 1e-12);
        }
    }

    #[test]
    fn straight_edge_offset_is_half_chord() {
        let sq = Polygon::rectangle(0.0, 0.0, 4.0, 4.0).unwrap();
        let n = 16;
        let pts = discretize_boundary(&sq, n, None).unwrap();
        let rule = SourceRule::Uniform(1.0 + (2.0 * std::f64::consts::PI / n as f64).sin());
        let src = amano_sources(&sq, &pts, &rule).unwrap();
        // Point 1 has both neighbours on the bottom edge: chord length 2.
        assert!((src[1].x - pts[1].x).abs() < 1e-12);
        assert!((src[1].y - (pts[1].y - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn square_sources_are_exterior() {
        let ps = PointSet::amano(&square(), 69, None, &SourceRule::Uniform(1.2)).unwrap();
        for s in ps.sources() {
            assert_eq!(square().locate(*s), Location::Outside);
        }
    }

    #[test]
    fn l_shape_rule() {
        let rule = SourceRule::NearCorner { corner: Point::new(0.0, 0.0), radius: 0.1, near: 1.05, far: 1.2 };
        assert_eq!(rule.factor(Point::new(0.05, 0.0)), 1.05);
        assert_eq!(rule.factor(Point::new(0.0, 0.5)), 1.2);
        let r = CornerRefinement::new(vec![Point::new(0.0, 0.0)]);
        let ps = PointSet::amano(&Polygon::l_shape(), 69, Some(&r), &rule).unwrap();
        assert_eq!(ps.len(), 69);
    }

    #[test]
    fn inward_sources_are_rejected() {
        let sq = square();
        let mut pts = discretize_boundary(&sq, 12, None).unwrap();
        pts.reverse();
        assert!(matches!(amano_sources(&sq, &pts, &SourceRule::Uniform(1.2)), Err(Error::Placement(_))));
    }
}
