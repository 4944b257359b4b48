//! Shared fixtures for the benchmarks.

use greenrep::{Point, Polygon, SourceExpr, Triangle};

pub fn square() -> Polygon {
    Polygon::rectangle(-0.5, -0.5, 0.5, 0.5).expect("valid rectangle")
}

/// Triangle with vertices `(0, 0)`, `(1, 0)`, `(1, 1)`, singular at the origin.
pub fn canonical_triangle() -> Triangle {
    Triangle::new(Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0), Some(0)).expect("valid triangle")
}

pub fn expr(text: &str) -> SourceExpr {
    text.parse().expect("valid expression")
}
