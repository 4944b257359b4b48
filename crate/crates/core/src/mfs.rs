//! Method of fundamental solutions for the harmonic part of a test function,
//! followed by rigorous bounds of the candidate on the boundary.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fundsol::{Kernel, TestFunction2D};
use crate::geometry::{CornerRefinement, Point, PointSet, Polygon, SourceRule};
use crate::interval::{subdivide_min_max, Interval, SearchOptions, WithDerivative};

#[derive(Clone, Debug, PartialEq)]
pub struct MfsConfig {
    /// Number of collocation points (and sources).
    pub n: usize,
    /// Dilation factor away from the refined corner.
    pub r_far: f64,
    /// Dilation factor near the refined corner.
    pub r_near: f64,
    /// Corner that receives denser points and `r_near` sources.
    pub corner: Option<Point>,
    /// Max-norm radius around `corner` where `r_near` applies.
    pub near_radius: f64,
    pub ratio: f64,
    pub min_spacing_factor: f64,
    /// Boundary extremum search options.
    pub search: SearchOptions,
}

impl Default for MfsConfig {
    fn default() -> Self {
        MfsConfig {
            n: 69,
            r_far: 1.2,
            r_near: 1.05,
            corner: None,
            near_radius: 0.1,
            ratio: 0.7,
            min_spacing_factor: 0.02,
            search: SearchOptions::default(),
        }
    }
}

impl MfsConfig {
    pub fn point_set(&self, poly: &Polygon) -> Result<PointSet> {
        match self.corner {
            None => PointSet::amano(poly, self.n, None, &SourceRule::Uniform(self.r_far)),
            Some(c) => {
                let refine = CornerRefinement {
                    corners: vec![c],
                    ratio: self.ratio,
                    min_spacing_factor: self.min_spacing_factor,
                };
                let rule = SourceRule::NearCorner {
                    corner: c,
                    radius: self.near_radius,
                    near: self.r_near,
                    far: self.r_far,
                };
                PointSet::amano(poly, self.n, Some(&refine), &rule)
            }
        }
    }
}

/// Floating-point diagnostics of the collocation solve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveReport {
    /// Maximum absolute collocation residual.
    pub residual: f64,
    /// 2-norm condition number estimate.
    pub condition: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MfsSolution {
    /// Candidate test function with zero shift.
    pub tf0: TestFunction2D,
    pub report: SolveReport,
    /// Contains the boundary infimum of `tf0`.
    pub m: Interval,
    /// Contains the boundary supremum of `tf0`.
    pub big_m: Interval,
    /// Whether the extremum searches reached their tolerance.
    pub converged: bool,
}

fn gamma_f64(kernel: Kernel, s: Point, x: Point) -> f64 {
    match kernel.dim() {
        1 => -(x.x - s.x).abs() / 2.0,
        _ => -((x.x - s.x).hypot(x.y - s.y)).ln() / (2.0 * std::f64::consts::PI),
    }
}

/// Solves `Σ_j a_j Γ(s_j, x_i) = −Γ(s_int, x_i)` by LU with partial pivoting.
pub fn solve_coefficients(
    collocation: &[Point],
    sources: &[Point],
    s_int: Point,
    kernel: Kernel,
) -> Result<(Vec<f64>, SolveReport)> {
    let n = collocation.len();
    if n == 0 || sources.len() != n {
        return Err(Error::Invalid(format!(
            "collocation system must be square and nonempty, got {n}×{}",
            sources.len()
        )));
    }
    let a = DMatrix::from_fn(n, n, |i, j| gamma_f64(kernel, sources[j], collocation[i]));
    let b = DVector::from_fn(n, |i, _| -gamma_f64(kernel, s_int, collocation[i]));
    if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
        return Err(Error::Solve {
            message: "collocation matrix has non-finite entries (a source coincides with a collocation point)".into(),
            condition: f64::INFINITY,
        });
    }
    let sv = a.clone().singular_values();
    let smax = sv.max();
    let smin = sv.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let singular = |condition: f64| Error::Solve { message: "collocation matrix is numerically singular".into(), condition };
    if !(condition < 1e15) {
        return Err(singular(condition));
    }
    let x = a.clone().lu().solve(&b).ok_or_else(|| singular(condition))?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(singular(condition));
    }
    let residual = (&a * &x - &b).amax();
    Ok((x.iter().copied().collect(), SolveReport { residual, condition }))
}

/// Encloses the infimum and supremum of `tf0` over the polygon boundary.
///
/// Returns `(m, M, converged)`.
pub fn boundary_extrema(tf0: &TestFunction2D, poly: &Polygon, opts: &SearchOptions) -> Result<(Interval, Interval, bool)> {
    let edges: Vec<(Point, Point)> = poly.edges().collect();
    let per_edge: Vec<Result<_>> = edges
        .par_iter()
        .map(|&(p, q)| {
            let d = Point::new(q.x - p.x, q.y - p.y);
            let g = WithDerivative(
                |t: Interval| tf0.on_segment(p, d, t),
                |t: Interval| tf0.on_segment_derivative(p, d, t),
            );
            subdivide_min_max(&g, Interval::raw(0.0, 1.0), opts)
        })
        .collect();
    let mut m: Option<Interval> = None;
    let mut big_m: Option<Interval> = None;
    let mut converged = true;
    for e in per_edge {
        let e = e?;
        converged &= e.converged;
        m = Some(m.map_or(e.min, |a| a.min(e.min)));
        big_m = Some(big_m.map_or(e.max, |a| a.max(e.max)));
    }
    Ok((m.expect("polygon has edges"), big_m.expect("polygon has edges"), converged))
}

/// `(φ̄, φ̲)`: the candidate shifted by `−m` (nonnegative on the boundary)
/// and by `−M` (nonpositive on the boundary), using the outward endpoints.
pub fn make_enclosure_pair(sol: &MfsSolution) -> (TestFunction2D, TestFunction2D) {
    let upper = sol.tf0.with_shift(Interval::point(-sol.m.lo()));
    let lower = sol.tf0.with_shift(Interval::point(-sol.big_m.hi()));
    (upper, lower)
}

/// Full candidate construction for one evaluation point with `a_int = 1`.
pub fn build_test_function(poly: &Polygon, s_int: Point, cfg: &MfsConfig) -> Result<MfsSolution> {
    let ps = cfg.point_set(poly)?;
    let kernel = Kernel::new(2)?;
    let (coeffs, report) = solve_coefficients(ps.collocation(), ps.sources(), s_int, kernel)?;
    let tf0 = TestFunction2D::new(s_int, 1.0, ps.sources().to_vec(), coeffs, Interval::ZERO)?;
    tf0.validate_against(poly)?;
    let (m, big_m, converged) = boundary_extrema(&tf0, poly, &cfg.search)?;
    Ok(MfsSolution { tf0, report, m, big_m, converged })
}
