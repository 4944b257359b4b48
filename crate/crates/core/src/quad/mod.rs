//! Verified integration of source terms against test functions.
//!
//! `∫_Ω f φ` is split over a triangulation that has the evaluation point as
//! a vertex. The logarithmic kernel is integrated on the incident triangles
//! in ray coordinates where its singularity factors into closed-form
//! moments; everything else is smooth and integrated with Taylor models on
//! an exact tiling of each triangle.

mod multipole;
mod patch;
mod singular;

pub use multipole::HarmonicIntegrand;
pub use patch::{integrate_triangle, Patch, TriangleIntegrand};
pub use singular::{singular_triangle, RayFrame};

use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::expr::SourceExpr;
use crate::fundsol::{inv_four_pi, TestFunction2D};
use crate::geometry::{triangulate_from, Polygon, Triangle};
use crate::interval::Interval;
use crate::taylor::Degrees;

#[derive(Clone, Debug, PartialEq)]
pub struct QuadConfig {
    pub tm_degrees: Degrees,
    /// Initial uniform subdivision per triangle edge for regular parts.
    pub regular_subdiv: usize,
    /// Target width for adaptive box refinement.
    pub tol: f64,
    /// Width of the `k` chunks for the log-moment part of singular integrals.
    pub k_chunk: f64,
    /// Cell size for the `log(1 + k²)` part of singular integrals.
    pub cell: f64,
    /// Largest admissible patch-size to source-distance ratio for the
    /// multipole expansion.
    pub max_ratio: f64,
    /// Maximum number of adaptive 4-way refinements of a patch.
    pub max_refine: u32,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            tm_degrees: Degrees::new(8, 8),
            regular_subdiv: 16,
            tol: 1e-10,
            k_chunk: 0.25,
            cell: 0.0625,
            max_ratio: 0.25,
            max_refine: 8,
        }
    }
}

impl QuadConfig {
    pub fn validate(&self) -> Result<()> {
        if self.regular_subdiv < 1 {
            return Err(Error::Invalid("regular_subdiv must be at least 1".into()));
        }
        if !(self.tol > 0.0 && self.k_chunk > 0.0 && self.cell > 0.0) {
            return Err(Error::Invalid("quadrature tolerances and cell sizes must be positive".into()));
        }
        if !(self.max_ratio > 0.0 && self.max_ratio < 1.0) {
            return Err(Error::Invalid("max_ratio must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

/// `∫₀^a u^{j+1} log u du = a^{j+2}((j+2) log a − 1)/(j+2)²`.
pub fn log_moment(a: Interval, j: usize) -> Result<Interval> {
    if a.lo() <= 0.0 {
        return Err(domain(format!("log moment needs a positive upper limit, got {a:?}")));
    }
    let m = Interval::point((j + 2) as f64);
    let num = a.powi(j as i32 + 2)? * (m * a.log()? - 1.0);
    num.try_div(m.sqr())
}

/// `∫₀^a u^{j+1} |log u| du`.
pub fn abs_log_moment(a: Interval, j: usize) -> Result<Interval> {
    if a.hi() <= 1.0 {
        return Ok(-log_moment(a, j)?);
    }
    let at_one = log_moment(Interval::ONE, j)?;
    let tail = log_moment(a, j)? - at_one.scale_exact(2.0);
    if a.lo() >= 1.0 {
        Ok(tail)
    } else {
        // a straddles 1: both formulas are valid bounds on their side.
        Ok(tail.hull(-log_moment(a, j)?).max(Interval::ZERO))
    }
}

/// `∫ c(x)·g(x)` for `c(x) ∈ c` pointwise, given `∫g` and `∫|g|`.
pub(crate) fn coeff_times_weight(c: Interval, int_g: Interval, int_abs_g: Interval) -> Interval {
    let mid = Interval::point(c.mid());
    let rad = Interval::symmetric(c.rad());
    mid * int_g + rad * int_abs_g
}

/// Box-bound integration of `g` over `tri`: the triangle is tiled into
/// `regular_subdiv²` congruent pieces, each bounded by `area × g(hull)`,
/// refining pieces whose bound is too wide or undefined.
pub fn regular_triangle<G>(g: G, tri: &Triangle, cfg: &QuadConfig) -> Result<Interval>
where
    G: Fn([Interval; 2]) -> Result<Interval> + Sync,
{
    cfg.validate()?;
    let total = tri.area();
    let integrand = patch::BoxIntegrand { g, tol_density: cfg.tol / total.max(f64::MIN_POSITIVE) };
    integrate_triangle(tri, cfg.regular_subdiv, cfg.max_refine.min(4), &integrand)
}

/// Pieces of `∫_Ω f φ` that do not depend on the shift `C` of `φ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairingParts {
    /// `a_int·∫ f Γ(s_int, ·)` over triangles incident to `s_int`.
    pub kernel: Interval,
    /// `∫ f·(Σ a_i Γ(s_i, ·))` plus `a_int·∫ f Γ(s_int, ·)` over the other triangles.
    pub smooth: Interval,
    /// `∫_Ω f`.
    pub mass: Interval,
}

impl PairingParts {
    /// `∫_Ω f φ` for a test function with shift `shift`.
    pub fn total(&self, shift: Interval) -> Interval {
        self.kernel + self.smooth + shift * self.mass
    }
}

/// Computes [`PairingParts`] on a triangulation adapted to `tf.s_int`.
pub fn pairing_parts_on(f: &SourceExpr, tf: &TestFunction2D, tris: &[Triangle], cfg: &QuadConfig) -> Result<PairingParts> {
    cfg.validate()?;
    let parts: Vec<Result<(Interval, Interval, Interval)>> = tris
        .par_iter()
        .map(|tri| {
            let incident = tri.singular_vertex.is_some();
            let kernel = if incident {
                let s = singular_triangle(f, tri, cfg)?;
                inv_four_pi() * s * (-tf.a_int)
            } else {
                Interval::ZERO
            };
            let integrand = HarmonicIntegrand::new(f, tf, !incident, cfg)?;
            let v = integrate_triangle(tri, cfg.regular_subdiv, cfg.max_refine, &integrand)?;
            Ok((kernel, v.smooth, v.mass))
        })
        .collect();
    let mut out = PairingParts { kernel: Interval::ZERO, smooth: Interval::ZERO, mass: Interval::ZERO };
    for p in parts {
        let (k, s, m) = p?;
        out.kernel = out.kernel + k;
        out.smooth = out.smooth + s;
        out.mass = out.mass + m;
    }
    Ok(out)
}

pub fn pairing_parts(f: &SourceExpr, tf: &TestFunction2D, poly: &Polygon, cfg: &QuadConfig) -> Result<PairingParts> {
    tf.validate_against(poly)?;
    let tris = triangulate_from(poly, tf.s_int)?;
    pairing_parts_on(f, tf, &tris, cfg)
}

/// Encloses `∫_Ω f φ`.
pub fn pair_f_phi(f: &SourceExpr, tf: &TestFunction2D, poly: &Polygon, cfg: &QuadConfig) -> Result<Interval> {
    Ok(pairing_parts(f, tf, poly, cfg)?.total(tf.shift))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;

    fn tri(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> Triangle {
        Triangle::new(Point::new(a.0, a.1), Point::new(b.0, b.1), Point::new(c.0, c.1), None).unwrap()
    }

    #[test]
    fn log_moment_values() {
        assert!(log_moment(Interval::ONE, 0).unwrap().contains(-0.25));
        let m1 = log_moment(Interval::ONE, 1).unwrap();
        assert!(m1.contains(-1.0 / 9.0) || m1.contains_interval(Interval::ONE.try_div(Interval::point(-9.0)).unwrap()));
        let h = log_moment(Interval::point(0.5), 0).unwrap();
        assert!(h.contains(-0.149_143_397_569_993_17));
        assert!(log_moment(Interval::new(0.0, 1.0).unwrap(), 0).is_err());
    }

    #[test]
    fn absolute_moment_against_quadrature() {
        for &(a, j) in &[(0.5, 0usize), (2.0, 0), (2.0, 3), (1.0, 2)] {
            let n = 200_000;
            let h = a / n as f64;
            let num: f64 = (0..n)
                .map(|i| {
                    let u = (i as f64 + 0.5) * h;
                    u.powi(j as i32 + 1) * u.ln().abs() * h
                })
                .sum();
            let v = abs_log_moment(Interval::point(a), j).unwrap();
            assert!((v.mid() - num).abs() < 1e-6, "{a} {j} {v:?} {num}");
        }
    }

    #[test]
    fn regular_area_and_moment() {
        let t = tri((0.0, 0.0), (1.0, 0.0), (0.0, 1.0));
        let cfg = QuadConfig::default();
        let one = regular_triangle(|_| Ok(Interval::ONE), &t, &cfg).unwrap();
        assert!(one.contains(0.5));
        assert!(one.width() < 1e-14);
        let x = regular_triangle(|p: [Interval; 2]| Ok(p[0]), &t, &cfg).unwrap();
        assert!(x.contains(1.0 / 6.0));
    }

    #[test]
    fn regular_kernel_against_oracle() {
        let t = tri((-0.5, -0.5), (0.5, -0.5), (0.5, 0.5));
        let s = Point::new(3.0, 0.0);
        let cfg = QuadConfig::default();
        let v = regular_triangle(|p| crate::fundsol::gamma2(s, p), &t, &cfg).unwrap();
        // Midpoint rule on a fine grid of the unit square's lower triangle.
        let n = 1000;
        let h = 1.0 / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let x = -0.5 + (i as f64 + 0.5) * h;
                let y = -0.5 + (j as f64 + 0.5) * h;
                if y + 0.5 < x + 0.5 {
                    acc += -((x - 3.0).powi(2) + y * y).ln() / (4.0 * std::f64::consts::PI) * h * h;
                }
            }
        }
        assert!(v.contains(acc) || (v.mid() - acc).abs() < 1e-4, "{v:?} {acc}");
        assert!(v.lo() <= acc + 1e-4 && acc - 1e-4 <= v.hi());
    }

    #[test]
    fn singular_only_pairing_on_square() {
        let sq = Polygon::rectangle(-0.5, -0.5, 0.5, 0.5).unwrap();
        let tf = TestFunction2D::singular_only(Point::new(0.0, 0.0));
        let v = pair_f_phi(&SourceExpr::constant(1.0), &tf, &sq, &QuadConfig::default()).unwrap();
        // Eight copies of the canonical triangle scaled by 1/2.
        let canonical = std::f64::consts::LN_2 / 2.0 + std::f64::consts::FRAC_PI_4 - 1.5;
        let exact = -(2.0 * (canonical - std::f64::consts::LN_2)) / (4.0 * std::f64::consts::PI);
        assert!(v.contains(exact), "{v:?} {exact}");
        assert!(v.width() < 1e-10);
    }

    #[test]
    fn shift_enters_through_mass() {
        let sq = Polygon::rectangle(0.0, 0.0, 2.0, 1.0).unwrap();
        let f: SourceExpr = "x + y".parse().unwrap();
        let tf = TestFunction2D::singular_only(Point::new(0.7, 0.4));
        let parts = pairing_parts(&f, &tf, &sq, &QuadConfig::default()).unwrap();
        assert!(parts.mass.contains(3.0) && parts.mass.width() < 1e-12);
        let d = parts.total(Interval::point(1.0)) - parts.total(Interval::ZERO);
        assert!(d.contains(3.0));
    }

    #[test]
    fn triangulation_independence() {
        use crate::geometry::{triangulate_with, TriangulationMode};
        let sq = Polygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap();
        let s = Point::new(0.3, 0.6);
        let tf = TestFunction2D::new(s, 1.0, vec![Point::new(1.6, 0.2), Point::new(-0.5, 1.4)], vec![0.4, -0.2], Interval::ZERO)
            .unwrap();
        let f: SourceExpr = "1 + x*y".parse().unwrap();
        let cfg = QuadConfig::default();
        let a = pairing_parts_on(&f, &tf, &triangulate_with(&sq, s, TriangulationMode::Auto).unwrap(), &cfg).unwrap();
        let b = pairing_parts_on(&f, &tf, &triangulate_with(&sq, s, TriangulationMode::EarClip).unwrap(), &cfg).unwrap();
        assert!(a.total(Interval::ZERO).overlaps(b.total(Interval::ZERO)));
        assert!(a.total(Interval::ZERO).width() < 1e-8);
        assert!(b.total(Interval::ZERO).width() < 1e-7, "{a:?} {b:?}");
    }
}
