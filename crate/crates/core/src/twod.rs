//! Pointwise enclosures of the solution of `−Δu = f`, `u = 0` on `∂Ω`, for
//! a polygon `Ω`.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expr::SourceExpr;
use crate::geometry::{triangulate, triangulate_from, Location, Point, Polygon};
use crate::interval::Interval;
use crate::mfs::{build_test_function, make_enclosure_pair, MfsConfig};
use crate::quad::{pairing_parts_on, Patch, QuadConfig};

/// Certified sign of a source term over the domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignVerdict {
    Nonnegative,
    Nonpositive,
    /// Both signs are attained at interior points.
    Mixed,
    Undecided,
}

#[derive(Default)]
struct SignState {
    all_nonneg: bool,
    all_nonpos: bool,
    witness_pos: bool,
    witness_neg: bool,
}

fn centroid(p: &Patch) -> Option<[Interval; 2]> {
    let o = p.origin();
    let (e1, e2) = p.legs();
    let third = Interval::ONE.try_div(Interval::point(3.0)).ok()?;
    let pt = |d: usize| Interval::point(((e1[d] + e2[d]) * third + o[d]).mid());
    Some([pt(0), pt(1)])
}

fn sign_patch(f: &SourceExpr, p: &Patch, min_size: f64, st: &mut SignState) {
    if st.witness_pos && st.witness_neg {
        st.all_nonneg = false;
        st.all_nonpos = false;
        return;
    }
    let hull = p.hull();
    let range = f.eval_interval(hull[0], hull[1]).ok();
    let nonneg = range.is_some_and(|r| r.lo() >= 0.0);
    let nonpos = range.is_some_and(|r| r.hi() <= 0.0);
    if nonneg || nonpos {
        st.all_nonneg &= nonneg;
        st.all_nonpos &= nonpos;
        if let Some(r) = range {
            st.witness_pos |= r.lo() > 0.0;
            st.witness_neg |= r.hi() < 0.0;
        }
        return;
    }
    if let Some(c) = centroid(p) {
        if let Ok(v) = f.eval_interval(c[0], c[1]) {
            st.witness_pos |= v.lo() > 0.0;
            st.witness_neg |= v.hi() < 0.0;
        }
    }
    let size = hull[0].width().max(hull[1].width());
    if size <= min_size {
        st.all_nonneg = false;
        st.all_nonpos = false;
        return;
    }
    for c in p.children() {
        sign_patch(f, &c, min_size, st);
    }
}

/// Decides the sign of `f` on `poly` by interval bounds over a refined
/// triangulation; refinement stops at patches of size `tol`.
pub fn certify_sign(f: &SourceExpr, poly: &Polygon, tol: f64) -> Result<SignVerdict> {
    let mut st = SignState { all_nonneg: true, all_nonpos: true, ..Default::default() };
    for tri in triangulate(poly)? {
        for p in Patch::tiling(tri.v, 2) {
            sign_patch(f, &p, tol, &mut st);
        }
    }
    Ok(if st.all_nonneg {
        SignVerdict::Nonnegative
    } else if st.all_nonpos {
        SignVerdict::Nonpositive
    } else if st.witness_pos && st.witness_neg {
        SignVerdict::Mixed
    } else {
        SignVerdict::Undecided
    })
}

/// Refinement floor used when certifying signs.
pub const SIGN_TOL: f64 = 1e-3;

/// `f = f_plus − f_minus` with both parts certified nonnegative.
#[derive(Clone, Debug, PartialEq)]
pub struct SignedSplit {
    pub f_plus: SourceExpr,
    pub f_minus: SourceExpr,
}

impl SignedSplit {
    /// Verifies nonnegativity of both parts on `poly` and the identity
    /// `f = f_plus − f_minus` at sample points.
    pub fn new(f: &SourceExpr, f_plus: SourceExpr, f_minus: SourceExpr, poly: &Polygon) -> Result<Self> {
        for (name, part) in [("plus", &f_plus), ("minus", &f_minus)] {
            let v = certify_sign(part, poly, SIGN_TOL)?;
            if v != SignVerdict::Nonnegative {
                return Err(Error::Invalid(format!("split part `{name}` = {part} is not certified nonnegative ({v:?})")));
            }
        }
        let residual = f.minus(&f_plus.minus(&f_minus));
        let (lo, hi) = poly.bbox();
        let n = 12;
        for i in 0..=n {
            for j in 0..=n {
                let p = Point::new(lo.x + (hi.x - lo.x) * i as f64 / n as f64, lo.y + (hi.y - lo.y) * j as f64 / n as f64);
                if poly.locate(p) == Location::Outside {
                    continue;
                }
                let r = residual.eval_interval(Interval::point(p.x), Interval::point(p.y))?;
                let scale = f.eval_interval(Interval::point(p.x), Interval::point(p.y))?.mag().max(1.0);
                if !(r.inflate(1e-12 * scale).contains(0.0)) {
                    return Err(Error::Invalid(format!(
                        "split does not reproduce the source at ({}, {}): residual {r:?}",
                        p.x, p.y
                    )));
                }
            }
        }
        Ok(SignedSplit { f_plus, f_minus })
    }

    /// The split `(f, 0)` of a source certified nonnegative.
    pub fn trivial(f: &SourceExpr, poly: &Polygon) -> Result<Self> {
        SignedSplit::new(f, f.clone(), SourceExpr::constant(0.0), poly)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostics {
    pub mfs_residual: f64,
    pub condition: f64,
    /// Enclosure of the boundary infimum of the candidate.
    pub m: Interval,
    /// Enclosure of the boundary supremum of the candidate.
    pub big_m: Interval,
    pub extrema_converged: bool,
    pub triangles: usize,
    pub quad: QuadConfig,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnclosureResult {
    pub s_int: Point,
    pub bound: Interval,
    pub width: f64,
    /// `width / |midpoint|`, infinite for a zero midpoint.
    pub rel_error: f64,
    pub diagnostics: Diagnostics,
}

impl EnclosureResult {
    fn new(s_int: Point, bound: Interval, diagnostics: Diagnostics) -> Self {
        let width = bound.hi() - bound.lo();
        let mid = bound.mid();
        let rel_error = if mid == 0.0 { f64::INFINITY } else { width / mid.abs() };
        EnclosureResult { s_int, bound, width, rel_error, diagnostics }
    }
}

/// Encloses `u(s_int)`.
///
/// A source not certified nonnegative (or nonpositive) needs a
/// [`SignedSplit`]; the parts are enclosed separately and subtracted.
pub fn enclose_point(
    poly: &Polygon,
    f: &SourceExpr,
    split: Option<&SignedSplit>,
    s_int: Point,
    mfs_cfg: &MfsConfig,
    quad_cfg: &QuadConfig,
) -> Result<EnclosureResult> {
    match poly.locate(s_int) {
        Location::Inside => {}
        _ => return Err(Error::Geometry(format!("evaluation point ({}, {}) is not interior", s_int.x, s_int.y))),
    }
    let parts: Vec<(SourceExpr, f64)> = match split {
        Some(s) => vec![(s.f_plus.clone(), 1.0), (s.f_minus.clone(), -1.0)],
        None => match certify_sign(f, poly, SIGN_TOL)? {
            SignVerdict::Nonnegative => vec![(f.clone(), 1.0)],
            SignVerdict::Nonpositive => vec![(f.negated(), -1.0)],
            SignVerdict::Mixed => return Err(Error::NeedsSplit("sign-changing".into())),
            SignVerdict::Undecided => return Err(Error::NeedsSplit("not certified single-signed".into())),
        },
    };
    let sol = build_test_function(poly, s_int, mfs_cfg)?;
    let (upper_tf, lower_tf) = make_enclosure_pair(&sol);
    let tris = triangulate_from(poly, s_int)?;
    let mut bound = Interval::ZERO;
    for (g, sign) in parts {
        if g.constant_value().is_some_and(|c| c.is_zero()) {
            continue;
        }
        let pp = pairing_parts_on(&g, &sol.tf0, &tris, quad_cfg)?;
        let lo = pp.total(lower_tf.shift).lo();
        let hi = pp.total(upper_tf.shift).hi();
        if lo > hi {
            return Err(Error::Invalid(format!("lower bound {lo} exceeds upper bound {hi}")));
        }
        let part = Interval::new(lo, hi)?;
        bound = if sign > 0.0 { bound + part } else { bound - part };
    }
    let diagnostics = Diagnostics {
        mfs_residual: sol.report.residual,
        condition: sol.report.condition,
        m: sol.m,
        big_m: sol.big_m,
        extrema_converged: sol.converged,
        triangles: tris.len(),
        quad: quad_cfg.clone(),
    };
    Ok(EnclosureResult::new(s_int, bound, diagnostics))
}

/// One row of a batch run.
#[derive(Clone, Debug, PartialEq)]
pub struct BatchRow {
    pub point: Point,
    pub result: Result<EnclosureResult>,
}

/// Independent enclosures at each point, in input order. Failures are
/// recorded per row.
pub fn enclose_batch(
    poly: &Polygon,
    f: &SourceExpr,
    split: Option<&SignedSplit>,
    points: &[Point],
    mfs_cfg: &MfsConfig,
    quad_cfg: &QuadConfig,
) -> Vec<BatchRow> {
    points
        .par_iter()
        .map(|&p| BatchRow { point: p, result: enclose_point(poly, f, split, p, mfs_cfg, quad_cfg) })
        .collect()
}

/// Writes `point_x, point_y, lower, upper, width, rel_error`; failed rows
/// carry `nan`.
pub fn write_batch_csv<W: Write>(rows: &[BatchRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["point_x", "point_y", "lower", "upper", "width", "rel_error"])?;
    for r in rows {
        let (x, y) = (r.point.x.to_string(), r.point.y.to_string());
        match &r.result {
            Ok(e) => {
                let rel = if e.rel_error.is_infinite() { "inf".to_string() } else { e.rel_error.to_string() };
                out.write_record([x, y, e.bound.lo().to_string(), e.bound.hi().to_string(), e.width.to_string(), rel])?;
            }
            Err(_) => {
                let nan = "nan".to_string();
                out.write_record([x, y, nan.clone(), nan.clone(), nan.clone(), nan])?;
            }
        }
    }
    out.flush()?;
    Ok(())
}
