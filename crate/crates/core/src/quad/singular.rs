use super::{coeff_times_weight, log_moment, QuadConfig};
use crate::error::{Error, Result};
use crate::expr::SourceExpr;
use crate::geometry::{Point, Triangle};
use crate::interval::{Box2, Interval};
use crate::taylor::{tm_from_expr, Substitution, TaylorModel2};

/// Ray coordinates of a triangle `P Q R` with apex `P`:
/// `x = P + u·n + k·u·t` for `0 < u < a`, `k_lo < k < k_hi`, where `t` is
/// the unit direction of `QR` and `n` the unit normal pointing from `P`
/// towards `QR`. Then `|x − P|² = u²(1 + k²)` and `dx dy = u du dk`.
#[derive(Clone, Copy, Debug)]
pub struct RayFrame {
    pub p: Point,
    pub n: [Interval; 2],
    pub t: [Interval; 2],
    /// Distance from `P` to the line `QR`.
    pub a: Interval,
    pub k_lo: Interval,
    pub k_hi: Interval,
}

fn diff(a: Point, b: Point) -> [Interval; 2] {
    [Interval::point(a.x) - b.x, Interval::point(a.y) - b.y]
}

fn dot(a: [Interval; 2], b: [Interval; 2]) -> Interval {
    a[0] * b[0] + a[1] * b[1]
}

impl RayFrame {
    pub fn new(tri: &Triangle) -> Result<Self> {
        let tri = tri.singular_first();
        let [p, q, r] = tri.v;
        let e = diff(r, q);
        let len = (e[0].sqr() + e[1].sqr()).sqrt()?;
        let t = [e[0].try_div(len)?, e[1].try_div(len)?];
        let n = [t[1], -t[0]];
        let qp = diff(q, p);
        let rp = diff(r, p);
        let a = dot(qp, n);
        if a.lo() <= 0.0 {
            return Err(Error::Geometry(format!("triangle {:?} is too thin for ray coordinates", tri.v)));
        }
        Ok(RayFrame { p, n, t, a, k_lo: dot(qp, t).try_div(a)?, k_hi: dot(rp, t).try_div(a)? })
    }

    fn substitution(&self) -> Substitution {
        Substitution::Frame { p: [Interval::point(self.p.x), Interval::point(self.p.y)], n: self.n, t: self.t }
    }
}

/// Splits `[lo, hi]` (interval endpoints) into pieces of width at most `w`
/// with exact interior breakpoints.
fn chunks(lo: Interval, hi: Interval, w: f64) -> Vec<(Interval, Interval)> {
    let span = hi.hi() - lo.lo();
    let n = ((span / w).ceil() as usize).max(1);
    let mut pts = Vec::with_capacity(n + 1);
    pts.push(lo);
    for i in 1..n {
        let x = lo.lo() + span * (i as f64 / n as f64);
        if x > lo.hi() && x < hi.lo() {
            pts.push(Interval::point(x));
        }
    }
    pts.push(hi);
    pts.windows(2).map(|w| (w[0], w[1])).collect()
}

/// `∫_{lo}^{hi} (x − x₀)^i dx` for `i = 0..=deg` with `x₀ = lo.lo()`.
fn offset_moments(lo: Interval, hi: Interval, deg: usize) -> Vec<Interval> {
    let x0 = lo.lo();
    let dlo = (lo - x0).max(Interval::ZERO);
    let dhi = hi - x0;
    let (mut plo, mut phi) = (dlo, dhi);
    (0..=deg)
        .map(|i| {
            let m = (phi - plo).try_div(Interval::point((i + 1) as f64)).expect("nonzero divisor");
            plo = plo * dlo;
            phi = phi * dhi;
            m
        })
        .collect()
}

fn chunk_box(u: (Interval, Interval), k: (Interval, Interval)) -> Result<Box2> {
    Ok(Box2::new(Interval::new(u.0.lo(), u.1.hi())?, Interval::new(k.0.lo(), k.1.hi())?))
}

/// `∫_{ua}^{ub} (u − ua)^j u log u du` for `j = 0..=deg`, with `ua` exact.
fn shifted_log_moments(ua: f64, ub: Interval, deg: usize) -> Result<Vec<Interval>> {
    if ua == 0.0 {
        return (0..=deg).map(|j| log_moment(ub, j)).collect();
    }
    let a = Interval::point(ua);
    let diffs: Vec<Interval> =
        (0..=deg).map(|m| Ok(log_moment(ub, m)? - log_moment(a, m)?)).collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(deg + 1);
    for j in 0..=deg {
        // Σ_l C(j, l) (−ua)^{j−l} ∫ u^{l+1} log u
        let mut acc = Interval::ZERO;
        let mut binom = Interval::ONE;
        for l in 0..=j {
            let pw = (-a).powi((j - l) as i32)?;
            acc = acc + binom * pw * diffs[l];
            binom = (binom * ((j - l) as f64)).try_div(Interval::point((l + 1) as f64))?;
        }
        out.push(acc);
    }
    Ok(out)
}

/// `∫|g|` for `g = (u − ua)^j u log u` on `[ua, ub]`, given `∫g`.
fn abs_weight(int_g: Interval, ua: f64, ub: Interval, j: usize) -> Result<Interval> {
    let mag = Interval::point(int_g.mag());
    if ub.hi() <= 1.0 || ua >= 1.0 {
        return Ok(mag);
    }
    // `ub` straddles 1: add twice a bound on the part beyond 1.
    let h = Interval::point(ub.hi());
    let beyond = (h - ua).powi(j as i32)? * h * h.log()? * (h - 1.0);
    Ok(mag + Interval::new(0.0, beyond.hi())?.scale_exact(2.0))
}

/// `∬_T f(x) log|x − P|² dx` for a triangle whose singular vertex is `P`.
///
/// In ray coordinates the integrand is `f·u·(2 log u + log(1 + k²))`. The
/// `2u log u` factor is integrated exactly against the Taylor model of `f`
/// and `u log(1 + k²)` is expanded together with `f`.
pub fn singular_triangle(f: &SourceExpr, tri: &Triangle, cfg: &QuadConfig) -> Result<Interval> {
    let fr = RayFrame::new(tri)?;
    let sub = fr.substitution();
    let deg = cfg.tm_degrees;
    let constant = f.constant_value();
    let u_pieces = match constant {
        Some(_) => vec![(Interval::ZERO, fr.a)],
        None => chunks(Interval::ZERO, fr.a, cfg.cell),
    };
    let mut acc = Interval::ZERO;
    for uc in split_at_one(u_pieces) {
        let lm = shifted_log_moments(uc.0.lo(), uc.1, deg.u)?;
        let um = offset_moments(uc.0, uc.1, deg.u);
        for kc in chunks(fr.k_lo, fr.k_hi, cfg.cell) {
            let bx = chunk_box(uc, kc)?;
            let k = TaylorModel2::var_k(bx, deg)?;
            let u = TaylorModel2::var_u(bx, deg)?;
            let weight = k.sqr()?.add_const(Interval::ONE).log()?.mul(&u)?;
            let ft = match constant {
                Some(c) => TaylorModel2::constant(c, bx, deg)?,
                None => tm_from_expr(f, &sub, bx, deg)?,
            };
            let g = match constant {
                Some(c) => weight.scale(c),
                None => ft.mul(&weight)?,
            };
            let km = offset_moments(kc.0, kc.1, deg.k);
            for (i, kmi) in km.iter().enumerate() {
                for (j, umj) in um.iter().enumerate() {
                    let c = g.coeff(i, j);
                    if !c.is_zero() {
                        acc = acc + c * (*kmi * *umj);
                    }
                    let c = ft.coeff(i, j);
                    if !c.is_zero() {
                        let abs = abs_weight(lm[j], uc.0.lo(), uc.1, j)?;
                        let w = coeff_times_weight(c, *kmi * lm[j], *kmi * abs);
                        acc = acc + w.scale_exact(2.0);
                    }
                }
            }
        }
    }
    Ok(acc)
}

/// Inserts a breakpoint at `u = 1` where `u log u` changes sign.
fn split_at_one(pieces: Vec<(Interval, Interval)>) -> Vec<(Interval, Interval)> {
    let mut out = Vec::with_capacity(pieces.len() + 1);
    for (lo, hi) in pieces {
        if lo.hi() < 1.0 && hi.lo() > 1.0 {
            out.push((lo, Interval::ONE));
            out.push((Interval::ONE, hi));
        } else {
            out.push((lo, hi));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn canonical() -> Triangle {
        Triangle::new(Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0), Some(0)).unwrap()
    }

    #[test]
    fn frame_of_canonical_triangle() {
        let fr = RayFrame::new(&canonical()).unwrap();
        assert!(fr.a.contains(1.0) && fr.a.width() < 1e-15);
        assert!(fr.k_lo.contains(0.0) && fr.k_hi.contains(1.0));
    }

    #[test]
    fn canonical_triangle_oracle() {
        let v = singular_triangle(&SourceExpr::constant(1.0), &canonical(), &QuadConfig::default()).unwrap();
        // log 2 / 2 + π/4 − 3/2
        let exact = std::f64::consts::LN_2 / 2.0 + std::f64::consts::FRAC_PI_4 - 1.5;
        assert!(v.contains(exact), "{v:?} {exact}");
        assert!(v.width() <= 1e-8, "{}", v.width());
    }

    #[test]
    fn apex_position_does_not_matter() {
        let t = Triangle::new(Point::new(1.0, 0.0), Point::new(1.0, 1.0), Point::new(0.0, 0.0), Some(2)).unwrap();
        let v = singular_triangle(&SourceExpr::constant(1.0), &t, &QuadConfig::default()).unwrap();
        assert!(v.contains(std::f64::consts::LN_2 / 2.0 + std::f64::consts::FRAC_PI_4 - 1.5));
    }

    #[test]
    fn polynomial_source_against_midpoint_rule() {
        let f: SourceExpr = "x*x + 2*y - x*y".parse().unwrap();
        let t = Triangle::new(Point::new(0.1, 0.2), Point::new(0.9, -0.3), Point::new(0.6, 1.1), Some(0)).unwrap();
        let v = singular_triangle(&f, &t, &QuadConfig::default()).unwrap();
        assert!(v.width() < 1e-8, "{v:?}");
        // Duffy-type midpoint rule: x = P + s(Q−P) + s·w(R−Q), jacobian 2|T| s.
        let [p, q, r] = t.v;
        let area2 = 2.0 * t.area();
        let n = 2000;
        let h = 1.0 / n as f64;
        let mut acc = 0.0;
        for a in 0..n {
            let s = (a as f64 + 0.5) * h;
            for b in 0..n {
                let w = (b as f64 + 0.5) * h;
                let x = p.x + s * (q.x - p.x) + s * w * (r.x - q.x);
                let y = p.y + s * (q.y - p.y) + s * w * (r.y - q.y);
                let fv = x * x + 2.0 * y - x * y;
                let l = ((x - p.x).powi(2) + (y - p.y).powi(2)).ln();
                acc += fv * l * area2 * s * h * h;
            }
        }
        assert!((v.mid() - acc).abs() < 1e-4, "{v:?} {acc}");
    }

    #[test]
    fn smooth_transcendental_source() {
        let f: SourceExpr = "sin(3*x) * exp(y)".parse().unwrap();
        let v = singular_triangle(&f, &canonical(), &QuadConfig::default()).unwrap();
        assert!(v.width() < 1e-8, "{v:?}");
    }
}
