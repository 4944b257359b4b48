//! Taylor models of `Σ w_i log|x − s_i|` on patches far from every source.
//!
//! With `x = p0 + ζ`, `z_i = p0 − s_i` and `ζ = α e1 + β e2` (complex
//! notation), `log|z_i + ζ| = log|z_i| + Re Σ_p (−1)^{p+1}(ζ/z_i)^p/p`. The
//! truncated series is a polynomial of total degree `P` in `(α, β)` and the
//! tail is bounded by `ρ_i^{P+1}/((P+1)(1 − ρ_i))` with
//! `ρ_i ≥ max|ζ|/|z_i|`.

use std::ops::Add;

use super::{Patch, QuadConfig, TriangleIntegrand};
use crate::error::Result;
use crate::expr::SourceExpr;
use crate::fundsol::{inv_two_pi, TestFunction2D};
use crate::geometry::Point;
use crate::interval::{Box2, Interval};
use crate::taylor::{tm_from_expr, Degrees, Substitution, TaylorModel2};

#[derive(Clone, Copy, Debug)]
struct Complex {
    re: Interval,
    im: Interval,
}

impl Complex {
    fn mul(self, o: Complex) -> Complex {
        Complex { re: self.re * o.re - self.im * o.im, im: self.re * o.im + self.im * o.re }
    }
}

/// `∫ f·h` and `∫ f` over a patch, with `h = Σ w_i Γ(s_i, ·)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HarmonicValue {
    pub smooth: Interval,
    pub mass: Interval,
}

impl Add for HarmonicValue {
    type Output = HarmonicValue;

    fn add(self, o: HarmonicValue) -> HarmonicValue {
        HarmonicValue { smooth: self.smooth + o.smooth, mass: self.mass + o.mass }
    }
}

/// Integrand `f·Σ w_i Γ(s_i, ·)` plus the mass of `f`.
pub struct HarmonicIntegrand<'a> {
    f: &'a SourceExpr,
    sources: Vec<(Point, f64)>,
    degrees: Degrees,
    order: usize,
    max_ratio: f64,
    /// `i! j! / (i + j + 2)!`, the integral of `β^i α^j` over the reference triangle.
    moments: Vec<Vec<Interval>>,
}

impl<'a> HarmonicIntegrand<'a> {
    /// Uses the exterior sources of `tf`, plus its interior source if
    /// `include_interior` is set.
    pub fn new(f: &'a SourceExpr, tf: &TestFunction2D, include_interior: bool, cfg: &QuadConfig) -> Result<Self> {
        let mut sources: Vec<(Point, f64)> = tf.sources.iter().copied().zip(tf.coeffs.iter().copied()).collect();
        if include_interior {
            sources.push((tf.s_int, tf.a_int));
        }
        let degrees = cfg.tm_degrees;
        let mut moments = vec![vec![Interval::ZERO; degrees.u + 1]; degrees.k + 1];
        for (i, row) in moments.iter_mut().enumerate() {
            for (j, m) in row.iter_mut().enumerate() {
                // Π_{l=1}^{i} l / Π_{l=j+1}^{i+j+2} l
                let mut num = Interval::ONE;
                for l in 1..=i {
                    num = num * l as f64;
                }
                let mut den = Interval::ONE;
                for l in (j + 1)..=(i + j + 2) {
                    den = den * l as f64;
                }
                *m = num.try_div(den)?;
            }
        }
        Ok(HarmonicIntegrand {
            f,
            sources,
            degrees,
            order: degrees.u.min(degrees.k),
            max_ratio: cfg.max_ratio,
            moments,
        })
    }

    fn integrate_poly(&self, tm: &TaylorModel2, jac: Interval) -> Interval {
        let mut acc = Interval::ZERO;
        for (i, row) in self.moments.iter().enumerate() {
            for (j, m) in row.iter().enumerate() {
                let c = tm.coeff(i, j);
                if !c.is_zero() {
                    acc = acc + c * *m;
                }
            }
        }
        acc * jac
    }

    /// Taylor model of `Σ w_i log|x − s_i|` on the patch, or `None` if a
    /// source is too close.
    fn log_sum(&self, o: [Interval; 2], e1: [Interval; 2], e2: [Interval; 2], bx: Box2) -> Result<Option<TaylorModel2>> {
        let p = self.order;
        let size = (e1[0].sqr() + e1[1].sqr()).max(e2[0].sqr() + e2[1].sqr()).sqrt()?;
        let mut constant = Interval::ZERO;
        let mut tail = 0.0f64;
        let mut b = vec![Complex { re: Interval::ZERO, im: Interval::ZERO }; p + 1];
        for &(s, w) in &self.sources {
            let z = [o[0] - s.x, o[1] - s.y];
            let r2 = z[0].sqr() + z[1].sqr();
            if r2.lo() <= 0.0 {
                return Ok(None);
            }
            let rho = size.try_div(r2.sqrt()?)?.hi();
            if rho > self.max_ratio {
                return Ok(None);
            }
            constant = constant + r2.log()?.scale_exact(0.5) * w;
            let rho_i = Interval::point(rho);
            let t = (rho_i.powi(p as i32 + 1)? * w.abs())
                .try_div(Interval::point((p + 1) as f64) * (Interval::ONE - rho_i))?;
            tail = crate::interval::add_up(tail, t.hi());
            let q = Complex { re: z[0].try_div(r2)?, im: -(z[1].try_div(r2)?) };
            let mut qp = q;
            for (k, bk) in b.iter_mut().enumerate().skip(1) {
                let c = Interval::point(if k % 2 == 1 { w } else { -w }).try_div(Interval::point(k as f64))?;
                bk.re = bk.re + c * qp.re;
                bk.im = bk.im + c * qp.im;
                qp = qp.mul(q);
            }
        }
        let alpha = TaylorModel2::var_u(bx, self.degrees)?;
        let beta = TaylorModel2::var_k(bx, self.degrees)?;
        let x = alpha.scale(e1[0]).add(&beta.scale(e2[0]))?;
        let y = alpha.scale(e1[1]).add(&beta.scale(e2[1]))?;
        let mut acc = TaylorModel2::constant(constant + Interval::symmetric(tail), bx, self.degrees)?;
        let (mut zr, mut zi) = (x.clone(), y.clone());
        for (k, bk) in b.iter().enumerate().skip(1) {
            acc = acc.add(&zr.scale(bk.re))?.sub(&zi.scale(bk.im))?;
            if k < p {
                let nr = zr.mul(&x)?.sub(&zi.mul(&y)?)?;
                let ni = zr.mul(&y)?.add(&zi.mul(&x)?)?;
                zr = nr;
                zi = ni;
            }
        }
        Ok(Some(acc))
    }
}

impl TriangleIntegrand for HarmonicIntegrand<'_> {
    type Out = HarmonicValue;

    fn zero(&self) -> HarmonicValue {
        HarmonicValue { smooth: Interval::ZERO, mass: Interval::ZERO }
    }

    fn integrate(&self, patch: &Patch, _last: bool) -> Result<Option<HarmonicValue>> {
        let o = patch.origin();
        let (e1, e2) = patch.legs();
        let jac = patch.jacobian();
        let bx = Box2::new(Interval::raw(0.0, 1.0), Interval::raw(0.0, 1.0));
        let logs = if self.sources.is_empty() {
            TaylorModel2::constant(Interval::ZERO, bx, self.degrees)?
        } else {
            match self.log_sum(o, e1, e2, bx)? {
                Some(t) => t,
                None => return Ok(None),
            }
        };
        let h = logs.scale(-inv_two_pi());
        let half = Interval::point(0.5);
        let value = match self.f.constant_value() {
            Some(c) => HarmonicValue { smooth: self.integrate_poly(&h, jac) * c, mass: jac * half * c },
            None => {
                let sub = Substitution::Affine { o, e_u: e1, e_k: e2 };
                let ft = tm_from_expr(self.f, &sub, bx, self.degrees)?;
                HarmonicValue { smooth: self.integrate_poly(&ft.mul(&h)?, jac), mass: self.integrate_poly(&ft, jac) }
            }
        };
        Ok(Some(value))
    }
}
