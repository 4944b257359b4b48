//! Bivariate Taylor models with interval coefficients.
//!
//! A [`TaylorModel2`] over the box `U × K` represents a set of functions by
//! `Σ c[i][j] · (k − k₀)^i · (u − u₀)^j`, where `(u₀, k₀)` is the lower-left
//! corner of the box and every `c[i][j]` is an interval. All truncation and
//! rounding errors are folded into the coefficients, so the polynomial's
//! range over the box encloses every represented function value.
//!
//! Because the monomials are taken about the lower corner they are
//! nonnegative on the box, which keeps range bounds and monomial integrals
//! simple.

use crate::error::{domain, Error, Result};
use crate::expr::SourceExpr;
use crate::interval::{Box2, Interval};

#[derive(Clone, Debug, PartialEq)]
pub struct TaylorModel2 {
    deg_u: usize,
    deg_k: usize,
    coeffs: Vec<Interval>,
    bx: Box2,
}

/// Maps the Taylor-model variables `(u, k)` to the expression variables `(x, y)`.
#[derive(Clone, Copy, Debug)]
pub enum Substitution {
    /// `x = u`, `y = k`.
    Identity,
    /// `x = u`, `y = k·u`.
    Ray,
    /// `x = p + u·n + k·u·t` componentwise, the ray map of a triangle with
    /// apex `p`, unit normal `n` and unit tangent `t`.
    Frame { p: [Interval; 2], n: [Interval; 2], t: [Interval; 2] },
    /// `x = o + u·e_u + k·e_k` componentwise.
    Affine { o: [Interval; 2], e_u: [Interval; 2], e_k: [Interval; 2] },
}

/// Polynomial degrees in `u` and `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Degrees {
    pub u: usize,
    pub k: usize,
}

impl Default for Degrees {
    fn default() -> Self {
        Degrees { u: 8, k: 8 }
    }
}

impl Degrees {
    pub fn new(u: usize, k: usize) -> Self {
        Degrees { u, k }
    }
}

/// Builds a Taylor model of `f ∘ substitution` over `bx`.
pub fn tm_from_expr(f: &SourceExpr, sub: &Substitution, bx: Box2, degrees: Degrees) -> Result<TaylorModel2> {
    let u = TaylorModel2::var_u(bx, degrees)?;
    let k = TaylorModel2::var_k(bx, degrees)?;
    let (x, y) = match *sub {
        Substitution::Identity => (u, k),
        Substitution::Ray => {
            let y = k.mul(&u)?;
            (u, y)
        }
        Substitution::Frame { p, n, t } => {
            let ku = k.mul(&u)?;
            let comp = |i: usize| u.scale(n[i]).add(&ku.scale(t[i])).map(|m| m.add_const(p[i]));
            (comp(0)?, comp(1)?)
        }
        Substitution::Affine { o, e_u, e_k } => {
            let comp = |i: usize| u.scale(e_u[i]).add(&k.scale(e_k[i])).map(|m| m.add_const(o[i]));
            (comp(0)?, comp(1)?)
        }
    };
    f.eval_tm(&x, &y)
}

fn check_box(bx: &Box2) -> Result<()> {
    if !bx.u.is_finite() || !bx.k.is_finite() {
        return Err(Error::Invalid("Taylor model box must be bounded".into()));
    }
    Ok(())
}

impl TaylorModel2 {
    fn zeros(bx: Box2, d: Degrees) -> Self {
        TaylorModel2 {
            deg_u: d.u,
            deg_k: d.k,
            coeffs: vec![Interval::ZERO; (d.u + 1) * (d.k + 1)],
            bx,
        }
    }

    pub fn constant(c: Interval, bx: Box2, d: Degrees) -> Result<Self> {
        check_box(&bx)?;
        let mut m = Self::zeros(bx, d);
        m.coeffs[0] = c;
        Ok(m)
    }

    /// The coordinate function `u`.
    pub fn var_u(bx: Box2, d: Degrees) -> Result<Self> {
        let mut m = Self::constant(Interval::point(bx.u.lo()), bx, d)?;
        if d.u >= 1 {
            m.coeffs[1] = Interval::ONE;
        } else {
            m.coeffs[0] = bx.u;
        }
        Ok(m)
    }

    /// The coordinate function `k`.
    pub fn var_k(bx: Box2, d: Degrees) -> Result<Self> {
        let mut m = Self::constant(Interval::point(bx.k.lo()), bx, d)?;
        if d.k >= 1 {
            m.coeffs[d.u + 1] = Interval::ONE;
        } else {
            m.coeffs[0] = bx.k;
        }
        Ok(m)
    }

    pub fn degrees(&self) -> Degrees {
        Degrees { u: self.deg_u, k: self.deg_k }
    }

    pub fn degree_u(&self) -> usize {
        self.deg_u
    }

    pub fn degree_k(&self) -> usize {
        self.deg_k
    }

    pub fn box2(&self) -> Box2 {
        self.bx
    }

    /// Coefficient of `(k − k₀)^i (u − u₀)^j`.
    pub fn coeff(&self, i: usize, j: usize) -> Interval {
        self.coeffs[i * (self.deg_u + 1) + j]
    }

    fn coeff_mut(&mut self, i: usize, j: usize) -> &mut Interval {
        &mut self.coeffs[i * (self.deg_u + 1) + j]
    }

    /// Offsets `[0, Δu]` and `[0, Δk]` spanned by the polynomial variables.
    pub fn offsets(&self) -> (Interval, Interval) {
        (self.bx.u - self.bx.u.lo(), self.bx.k - self.bx.k.lo())
    }

    /// Sum of coefficient widths.
    pub fn total_width(&self) -> f64 {
        self.coeffs.iter().map(|c| c.width()).sum()
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.deg_u != other.deg_u || self.deg_k != other.deg_k || self.bx != other.bx {
            return Err(Error::Invalid("Taylor models differ in box or degrees".into()));
        }
        Ok(())
    }

    /// Enclosure of the polynomial over offsets `du`, `dk`.
    fn horner(&self, du: Interval, dk: Interval) -> Interval {
        let mut acc = Interval::ZERO;
        for i in (0..=self.deg_k).rev() {
            let mut row = Interval::ZERO;
            for j in (0..=self.deg_u).rev() {
                row = row * du + self.coeff(i, j);
            }
            acc = acc * dk + row;
        }
        acc
    }

    /// Enclosure of every represented value over the whole box.
    pub fn range(&self) -> Interval {
        let (du, dk) = self.offsets();
        self.horner(du, dk)
    }

    /// Enclosure of represented values at `(u, k)`, which must lie in the box.
    pub fn eval(&self, u: Interval, k: Interval) -> Interval {
        self.horner(u - self.bx.u.lo(), k - self.bx.k.lo())
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let mut r = self.clone();
        for (a, b) in r.coeffs.iter_mut().zip(&other.coeffs) {
            *a = *a + *b;
        }
        Ok(r)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut r = self.clone();
        for c in &mut r.coeffs {
            *c = -*c;
        }
        r
    }

    pub fn scale(&self, s: Interval) -> Self {
        let mut r = self.clone();
        for c in &mut r.coeffs {
            *c = *c * s;
        }
        r
    }

    pub fn add_const(&self, c: Interval) -> Self {
        let mut r = self.clone();
        r.coeffs[0] = r.coeffs[0] + c;
        r
    }

    /// Truncated product; terms above the degrees are bounded over the box
    /// and added to the constant coefficient.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let (du, dk) = self.offsets();
        let mut pu = vec![Interval::ONE; 2 * self.deg_u + 1];
        let mut pk = vec![Interval::ONE; 2 * self.deg_k + 1];
        for j in 1..pu.len() {
            pu[j] = pu[j - 1] * du;
        }
        for i in 1..pk.len() {
            pk[i] = pk[i - 1] * dk;
        }
        let mut r = Self::zeros(self.bx, self.degrees());
        let mut excess = Interval::ZERO;
        let nz_b: Vec<(usize, usize, Interval)> = (0..=other.deg_k)
            .flat_map(|i| (0..=other.deg_u).map(move |j| (i, j)))
            .map(|(i, j)| (i, j, other.coeff(i, j)))
            .filter(|(_, _, c)| !c.is_zero())
            .collect();
        for i1 in 0..=self.deg_k {
            for j1 in 0..=self.deg_u {
                let a = self.coeff(i1, j1);
                if a.is_zero() {
                    continue;
                }
                for &(i2, j2, b) in &nz_b {
                    let (i, j) = (i1 + i2, j1 + j2);
                    let p = a * b;
                    if i <= self.deg_k && j <= self.deg_u {
                        let c = r.coeff_mut(i, j);
                        *c = *c + p;
                    } else {
                        excess = excess + p * pk[i] * pu[j];
                    }
                }
            }
        }
        r.coeffs[0] = r.coeffs[0] + excess;
        Ok(r)
    }

    pub fn sqr(&self) -> Result<Self> {
        self.mul(self)
    }

    pub fn powi(&self, n: i32) -> Result<Self> {
        if n < 0 {
            return self.powi(-n)?.recip();
        }
        let mut result = Self::constant(Interval::ONE, self.bx, self.degrees())?;
        let mut base = self.clone();
        let mut e = n as u32;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.sqr()?;
            }
        }
        Ok(result)
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.recip()?)
    }

    pub fn recip(&self) -> Result<Self> {
        self.compose(Elementary::Recip)
    }

    pub fn exp(&self) -> Result<Self> {
        self.compose(Elementary::Exp)
    }

    pub fn log(&self) -> Result<Self> {
        self.compose(Elementary::Log)
    }

    pub fn sqrt(&self) -> Result<Self> {
        self.compose(Elementary::Sqrt)
    }

    pub fn sin(&self) -> Result<Self> {
        self.compose(Elementary::Sin)
    }

    pub fn cos(&self) -> Result<Self> {
        self.compose(Elementary::Cos)
    }

    /// `|a|`, available only where the sign is decided by the range.
    pub fn abs(&self) -> Result<Self> {
        let r = self.range();
        if r.lo() >= 0.0 {
            Ok(self.clone())
        } else if r.hi() <= 0.0 {
            Ok(self.neg())
        } else {
            Err(Error::Unsupported(format!("abs is non-smooth on this region (range {r:?})")))
        }
    }

    pub fn min(&self, other: &Self) -> Result<Self> {
        let d = self.sub(other)?.range();
        if d.hi() <= 0.0 {
            Ok(self.clone())
        } else if d.lo() >= 0.0 {
            Ok(other.clone())
        } else {
            Err(Error::Unsupported("min is non-smooth on this region".into()))
        }
    }

    pub fn max(&self, other: &Self) -> Result<Self> {
        let d = self.sub(other)?.range();
        if d.lo() >= 0.0 {
            Ok(self.clone())
        } else if d.hi() <= 0.0 {
            Ok(other.clone())
        } else {
            Err(Error::Unsupported("max is non-smooth on this region".into()))
        }
    }

    /// Elementary function composition by Taylor expansion about the
    /// midpoint of the range, with a Lagrange remainder over the full range.
    pub fn compose(&self, g: Elementary) -> Result<Self> {
        let range = self.range();
        g.check_domain(range)?;
        let c = range.mid();
        let ci = Interval::point(c);
        let a0 = self.add_const(-ci);
        let spread = (range - c).mag();
        let cap = (self.deg_u + self.deg_k + 2).clamp(2, 30);
        let base = g.taylor_coeff(ci, 0)?;
        let scale = base.mag().max(1e-300);
        let mut result = Self::constant(base, self.bx, self.degrees())?;
        let mut power = a0.clone();
        let mut p = 1;
        loop {
            let rem = g.taylor_coeff(range, p)?;
            let negligible = rem.mag() * spread.powi(p as i32) <= 1e-18 * scale;
            if p >= cap || negligible {
                result = result.add(&power.scale(rem))?;
                break;
            }
            result = result.add(&power.scale(g.taylor_coeff(ci, p)?))?;
            power = power.mul(&a0)?;
            p += 1;
        }
        if !result.is_finite() {
            return Err(domain("Taylor model composition produced an unbounded enclosure"));
        }
        Ok(result)
    }
}

/// Elementary functions available for Taylor-model composition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Elementary {
    Exp,
    Log,
    Sqrt,
    Sin,
    Cos,
    Recip,
}

fn factorial(p: usize) -> Interval {
    (1..=p).fold(Interval::ONE, |acc, i| acc * Interval::point(i as f64))
}

impl Elementary {
    fn check_domain(self, r: Interval) -> Result<()> {
        match self {
            Elementary::Log if r.lo() <= 0.0 => Err(domain(format!("log of range {r:?}"))),
            Elementary::Sqrt if r.lo() <= 0.0 => {
                Err(domain(format!("sqrt of range {r:?} touching zero is not expandable")))
            }
            Elementary::Recip if r.contains_zero() => Err(domain(format!("division by range {r:?}"))),
            _ => Ok(()),
        }
    }

    /// Enclosure of `g^(p)(x) / p!`.
    pub fn taylor_coeff(self, x: Interval, p: usize) -> Result<Interval> {
        let pf = factorial(p);
        let sign = if p % 2 == 0 { Interval::ONE } else { -Interval::ONE };
        match self {
            Elementary::Exp => x.exp()?.try_div(pf),
            Elementary::Log => {
                if p == 0 {
                    x.log()
                } else {
                    let denom = x.powi(p as i32)? * Interval::point(p as f64);
                    (-sign).try_div(denom)
                }
            }
            Elementary::Sqrt => {
                // binom(1/2, p) · x^(1/2 − p)
                let mut b = Interval::ONE;
                for i in 0..p {
                    let num = Interval::point(0.5) - Interval::point(i as f64);
                    b = (b * num).try_div(Interval::point((i + 1) as f64))?;
                }
                Ok(b * x.sqrt()?.try_div(x.powi(p as i32)?)?)
            }
            Elementary::Recip => sign.try_div(x.powi(p as i32 + 1)?),
            Elementary::Sin | Elementary::Cos => {
                let shift = if self == Elementary::Cos { p + 1 } else { p };
                let v = match shift % 4 {
                    0 => x.sin(),
                    1 => x.cos(),
                    2 => -x.sin(),
                    _ => -x.cos(),
                };
                v.try_div(pf)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::SourceExpr;

    fn bx(u: (f64, f64), k: (f64, f64)) -> Box2 {
        Box2::new(Interval::new(u.0, u.1).unwrap(), Interval::new(k.0, k.1).unwrap())
    }

    #[test]
    fn constant_source() {
        let f = SourceExpr::parse("1").unwrap();
        let m = tm_from_expr(&f, &Substitution::Ray, bx((0.0, 1.0), (0.0, 1.0)), Degrees::default()).unwrap();
        assert_eq!(m.coeff(0, 0), Interval::ONE);
        for i in 0..=8 {
            for j in 0..=8 {
                if (i, j) != (0, 0) {
                    assert!(m.coeff(i, j).is_zero());
                }
            }
        }
    }

    #[test]
    fn linear_source_is_exact() {
        let f = SourceExpr::parse("x+y").unwrap();
        let m = tm_from_expr(&f, &Substitution::Ray, bx((0.0, 1.0), (0.0, 1.0)), Degrees::default()).unwrap();
        assert!(m.coeff(0, 1).contains(1.0));
        assert!(m.coeff(1, 1).contains(1.0));
        assert!(m.coeff(0, 0).contains(0.0));
        assert!(m.coeff(1, 0).contains(0.0));
        assert!(m.coeff(2, 2).contains(0.0));
    }

    #[test]
    fn sine_of_product_on_grid() {
        let f = SourceExpr::parse("sin(x*y)").unwrap();
        let b = bx((0.0, 0.5), (0.0, 1.0));
        let m = tm_from_expr(&f, &Substitution::Ray, b, Degrees::new(4, 4)).unwrap();
        for a in 0..10 {
            for c in 0..10 {
                let u = 0.5 * a as f64 / 9.0;
                let k = c as f64 / 9.0;
                let v = (u * u * k).sin();
                assert!(m.eval(Interval::point(u), Interval::point(k)).contains(v));
            }
        }
    }

    #[test]
    fn exp_of_zero_contains_one() {
        let b = bx((0.0, 1.0), (0.0, 1.0));
        let z = TaylorModel2::constant(Interval::ZERO, b, Degrees::default()).unwrap();
        assert!(z.exp().unwrap().range().contains(1.0));
    }

    #[test]
    fn sine_of_u() {
        let b = bx((0.0, 1.0), (0.0, 0.0));
        let u = TaylorModel2::var_u(b, Degrees::new(8, 0)).unwrap();
        let s = u.sin().unwrap();
        let v = s.eval(Interval::point(0.3), Interval::ZERO);
        assert!(v.contains(0.295_520_206_661_339_57));
        assert!(v.width() < 1e-4);
    }

    #[test]
    fn log_needs_positive_range() {
        let b = bx((0.0, 1.0), (0.0, 1.0));
        let u = TaylorModel2::var_u(b, Degrees::default()).unwrap();
        assert!(matches!(u.log(), Err(Error::Domain(_))));
        assert!(u.add_const(Interval::ONE).log().is_ok());
    }

    #[test]
    fn undecided_abs_is_unsupported() {
        let b = bx((-1.0, 1.0), (0.0, 1.0));
        let u = TaylorModel2::var_u(b, Degrees::default()).unwrap();
        assert!(matches!(u.abs(), Err(Error::Unsupported(_))));
    }

    #[test]
    fn mismatched_models_are_rejected() {
        let a = TaylorModel2::constant(Interval::ONE, bx((0.0, 1.0), (0.0, 1.0)), Degrees::default()).unwrap();
        let b = TaylorModel2::constant(Interval::ONE, bx((0.0, 2.0), (0.0, 1.0)), Degrees::default()).unwrap();
        assert!(a.add(&b).is_err());
    }

    #[test]
    fn higher_degree_is_narrower() {
        let f = SourceExpr::parse("exp(x)*cos(y)").unwrap();
        let b = bx((0.0, 0.5), (0.0, 0.5));
        let lo = tm_from_expr(&f, &Substitution::Identity, b, Degrees::new(3, 3)).unwrap();
        let hi = tm_from_expr(&f, &Substitution::Identity, b, Degrees::new(8, 8)).unwrap();
        assert!(hi.total_width() < lo.total_width());
    }
}
