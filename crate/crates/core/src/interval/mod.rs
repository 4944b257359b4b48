//! Closed floating-point intervals with outward rounding.
//!
//! Every endpoint produced here is rounded away from the exact result by
//! moving to the neighbouring binary64 value. For the four basic operations
//! and `sqrt` the exact rounding error is recovered with an error-free
//! transformation (two-sum / fused multiply-add), so results that happen to
//! be exact are not widened. Transcendental functions come from the platform
//! libm and are widened by [`LIBM_ULPS`] units in the last place each way.
//!
//! Nothing here touches the FPU rounding mode, so all values are plain
//! `Copy` data and every operation is safe to run from any thread.

mod elementary;
mod search;

pub use search::{subdivide_min_max, Extrema, RangeFn, SearchOptions, WithDerivative};

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{domain, Error, Result};

/// Widening applied to libm results, in ulps.
pub const LIBM_ULPS: u32 = 2;

/// A closed interval `[lo, hi]` of real numbers with binary64 endpoints.
#[derive(Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

/// A box in the `(u, k)` plane used as the validity domain of Taylor models.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Box2 {
    pub u: Interval,
    pub k: Interval,
}

impl Box2 {
    pub fn new(u: Interval, k: Interval) -> Self {
        Box2 { u, k }
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl Default for Interval {
    fn default() -> Self {
        Interval::ZERO
    }
}

impl From<f64> for Interval {
    fn from(x: f64) -> Self {
        Interval::point(x)
    }
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };

    /// Builds `[lo, hi]`, rejecting NaN endpoints and `lo > hi`.
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::Invalid(format!("malformed interval [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    /// Degenerate interval `[x, x]`.
    ///
    /// # Panics
    /// Panics if `x` is NaN.
    pub fn point(x: f64) -> Self {
        assert!(!x.is_nan(), "NaN is not an interval endpoint");
        Interval { lo: x, hi: x }
    }

    /// Smallest interval containing both arguments, in either order.
    pub fn hull_of(a: f64, b: f64) -> Self {
        Interval { lo: a.min(b), hi: a.max(b) }
    }

    /// `[x - ulp, x + ulp]`: an enclosure of any real whose nearest binary64 is `x`.
    pub fn around(x: f64) -> Self {
        Interval { lo: x.next_down(), hi: x.next_up() }
    }

    pub(crate) const fn raw(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    /// Enclosure of π.
    pub fn pi() -> Self {
        // f64 PI is the binary64 value just below π.
        Interval { lo: std::f64::consts::PI, hi: std::f64::consts::PI.next_up() }
    }

    pub fn two_pi() -> Self {
        Interval::pi().scale_exact(2.0)
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn mid(self) -> f64 {
        let m = 0.5 * self.lo + 0.5 * self.hi;
        m.clamp(self.lo, self.hi)
    }

    /// Upper bound on `hi - lo`.
    pub fn width(self) -> f64 {
        sub_up(self.hi, self.lo)
    }

    /// Upper bound on the radius about [`Interval::mid`].
    pub fn rad(self) -> f64 {
        let m = self.mid();
        sub_up(self.hi, m).max(sub_up(m, self.lo))
    }

    /// `max |x|` over the interval.
    pub fn mag(self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// `min |x|` over the interval.
    pub fn mig(self) -> f64 {
        if self.contains_zero() {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    pub fn is_finite(self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn is_point(self) -> bool {
        self.lo == self.hi
    }

    pub fn is_zero(self) -> bool {
        self.lo == 0.0 && self.hi == 0.0
    }

    pub fn contains(self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(self) -> bool {
        self.contains(0.0)
    }

    pub fn contains_interval(self, other: Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn overlaps(self, other: Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn hull(self, other: Interval) -> Interval {
        Interval { lo: self.lo.min(other.lo), hi: self.hi.max(other.hi) }
    }

    pub fn intersect(self, other: Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    /// Splits at the midpoint.
    pub fn bisect(self) -> (Interval, Interval) {
        let m = self.mid();
        (Interval { lo: self.lo, hi: m }, Interval { lo: m, hi: self.hi })
    }

    /// `self ± r` with outward rounding, `r >= 0`.
    pub fn inflate(self, r: f64) -> Interval {
        debug_assert!(r >= 0.0);
        Interval { lo: sub_down(self.lo, r), hi: add_up(self.hi, r) }
    }

    /// `[-r, r]`.
    pub fn symmetric(r: f64) -> Interval {
        let r = r.abs();
        Interval { lo: -r, hi: r }
    }

    /// Multiplication by a power of two (exact barring over/underflow).
    pub fn scale_exact(self, p2: f64) -> Interval {
        debug_assert!(p2 > 0.0);
        self * Interval::point(p2)
    }

    pub fn try_div(self, rhs: Interval) -> Result<Interval> {
        if rhs.contains_zero() {
            return Err(domain(format!("division by {rhs:?} which contains zero")));
        }
        let c = [
            (div_down(self.lo, rhs.lo), div_up(self.lo, rhs.lo)),
            (div_down(self.lo, rhs.hi), div_up(self.lo, rhs.hi)),
            (div_down(self.hi, rhs.lo), div_up(self.hi, rhs.lo)),
            (div_down(self.hi, rhs.hi), div_up(self.hi, rhs.hi)),
        ];
        Ok(envelope(&c))
    }

    pub fn recip(self) -> Result<Interval> {
        Interval::ONE.try_div(self)
    }

    pub fn sqr(self) -> Interval {
        let a = self.mig();
        let b = self.mag();
        Interval { lo: mul_down(a, a), hi: mul_up(b, b) }
    }

    pub fn max(self, other: Interval) -> Interval {
        Interval { lo: self.lo.max(other.lo), hi: self.hi.max(other.hi) }
    }

    pub fn min(self, other: Interval) -> Interval {
        Interval { lo: self.lo.min(other.lo), hi: self.hi.min(other.hi) }
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, rhs: Interval) -> Interval {
        Interval { lo: add_down(self.lo, rhs.lo), hi: add_up(self.hi, rhs.hi) }
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, rhs: Interval) -> Interval {
        Interval { lo: sub_down(self.lo, rhs.hi), hi: sub_up(self.hi, rhs.lo) }
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval { lo: -self.hi, hi: -self.lo }
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        if self.lo >= 0.0 && rhs.lo >= 0.0 {
            return Interval {
                lo: mul_down(self.lo, rhs.lo),
                hi: mul_up(self.hi, rhs.hi),
            };
        }
        let c = [
            (mul_down(self.lo, rhs.lo), mul_up(self.lo, rhs.lo)),
            (mul_down(self.lo, rhs.hi), mul_up(self.lo, rhs.hi)),
            (mul_down(self.hi, rhs.lo), mul_up(self.hi, rhs.lo)),
            (mul_down(self.hi, rhs.hi), mul_up(self.hi, rhs.hi)),
        ];
        envelope(&c)
    }
}

impl Add<f64> for Interval {
    type Output = Interval;
    fn add(self, rhs: f64) -> Interval {
        self + Interval::point(rhs)
    }
}

impl Sub<f64> for Interval {
    type Output = Interval;
    fn sub(self, rhs: f64) -> Interval {
        self - Interval::point(rhs)
    }
}

impl Mul<f64> for Interval {
    type Output = Interval;
    fn mul(self, rhs: f64) -> Interval {
        self * Interval::point(rhs)
    }
}

impl std::iter::Sum for Interval {
    fn sum<I: Iterator<Item = Interval>>(iter: I) -> Interval {
        iter.fold(Interval::ZERO, |a, b| a + b)
    }
}

fn envelope(c: &[(f64, f64); 4]) -> Interval {
    let mut lo = c[0].0;
    let mut hi = c[0].1;
    for &(l, h) in &c[1..] {
        // 0 * inf produces NaN; treat as 0 which is the limit used by
        // extended interval arithmetic for these products.
        let l = if l.is_nan() { 0.0 } else { l };
        let h = if h.is_nan() { 0.0 } else { h };
        lo = lo.min(l);
        hi = hi.max(h);
    }
    Interval { lo, hi }
}

// ---------------------------------------------------------------------------
// Directed rounding of single operations.
//
// Each primitive computes the round-to-nearest result, recovers the sign of
// the rounding error exactly, and steps one ulp outward only when needed.

/// Below this magnitude products and quotients may have lost bits to
/// underflow, so the error-free transformations are not trusted.
const TINY: f64 = 1e-290;

#[inline]
fn two_sum_err(a: f64, b: f64, s: f64) -> f64 {
    let bb = s - a;
    (a - (s - bb)) + (b - bb)
}

#[inline]
pub(crate) fn add_down(a: f64, b: f64) -> f64 {
    let s = a + b;
    if !s.is_finite() {
        return if s == f64::INFINITY && a.is_finite() && b.is_finite() { f64::MAX } else { s };
    }
    if two_sum_err(a, b, s) < 0.0 {
        s.next_down()
    } else {
        s
    }
}

#[inline]
pub(crate) fn add_up(a: f64, b: f64) -> f64 {
    let s = a + b;
    if !s.is_finite() {
        return if s == f64::NEG_INFINITY && a.is_finite() && b.is_finite() { f64::MIN } else { s };
    }
    if two_sum_err(a, b, s) > 0.0 {
        s.next_up()
    } else {
        s
    }
}

#[inline]
pub(crate) fn sub_down(a: f64, b: f64) -> f64 {
    add_down(a, -b)
}

#[inline]
pub(crate) fn sub_up(a: f64, b: f64) -> f64 {
    add_up(a, -b)
}

#[inline]
pub(crate) fn mul_down(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        return if (a == 0.0 && b.is_infinite()) || (b == 0.0 && a.is_infinite()) { 0.0 } else { a * b * 0.0 };
    }
    let p = a * b;
    if !p.is_finite() {
        return if p == f64::INFINITY && a.is_finite() && b.is_finite() { f64::MAX } else { p };
    }
    if p.abs() < TINY {
        return p.next_down();
    }
    if a.mul_add(b, -p) < 0.0 {
        p.next_down()
    } else {
        p
    }
}

#[inline]
pub(crate) fn mul_up(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        return if (a == 0.0 && b.is_infinite()) || (b == 0.0 && a.is_infinite()) { 0.0 } else { a * b * 0.0 };
    }
    let p = a * b;
    if !p.is_finite() {
        return if p == f64::NEG_INFINITY && a.is_finite() && b.is_finite() { f64::MIN } else { p };
    }
    if p.abs() < TINY {
        return p.next_up();
    }
    if a.mul_add(b, -p) > 0.0 {
        p.next_up()
    } else {
        p
    }
}

/// Sign of `a/b - fl(a/b)`: -1, 0 or 1.
#[inline]
fn div_err_sign(a: f64, b: f64, q: f64) -> i8 {
    let r = (-q).mul_add(b, a);
    let s = r * b.signum();
    if s > 0.0 {
        1
    } else if s < 0.0 {
        -1
    } else {
        0
    }
}

#[inline]
pub(crate) fn div_down(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    let q = a / b;
    if !q.is_finite() {
        return if q == f64::INFINITY && a.is_finite() { f64::MAX } else { q };
    }
    if q.abs() < TINY || a.abs() < TINY * 1e16 {
        return q.next_down();
    }
    if div_err_sign(a, b, q) < 0 {
        q.next_down()
    } else {
        q
    }
}

#[inline]
pub(crate) fn div_up(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    let q = a / b;
    if !q.is_finite() {
        return if q == f64::NEG_INFINITY && a.is_finite() { f64::MIN } else { q };
    }
    if q.abs() < TINY || a.abs() < TINY * 1e16 {
        return q.next_up();
    }
    if div_err_sign(a, b, q) > 0 {
        q.next_up()
    } else {
        q
    }
}

#[inline]
pub(crate) fn sqrt_down(x: f64) -> f64 {
    let r = x.sqrt();
    if r == 0.0 || x < TINY {
        return if r == 0.0 { 0.0 } else { r.next_down().max(0.0) };
    }
    if (-r).mul_add(r, x) < 0.0 {
        r.next_down()
    } else {
        r
    }
}

#[inline]
pub(crate) fn sqrt_up(x: f64) -> f64 {
    let r = x.sqrt();
    if x < TINY {
        return r.next_up();
    }
    if (-r).mul_add(r, x) > 0.0 {
        r.next_up()
    } else {
        r
    }
}
