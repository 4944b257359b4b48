use super::{mul_down, mul_up, sqrt_down, sqrt_up, Interval, LIBM_ULPS};
use crate::error::{domain, Result};

fn down(mut x: f64) -> f64 {
    for _ in 0..LIBM_ULPS {
        x = x.next_down();
    }
    x
}

fn up(mut x: f64) -> f64 {
    for _ in 0..LIBM_ULPS {
        x = x.next_up();
    }
    x
}

fn exp_down(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else if x == f64::NEG_INFINITY {
        0.0
    } else {
        down(x.exp()).max(0.0)
    }
}

fn exp_up(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        up(x.exp())
    }
}

fn log_down(x: f64) -> f64 {
    if x == 1.0 {
        0.0
    } else {
        down(x.ln())
    }
}

fn log_up(x: f64) -> f64 {
    if x == 1.0 {
        0.0
    } else {
        up(x.ln())
    }
}

/// `[sin x]` or `[cos x]` for a point, clamped to [-1, 1].
fn trig_point(x: f64, cos: bool) -> Interval {
    let (v, exact) = if cos { (x.cos(), x == 0.0) } else { (x.sin(), x == 0.0) };
    if exact {
        return Interval::point(v);
    }
    Interval::raw(down(v).max(-1.0), up(v).min(1.0))
}

/// True when some `theta + 2πk` may lie in `x`.
fn may_contain_phase(x: Interval, theta: Interval) -> bool {
    let t = (x - theta).try_div(Interval::two_pi()).expect("2π is nonzero");
    t.lo().ceil() <= t.hi().floor()
}

impl Interval {
    pub fn sqrt(self) -> Result<Interval> {
        if self.lo < 0.0 {
            return Err(domain(format!("sqrt of {self:?} with negative part")));
        }
        Ok(Interval::raw(sqrt_down(self.lo), sqrt_up(self.hi)))
    }

    pub fn exp(self) -> Result<Interval> {
        let hi = exp_up(self.hi);
        if !hi.is_finite() {
            return Err(domain(format!("exp overflows on {self:?}")));
        }
        Ok(Interval::raw(exp_down(self.lo), hi))
    }

    /// Natural logarithm; the argument must be strictly positive.
    pub fn log(self) -> Result<Interval> {
        if self.lo <= 0.0 {
            return Err(domain(format!("log of {self:?} which is not strictly positive")));
        }
        if !self.hi.is_finite() {
            return Err(domain("log of an unbounded interval"));
        }
        Ok(Interval::raw(log_down(self.lo), log_up(self.hi)))
    }

    pub fn abs(self) -> Interval {
        if self.lo >= 0.0 {
            self
        } else if self.hi <= 0.0 {
            -self
        } else {
            Interval::raw(0.0, self.mag())
        }
    }

    pub fn powi(self, n: i32) -> Result<Interval> {
        if n < 0 {
            return self.powi(-n)?.recip();
        }
        Ok(match n {
            0 => Interval::ONE,
            1 => self,
            2 => self.sqr(),
            _ if n % 2 == 0 => {
                let a = self.mig();
                let b = self.mag();
                Interval::raw(pow_down(a, n), pow_up(b, n))
            }
            _ => Interval::raw(pow_signed_down(self.lo, n), pow_signed_up(self.hi, n)),
        })
    }

    pub fn sin(self) -> Interval {
        self.trig(false)
    }

    pub fn cos(self) -> Interval {
        self.trig(true)
    }

    fn trig(self, cos: bool) -> Interval {
        if !self.is_finite() || self.width() >= 2.0 * std::f64::consts::PI {
            return Interval::raw(-1.0, 1.0);
        }
        let a = trig_point(self.lo, cos);
        let b = trig_point(self.hi, cos);
        let mut r = a.hull(b);
        let half_pi = Interval::pi().scale_exact(0.5);
        let (max_phase, min_phase) = if cos {
            (Interval::ZERO, Interval::pi())
        } else {
            (half_pi, -half_pi)
        };
        if may_contain_phase(self, max_phase) {
            r = Interval::raw(r.lo, 1.0);
        }
        if may_contain_phase(self, min_phase) {
            r = Interval::raw(-1.0, r.hi);
        }
        r
    }
}

/// `x^n` rounded down for `x >= 0`.
fn pow_down(x: f64, n: i32) -> f64 {
    let mut r = 1.0;
    for _ in 0..n {
        r = mul_down(r, x);
    }
    r
}

fn pow_up(x: f64, n: i32) -> f64 {
    let mut r = 1.0;
    for _ in 0..n {
        r = mul_up(r, x);
    }
    r
}

/// Odd power, rounded down, any sign.
fn pow_signed_down(x: f64, n: i32) -> f64 {
    if x >= 0.0 {
        pow_down(x, n)
    } else {
        -pow_up(-x, n)
    }
}

fn pow_signed_up(x: f64, n: i32) -> f64 {
    if x >= 0.0 {
        pow_up(x, n)
    } else {
        -pow_down(-x, n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(a: f64, b: f64) -> Interval {
        Interval::new(a, b).unwrap()
    }

    #[test]
    fn log_of_one_is_exact_zero() {
        assert_eq!(Interval::ONE.log().unwrap(), Interval::ZERO);
    }

    #[test]
    fn abs_of_straddling_interval() {
        assert_eq!(iv(-2.0, 1.0).abs(), iv(0.0, 2.0));
    }

    #[test]
    fn sin_reaches_one_on_zero_to_pi() {
        let s = Interval::new(0.0, Interval::pi().hi()).unwrap().sin();
        assert!(s.hi() >= 1.0);
        assert!(s.contains(0.0) && s.contains(1.0));
    }

    #[test]
    fn cos_picks_up_minimum_at_pi() {
        let c = iv(3.0, 3.3).cos();
        assert_eq!(c.lo(), -1.0);
        assert!(c.hi() >= 3.3f64.cos().max(3.0f64.cos()));
    }

    #[test]
    fn trig_on_wide_input_is_full_range() {
        assert_eq!(iv(0.0, 7.0).sin(), iv(-1.0, 1.0));
    }

    #[test]
    fn trig_reduction_far_from_origin() {
        let x = 1.0e6;
        let s = iv(x, x + 1e-3).sin();
        assert!(s.contains(x.sin()));
        assert!(s.width() < 2e-3);
    }

    #[test]
    fn domain_errors() {
        assert!(iv(0.0, 1.0).log().is_err());
        assert!(iv(-1.0, 1.0).sqrt().is_err());
        assert!(iv(0.0, 1000.0).exp().is_err());
        assert!(iv(-1.0, 1.0).powi(-1).is_err());
    }

    #[test]
    fn powers() {
        assert_eq!(iv(-2.0, 1.0).powi(3).unwrap(), iv(-8.0, 1.0));
        assert_eq!(iv(-2.0, 1.0).powi(4).unwrap(), iv(0.0, 16.0));
        assert_eq!(iv(2.0, 4.0).powi(-2).unwrap(), iv(1.0 / 16.0, 0.25));
    }

    #[test]
    fn exp_and_sqrt_exact_points() {
        assert_eq!(Interval::ZERO.exp().unwrap(), Interval::ONE);
        assert_eq!(iv(4.0, 9.0).sqrt().unwrap(), iv(2.0, 3.0));
    }
}
