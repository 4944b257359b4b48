//! Fundamental solutions of `−Δ` and the test functions built from them.

use crate::error::{domain, Error, Result};
use crate::geometry::{Location, Point, Polygon};
use crate::interval::Interval;

/// Fundamental solution of `−Δ` in one or two dimensions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Kernel {
    dim: usize,
}

/// `1/(4π)`.
pub fn inv_four_pi() -> Interval {
    Interval::ONE.try_div(Interval::pi().scale_exact(4.0)).expect("π is nonzero")
}

/// `1/(2π)`.
pub fn inv_two_pi() -> Interval {
    Interval::ONE.try_div(Interval::two_pi()).expect("π is nonzero")
}

/// `|x − s|²` for a box `x` and point `s`.
pub fn dist2(s: Point, x: [Interval; 2]) -> Interval {
    (x[0] - s.x).sqr() + (x[1] - s.y).sqr()
}

/// `Γ₂(s, x) = −(1/4π)·log |x − s|²`.
pub fn gamma2(s: Point, x: [Interval; 2]) -> Result<Interval> {
    let r2 = dist2(s, x);
    if r2.lo() <= 0.0 {
        return Err(domain(format!("log kernel evaluated at its source ({}, {})", s.x, s.y)));
    }
    Ok(-(inv_four_pi() * r2.log()?))
}

/// `Γ₁(s, x) = −|x − s|/2`.
pub fn gamma1(s: f64, x: Interval) -> Interval {
    -((x - s).abs().scale_exact(0.5))
}

impl Kernel {
    pub fn new(dim: usize) -> Result<Self> {
        match dim {
            1 | 2 => Ok(Kernel { dim }),
            _ => Err(Error::Unsupported(format!(
                "fundamental solution in dimension {dim}; only 1 and 2 are implemented"
            ))),
        }
    }

    pub fn dim(self) -> usize {
        self.dim
    }

    /// `Γ(s, x)` for a point `s` and a point or box `x` of matching dimension.
    pub fn gamma(self, s: &[f64], x: &[Interval]) -> Result<Interval> {
        if s.len() != self.dim || x.len() != self.dim {
            return Err(Error::Invalid(format!("kernel of dimension {} given {}-D arguments", self.dim, s.len())));
        }
        match self.dim {
            1 => Ok(gamma1(s[0], x[0])),
            _ => gamma2(Point::new(s[0], s[1]), [x[0], x[1]]),
        }
    }
}

/// `φ = a_int·Γ(s_int, ·) + Σ a_i Γ(s_i, ·) + C` in two dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct TestFunction2D {
    pub s_int: Point,
    pub a_int: f64,
    pub sources: Vec<Point>,
    pub coeffs: Vec<f64>,
    pub shift: Interval,
}

impl TestFunction2D {
    pub fn new(s_int: Point, a_int: f64, sources: Vec<Point>, coeffs: Vec<f64>, shift: Interval) -> Result<Self> {
        if a_int == 0.0 || !a_int.is_finite() {
            return Err(Error::Invalid(format!("interior weight must be nonzero and finite, got {a_int}")));
        }
        if sources.len() != coeffs.len() {
            return Err(Error::Invalid("source and coefficient counts differ".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Invalid("non-finite test-function coefficient".into()));
        }
        Ok(TestFunction2D { s_int, a_int, sources, coeffs, shift })
    }

    /// Pure fundamental solution centred at `s_int`.
    pub fn singular_only(s_int: Point) -> Self {
        TestFunction2D { s_int, a_int: 1.0, sources: Vec::new(), coeffs: Vec::new(), shift: Interval::ZERO }
    }

    pub fn with_shift(&self, shift: Interval) -> Self {
        TestFunction2D { shift, ..self.clone() }
    }

    /// Checks that `s_int` is interior and every source exterior.
    pub fn validate_against(&self, poly: &Polygon) -> Result<()> {
        if poly.locate(self.s_int) != Location::Inside {
            return Err(Error::Geometry(format!("evaluation point {:?} is not interior", self.s_int)));
        }
        if let Some(s) = self.sources.iter().find(|s| poly.locate(**s) != Location::Outside) {
            return Err(Error::Placement(format!("source {s:?} is not exterior")));
        }
        Ok(())
    }

    /// `Σ a_i Γ(s_i, x) + C`.
    pub fn phi_minus_singular(&self, x: [Interval; 2]) -> Result<Interval> {
        let mut acc = Interval::ZERO;
        for (s, &a) in self.sources.iter().zip(&self.coeffs) {
            acc = acc + gamma2(*s, x)? * a;
        }
        Ok(acc + self.shift)
    }

    pub fn eval_phi(&self, x: [Interval; 2]) -> Result<Interval> {
        Ok(gamma2(self.s_int, x)? * self.a_int + self.phi_minus_singular(x)?)
    }

    pub fn eval_point(&self, x: Point) -> Result<Interval> {
        self.eval_phi([Interval::point(x.x), Interval::point(x.y)])
    }

    /// Gradient enclosure `∇φ(x)`.
    pub fn grad_phi(&self, x: [Interval; 2]) -> Result<[Interval; 2]> {
        let c = -inv_two_pi();
        let mut g = [Interval::ZERO; 2];
        let terms = std::iter::once((self.s_int, self.a_int)).chain(self.sources.iter().copied().zip(self.coeffs.iter().copied()));
        for (s, a) in terms {
            let r2 = dist2(s, x);
            let w = (c * a).try_div(r2)?;
            g[0] = g[0] + w * (x[0] - s.x);
            g[1] = g[1] + w * (x[1] - s.y);
        }
        Ok(g)
    }

    /// `φ(p + t·d)` for an interval parameter `t`.
    pub fn on_segment(&self, p: Point, d: Point, t: Interval) -> Result<Interval> {
        self.eval_phi([t * d.x + p.x, t * d.y + p.y])
    }

    /// `d/dt φ(p + t·d) = Σ w_i (−1/2π) ((x − s_i)·d)/|x − s_i|²`.
    pub fn on_segment_derivative(&self, p: Point, d: Point, t: Interval) -> Result<Interval> {
        let x = [t * d.x + p.x, t * d.y + p.y];
        let g = self.grad_phi(x)?;
        Ok(g[0] * d.x + g[1] * d.y)
    }
}
