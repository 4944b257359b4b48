//! Source-term expressions in `x` and `y`.
//!
//! Expressions are parsed once into an immutable tree and evaluated over
//! three backends: binary64 points, [`Interval`]s and [`TaylorModel2`]s.
//! See the README for the grammar.

mod parser;

use std::fmt;

use crate::error::{domain, Error, Result};
use crate::interval::Interval;
use crate::taylor::TaylorModel2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Abs,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Min,
    Max,
}

/// Expression tree node.
#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    /// Numeric literal; `exact` is set when the decimal text is exactly
    /// representable in binary64.
    Num { value: f64, exact: bool },
    Pi,
    X,
    Y,
    Neg(Box<Node>),
    Binary(BinOp, Box<Node>, Box<Node>),
    Pow(Box<Node>, i32),
    Call(Func, Box<Node>),
}

/// A parsed source term `f(x, y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SourceExpr {
    root: Node,
    text: String,
}

impl fmt::Display for SourceExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl std::str::FromStr for SourceExpr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SourceExpr::parse(s)
    }
}

impl SourceExpr {
    pub fn parse(text: &str) -> Result<Self> {
        let root = parser::parse(text)?;
        Ok(SourceExpr { root, text: text.trim().to_string() })
    }

    /// Wraps an existing tree.
    pub fn from_node(root: Node) -> Self {
        let text = format!("{root}");
        SourceExpr { root, text }
    }

    pub fn constant(c: f64) -> Self {
        SourceExpr::from_node(Node::Num { value: c, exact: true })
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn uses_y(&self) -> bool {
        self.root.any(&|n| matches!(n, Node::Y))
    }

    /// True if the tree contains `abs`, `min` or `max`.
    pub fn has_kinks(&self) -> bool {
        self.root.any(&|n| {
            matches!(n, Node::Call(Func::Abs, _) | Node::Binary(BinOp::Min | BinOp::Max, _, _))
        })
    }

    /// Value of a tree without variables, as an interval.
    pub fn constant_value(&self) -> Option<Interval> {
        if self.root.any(&|n| matches!(n, Node::X | Node::Y)) {
            return None;
        }
        self.eval_interval(Interval::ZERO, Interval::ZERO).ok()
    }

    pub fn eval_point(&self, x: f64, y: f64) -> Result<f64> {
        self.root.eval_point(x, y)
    }

    pub fn eval_interval(&self, x: Interval, y: Interval) -> Result<Interval> {
        self.root.eval_interval(x, y)
    }

    /// Evaluates with `x` and `y` replaced by Taylor models on a common box.
    pub fn eval_tm(&self, x: &TaylorModel2, y: &TaylorModel2) -> Result<TaylorModel2> {
        self.root.eval_tm(x, y)
    }

    /// `self + other` as a new tree.
    pub fn plus(&self, other: &SourceExpr) -> SourceExpr {
        SourceExpr::from_node(Node::Binary(BinOp::Add, Box::new(self.root.clone()), Box::new(other.root.clone())))
    }

    /// `self - other` as a new tree.
    pub fn minus(&self, other: &SourceExpr) -> SourceExpr {
        SourceExpr::from_node(Node::Binary(BinOp::Sub, Box::new(self.root.clone()), Box::new(other.root.clone())))
    }

    /// `-self` as a new tree.
    pub fn negated(&self) -> SourceExpr {
        SourceExpr::from_node(Node::Neg(Box::new(self.root.clone())))
    }
}

fn lit(value: f64, exact: bool) -> Interval {
    if exact {
        Interval::point(value)
    } else {
        Interval::around(value)
    }
}

impl Node {
    fn any(&self, pred: &dyn Fn(&Node) -> bool) -> bool {
        if pred(self) {
            return true;
        }
        match self {
            Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => a.any(pred),
            Node::Binary(_, a, b) => a.any(pred) || b.any(pred),
            _ => false,
        }
    }

    pub fn eval_point(&self, x: f64, y: f64) -> Result<f64> {
        let v = match self {
            Node::Num { value, .. } => *value,
            Node::Pi => std::f64::consts::PI,
            Node::X => x,
            Node::Y => y,
            Node::Neg(a) => -a.eval_point(x, y)?,
            Node::Binary(op, a, b) => {
                let (a, b) = (a.eval_point(x, y)?, b.eval_point(x, y)?);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(domain("division by zero"));
                        }
                        a / b
                    }
                    BinOp::Min => a.min(b),
                    BinOp::Max => a.max(b),
                }
            }
            Node::Pow(a, n) => {
                let a = a.eval_point(x, y)?;
                if *n < 0 && a == 0.0 {
                    return Err(domain("negative power of zero"));
                }
                a.powi(*n)
            }
            Node::Call(f, a) => {
                let a = a.eval_point(x, y)?;
                match f {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Exp => a.exp(),
                    Func::Log => {
                        if a <= 0.0 {
                            return Err(domain(format!("log of {a}")));
                        }
                        a.ln()
                    }
                    Func::Sqrt => {
                        if a < 0.0 {
                            return Err(domain(format!("sqrt of {a}")));
                        }
                        a.sqrt()
                    }
                    Func::Abs => a.abs(),
                }
            }
        };
        if v.is_nan() {
            return Err(domain("expression evaluated to NaN"));
        }
        Ok(v)
    }

    pub fn eval_interval(&self, x: Interval, y: Interval) -> Result<Interval> {
        Ok(match self {
            Node::Num { value, exact } => lit(*value, *exact),
            Node::Pi => Interval::pi(),
            Node::X => x,
            Node::Y => y,
            Node::Neg(a) => -a.eval_interval(x, y)?,
            Node::Binary(op, a, b) => {
                let (a, b) = (a.eval_interval(x, y)?, b.eval_interval(x, y)?);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a.try_div(b)?,
                    BinOp::Min => a.min(b),
                    BinOp::Max => a.max(b),
                }
            }
            Node::Pow(a, n) => a.eval_interval(x, y)?.powi(*n)?,
            Node::Call(f, a) => {
                let a = a.eval_interval(x, y)?;
                match f {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Exp => a.exp()?,
                    Func::Log => a.log()?,
                    Func::Sqrt => a.sqrt()?,
                    Func::Abs => a.abs(),
                }
            }
        })
    }

    pub fn eval_tm(&self, x: &TaylorModel2, y: &TaylorModel2) -> Result<TaylorModel2> {
        let konst = |c: Interval| TaylorModel2::constant(c, x.box2(), x.degrees());
        match self {
            Node::Num { value, exact } => konst(lit(*value, *exact)),
            Node::Pi => konst(Interval::pi()),
            Node::X => Ok(x.clone()),
            Node::Y => Ok(y.clone()),
            Node::Neg(a) => Ok(a.eval_tm(x, y)?.neg()),
            Node::Binary(op, a, b) => {
                // Constant operands scale instead of multiplying models.
                let ca = constant_of(a);
                let cb = constant_of(b);
                match (op, ca, cb) {
                    (BinOp::Mul, Some(c), _) => return Ok(b.eval_tm(x, y)?.scale(c)),
                    (BinOp::Mul, _, Some(c)) => return Ok(a.eval_tm(x, y)?.scale(c)),
                    (BinOp::Div, _, Some(c)) => return Ok(a.eval_tm(x, y)?.scale(c.recip()?)),
                    _ => {}
                }
                let (a, b) = (a.eval_tm(x, y)?, b.eval_tm(x, y)?);
                match op {
                    BinOp::Add => a.add(&b),
                    BinOp::Sub => a.sub(&b),
                    BinOp::Mul => a.mul(&b),
                    BinOp::Div => a.try_div(&b),
                    BinOp::Min => a.min(&b),
                    BinOp::Max => a.max(&b),
                }
            }
            Node::Pow(a, n) => a.eval_tm(x, y)?.powi(*n),
            Node::Call(f, a) => {
                let a = a.eval_tm(x, y)?;
                match f {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Exp => a.exp(),
                    Func::Log => a.log(),
                    Func::Sqrt => a.sqrt(),
                    Func::Abs => a.abs(),
                }
            }
        }
    }
}

fn constant_of(n: &Node) -> Option<Interval> {
    if n.any(&|m| matches!(m, Node::X | Node::Y)) {
        None
    } else {
        n.eval_interval(Interval::ZERO, Interval::ZERO).ok()
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Num { value, .. } => write!(f, "{value}"),
            Node::Pi => f.write_str("pi"),
            Node::X => f.write_str("x"),
            Node::Y => f.write_str("y"),
            Node::Neg(a) => write!(f, "(-{a})"),
            Node::Binary(op, a, b) => match op {
                BinOp::Add => write!(f, "({a} + {b})"),
                BinOp::Sub => write!(f, "({a} - {b})"),
                BinOp::Mul => write!(f, "({a} * {b})"),
                BinOp::Div => write!(f, "({a} / {b})"),
                BinOp::Min => write!(f, "min({a}, {b})"),
                BinOp::Max => write!(f, "max({a}, {b})"),
            },
            Node::Pow(a, n) => write!(f, "{a}^{n}"),
            Node::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

/// A one-dimensional source on `(0, 1)` given piece by piece.
///
/// Piece `i` applies on `[b[i-1], b[i])` with `b[-1] = 0` and `b[n] = 1`,
/// so the source is right-continuous at each breakpoint.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseSource1D {
    breakpoints: Vec<f64>,
    pieces: Vec<SourceExpr>,
}

impl PiecewiseSource1D {
    pub fn new(breakpoints: Vec<f64>, pieces: Vec<SourceExpr>) -> Result<Self> {
        if pieces.len() != breakpoints.len() + 1 {
            return Err(Error::Invalid(format!(
                "{} breakpoints need {} pieces, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                pieces.len()
            )));
        }
        let mut prev = 0.0;
        for &b in &breakpoints {
            if !(b > prev && b < 1.0) {
                return Err(Error::Invalid(format!(
                    "breakpoints must be strictly increasing inside (0, 1), got {breakpoints:?}"
                )));
            }
            prev = b;
        }
        if let Some(p) = pieces.iter().find(|p| p.uses_y()) {
            return Err(Error::Invalid(format!("one-dimensional source piece `{p}` uses y")));
        }
        Ok(PiecewiseSource1D { breakpoints, pieces })
    }

    /// A single smooth piece on the whole interval.
    pub fn smooth(f: SourceExpr) -> Result<Self> {
        PiecewiseSource1D::new(Vec::new(), vec![f])
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[SourceExpr] {
        &self.pieces
    }

    /// `(lo, hi, piece)` for each segment, covering `[0, 1]` in order.
    pub fn segments(&self) -> impl Iterator<Item = (f64, f64, &SourceExpr)> + '_ {
        let n = self.pieces.len();
        (0..n).map(move |i| {
            let lo = if i == 0 { 0.0 } else { self.breakpoints[i - 1] };
            let hi = if i + 1 == n { 1.0 } else { self.breakpoints[i] };
            (lo, hi, &self.pieces[i])
        })
    }

    pub fn piece_at(&self, x: f64) -> &SourceExpr {
        let i = self.breakpoints.partition_point(|&b| b <= x);
        &self.pieces[i]
    }

    pub fn eval_point(&self, x: f64) -> Result<f64> {
        self.piece_at(x).eval_point(x, 0.0)
    }

    /// Enclosure of every piece value attained on `x`.
    pub fn eval_interval(&self, x: Interval) -> Result<Interval> {
        let mut acc: Option<Interval> = None;
        for (lo, hi, p) in self.segments() {
            let seg = Interval::raw(lo, hi);
            if let Some(part) = x.intersect(seg) {
                let v = p.eval_interval(part, Interval::ZERO)?;
                acc = Some(acc.map_or(v, |a| a.hull(v)));
            }
        }
        acc.ok_or_else(|| Error::Invalid(format!("{x:?} lies outside [0, 1]")))
    }

    pub fn scaled(&self, factor: f64) -> PiecewiseSource1D {
        let c = SourceExpr::constant(factor);
        let pieces = self
            .pieces
            .iter()
            .map(|p| SourceExpr::from_node(Node::Binary(BinOp::Mul, Box::new(c.root.clone()), Box::new(p.root.clone()))))
            .collect();
        PiecewiseSource1D { breakpoints: self.breakpoints.clone(), pieces }
    }
}

impl From<SourceExpr> for PiecewiseSource1D {
    fn from(f: SourceExpr) -> Self {
        PiecewiseSource1D { breakpoints: Vec::new(), pieces: vec![f] }
    }
}
