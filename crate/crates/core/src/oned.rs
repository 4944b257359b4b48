//! The Dirichlet problem `−u'' = f` on `(0, 1)`.
//!
//! With the hat test function `φ_s` the representation reads
//! `u(s) = (1 − s)·F₀(s) + s·F₁(s)`, `F₀(s) = ∫₀ˢ x f`, `F₁(s) = ∫ₛ¹ (1 − x) f`,
//! and `u'(s) = F₁(s) − F₀(s)`. Piecewise-linear sub- and super-solutions
//! are certified against this formula by interval bisection in `s`.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expr::{PiecewiseSource1D, SourceExpr};
use crate::interval::{subdivide_min_max, Box2, Interval, SearchOptions, WithDerivative};
use crate::taylor::{Degrees, TaylorModel2};

const CELLS: usize = 64;
const DEGREE: usize = 8;

/// The hat `φ_s` with `φ_s(0) = φ_s(1) = 0` and `φ_s(s) = 1`, together with
/// its interior weight `a_int = 1/(s(1 − s))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TestFunction1D {
    pub s: f64,
    pub a_int: Interval,
}

impl TestFunction1D {
    pub fn new(s: f64) -> Result<Self> {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::Invalid(format!("evaluation point {s} must lie in (0, 1)")));
        }
        let si = Interval::point(s);
        let a_int = Interval::ONE.try_div(si * (Interval::ONE - si))?;
        Ok(TestFunction1D { s, a_int })
    }

    pub fn phi(&self, x: Interval) -> Result<Interval> {
        let s = Interval::point(self.s);
        let left = |x: Interval| x.try_div(s);
        let right = |x: Interval| (Interval::ONE - x).try_div(Interval::ONE - s);
        if x.hi() <= self.s {
            left(x)
        } else if x.lo() >= self.s {
            right(x)
        } else {
            Ok(left(Interval::raw(x.lo(), self.s))?.hull(right(Interval::raw(self.s, x.hi()))?))
        }
    }

    /// `⟨f, φ_s⟩ = a_int·u(s)`.
    pub fn pairing(&self, f: &PiecewiseSource1D) -> Result<Interval> {
        Ok(green_value(f, self.s)? * self.a_int)
    }
}

struct Cell {
    a: f64,
    b: f64,
    /// `x f` and `(1 − x) f` divided termwise by `j + 1`, in powers of `x − a`.
    xf: Vec<Interval>,
    wf: Vec<Interval>,
}

/// `Σ d_j t^{j+1}`.
fn primitive(d: &[Interval], t: Interval) -> Interval {
    d.iter().rev().fold(Interval::ZERO, |acc, &c| acc * t + c) * t
}

/// Rigorous evaluation of `u(s)` and `u'(s)` over interval arguments.
pub struct GreenEvaluator {
    cells: Vec<Cell>,
    /// `∫₀^{a_c} x f`.
    prefix: Vec<Interval>,
    /// `∫_{a_c}^1 (1 − x) f`.
    suffix: Vec<Interval>,
}

impl GreenEvaluator {
    pub fn new(f: &PiecewiseSource1D) -> Result<Self> {
        let mut knots: Vec<f64> = (0..=CELLS).map(|i| i as f64 / CELLS as f64).collect();
        knots.extend_from_slice(f.breakpoints());
        knots.sort_by(f64::total_cmp);
        knots.dedup();
        let deg = Degrees::new(DEGREE, 0);
        let cells: Vec<Cell> = knots
            .windows(2)
            .collect::<Vec<_>>()
            .par_iter()
            .map(|w| {
                let (a, b) = (w[0], w[1]);
                let bx = Box2::new(Interval::new(a, b)?, Interval::ZERO);
                let x = TaylorModel2::var_u(bx, deg)?;
                let y = TaylorModel2::constant(Interval::ZERO, bx, deg)?;
                let piece = f.piece_at(0.5 * (a + b));
                let ft = piece.eval_tm(&x, &y)?;
                let xf = ft.mul(&x)?;
                let wf = ft.sub(&xf)?;
                let scaled = |m: &TaylorModel2| -> Result<Vec<Interval>> {
                    (0..=DEGREE).map(|j| m.coeff(0, j).try_div(Interval::point((j + 1) as f64))).collect()
                };
                Ok(Cell { a, b, xf: scaled(&xf)?, wf: scaled(&wf)? })
            })
            .collect::<Result<_>>()?;
        let mut prefix = vec![Interval::ZERO; cells.len() + 1];
        let mut suffix = vec![Interval::ZERO; cells.len() + 1];
        for (c, cell) in cells.iter().enumerate() {
            let w = Interval::point(cell.b) - cell.a;
            prefix[c + 1] = prefix[c] + primitive(&cell.xf, w);
        }
        for (c, cell) in cells.iter().enumerate().rev() {
            let w = Interval::point(cell.b) - cell.a;
            suffix[c] = suffix[c + 1] + primitive(&cell.wf, w);
        }
        Ok(GreenEvaluator { cells, prefix, suffix })
    }

    /// `(s, F₀(s), F₁(s))` for each cell piece of `s`.
    fn pieces(&self, s: Interval) -> Result<Vec<(Interval, Interval, Interval)>> {
        let s = s
            .intersect(Interval::raw(0.0, 1.0))
            .ok_or_else(|| Error::Invalid(format!("{s:?} lies outside [0, 1]")))?;
        let first = self.cells.partition_point(|c| c.b < s.lo()).min(self.cells.len() - 1);
        let mut out = Vec::new();
        for (c, cell) in self.cells.iter().enumerate().skip(first) {
            if cell.a > s.hi() {
                break;
            }
            let Some(sc) = s.intersect(Interval::raw(cell.a, cell.b)) else { continue };
            let t = (sc - cell.a).max(Interval::ZERO);
            let f0 = self.prefix[c] + primitive(&cell.xf, t);
            let f1 = self.suffix[c] - primitive(&cell.wf, t);
            out.push((sc, f0, f1));
        }
        Ok(out)
    }

    /// Enclosure of `u` over `s`.
    pub fn value(&self, s: Interval) -> Result<Interval> {
        let mut acc: Option<Interval> = None;
        for (sc, f0, f1) in self.pieces(s)? {
            let v = (Interval::ONE - sc) * f0 + sc * f1;
            acc = Some(acc.map_or(v, |a| a.hull(v)));
        }
        acc.ok_or_else(|| Error::Invalid("empty evaluation range".into()))
    }

    /// Enclosure of `u' = F₁ − F₀` over `s`.
    pub fn derivative(&self, s: Interval) -> Result<Interval> {
        let mut acc: Option<Interval> = None;
        for (_, f0, f1) in self.pieces(s)? {
            let v = f1 - f0;
            acc = Some(acc.map_or(v, |a| a.hull(v)));
        }
        acc.ok_or_else(|| Error::Invalid("empty evaluation range".into()))
    }
}

/// Enclosure of `u(s) = s(1 − s)·⟨f, φ_s⟩`.
pub fn green_value(f: &PiecewiseSource1D, s: f64) -> Result<Interval> {
    TestFunction1D::new(s)?;
    GreenEvaluator::new(f)?.value(Interval::point(s))
}

/// Enclosures of `inf u` and `sup u` over `(0, 1)`: the optimal constant
/// sub- and super-solutions.
pub fn optimal_constant_bounds(f: &PiecewiseSource1D, tol: f64) -> Result<(Interval, Interval)> {
    let ev = GreenEvaluator::new(f)?;
    let g = WithDerivative(|s: Interval| ev.value(s), |s: Interval| ev.derivative(s));
    let e = subdivide_min_max(&g, Interval::raw(0.0, 1.0), &SearchOptions::with_tol(tol))?;
    Ok((e.min, e.max))
}

/// Upper bound on `sup |f|` over `(0, 1)`.
pub fn sup_norm(f: &PiecewiseSource1D) -> Result<f64> {
    let mut m = 0.0f64;
    for (lo, hi, piece) in f.segments() {
        let g = |x: Interval| piece.eval_interval(x, Interval::ZERO);
        let e = subdivide_min_max(&g, Interval::raw(lo, hi), &SearchOptions::with_tol(1e-6))?;
        m = m.max(e.min.lo().abs()).max(e.max.hi().abs());
    }
    Ok(m)
}

/// Piecewise-linear function on the uniform grid `x_i = i/N`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction1D {
    /// Mesh width `1/N`.
    pub h: f64,
    /// Nodal values at `x_0 = 0, …, x_N = 1`.
    pub values: Vec<f64>,
    /// Boundary shift `c`; endpoint values are `c` (super) or `−c` (sub).
    pub shift: f64,
}

/// Number of intervals `N` for a mesh width `h = 1/N`.
pub fn intervals_for(h: f64) -> Result<usize> {
    let n = (1.0 / h).round();
    if !(h > 0.0) || n < 2.0 || (n * h - 1.0).abs() > 1e-9 || n > 1e8 {
        return Err(Error::Invalid(format!("mesh width {h} is not 1/N for an integer N ≥ 2")));
    }
    Ok(n as usize)
}

impl GridFunction1D {
    pub fn intervals(&self) -> usize {
        self.values.len() - 1
    }

    /// Node `x_i` as an enclosure of `i/N`.
    pub fn node(&self, i: usize) -> Interval {
        Interval::point(i as f64).try_div(Interval::point(self.intervals() as f64)).expect("N > 0")
    }

    pub fn node_f64(&self, i: usize) -> f64 {
        i as f64 / self.intervals() as f64
    }

    /// Linear interpolant on cell `i` evaluated over `s`.
    fn on_cell(&self, i: usize, s: Interval) -> Interval {
        let n = Interval::point(self.intervals() as f64);
        let (x0, x1) = (self.node(i), self.node(i + 1));
        ((x1 - s) * self.values[i] + (s - x0) * self.values[i + 1]) * n
    }

    fn slope(&self, i: usize) -> Interval {
        (Interval::point(self.values[i + 1]) - self.values[i]) * self.intervals() as f64
    }

    /// Largest nodal difference `upper − lower`.
    pub fn max_gap(upper: &GridFunction1D, lower: &GridFunction1D) -> f64 {
        upper.values.iter().zip(&lower.values).map(|(u, l)| u - l).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Result of checking one subinterval.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckOutcome {
    Holds,
    Violated,
    Undecided,
}

impl CheckOutcome {
    fn combine(self, other: CheckOutcome) -> CheckOutcome {
        use CheckOutcome::*;
        match (self, other) {
            (Violated, _) | (_, Violated) => Violated,
            (Undecided, _) | (_, Undecided) => Undecided,
            _ => Holds,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Super,
    Sub,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Super => 1.0,
            Side::Sub => -1.0,
        }
    }
}

/// Checks the sub-/super-solution inequalities on subintervals.
///
/// For a piecewise-linear `v` the super-solution condition at `s`,
/// multiplied by `s(1 − s) > 0`, reads
/// `D(s) = v(s) − (1 − s)v(0) − s·v(1) + c − u(s) ≥ 0`; the sub-solution
/// condition is the same with `v` and `u` negated.
pub struct Checker {
    ev: GreenEvaluator,
    pub max_depth: u32,
}

impl Checker {
    pub fn new(f: &PiecewiseSource1D) -> Result<Self> {
        Ok(Checker { ev: GreenEvaluator::new(f)?, max_depth: 30 })
    }

    pub fn evaluator(&self) -> &GreenEvaluator {
        &self.ev
    }

    fn margin(&self, g: &GridFunction1D, c: f64, i: usize, side: Side, s: Interval) -> Result<Interval> {
        let sg = side.sign();
        let n = g.intervals();
        let v = g.on_cell(i, s) - (Interval::ONE - s) * g.values[0] - s * g.values[n] - self.ev.value(s)?;
        Ok(v * sg + c)
    }

    fn margin_derivative(&self, g: &GridFunction1D, i: usize, side: Side, s: Interval) -> Result<Interval> {
        let n = g.intervals();
        let d = g.slope(i) + g.values[0] - g.values[n] - self.ev.derivative(s)?;
        Ok(d * side.sign())
    }

    fn decide(&self, g: &GridFunction1D, c: f64, i: usize, side: Side, s: Interval, depth: u32) -> Result<CheckOutcome> {
        let m = Interval::point(s.mid());
        let dm = self.margin(g, c, i, side, m)?;
        let natural = self.margin(g, c, i, side, s)?;
        let mean_value = dm + self.margin_derivative(g, i, side, s)? * (s - m);
        let e = natural.intersect(mean_value).unwrap_or(natural);
        if e.lo() >= 0.0 {
            return Ok(CheckOutcome::Holds);
        }
        if dm.hi() < 0.0 {
            return Ok(CheckOutcome::Violated);
        }
        if depth >= self.max_depth || s.width() <= 0.0 {
            return Ok(CheckOutcome::Undecided);
        }
        let (l, r) = s.bisect();
        let left = self.decide(g, c, i, side, l, depth + 1)?;
        if left == CheckOutcome::Violated {
            return Ok(left);
        }
        Ok(left.combine(self.decide(g, c, i, side, r, depth + 1)?))
    }

    /// Decides the condition for every `s` in `I_i = [x_i, x_{i+1}]`.
    pub fn check(&self, g: &GridFunction1D, c: f64, i: usize, side: Side) -> Result<CheckOutcome> {
        if i >= g.intervals() {
            return Err(Error::Invalid(format!("subinterval {i} out of range")));
        }
        let s = g.node(i).hull(g.node(i + 1));
        self.decide(g, c, i, side, s, 0)
    }

    pub fn check_all(&self, g: &GridFunction1D, c: f64, side: Side) -> Result<Vec<CheckOutcome>> {
        (0..g.intervals()).into_par_iter().map(|i| self.check(g, c, i, side)).collect()
    }
}

pub fn check_super(ubar: &GridFunction1D, f: &PiecewiseSource1D, c: f64, i: usize) -> Result<CheckOutcome> {
    Checker::new(f)?.check(ubar, c, i, Side::Super)
}

pub fn check_sub(ulow: &GridFunction1D, f: &PiecewiseSource1D, c: f64, i: usize) -> Result<CheckOutcome> {
    Checker::new(f)?.check(ulow, c, i, Side::Sub)
}

/// `ε = factor·h·|f|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpsRule {
    pub factor: f64,
}

impl Default for EpsRule {
    fn default() -> Self {
        EpsRule { factor: 0.25 }
    }
}

impl EpsRule {
    pub fn eps(&self, h: f64, sup_f: f64) -> f64 {
        self.factor * h * sup_f
    }
}

/// Solves `(2v_i − v_{i−1} − v_{i+1})/h² = rhs_i` with zero end values.
fn solve_dirichlet(rhs: &[f64], h: f64) -> Vec<f64> {
    let n = rhs.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    for i in 0..n {
        let (cp, dp) = if i > 0 { (c[i - 1], d[i - 1]) } else { (0.0, 0.0) };
        let m = 2.0 + cp;
        c[i] = -1.0 / m;
        d[i] = (h * h * rhs[i] + dp) / m;
    }
    let mut v = vec![0.0; n];
    for i in (0..n).rev() {
        v[i] = d[i] - c[i] * if i + 1 < n { v[i + 1] } else { 0.0 };
    }
    v
}

/// Outcome of the sub- or super-solution construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Construction {
    pub grid: GridFunction1D,
    /// Number of perturb-and-resolve passes.
    pub iterations: usize,
    pub eps: f64,
}

/// Iteration cap for [`construct`].
pub const MAX_PASSES: usize = 10_000;

/// Finite-difference candidate plus boundary shift, with the
/// discrete source pushed by `±ε` at both ends of every subinterval that is
/// not certified, until every subinterval is certified.
pub fn construct(checker: &Checker, f: &PiecewiseSource1D, h: f64, c: f64, eps: f64, side: Side) -> Result<Construction> {
    let n = intervals_for(h)?;
    if !(c >= 0.0) || !c.is_finite() {
        return Err(Error::Invalid(format!("boundary shift must be nonnegative, got {c}")));
    }
    let hh = 1.0 / n as f64;
    let sg = side.sign();
    let mut rhs: Vec<f64> = (1..n).map(|i| f.eval_point(i as f64 * hh)).collect::<Result<_>>()?;
    let mut iterations = 0;
    loop {
        let v = solve_dirichlet(&rhs, hh);
        let mut values = Vec::with_capacity(n + 1);
        values.push(sg * c);
        values.extend(v.iter().map(|x| x + sg * c));
        values.push(sg * c);
        let grid = GridFunction1D { h, values, shift: c };
        let outcomes = checker.check_all(&grid, c, side)?;
        if outcomes.iter().all(|o| *o == CheckOutcome::Holds) {
            return Ok(Construction { grid, iterations, eps });
        }
        if eps <= 0.0 || iterations >= MAX_PASSES {
            return Err(Error::Budget(format!(
                "construction stopped after {iterations} passes with {} uncertified subintervals (h = {h}, c = {c}, ε = {eps})",
                outcomes.iter().filter(|o| **o != CheckOutcome::Holds).count()
            )));
        }
        for (i, o) in outcomes.iter().enumerate() {
            if *o != CheckOutcome::Holds {
                // Interior nodes only: unknowns are x_1, …, x_{N−1}.
                for node in [i, i + 1] {
                    if node >= 1 && node < n {
                        rhs[node - 1] += sg * eps;
                    }
                }
            }
        }
        iterations += 1;
    }
}

pub fn build_super(f: &PiecewiseSource1D, h: f64, c: f64, eps_rule: EpsRule) -> Result<GridFunction1D> {
    let eps = eps_rule.eps(h, sup_norm(f)?);
    Ok(construct(&Checker::new(f)?, f, h, c, eps, Side::Super)?.grid)
}

pub fn build_sub(f: &PiecewiseSource1D, h: f64, c: f64, eps_rule: EpsRule) -> Result<GridFunction1D> {
    let eps = eps_rule.eps(h, sup_norm(f)?);
    Ok(construct(&Checker::new(f)?, f, h, c, eps, Side::Sub)?.grid)
}

/// Boundary shift as a function of the mesh width.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ShiftRule {
    Constant(f64),
    /// `c = coef·|f|·h^power`.
    Scaled { coef: f64, power: f64 },
}

impl Default for ShiftRule {
    fn default() -> Self {
        ShiftRule::Scaled { coef: 0.2, power: 2.0 }
    }
}

impl ShiftRule {
    pub fn shift(&self, h: f64, sup_f: f64) -> f64 {
        match *self {
            ShiftRule::Constant(c) => c,
            ShiftRule::Scaled { coef, power } => coef * sup_f * h.powf(power),
        }
    }
}

/// Certified sub- and super-solution pair.
#[derive(Clone, Debug, PartialEq)]
pub struct Enclosure1D {
    pub lower: Construction,
    pub upper: Construction,
}

impl Enclosure1D {
    pub fn max_gap(&self) -> f64 {
        GridFunction1D::max_gap(&self.upper.grid, &self.lower.grid)
    }

    /// Writes `x, lower, upper` per node.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["x", "lower", "upper"])?;
        for (i, (l, u)) in self.lower.grid.values.iter().zip(&self.upper.grid.values).enumerate() {
            let x = self.lower.grid.node_f64(i);
            out.write_record([x.to_string(), l.to_string(), u.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Builds the super- and sub-solution for the same `h`, `c` and `ε`.
pub fn enclose_1d(f: &PiecewiseSource1D, h: f64, c: f64, eps_rule: EpsRule) -> Result<Enclosure1D> {
    let checker = Checker::new(f)?;
    let eps = eps_rule.eps(h, sup_norm(f)?);
    let upper = construct(&checker, f, h, c, eps, Side::Super)?;
    let lower = construct(&checker, f, h, c, eps, Side::Sub)?;
    Ok(Enclosure1D { lower, upper })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub h: f64,
    pub c: f64,
    pub eps: f64,
    pub iterations: usize,
    pub max_gap: f64,
}

pub fn sweep(f: &PiecewiseSource1D, hs: &[f64], c_rule: ShiftRule, eps_rule: EpsRule) -> Result<Vec<SweepRow>> {
    if hs.is_empty() {
        return Err(Error::Invalid("sweep needs at least one mesh width".into()));
    }
    let checker = Checker::new(f)?;
    let sup_f = sup_norm(f)?;
    hs.iter()
        .map(|&h| {
            let c = c_rule.shift(h, sup_f);
            let eps = eps_rule.eps(h, sup_f);
            let upper = construct(&checker, f, h, c, eps, Side::Super)?;
            let lower = construct(&checker, f, h, c, eps, Side::Sub)?;
            Ok(SweepRow {
                h,
                c,
                eps,
                iterations: upper.iterations + lower.iterations,
                max_gap: GridFunction1D::max_gap(&upper.grid, &lower.grid),
            })
        })
        .collect()
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["h", "c", "eps", "iterations", "max_gap"])?;
    for r in rows {
        out.write_record([r.h.to_string(), r.c.to_string(), r.eps.to_string(), r.iterations.to_string(), r.max_gap.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

/// `f = base` on `[0, a)` and `base + jump` on `[a, 1)`.
pub fn jump_source(base: f64, a: f64, jump: f64) -> Result<PiecewiseSource1D> {
    PiecewiseSource1D::new(vec![a], vec![SourceExpr::constant(base), SourceExpr::constant(base + jump)])
}
