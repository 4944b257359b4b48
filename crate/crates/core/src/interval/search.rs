//! Rigorous global extrema of a scalar function over an interval by
//! best-first bisection.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::Interval;
use crate::error::{Error, Result};

/// A scalar function that can be evaluated over intervals.
///
/// Implementations must return enclosures: `eval(X)` contains `g(t)` for
/// every `t` in `X`. An optional derivative enclosure sharpens the search.
pub trait RangeFn {
    fn eval(&self, x: Interval) -> Result<Interval>;

    fn derivative(&self, _x: Interval) -> Option<Result<Interval>> {
        None
    }
}

impl<F> RangeFn for F
where
    F: Fn(Interval) -> Result<Interval>,
{
    fn eval(&self, x: Interval) -> Result<Interval> {
        self(x)
    }
}

/// Pairs a function with an enclosure of its derivative.
pub struct WithDerivative<F, D>(pub F, pub D);

impl<F, D> RangeFn for WithDerivative<F, D>
where
    F: Fn(Interval) -> Result<Interval>,
    D: Fn(Interval) -> Result<Interval>,
{
    fn eval(&self, x: Interval) -> Result<Interval> {
        (self.0)(x)
    }

    fn derivative(&self, x: Interval) -> Option<Result<Interval>> {
        Some((self.1)(x))
    }
}

struct Negated<'a, G: ?Sized>(&'a G);

impl<G: RangeFn + ?Sized> RangeFn for Negated<'_, G> {
    fn eval(&self, x: Interval) -> Result<Interval> {
        self.0.eval(x).map(|v| -v)
    }

    fn derivative(&self, x: Interval) -> Option<Result<Interval>> {
        self.0.derivative(x).map(|d| d.map(|v| -v))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchOptions {
    /// Target width of each extremum enclosure.
    pub tol: f64,
    /// Maximum bisection depth.
    pub max_depth: u32,
    /// Maximum number of function evaluations per extremum.
    pub max_evals: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { tol: 1e-12, max_depth: 40, max_evals: 200_000 }
    }
}

impl SearchOptions {
    pub fn with_tol(tol: f64) -> Self {
        SearchOptions { tol, ..Self::default() }
    }
}

/// Enclosures of the infimum and supremum of a function over a domain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Extrema {
    /// Contains the true infimum.
    pub min: Interval,
    /// Contains the true supremum.
    pub max: Interval,
    /// Both enclosures reached `tol`.
    pub converged: bool,
    /// Deepest bisection level visited.
    pub depth: u32,
    pub evaluations: usize,
}

struct Cell {
    lb: f64,
    x: Interval,
    depth: u32,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.lb == other.lb
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        // Min-heap on the lower bound.
        other.lb.total_cmp(&self.lb)
    }
}

/// Best available enclosure of `g` over `x`.
pub(crate) fn enclose<G: RangeFn + ?Sized>(g: &G, x: Interval) -> Result<Interval> {
    let natural = g.eval(x)?;
    if x.is_point() {
        return Ok(natural);
    }
    let Some(d) = g.derivative(x) else {
        return Ok(natural);
    };
    let d = d?;
    let refined = if d.lo() >= 0.0 {
        let a = g.eval(Interval::point(x.lo()))?;
        let b = g.eval(Interval::point(x.hi()))?;
        Interval::raw(a.lo(), b.hi())
    } else if d.hi() <= 0.0 {
        let a = g.eval(Interval::point(x.lo()))?;
        let b = g.eval(Interval::point(x.hi()))?;
        Interval::raw(b.lo(), a.hi())
    } else {
        let c = x.mid();
        g.eval(Interval::point(c))? + d * (x - c)
    };
    Ok(natural.intersect(refined).unwrap_or(refined))
}

struct MinResult {
    enclosure: Interval,
    converged: bool,
    depth: u32,
    evaluations: usize,
}

fn minimize<G: RangeFn + ?Sized>(g: &G, domain: Interval, opts: &SearchOptions) -> Result<MinResult> {
    let mut evaluations = 0usize;
    let mut ub = f64::INFINITY;
    for t in [domain.lo(), domain.mid(), domain.hi()] {
        ub = ub.min(g.eval(Interval::point(t))?.hi());
        evaluations += 1;
    }
    let mut heap = BinaryHeap::new();
    let root = enclose(g, domain)?;
    evaluations += 1;
    heap.push(Cell { lb: root.lo(), x: domain, depth: 0 });
    let mut leaf_lb = f64::INFINITY;
    let mut max_depth_seen = 0;
    let mut converged = true;

    loop {
        let top_lb = heap.peek().map_or(f64::INFINITY, |c| c.lb);
        let lb = top_lb.min(leaf_lb);
        if ub - lb <= opts.tol || heap.is_empty() {
            if ub - lb > opts.tol {
                converged = false;
            }
            break;
        }
        if evaluations >= opts.max_evals {
            converged = false;
            break;
        }
        let cell = heap.pop().expect("heap is nonempty");
        if cell.lb > ub {
            continue;
        }
        if cell.depth >= opts.max_depth || cell.x.width() == 0.0 {
            leaf_lb = leaf_lb.min(cell.lb);
            continue;
        }
        let (a, b) = cell.x.bisect();
        if a.is_point() || b.is_point() {
            leaf_lb = leaf_lb.min(cell.lb);
            continue;
        }
        let depth = cell.depth + 1;
        max_depth_seen = max_depth_seen.max(depth);
        for part in [a, b] {
            let v = enclose(g, part)?;
            ub = ub.min(g.eval(Interval::point(part.mid()))?.hi());
            evaluations += 2;
            // Never let a child's bound drop below the parent's.
            let lb = v.lo().max(cell.lb);
            if lb <= ub {
                heap.push(Cell { lb, x: part, depth });
            }
        }
    }
    let top_lb = heap.peek().map_or(f64::INFINITY, |c| c.lb);
    let lb = top_lb.min(leaf_lb).min(ub);
    Ok(MinResult {
        enclosure: Interval::raw(lb, ub),
        converged,
        depth: max_depth_seen,
        evaluations,
    })
}

/// Encloses `inf g` and `sup g` over `domain`.
///
/// The returned `min` contains the true infimum and `max` the true supremum
/// regardless of convergence; `converged` reports whether both reached
/// `opts.tol` within the depth and evaluation budget.
pub fn subdivide_min_max<G: RangeFn + ?Sized>(
    g: &G,
    domain: Interval,
    opts: &SearchOptions,
) -> Result<Extrema> {
    if !(opts.tol > 0.0) {
        return Err(Error::Invalid(format!("tolerance must be positive, got {}", opts.tol)));
    }
    if !domain.is_finite() {
        return Err(Error::Invalid("search domain must be bounded".into()));
    }
    let lo = minimize(g, domain, opts)?;
    let hi = minimize(&Negated(g), domain, opts)?;
    Ok(Extrema {
        min: lo.enclosure,
        max: -hi.enclosure,
        converged: lo.converged && hi.converged,
        depth: lo.depth.max(hi.depth),
        evaluations: lo.evaluations + hi.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Interval {
        Interval::new(0.0, 1.0).unwrap()
    }

    #[test]
    fn constant_function() {
        let g = |_x: Interval| Ok(Interval::point(5.0));
        let e = subdivide_min_max(&g, unit(), &SearchOptions::default()).unwrap();
        assert_eq!(e.min, Interval::point(5.0));
        assert_eq!(e.max, Interval::point(5.0));
        assert!(e.converged);
    }

    #[test]
    fn parabola_vertex() {
        let g = |x: Interval| Ok(x * (Interval::ONE - x));
        let e = subdivide_min_max(&g, unit(), &SearchOptions::default()).unwrap();
        assert!(e.max.contains(0.25));
        assert!(e.min.contains(0.0));
        assert!(e.max.width() <= 1e-6);
    }

    #[test]
    fn derivative_sharpens_parabola() {
        let g = WithDerivative(
            |x: Interval| Ok(x * (Interval::ONE - x)),
            |x: Interval| Ok(Interval::ONE - x.scale_exact(2.0)),
        );
        let e = subdivide_min_max(&g, unit(), &SearchOptions::default()).unwrap();
        assert!(e.max.contains(0.25));
        assert!(e.converged, "{e:?}");
        assert!(e.max.width() <= 1e-12);
    }

    #[test]
    fn sine_on_unit_interval() {
        let g = WithDerivative(|x: Interval| Ok(x.sin()), |x: Interval| Ok(x.cos()));
        let e = subdivide_min_max(&g, unit(), &SearchOptions::default()).unwrap();
        assert!(e.max.contains(0.841_470_984_807_896_5));
        assert!(e.min.contains(0.0));
        assert!(e.converged);
    }

    #[test]
    fn errors_propagate() {
        let g = |x: Interval| x.log();
        assert!(subdivide_min_max(&g, unit(), &SearchOptions::default()).is_err());
    }

    #[test]
    fn depth_budget_is_reported() {
        let g = |x: Interval| Ok((x - 0.3).abs());
        let opts = SearchOptions { tol: 1e-30, max_depth: 5, max_evals: 1000 };
        let e = subdivide_min_max(&g, unit(), &opts).unwrap();
        assert!(!e.converged);
        assert!(e.min.contains(0.0));
        assert!(e.depth <= 5);
    }
}
