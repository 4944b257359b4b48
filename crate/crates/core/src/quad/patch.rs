use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{Point, Triangle};
use crate::interval::Interval;

/// A sub-triangle of a parent triangle `A B C`, given in reference
/// coordinates `x = A + α(B − A) + β(C − A)` by its corner
/// `(i/den, j/den)` and legs of length `±1/den` along both axes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Patch {
    pub parent: [Point; 3],
    pub i: i64,
    pub j: i64,
    pub den: i64,
    /// Legs point in the negative directions.
    pub flipped: bool,
}

impl Patch {
    fn ratio(n: i64, d: i64) -> Interval {
        Interval::point(n as f64).try_div(Interval::point(d as f64)).expect("positive denominator")
    }

    fn edges(&self) -> ([Interval; 2], [Interval; 2]) {
        let [a, b, c] = self.parent;
        let ab = [Interval::point(b.x) - a.x, Interval::point(b.y) - a.y];
        let ac = [Interval::point(c.x) - a.x, Interval::point(c.y) - a.y];
        (ab, ac)
    }

    /// Physical corner `p0`.
    pub fn origin(&self) -> [Interval; 2] {
        let a = self.parent[0];
        let (ab, ac) = self.edges();
        let al = Self::ratio(self.i, self.den);
        let be = Self::ratio(self.j, self.den);
        [al * ab[0] + be * ac[0] + a.x, al * ab[1] + be * ac[1] + a.y]
    }

    /// Physical legs `e1`, `e2`.
    pub fn legs(&self) -> ([Interval; 2], [Interval; 2]) {
        let (ab, ac) = self.edges();
        let h = Self::ratio(if self.flipped { -1 } else { 1 }, self.den);
        ([ab[0] * h, ab[1] * h], [ac[0] * h, ac[1] * h])
    }

    /// `|e1 × e2|`, twice the patch area.
    pub fn jacobian(&self) -> Interval {
        let (e1, e2) = self.legs();
        (e1[0] * e2[1] - e1[1] * e2[0]).abs()
    }

    /// Interval hull of the patch.
    pub fn hull(&self) -> [Interval; 2] {
        let o = self.origin();
        let (e1, e2) = self.legs();
        let mut bx = o;
        for d in 0..2 {
            bx[d] = bx[d].hull(o[d] + e1[d]).hull(o[d] + e2[d]);
        }
        bx
    }

    /// The four congruent children.
    pub fn children(&self) -> [Patch; 4] {
        let s = if self.flipped { -1 } else { 1 };
        let (i, j, den) = (2 * self.i, 2 * self.j, 2 * self.den);
        let p = |i, j, flipped| Patch { parent: self.parent, i, j, den, flipped };
        [
            p(i, j, self.flipped),
            p(i + s, j, self.flipped),
            p(i, j + s, self.flipped),
            p(i + s, j + s, !self.flipped),
        ]
    }

    /// Uniform tiling of the parent by `m²` patches.
    pub fn tiling(parent: [Point; 3], m: usize) -> Vec<Patch> {
        let m = m as i64;
        let mut out = Vec::with_capacity((m * m) as usize);
        for i in 0..m {
            for j in 0..m - i {
                out.push(Patch { parent, i, j, den: m, flipped: false });
                if i + j + 1 < m {
                    out.push(Patch { parent, i: i + 1, j: j + 1, den: m, flipped: true });
                }
            }
        }
        out
    }
}

/// Integrand that can be bounded over a patch.
pub trait TriangleIntegrand: Sync {
    type Out: Copy + Send + std::ops::Add<Output = Self::Out>;

    fn zero(&self) -> Self::Out;

    /// Bound over `patch`, or `None` if the patch must be split. `last`
    /// is set once the refinement budget is exhausted.
    fn integrate(&self, patch: &Patch, last: bool) -> Result<Option<Self::Out>>;
}

fn process<I: TriangleIntegrand>(integrand: &I, patch: &Patch, depth: u32, max_depth: u32) -> Result<I::Out> {
    match integrand.integrate(patch, depth >= max_depth)? {
        Some(v) => Ok(v),
        None if depth < max_depth => {
            let mut acc = integrand.zero();
            for c in patch.children() {
                acc = acc + process(integrand, &c, depth + 1, max_depth)?;
            }
            Ok(acc)
        }
        None => Err(Error::Budget(format!("patch refinement exceeded depth {max_depth}"))),
    }
}

/// Integrates over `tri` starting from a uniform `subdiv²` tiling.
pub fn integrate_triangle<I: TriangleIntegrand>(tri: &Triangle, subdiv: usize, max_depth: u32, integrand: &I) -> Result<I::Out> {
    let parts: Vec<Result<I::Out>> =
        Patch::tiling(tri.v, subdiv.max(1)).par_iter().map(|p| process(integrand, p, 0, max_depth)).collect();
    let mut acc = integrand.zero();
    for p in parts {
        acc = acc + p?;
    }
    Ok(acc)
}

/// `|patch| · g(hull)`, split while the bound is undefined or wider than
/// `tol_density · |patch|`.
pub(crate) struct BoxIntegrand<G> {
    pub g: G,
    pub tol_density: f64,
}

impl<G> TriangleIntegrand for BoxIntegrand<G>
where
    G: Fn([Interval; 2]) -> Result<Interval> + Sync,
{
    type Out = Interval;

    fn zero(&self) -> Interval {
        Interval::ZERO
    }

    fn integrate(&self, patch: &Patch, last: bool) -> Result<Option<Interval>> {
        let area = patch.jacobian().scale_exact(0.5);
        match (self.g)(patch.hull()) {
            Ok(v) => {
                let r = v * area;
                Ok((last || r.width() <= self.tol_density * area.hi()).then_some(r))
            }
            Err(Error::Domain(_)) if !last => Ok(None),
            Err(e) => Err(e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parent() -> [Point; 3] {
        [Point::new(0.0, 0.0), Point::new(3.0, 0.0), Point::new(1.0, 2.0)]
    }

    #[test]
    fn tiling_covers_area() {
        for m in [1, 3, 16] {
            let tiles = Patch::tiling(parent(), m);
            assert_eq!(tiles.len(), m * m);
            let total: Interval = tiles.iter().map(|p| p.jacobian().scale_exact(0.5)).sum();
            assert!(total.contains(3.0));
        }
    }

    #[test]
    fn children_partition_parent() {
        for flipped in [false, true] {
            let p = Patch { parent: parent(), i: 1, j: 1, den: 3, flipped };
            let kids = p.children();
            let area: Interval = kids.iter().map(|c| c.jacobian()).sum();
            assert!(area.contains_interval(p.jacobian()) || area.overlaps(p.jacobian()));
            // Every child lies in the parent patch hull.
            let h = p.hull();
            for c in kids {
                let ch = c.hull();
                assert!(h[0].inflate(1e-12).contains_interval(ch[0]) && h[1].inflate(1e-12).contains_interval(ch[1]));
            }
        }
    }
}
