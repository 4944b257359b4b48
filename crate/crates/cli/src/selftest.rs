//! Fast consistency checks of the numerical kernels.

use clap::ValueEnum;
use greenrep::oned::{green_value, jump_source, optimal_constant_bounds};
use greenrep::quad::{abs_log_moment, log_moment};
use greenrep::{Interval, PiecewiseSource1D, SourceExpr};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Deliberate defects used to check that the self-test detects them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Fault {
    /// Round results to nearest instead of outward.
    Rounding,
}

/// Exact `a + b` and `a·b` as an unevaluated sum `s + e`.
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Whether `x` contains the exact value `s + e` (`|e| ≤ ulp(s)/2`).
fn contains_exact(x: Interval, s: f64, e: f64) -> bool {
    let lo_ok = x.lo() < s || (x.lo() == s && e >= 0.0);
    let hi_ok = x.hi() > s || (x.hi() == s && e <= 0.0);
    lo_ok && hi_ok
}

fn add(a: f64, b: f64, fault: Option<Fault>) -> Interval {
    match fault {
        Some(Fault::Rounding) => Interval::point(a + b),
        None => Interval::point(a) + Interval::point(b),
    }
}

fn mul(a: f64, b: f64, fault: Option<Fault>) -> Interval {
    match fault {
        Some(Fault::Rounding) => Interval::point(a * b),
        None => Interval::point(a) * Interval::point(b),
    }
}

fn interval_containment(fault: Option<Fault>) -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(1);
    let n = 5_000;
    for _ in 0..n {
        let a = rng.gen_range(-1e3..1e3);
        let b = rng.gen_range(-1e3..1e3);
        let (s, e) = two_sum(a, b);
        if !contains_exact(add(a, b, fault), s, e) {
            return Err(format!("{a} + {b} not enclosed"));
        }
        let (p, e) = two_prod(a, b);
        if !contains_exact(mul(a, b, fault), p, e) {
            return Err(format!("{a} * {b} not enclosed"));
        }
        let x = Interval::point(a.abs() + 1e-3);
        let c = a.abs() + 1e-3;
        let ok = x.log().is_ok_and(|v| v.contains(c.ln()))
            && x.sqrt().is_ok_and(|v| v.contains(c.sqrt()))
            && Interval::point(a).sin().contains(a.sin())
            && Interval::point(a / 100.0).exp().is_ok_and(|v| v.contains((a / 100.0).exp()));
        if !ok {
            return Err(format!("elementary function at {a} not enclosed"));
        }
    }
    Ok(format!("{n} random cases"))
}

fn log_moments() -> Result<String, String> {
    let err = |e: greenrep::Error| e.to_string();
    for j in 0..12 {
        // ∫₀¹ u^{j+1} log u du = −1/(j+2)²
        let m = Interval::point(((j + 2) * (j + 2)) as f64);
        let exact = Interval::point(-1.0).try_div(m).map_err(err)?;
        let v = log_moment(Interval::ONE, j).map_err(err)?;
        if !v.overlaps(exact) {
            return Err(format!("log_moment(1, {j}) = {v:?}"));
        }
        let half = Interval::point(0.5);
        let (lm, am) = (log_moment(half, j).map_err(err)?, abs_log_moment(half, j).map_err(err)?);
        if !(-lm).overlaps(am) {
            return Err(format!("abs_log_moment(0.5, {j}) disagrees with log_moment"));
        }
    }
    let v = log_moment(Interval::point(0.5), 0).map_err(err)?;
    if !v.inflate(1e-16).contains(-0.14914339756999317) {
        return Err(format!("log_moment(0.5, 0) = {v:?}"));
    }
    Ok("12 orders".into())
}

fn representation_1d() -> Result<String, String> {
    let err = |e: greenrep::Error| e.to_string();
    let one = PiecewiseSource1D::smooth(SourceExpr::constant(1.0)).map_err(err)?;
    for k in 1..16 {
        let s = k as f64 / 16.0;
        let v = green_value(&one, s).map_err(err)?;
        if !v.contains(s * (1.0 - s) / 2.0) {
            return Err(format!("green_value(1, {s}) = {v:?}"));
        }
    }
    // f = 1 left of 1/2, 2 right of it.
    let jump = jump_source(1.0, 0.5, 1.0).map_err(err)?;
    let v = green_value(&jump, 0.5).map_err(err)?;
    let exact = 0.1875;
    if !v.contains(exact) {
        return Err(format!("green_value(jump, 0.5) = {v:?}, expected {exact}"));
    }
    let (_, max) = optimal_constant_bounds(&one, 1e-12).map_err(err)?;
    if !(max.contains(0.125) && max.width() <= 1e-9) {
        return Err(format!("optimal constant {max:?}"));
    }
    Ok("Green representation and optimal constant".into())
}

/// Runs every check, printing one line each; returns whether all passed.
pub fn run(fault: Option<Fault>) -> bool {
    let checks: [(&str, Box<dyn Fn() -> Result<String, String>>); 3] = [
        ("interval containment", Box::new(move || interval_containment(fault))),
        ("log moment identities", Box::new(log_moments)),
        ("1D representation", Box::new(representation_1d)),
    ];
    let mut ok = true;
    for (name, check) in checks {
        match check() {
            Ok(msg) => println!("PASS {name}: {msg}"),
            Err(msg) => {
                ok = false;
                println!("FAIL {name}: {msg}");
            }
        }
    }
    ok
}
