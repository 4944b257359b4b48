use greenrep::taylor::Elementary;
use greenrep::{Box2, Degrees, Interval, TaylorModel2};
use proptest::prelude::*;

fn interval() -> impl Strategy<Value = Interval> {
    (-1e3f64..1e3, 0.0f64..10.0).prop_map(|(a, w)| Interval::new(a, a + w).unwrap())
}

fn positive() -> impl Strategy<Value = Interval> {
    (1e-6f64..1e3, 0.0f64..10.0).prop_map(|(a, w)| Interval::new(a, a + w).unwrap())
}

fn pick(x: Interval, t: f64) -> f64 {
    (x.lo() + t * (x.hi() - x.lo())).clamp(x.lo(), x.hi())
}

fn sub_interval(x: Interval, s: f64, t: f64) -> Interval {
    let (a, b) = (pick(x, s.min(t)), pick(x, s.max(t)));
    Interval::new(a, b).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn arithmetic_contains_pointwise(x in interval(), y in interval(), s in 0.0f64..=1.0, t in 0.0f64..=1.0) {
        let (a, b) = (pick(x, s), pick(y, t));
        prop_assert!((x + y).contains(a + b));
        prop_assert!((x - y).contains(a - b));
        prop_assert!((x * y).contains(a * b));
        prop_assert!(x.sqr().contains(a * a));
        if !y.contains_zero() {
            prop_assert!(x.try_div(y).unwrap().contains(a / b));
        }
    }

    #[test]
    fn elementary_contains_pointwise(x in interval(), p in positive(), s in 0.0f64..=1.0) {
        let a = pick(x, s);
        let c = pick(p, s);
        let small = Interval::new(x.lo() / 100.0, x.hi() / 100.0).unwrap();
        prop_assert!(small.exp().unwrap().contains((a / 100.0).exp()));
        prop_assert!(x.sin().contains(a.sin()));
        prop_assert!(x.cos().contains(a.cos()));
        prop_assert!(p.log().unwrap().contains(c.ln()));
        prop_assert!(p.sqrt().unwrap().contains(c.sqrt()));
        prop_assert!(p.recip().unwrap().contains(1.0 / c));
        prop_assert!(x.abs().contains(a.abs()));
    }

    #[test]
    fn inclusion_monotone(x in interval(), y in positive(), s in 0.0f64..=1.0, t in 0.0f64..=1.0) {
        let xs = sub_interval(x, s, t);
        let ys = sub_interval(y, s, t);
        prop_assert!((x * y).contains_interval(xs * ys));
        prop_assert!((x + y).contains_interval(xs + ys));
        prop_assert!(x.try_div(y).unwrap().contains_interval(xs.try_div(ys).unwrap()));
        prop_assert!(x.sin().contains_interval(xs.sin()));
        prop_assert!(y.log().unwrap().contains_interval(ys.log().unwrap()));
    }
}

fn tm_case(u0: f64, k0: f64, w: f64, c: [f64; 3], g: Elementary) -> (TaylorModel2, impl Fn(f64, f64) -> Interval) {
    let bx = Box2::new(Interval::new(u0, u0 + w).unwrap(), Interval::new(k0, k0 + w).unwrap());
    let d = Degrees::new(5, 5);
    let u = TaylorModel2::var_u(bx, d).unwrap();
    let k = TaylorModel2::var_k(bx, d).unwrap();
    // p = c0 + c1 u + c2 u k, then g(p)
    let p = u.scale(Interval::point(c[1])).add(&u.mul(&k).unwrap().scale(Interval::point(c[2]))).unwrap().add_const(Interval::point(c[0]));
    let tm = p.compose(g).unwrap();
    // Tight enclosure of the exact value at a point.
    let f = move |a: f64, b: f64| {
        let (a, b) = (Interval::point(a), Interval::point(b));
        let v = a * c[1] + a * b * c[2] + c[0];
        match g {
            Elementary::Exp => v.exp().unwrap(),
            Elementary::Sin => v.sin(),
            Elementary::Cos => v.cos(),
            Elementary::Log => v.log().unwrap(),
            Elementary::Sqrt => v.sqrt().unwrap(),
            Elementary::Recip => v.recip().unwrap(),
        }
    };
    (tm, f)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1_000))]

    #[test]
    fn taylor_model_encloses_function(
        u0 in -1.0f64..1.0,
        k0 in -1.0f64..1.0,
        w in 1e-3f64..0.5,
        c1 in -1.0f64..1.0,
        c2 in -1.0f64..1.0,
        which in 0usize..6,
        s in 0.0f64..=1.0,
        t in 0.0f64..=1.0,
    ) {
        let g = [Elementary::Exp, Elementary::Sin, Elementary::Cos, Elementary::Log, Elementary::Sqrt, Elementary::Recip][which];
        // Keep the inner polynomial in [0.25, 7.75] so every function is defined.
        let (tm, f) = tm_case(u0, k0, w, [4.0, c1, c2], g);
        let (a, b) = (u0 + s * w, k0 + t * w);
        let exact = f(a, b);
        prop_assert!(exact.width() < 1e-12);
        let v = tm.eval(Interval::point(a), Interval::point(b));
        prop_assert!(v.overlaps(exact), "{g:?} at ({a}, {b}): {v:?} vs {exact:?}");
        prop_assert!(tm.range().overlaps(exact));
    }
}
