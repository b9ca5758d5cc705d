use hh_bounds::bounds::{lemma1_bounds, lemma2_upper, midpoint_lower, tol_machine, trapezoid_upper, Interval};
use hh_bounds::convexity::ConvexSpec1D;
use hh_bounds::oracle::reference_integral_1d;
use hh_bounds::Fn1D;
use proptest::prelude::*;

fn interval() -> impl Strategy<Value = Interval> {
    (-5.0..5.0f64, 0.1..4.0f64).prop_map(|(lo, len)| Interval::new(lo, lo + len).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn midpoint_and_trapezoid_enclose_the_integral(seed in any::<u64>(), iv in interval(), atoms in 0usize..5) {
        let f = ConvexSpec1D::generate(seed, iv, atoms, false).to_fn();
        let oracle = reference_integral_1d(&f, iv, 1024).unwrap();
        let tol = 1e-9 * oracle.value.abs().max(1e-300);
        for n in 1..=16 {
            let b = lemma1_bounds(&f, iv, n).unwrap();
            prop_assert!(b.lower <= oracle.value + tol + oracle.error_estimate, "n={} {:?} {:?}", n, b, oracle);
            prop_assert!(oracle.value <= b.upper + tol + oracle.error_estimate, "n={} {:?} {:?}", n, b, oracle);
        }
    }

    #[test]
    fn dyadic_refinement_is_monotone(seed in any::<u64>(), iv in interval(), n in 1usize..64) {
        let f = ConvexSpec1D::generate(seed, iv, 3, false).to_fn();
        let m1 = midpoint_lower(&f, iv, n).unwrap();
        let m2 = midpoint_lower(&f, iv, 2 * n).unwrap();
        let t1 = trapezoid_upper(&f, iv, n).unwrap();
        let t2 = trapezoid_upper(&f, iv, 2 * n).unwrap();
        prop_assert!(m2 >= m1 - tol_machine(&[m1, m2]));
        prop_assert!(t2 <= t1 + tol_machine(&[t1, t2]));
    }

    #[test]
    fn affine_is_exact(alpha in -10.0..10.0f64, beta in -10.0..10.0f64, iv in interval(), n in 1usize..100) {
        let exact = 0.5 * alpha * (iv.hi() * iv.hi() - iv.lo() * iv.lo()) + beta * iv.len();
        let b = lemma1_bounds(&Fn1D::new(move |t| alpha * t + beta), iv, n).unwrap();
        let scale = exact.abs().max(alpha.abs() * iv.hi().abs().max(iv.lo().abs()) * iv.len()).max(beta.abs() * iv.len());
        prop_assert!((b.lower - exact).abs() <= 1e-12 * scale.max(1e-300));
        prop_assert!((b.upper - exact).abs() <= 1e-12 * scale.max(1e-300));
    }

    #[test]
    fn lemma2_holds_at_every_t(seed in any::<u64>(), iv in interval(), n in 1usize..16) {
        let f = ConvexSpec1D::generate(seed, iv, 3, true).to_fn();
        let integral = reference_integral_1d(&f, iv, 1024).unwrap().value;
        for i in 0..=10 {
            let t = if i == 10 { iv.hi() } else { iv.lo() + iv.len() * i as f64 / 10.0 };
            let bound = lemma2_upper(&f, iv, t, n).unwrap();
            let lhs = integral - iv.len() * f.eval(t).unwrap();
            prop_assert!(lhs <= bound + 1e-9 * bound.abs().max(1.0));
        }
    }
}

#[test]
fn lemma1_uses_2n_plus_1_evaluations() {
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Arc;
    let count = Arc::new(AtomicUsize::new(0));
    let c = Arc::clone(&count);
    let f = Fn1D::new(move |t| {
        c.fetch_add(1, Ordering::Relaxed);
        t * t
    });
    let iv = Interval::new(0.0, 1.0).unwrap();
    for n in [1, 4, 9] {
        count.store(0, Ordering::Relaxed);
        let b = lemma1_bounds(&f, iv, n).unwrap();
        assert_eq!(b.evals, count.load(Ordering::Relaxed));
        assert_eq!(b.evals, 2 * n + 1);
    }
}
