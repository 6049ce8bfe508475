mod common;

use approx::assert_relative_eq;
use grenander::estimator::ecdf_lcm;
use grenander::penalized::penalized_objective;
use grenander::{grenander, inverse_process, penalized_fit, Sample};
use proptest::prelude::*;

use common::{npmle_brute_force, penalized_grid_search, structural_violations, Lcg};

fn positive_sample() -> impl Strategy<Value = Sample> {
    prop::collection::vec(1u32..60, 1..80)
        .prop_map(|v| Sample::ingest(&v.iter().map(|&k| k as f64 / 8.0).collect::<Vec<_>>()).unwrap())
}

proptest! {
    #[test]
    fn majorant_structure(s in positive_sample(), a in 0.01f64..5.0, x in 0.0f64..10.0) {
        prop_assert_eq!(structural_violations(&s, &[(a, x)]), 0);
    }

    #[test]
    fn heights_nonincreasing_and_positive(s in positive_sample()) {
        let d = grenander(&s).unwrap();
        prop_assert!(d.heights().iter().all(|&h| h > 0.0));
        prop_assert!(d.heights().windows(2).all(|w| w[1] < w[0]));
        prop_assert_eq!(d.upper_support(), s.max());
    }

    #[test]
    fn scale_equivariance(s in positive_sample(), sigma in 0.1f64..10.0, x in 0.0f64..10.0) {
        let d = grenander(&s).unwrap();
        let ds = grenander(&s.scaled(sigma).unwrap()).unwrap();
        let lhs = ds.eval(sigma * x).unwrap();
        let rhs = d.eval(x).unwrap() / sigma;
        prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs.max(1.0));
    }

    #[test]
    fn inverse_process_is_a_maximizer(s in positive_sample(), a in 0.01f64..5.0) {
        let u = inverse_process(&s, a).unwrap();
        let fn_at = |t: f64| s.values().iter().filter(|&&v| v <= t).count() as f64 / s.n() as f64;
        let best = fn_at(u) - a * u;
        for &v in s.values() {
            prop_assert!(fn_at(v) - a * v <= best + 1e-12);
            if v > u {
                prop_assert!(fn_at(v) - a * v < best);
            }
        }
    }

    #[test]
    fn penalized_fit_is_feasible(s in positive_sample(), alpha in 0.001f64..2.0) {
        let fit = penalized_fit(&s, alpha).unwrap();
        let d = &fit.density;
        prop_assert!(d.mass() <= 1.0 + 1e-9);
        prop_assert!(d.heights().windows(2).all(|w| w[1] <= w[0]));
        prop_assert!(d.first_height() <= grenander(&s).unwrap().first_height() + 1e-9);
        prop_assert!((penalized_objective(&s, d, alpha) - fit.objective).abs() < 1e-9);
    }
}

#[test]
fn lcm_touches_at_last_point() {
    let s = Sample::ingest(&[0.3, 0.7, 0.7, 1.1, 2.0]).unwrap();
    let m = ecdf_lcm(&s).unwrap();
    assert_eq!(*m.knots().last().unwrap(), (2.0, 1.0));
    assert_eq!(m.knots()[0], (0.0, 0.0));
}

#[test]
fn grenander_matches_enumeration() {
    let mut g = Lcg::new(11);
    for n in 1..=8 {
        for _ in 0..40 {
            let s = g.sample(n);
            let (best, heights) = npmle_brute_force(&s);
            let d = grenander(&s).unwrap();
            let (xs, _) = common::distinct(&s);
            for (x, h) in xs.iter().zip(&heights) {
                assert_relative_eq!(d.eval(*x).unwrap(), *h, max_relative = 1e-9);
            }
            assert!(best.is_finite());
        }
    }
}

#[test]
fn penalized_matches_grid_search() {
    let mut g = Lcg::new(12);
    for n in 1..=5 {
        for alpha in [0.02, 0.2, 0.7] {
            let s = g.sample(n);
            let fit = penalized_fit(&s, alpha).unwrap();
            let brute = penalized_grid_search(&s, alpha);
            assert!(fit.objective >= brute - 1e-9, "n={n} alpha={alpha}");
            assert!(fit.objective - brute < 1e-3, "n={n} alpha={alpha}");
        }
    }
}

#[test]
fn penalized_slack_mass_pins_first_height() {
    let s = Sample::ingest(&[0.2, 0.4, 0.9]).unwrap();
    let fit = penalized_fit(&s, 50.0).unwrap();
    assert!(fit.density.mass() <= 1.0 + 1e-12);
    assert_eq!(fit.multiplier, 0.0);
    assert_relative_eq!(fit.density.first_height(), 1.0 / 50.0, max_relative = 1e-9);
}
