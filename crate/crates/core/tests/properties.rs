use std::path::PathBuf;

use lambda0_core::action::{MonodromyAction, Word};
use lambda0_core::amenability::{folner_boundary, rw_radius_estimate};
use lambda0_core::graph::GraphFunction;
use lambda0_core::hyperbolic::{hyperbolic_distance, sullivan_lambda0, Moebius, Point};
use lambda0_core::lazy::LazyGraph;
use lambda0_core::renormalize::{doob_transform, ground_state};
use lambda0_core::sample;
use lambda0_core::scenario::{load_scenario, run_scenario};
use lambda0_core::spectral::{lambda0_exhaustion, lambda0_finite, lambda_ess_estimate, WindowOptions};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

fn random_moebius(r: &mut ChaCha8Rng) -> Moebius {
    let mut c = || Complex64::new(r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0));
    loop {
        if let Ok(m) = Moebius::new(c(), c(), c(), c()) {
            return m;
        }
    }
}

fn random_point(r: &mut ChaCha8Rng) -> Point {
    let z = Complex64::new(r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0));
    Point::halfspace(z, r.gen_range(0.05..4.0)).unwrap()
}

fn random_action(r: &mut ChaCha8Rng, k: usize) -> MonodromyAction {
    use rand::seq::SliceRandom;
    let mut perm = || {
        let mut p: Vec<usize> = (0..k).collect();
        p.shuffle(r);
        p
    };
    let perms = vec![perm(), perm()];
    MonodromyAction::permutation(vec!["a".into(), "b".into()], perms).unwrap()
}

fn generators() -> Vec<Word> {
    vec![Word::letter(0, false), Word::letter(1, false)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rayleigh_quotient_matches_operator(seed in any::<u64>(), n in 2usize..12) {
        let mut r = rng(seed);
        let g = sample::connected_graph(&mut r, n, 0.3, true).unwrap();
        let f = sample::function(&mut r, n);
        let direct = g.inner(&f, &g.apply(&f)) / g.norm_sq(&f);
        prop_assert!(close(g.rayleigh(&f).unwrap(), direct, 1e-10));
    }

    #[test]
    fn constant_potential_shifts_the_bottom(seed in any::<u64>(), n in 2usize..12, shift in -3.0f64..3.0) {
        let mut r = rng(seed);
        let g = sample::connected_graph(&mut r, n, 0.3, true).unwrap();
        let shifted = g.with_potential(g.potential().iter().map(|v| v + shift).collect()).unwrap();
        let a = lambda0_finite(&g, None).unwrap().value;
        let b = lambda0_finite(&shifted, None).unwrap().value;
        prop_assert!(close(b, a + shift, 1e-9));
    }

    #[test]
    fn pushdown_keeps_norm_and_lowers_energy(seed in any::<u64>()) {
        let mut r = rng(seed);
        let cover = sample::finite_cover(&mut r, 6, 6).unwrap();
        let total = cover.materialize().unwrap();
        let f = sample::function(&mut r, total.total.len());
        let mut lifted = GraphFunction::new();
        for (v, &x) in total.vertices.iter().zip(&f) {
            lifted.set(v.clone(), x);
        }
        let f0 = cover.pushdown(&lifted);
        prop_assert!(close(cover.base().norm_sq(&f0), total.total.norm_sq(&f), 1e-10));
        let below = cover.base().rayleigh(&f0).unwrap();
        let above = total.total.rayleigh(&f).unwrap();
        prop_assert!(below <= above + 1e-9 * above.abs().max(1.0));
    }

    #[test]
    fn lifts_keep_the_rayleigh_quotient(seed in any::<u64>()) {
        let mut r = rng(seed);
        let cover = sample::finite_cover(&mut r, 6, 6).unwrap();
        let total = cover.materialize().unwrap();
        let f0 = sample::function(&mut r, cover.base().len());
        let lifted = cover.lift_function(&f0).unwrap();
        let a = cover.base().rayleigh(&f0).unwrap();
        let b = total.total.rayleigh(&lifted).unwrap();
        prop_assert!(close(a, b, 1e-10));
        let base = lambda0_finite(cover.base(), None).unwrap().value;
        let up = lambda0_finite(&total.total, None).unwrap().value;
        prop_assert!(up <= base + 1e-9);
    }

    #[test]
    fn doob_transform_is_unitary(seed in any::<u64>(), n in 2usize..10) {
        let mut r = rng(seed);
        let g = sample::connected_graph(&mut r, n, 0.3, true).unwrap();
        let gs = ground_state(&g, 1e-8).unwrap();
        let t = doob_transform(&g, &gs, 1e-8).unwrap();
        let f = sample::function(&mut r, n);
        let u: Vec<f64> = f.iter().zip(&gs.phi).map(|(a, p)| a / p).collect();
        prop_assert!(close(t.norm_sq(&u), g.norm_sq(&f), 1e-10));
        let ratio = t.rayleigh(&u).unwrap();
        prop_assert!(close(ratio, g.rayleigh(&f).unwrap() - gs.lambda, 1e-8));
        prop_assert!(ratio >= -1e-9);
    }

    #[test]
    fn return_probability_roots_increase(seed in any::<u64>(), k in 1usize..40) {
        let mut r = rng(seed);
        let action = random_action(&mut r, k);
        let series = rw_radius_estimate(&action, &generators(), 40, 100_000).unwrap();
        for w in series.windows(2) {
            prop_assert!(w[1].1 >= w[0].1 - 1e-12);
        }
        prop_assert!(series.iter().all(|p| p.1 <= 1.0));
    }

    #[test]
    fn boundaries_stay_inside_the_set(seed in any::<u64>(), k in 1usize..30) {
        let mut r = rng(seed);
        let action = random_action(&mut r, k);
        let fiber = action.fiber().unwrap();
        let subset: Vec<_> = fiber.iter().filter(|_| r.gen_bool(0.5)).cloned().collect();
        let boundary = folner_boundary(&action, &subset, &generators()).unwrap();
        prop_assert!(boundary.iter().all(|y| subset.contains(y)));
        prop_assert!(folner_boundary(&action, &fiber, &generators()).unwrap().is_empty());
        let again = folner_boundary(&action, &boundary, &generators()).unwrap();
        prop_assert!(again.len() <= boundary.len());
    }

    #[test]
    fn hyperbolic_distance_is_an_invariant_metric(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (p, q, s) = (random_point(&mut r), random_point(&mut r), random_point(&mut r));
        let d = |a: &Point, b: &Point| hyperbolic_distance(a, b).unwrap();
        prop_assert!(d(&p, &p).abs() < 1e-6);
        prop_assert!(close(d(&p, &q), d(&q, &p), 1e-10));
        prop_assert!(d(&p, &s) <= d(&p, &q) + d(&q, &s) + 1e-9);
        let g = random_moebius(&mut r);
        prop_assert!(close(d(&g.apply(&p), &g.apply(&q)), d(&p, &q), 1e-7));
    }

    #[test]
    fn sullivan_value_is_monotone_and_bounded(m in 2u32..8, a in 0.0f64..7.0, b in 0.0f64..7.0) {
        let k = f64::from(m - 1);
        let (lo, hi) = (a.min(b).min(k), a.max(b).min(k));
        let (x, y) = (sullivan_lambda0(lo, m).unwrap(), sullivan_lambda0(hi, m).unwrap());
        prop_assert!(x <= k * k / 4.0 + 1e-12);
        prop_assert!(y <= x + 1e-12);
        prop_assert!(y >= -1e-12);
    }

    #[test]
    fn exhaustion_histories_decrease(seed in any::<u64>(), n in 4usize..40) {
        let mut r = rng(seed);
        let g = sample::connected_graph(&mut r, n, 0.05, true).unwrap();
        let root = r.gen_range(0..n);
        let est = lambda0_exhaustion(&g, &root, &[1, 2, 3, 5, 8], 10_000).unwrap();
        for w in est.history.windows(2) {
            prop_assert!(w[1].1 <= w[0].1 + 1e-9);
        }
        let bottom = lambda0_finite(&g, None).unwrap().value;
        prop_assert!(est.history.iter().all(|h| h.1 >= bottom - 1e-9));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn essential_histories_increase(dim in 1usize..3, potential in -1.0f64..1.0, first in 1usize..4) {
        let g = LazyGraph::lattice(dim).unwrap().with_weights(1.0, 1.0, potential).unwrap();
        let schedule = [first, first + 2, first + 5];
        let est = lambda_ess_estimate(&g, &g.root(), &schedule, WindowOptions::default()).unwrap();
        for w in est.history.windows(2) {
            prop_assert!(w[1].1 >= w[0].1 - 1e-9);
        }
        prop_assert!(est.history.iter().all(|h| h.1 >= potential - 1e-9));
    }
}

#[test]
fn chord_cover_gap_is_bracketed() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/name-c4-chord.json");
    let report = run_scenario(&load_scenario(&path).unwrap()).unwrap();
    let number = |key: &str| report.artifacts[key].as_f64().unwrap_or_else(|| panic!("artifact {key}"));
    let base = number("lambda0_base");
    let upper = number("lambda0_cover_upper");
    let flow = number("gap_flow_certificate");
    let supersolution = number("gap_supersolution_certificate");
    assert!(base + flow <= upper + 1e-9);
    assert!(base + supersolution <= upper + 1e-9);
    assert!(upper - base < 0.1);
}
