mod support;

use proptest::collection::vec;
use proptest::prelude::*;
use tgc_core::capacity::rescaled;
use tgc_core::{
    capacity, check_volume_bm, equality_margin, sweep, sweep_scaled, Budget, LogBody, Method, TGrid,
};

fn random_pair(seed: u64, n: usize) -> (LogBody, LogBody) {
    let mut rng = support::rng(seed);
    (
        support::random_body(&mut rng, n, 5, -3.0, -0.2),
        support::random_body(&mut rng, n, 5, -3.0, -0.2),
    )
}

#[test]
fn random_sweeps_satisfy_both_bounds() {
    let grid = TGrid::default();
    for n in 1..=3 {
        for seed in 0..8 {
            let (q0, q1) = random_pair(100 * n as u64 + seed, n);
            let report = sweep(&q0, &q1, &grid, Method::Auto, &Budget::default()).unwrap();
            assert!(
                report.verdicts.all_hold(),
                "{q0:?} {q1:?}: {:?}",
                report.verdicts
            );
            for r in &report.records {
                assert!((r.log_cap - r.cap.ln()).abs() <= 1e-15);
            }
        }
    }
}

#[test]
fn monte_carlo_sweep_verdicts_hold() {
    let grid = TGrid::uniform(6).unwrap();
    let budget = Budget::default().with_samples(100_000).with_seed(9);
    for seed in 0..4 {
        let (q0, q1) = random_pair(500 + seed, 2);
        let report = sweep(&q0, &q1, &grid, Method::MonteCarlo, &budget).unwrap();
        assert!(
            report.verdicts.all_hold(),
            "{q0:?} {q1:?}: {:?}",
            report.verdicts
        );
    }
}

#[test]
fn equal_endpoints_give_flat_sweep() {
    let (q, _) = random_pair(7, 3);
    let report = sweep(
        &q,
        &q,
        &TGrid::uniform(5).unwrap(),
        Method::Auto,
        &Budget::default(),
    )
    .unwrap();
    assert!(report.verdicts.equality_case);
    assert!(report.verdicts.all_hold());
    for (r, tol) in report.records.iter().zip(&report.tolerances) {
        assert!(r.margin_log.abs() <= tol.margin_log);
    }
}

#[test]
fn volumes_are_log_concave() {
    let grid = TGrid::uniform(6).unwrap();
    let budget = Budget::default().with_samples(200_000).with_seed(3);
    for n in 1..=3 {
        for seed in 0..3 {
            let (q0, q1) = random_pair(900 + 10 * n as u64 + seed, n);
            let report = check_volume_bm(&q0, &q1, &grid, Method::Auto, &budget).unwrap();
            assert!(report.log_concave_holds, "{q0:?} {q1:?}: {report:?}");
            assert_eq!(report.records[0].margin_log, 0.0);
            assert!(report.records.last().unwrap().margin_log.abs() <= 1e-12);
        }
    }
}

#[test]
fn equality_margin_separates_distinct_bodies() {
    let budget = Budget::default();
    for n in 1..=3 {
        for seed in 0..6 {
            let (q0, q1) = random_pair(1300 + 10 * n as u64 + seed, n);
            let m = equality_margin(&q0, &q1, 0.5, Method::Auto, &budget).unwrap();
            if support::hausdorff(q0.generators(), q1.generators()) > 1e-6 {
                assert!(m.value > 5.0 * m.error, "{q0:?} {q1:?}: {m:?}");
            }
            let same = equality_margin(&q0, &q0, 0.5, Method::Auto, &budget).unwrap();
            assert!(same.value.abs() <= 3.0 * same.error, "{same:?}");
        }
    }
}

#[test]
fn scaled_sweeps_match_shifted_sweeps() {
    let grid = TGrid::default();
    for radius in [2.0, std::f64::consts::E] {
        for n in 1..=3 {
            let (q0, q1) = random_pair(1700 + n as u64, n);
            let scaled =
                sweep_scaled(&q0, &q1, radius, &grid, Method::Auto, &Budget::default()).unwrap();
            let s0 = rescaled(&q0, radius).unwrap();
            let s1 = rescaled(&q1, radius).unwrap();
            let shifted = sweep(&s0, &s1, &grid, Method::Auto, &Budget::default()).unwrap();
            for (a, b) in scaled.records.iter().zip(&shifted.records) {
                assert!((a.cap - b.cap).abs() <= 1e-10 * b.cap, "{a:?} vs {b:?}");
                assert!((a.margin_log - b.margin_log).abs() <= 1e-10);
            }
            assert_eq!(scaled.verdicts, shifted.verdicts);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn capacity_is_monotone(
        (n, g0, extra) in (1..=3usize).prop_flat_map(|n| {
            (Just(n), vec(vec(-3.0..-0.2f64, n), 1..=4), vec(vec(-3.0..-0.2f64, n), 1..=3))
        })
    ) {
        let small = LogBody::new(g0.clone(), n).unwrap();
        let mut all = g0;
        all.extend(extra);
        let big = LogBody::new(all, n).unwrap();
        let a = capacity(&small, Method::Auto, &Budget::default()).unwrap();
        let b = capacity(&big, Method::Auto, &Budget::default()).unwrap();
        prop_assert!(a.value <= b.value + a.error + b.error + 1e-12 * b.value);
    }
}
