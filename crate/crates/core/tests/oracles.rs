//! Filter statistics and total difference against brute-force references.

use oddic_core::consensus::{filter_params, zscores, NeighborhoodSample, FILTER_MAX};
use oddic_core::metrics::total_difference;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// k-th smallest value (0-based) by counting ranks, no sorting.
fn order_statistic(values: &[f64], k: usize) -> f64 {
    for &x in values {
        let below = values.iter().filter(|&&v| v < x).count();
        let at_or_below = values.iter().filter(|&&v| v <= x).count();
        if below <= k && k < at_or_below {
            return x;
        }
    }
    unreachable!("some value holds every rank")
}

fn median_by_rank(values: &[f64]) -> f64 {
    let n = values.len();
    if n % 2 == 1 {
        order_statistic(values, n / 2)
    } else {
        (order_statistic(values, n / 2 - 1) + order_statistic(values, n / 2)) / 2.0
    }
}

fn td_double_loop(values: &[f64]) -> f64 {
    let mut total = 0.0;
    for &a in values {
        for &b in values {
            total += (a - b).abs();
        }
    }
    total
}

fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    a == b || (a - b).abs() <= rel * a.abs().max(b.abs())
}

fn random_multiset(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let len = rng.random_range(1..=25);
    let scale = 10f64.powi(rng.random_range(-3..=4));
    // some samples are drawn on a coarse grid to force ties
    let coarse = rng.random_bool(0.3);
    (0..len)
        .map(|_| {
            let v: f64 = rng.random_range(-1.0..1.0) * scale;
            if coarse {
                (v / scale * 4.0).round() * scale / 4.0
            } else {
                v
            }
        })
        .collect()
}

#[test]
fn filter_params_match_rank_based_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0dd1c);
    for _ in 0..10_000 {
        let mut values = random_multiset(&mut rng);
        let own = values.pop().unwrap_or(0.0);
        let sample = NeighborhoodSample::new(&values, own);
        let all = sample.values();

        let median = median_by_rank(all);
        let devs: Vec<f64> = all.iter().map(|v| (v - median).abs()).collect();
        let mad = median_by_rank(&devs);
        let nmad = 1.4826 * mad;
        let expected_filter = if nmad == 0.0 {
            if own == median { 0.0 } else { FILTER_MAX }
        } else {
            ((own - median).abs() / nmad).min(3.0)
        };

        let p = filter_params(&sample);
        assert!(rel_close(p.median, median, 1e-12), "{all:?}");
        assert!(rel_close(p.mad, mad, 1e-12), "{all:?}");
        assert!(rel_close(p.nmad, nmad, 1e-12), "{all:?}");
        assert!(rel_close(p.filter_value, expected_filter, 1e-12), "{all:?}");

        for (z, &v) in zscores(&sample, &p).iter().zip(all) {
            let expected = if nmad == 0.0 {
                if v == median { 0.0 } else { f64::INFINITY }
            } else {
                (v - median).abs() / nmad
            };
            assert!(rel_close(*z, expected, 1e-12));
        }
    }
}

#[test]
fn total_difference_matches_double_loop() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7d);
    for _ in 0..10_000 {
        let values = random_multiset(&mut rng);
        let fast = total_difference(&values);
        let slow = td_double_loop(&values);
        assert!(rel_close(fast, slow, 1e-12), "{values:?}: {fast} vs {slow}");
    }
}

#[test]
fn frozen_reference_values() {
    // median 3, MAD 1 -> raw score 97 / 1.4826, capped at 3
    let sample = NeighborhoodSample::new(&[1.0, 2.0, 3.0, 4.0], 100.0);
    let p = filter_params(&sample);
    assert_eq!(median_by_rank(sample.values()), 3.0);
    assert!((97.0_f64 / 1.4826 - 65.4256).abs() < 1e-4);
    assert_eq!(p.filter_value, 3.0);

    // 1 / 1.4826
    let sample = NeighborhoodSample::new(&[0.0, 2.0], 1.0);
    let z = zscores(&sample, &filter_params(&sample));
    assert!((z[0] - 0.674_490_759_476_595_2).abs() < 1e-15);

    assert_eq!(td_double_loop(&[1.0, 2.0, 4.0]), 12.0);
    assert_eq!(total_difference(&[1.0, 2.0, 4.0]), 12.0);
}
