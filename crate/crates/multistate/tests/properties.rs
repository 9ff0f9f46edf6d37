//! Property tests for the serialization contract, the landmark machinery,
//! and the interval machinery.

mod common;

use multistate::data::Outcome;
use multistate::io::{read_long_format_with, write_long_format};
use multistate::landmark_aalen_johansen;
use multistate::resample::{standardized_quantile_ci, BootstrapSample, ResampleMethod};
use proptest::prelude::*;
use rand::Rng;

/// Landmark subsetting followed by the event table equals the brute-force
/// landmark counting and at-risk processes summed with the selection
/// indicator over all subjects.
#[test]
fn landmark_table_matches_brute_force_indicator_sums() {
    let mut rng = common::rng(0xA11);
    for _ in 0..300 {
        let data = common::random_observed_dataset(&mut rng, 15);
        let space = data.state_space().clone();
        let transient: Vec<usize> = (0..space.num_states())
            .filter(|&s| space.is_transient(s))
            .collect();
        let landmark_state = transient[rng.random_range(0..transient.len())];
        let s = 0.25 * rng.random_range(1..=20) as f64 + 0.1;
        let subset = data.landmark_subset(s, landmark_state).unwrap();
        let table = subset.event_table();

        let selected: Vec<_> = data
            .subjects()
            .iter()
            .filter(|subject| {
                subject.entry_time() < s
                    && subject.state_at(s) == Some(landmark_state)
                    && !subject.censored_at(s)
            })
            .collect();
        assert_eq!(subset.n(), selected.len());

        for (j, &t) in table.times().iter().enumerate() {
            for l in 0..space.num_states() {
                let at_risk: usize = selected
                    .iter()
                    .flat_map(|subject| subject.records.iter())
                    .filter(|r| r.from_state == l && r.covers(t))
                    .count();
                assert_eq!(table.at_risk(j, l) as usize, at_risk);
                for m in 0..space.num_states() {
                    let events: usize = selected
                        .iter()
                        .flat_map(|subject| subject.records.iter())
                        .filter(|r| {
                            r.from_state == l && r.exit == t && r.outcome == Outcome::Transition(m)
                        })
                        .count();
                    assert_eq!(table.count(j, l, m) as usize, events);
                }
            }
        }
    }
}

/// On completely observed data the landmark estimator equals the empirical
/// fraction of the landmark subset found in each state later on.
#[test]
fn landmark_consistency_on_complete_data() {
    let mut rng = common::rng(0xA12);
    let mut checked = 0usize;
    while checked < 200 {
        let data = common::random_complete_dataset(&mut rng, 40);
        let times = common::transition_times(&data);
        if times.len() < 2 {
            continue;
        }
        // A landmark strictly between event times avoids ties at s.
        let idx = rng.random_range(0..times.len() - 1);
        let s = 0.5 * (times[idx] + times[idx + 1]);
        let t = times[rng.random_range(idx + 1..times.len())];
        let space = data.state_space().clone();
        let transient: Vec<usize> = (0..space.num_states())
            .filter(|&st| space.is_transient(st))
            .collect();
        let from = transient[rng.random_range(0..transient.len())];
        let subset = data.landmark_subset(s, from).unwrap();
        if subset.is_empty() {
            continue;
        }
        let row = landmark_aalen_johansen(&data, s, from, t).unwrap();
        for (m, value) in row.iter().enumerate() {
            let hits = subset
                .subjects()
                .iter()
                .filter(|subject| common::state_at_right(subject, t) == m)
                .count();
            let fraction = hits as f64 / subset.n() as f64;
            assert!(
                (value - fraction).abs() <= 1e-12,
                "landmark fraction mismatch: {value} vs {fraction}"
            );
        }
        checked += 1;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn long_format_roundtrips(seed in 0u64..1_000) {
        let mut rng = common::rng(seed);
        let data = common::random_observed_dataset(&mut rng, 12);
        let mut buf = Vec::new();
        write_long_format(&data, &mut buf).unwrap();
        let back = read_long_format_with(buf.as_slice(), data.state_space().clone()).unwrap();
        prop_assert_eq!(data.n(), back.n());
        for (a, b) in data.subjects().iter().zip(back.subjects()) {
            prop_assert_eq!(&a.id, &b.id);
            prop_assert_eq!(&a.records, &b.records);
        }
    }

    #[test]
    fn interval_level_monotonicity(
        values in proptest::collection::vec(0.0f64..1.0, 8..60),
        point in 0.0f64..1.0,
        narrow in 0.5f64..0.9,
        widen in 0.01f64..0.09,
    ) {
        let sample = BootstrapSample {
            method: ResampleMethod::Efron,
            seed: 0,
            requested: values.len(),
            replicates: values,
            dropped: 0,
        };
        let wide_level = narrow + widen;
        let lo = standardized_quantile_ci(&sample, point, 40, narrow, (0.0, 1.0));
        let hi = standardized_quantile_ci(&sample, point, 40, wide_level, (0.0, 1.0));
        if let (Ok(lo), Ok(hi)) = (lo, hi) {
            prop_assert!(hi.lower <= lo.lower + 1e-12);
            prop_assert!(hi.upper >= lo.upper - 1e-12);
            prop_assert!(lo.lower <= lo.point && lo.point <= lo.upper);
        }
    }
}
