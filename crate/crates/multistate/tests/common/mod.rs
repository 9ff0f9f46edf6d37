//! Shared generators and brute-force oracles for the integration tests.
//!
//! The oracles here deliberately avoid the library's event-table path: state
//! frequencies and product-limit values are counted directly off the records.
#![allow(dead_code)]

use multistate::{Dataset, ObservationRecord, Outcome, StateSpace, Subject};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random state space with 2 to 4 states; state 0 is always transient and
/// at least one state is absorbing.
pub fn random_state_space(rng: &mut impl Rng) -> StateSpace {
    let num_states = rng.random_range(2..=4);
    let mut absorbing: Vec<usize> = (1..num_states)
        .filter(|_| rng.random_bool(0.5))
        .collect();
    if absorbing.is_empty() {
        absorbing.push(num_states - 1);
    }
    let mut transitions = Vec::new();
    for from in 0..num_states {
        if absorbing.contains(&from) {
            continue;
        }
        for to in 0..num_states {
            if to != from && rng.random_bool(0.6) {
                transitions.push((from, to));
            }
        }
    }
    if transitions.is_empty() {
        transitions.push((0, *absorbing.first().unwrap()));
    }
    StateSpace::new(num_states, absorbing, transitions).unwrap()
}

/// A complete-observation study: every subject enters at time 0 and is
/// followed until absorption or a common administrative horizon (a terminal
/// censoring record). Jump times sit on a coarse grid, so ties are common.
pub fn random_complete_dataset(rng: &mut impl Rng, max_n: usize) -> Dataset {
    let space = random_state_space(rng);
    let n = rng.random_range(1..=max_n);
    let transient: Vec<usize> = (0..space.num_states())
        .filter(|&s| space.is_transient(s))
        .collect();
    let mut raw: Vec<(usize, Vec<ObservationRecord>)> = Vec::with_capacity(n);
    let mut last_event = 0.0f64;
    for _ in 0..n {
        let start = transient[rng.random_range(0..transient.len())];
        let mut state = start;
        let mut time = 0.0;
        let mut records = Vec::new();
        for _ in 0..6 {
            let targets: Vec<usize> = (0..space.num_states())
                .filter(|&to| space.allows(state, to))
                .collect();
            if targets.is_empty() || rng.random_bool(0.35) {
                break;
            }
            let to = targets[rng.random_range(0..targets.len())];
            let jump = time + 0.25 * rng.random_range(1..=12) as f64;
            records.push(ObservationRecord::transition(time, jump, state, to));
            last_event = last_event.max(jump);
            time = jump;
            state = to;
            if space.is_absorbing(state) {
                break;
            }
        }
        raw.push((start, records));
    }
    let horizon = last_event + 1.0;
    let subjects: Vec<Subject> = raw
        .into_iter()
        .enumerate()
        .map(|(i, (start, mut records))| {
            let open = match records.last() {
                None => true,
                Some(r) => match r.outcome {
                    Outcome::Transition(to) => !space.is_absorbing(to),
                    Outcome::Censored => false,
                },
            };
            if open {
                let (entry, state) = match records.last() {
                    Some(r) => match r.outcome {
                        Outcome::Transition(to) => (r.exit, to),
                        Outcome::Censored => unreachable!(),
                    },
                    None => (0.0, start),
                };
                records.push(ObservationRecord::censored(entry, horizon, state));
            }
            Subject::new(format!("s{i}"), records)
        })
        .collect();
    Dataset::new(space, subjects).unwrap()
}

/// A randomly truncated and censored variant of a complete study.
pub fn random_observed_dataset(rng: &mut impl Rng, max_n: usize) -> Dataset {
    loop {
        let complete = random_complete_dataset(rng, max_n);
        let space = complete.state_space().clone();
        let mut subjects = Vec::new();
        for subject in complete.subjects() {
            let mut records = subject.records.clone();
            if rng.random_bool(0.35) {
                let entry = 0.25 * rng.random_range(0..=10) as f64;
                records = truncate_records(&records, entry);
            }
            if !records.is_empty() && rng.random_bool(0.35) {
                let first = records[0].entry;
                let cut = first + 0.25 * rng.random_range(1..=10) as f64;
                records = censor_records(&records, cut);
            }
            if !records.is_empty() {
                subjects.push(Subject::new(subject.id.clone(), records));
            }
        }
        if !subjects.is_empty() {
            return Dataset::new(space, subjects).unwrap();
        }
    }
}

fn truncate_records(records: &[ObservationRecord], entry: f64) -> Vec<ObservationRecord> {
    let mut out = Vec::new();
    for r in records {
        if r.exit <= entry {
            continue;
        }
        let mut r = *r;
        if r.entry < entry {
            r.entry = entry;
        }
        out.push(r);
    }
    out
}

fn censor_records(records: &[ObservationRecord], cut: f64) -> Vec<ObservationRecord> {
    let mut out = Vec::new();
    for r in records {
        if r.exit <= cut {
            out.push(*r);
        } else if r.entry < cut {
            out.push(ObservationRecord::censored(r.entry, cut, r.from_state));
            break;
        } else {
            break;
        }
    }
    out
}

/// Right-continuous state of a subject at `t` on completely observed data.
pub fn state_at_right(subject: &Subject, t: f64) -> usize {
    let first = subject.records[0];
    if t <= first.entry {
        return first.from_state;
    }
    for r in &subject.records {
        if r.entry < t && t <= r.exit {
            return match r.outcome {
                Outcome::Transition(to) if r.exit == t => to,
                _ => r.from_state,
            };
        }
    }
    let last = subject.records[subject.records.len() - 1];
    match last.outcome {
        Outcome::Transition(to) => to,
        Outcome::Censored => panic!("state queried beyond the observation horizon"),
    }
}

/// Empirical fraction of subjects in `state` at time `t`, counted directly.
pub fn occupancy_fraction(data: &Dataset, state: usize, t: f64) -> f64 {
    let hits = data
        .subjects()
        .iter()
        .filter(|s| state_at_right(s, t) == state)
        .count();
    hits as f64 / data.n() as f64
}

/// Brute-force product-limit estimator of staying in state 0, for two-state
/// data with 0 -> 1 the only transition.
pub fn product_limit_survival(data: &Dataset, t: f64) -> f64 {
    let mut death_times: Vec<f64> = data
        .subjects()
        .iter()
        .flat_map(|s| s.records.iter())
        .filter(|r| r.outcome == Outcome::Transition(1) && r.exit <= t)
        .map(|r| r.exit)
        .collect();
    death_times.sort_by(f64::total_cmp);
    death_times.dedup();
    let mut survival = 1.0;
    for u in death_times {
        let mut at_risk = 0usize;
        let mut deaths = 0usize;
        for subject in data.subjects() {
            for r in &subject.records {
                if r.entry < u && u <= r.exit {
                    at_risk += 1;
                    if r.outcome == Outcome::Transition(1) && r.exit == u {
                        deaths += 1;
                    }
                }
            }
        }
        survival *= 1.0 - deaths as f64 / at_risk as f64;
    }
    survival
}

/// All distinct transition times of a dataset.
pub fn transition_times(data: &Dataset) -> Vec<f64> {
    let mut times: Vec<f64> = data
        .subjects()
        .iter()
        .flat_map(|s| s.records.iter())
        .filter(|r| matches!(r.outcome, Outcome::Transition(_)))
        .map(|r| r.exit)
        .collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    times
}
