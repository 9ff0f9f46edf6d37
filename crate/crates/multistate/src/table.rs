//! Reduction of a dataset to aggregated counting and at-risk processes.

use crate::data::{Dataset, Outcome};

/// One observed transition with its subject attribution. Needed by the wild
/// bootstrap, which perturbs individual counting-process increments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Firing {
    pub time_index: usize,
    pub from: usize,
    pub to: usize,
    pub subject: usize,
}

/// Aggregated jump times with transition counts `dN_lm(t_j)` and at-risk
/// counts `Y_l(t_j)`.
///
/// `times` holds the distinct observed transition times in increasing order.
/// A subject is at risk in state `l` at `t` if one of its records covers `t`
/// (entry-exclusive, exit-inclusive) and holds state `l`; delayed entry is
/// respected, so subjects contribute nothing before their entry time.
#[derive(Debug, Clone)]
pub struct EventTable {
    num_states: usize,
    n: usize,
    times: Vec<f64>,
    /// `counts[j][from * num_states + to]`
    counts: Vec<Vec<u32>>,
    /// `at_risk[j][l]`
    at_risk: Vec<Vec<u32>>,
    firings: Vec<Firing>,
}

impl Dataset {
    /// Build the event table of this dataset.
    ///
    /// Invariant under permutation of subjects and of records within the
    /// input: only the multiset of records matters.
    pub fn event_table(&self) -> EventTable {
        build_event_table(self)
    }
}

pub fn build_event_table(data: &Dataset) -> EventTable {
    let num_states = data.state_space().num_states();
    let n = data.n();

    // Collect transitions (exit, from, to, subject).
    let mut events: Vec<(f64, usize, usize, usize)> = Vec::new();
    for (subject_idx, subject) in data.subjects().iter().enumerate() {
        for record in &subject.records {
            if let Outcome::Transition(to) = record.outcome {
                events.push((record.exit, record.from_state, to, subject_idx));
            }
        }
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.3.cmp(&b.3)));

    let mut times: Vec<f64> = Vec::new();
    let mut counts: Vec<Vec<u32>> = Vec::new();
    let mut firings: Vec<Firing> = Vec::with_capacity(events.len());
    for &(t, from, to, subject) in &events {
        if times.last() != Some(&t) {
            times.push(t);
            counts.push(vec![0u32; num_states * num_states]);
        }
        let j = times.len() - 1;
        counts[j][from * num_states + to] += 1;
        firings.push(Firing {
            time_index: j,
            from,
            to,
            subject,
        });
    }

    // At-risk counts per state: Y_l(t) = #{entry < t} - #{exit < t} over the
    // records holding state l, swept along the sorted time grid.
    let mut at_risk = vec![vec![0u32; num_states]; times.len()];
    let mut entries: Vec<Vec<f64>> = vec![Vec::new(); num_states];
    let mut exits: Vec<Vec<f64>> = vec![Vec::new(); num_states];
    for subject in data.subjects() {
        for record in &subject.records {
            entries[record.from_state].push(record.entry);
            exits[record.from_state].push(record.exit);
        }
    }
    for l in 0..num_states {
        entries[l].sort_by(f64::total_cmp);
        exits[l].sort_by(f64::total_cmp);
        let (mut e, mut x) = (0usize, 0usize);
        for (j, &t) in times.iter().enumerate() {
            while e < entries[l].len() && entries[l][e] < t {
                e += 1;
            }
            while x < exits[l].len() && exits[l][x] < t {
                x += 1;
            }
            at_risk[j][l] = (e - x) as u32;
        }
    }

    #[cfg(debug_assertions)]
    for j in 0..times.len() {
        for l in 0..num_states {
            let transitions: u32 = (0..num_states).map(|m| counts[j][l * num_states + m]).sum();
            debug_assert!(
                at_risk[j][l] >= transitions,
                "more transitions than subjects at risk"
            );
        }
    }

    EventTable {
        num_states,
        n,
        times,
        counts,
        at_risk,
        firings,
    }
}

impl EventTable {
    pub fn num_states(&self) -> usize {
        self.num_states
    }

    /// Number of subjects in the underlying dataset.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `dN_lm(t_j)`.
    #[inline]
    pub fn count(&self, time_index: usize, from: usize, to: usize) -> u32 {
        self.counts[time_index][from * self.num_states + to]
    }

    /// `Y_l(t_j)`.
    #[inline]
    pub fn at_risk(&self, time_index: usize, state: usize) -> u32 {
        self.at_risk[time_index][state]
    }

    pub fn firings(&self) -> &[Firing] {
        &self.firings
    }

    /// Total transitions from `from` to `to` over the whole observation span.
    pub fn total_count(&self, from: usize, to: usize) -> u64 {
        self.counts
            .iter()
            .map(|c| u64::from(c[from * self.num_states + to]))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use crate::data::{Dataset, ObservationRecord, StateSpace, Subject};

    fn d1() -> Dataset {
        crate::io::read_long_format(
            "id,from,to,entry,exit\nA,0,1,0,1\nA,1,2,1,4\nB,0,2,0,2\nC,0,cens,0,3\n".as_bytes(),
        )
        .unwrap()
    }

    #[test]
    fn d1_counts_and_risk_sets() {
        let table = d1().event_table();
        assert_eq!(table.times(), [1.0, 2.0, 4.0]);
        assert_eq!(table.at_risk(0, 0), 3);
        assert_eq!(table.at_risk(1, 0), 2);
        assert_eq!(table.at_risk(2, 1), 1);
        assert_eq!(table.count(0, 0, 1), 1);
        assert_eq!(table.count(1, 0, 2), 1);
        assert_eq!(table.count(2, 1, 2), 1);
        assert_eq!(table.count(0, 0, 2), 0);
        assert_eq!(table.n(), 3);
    }

    #[test]
    fn left_truncated_subject_is_not_at_risk_before_entry() {
        // A enters at 1.5 already in state 1.
        let space = StateSpace::illness_death();
        let data = Dataset::new(
            space,
            vec![
                Subject::new("A", vec![ObservationRecord::transition(1.5, 4.0, 1, 2)]),
                Subject::new("B", vec![ObservationRecord::transition(0.0, 2.0, 0, 2)]),
                Subject::new("C", vec![ObservationRecord::censored(0.0, 3.0, 0)]),
            ],
        )
        .unwrap();
        let table = data.event_table();
        assert_eq!(table.times(), [2.0, 4.0]);
        assert_eq!(table.at_risk(0, 0), 2); // B, C; A never at risk in state 0
        assert_eq!(table.total_count(0, 1), 0);
        assert_eq!(table.at_risk(1, 1), 1);
        assert_eq!(table.count(1, 1, 2), 1);
    }

    #[test]
    fn empty_dataset_gives_empty_grid() {
        let data = Dataset::new(StateSpace::illness_death(), vec![]).unwrap();
        let table = data.event_table();
        assert!(table.is_empty());
        assert_eq!(table.n(), 0);
    }

    #[test]
    fn subject_is_at_risk_at_its_own_exit_time() {
        // Y counts a subject at the time of its own transition, and censoring
        // tied with a transition leaves the censored subject in the risk set
        // at that time.
        let space = StateSpace::illness_death();
        let data = Dataset::new(
            space,
            vec![
                Subject::new("A", vec![ObservationRecord::transition(0.0, 2.0, 0, 2)]),
                Subject::new("B", vec![ObservationRecord::censored(0.0, 2.0, 0)]),
            ],
        )
        .unwrap();
        let table = data.event_table();
        assert_eq!(table.times(), [2.0]);
        assert_eq!(table.at_risk(0, 0), 2);
        assert_eq!(table.count(0, 0, 2), 1);
    }

    #[test]
    fn invariant_total_at_risk_at_most_n() {
        let data = d1();
        let table = data.event_table();
        for j in 0..table.times().len() {
            let total: u32 = (0..3).map(|l| table.at_risk(j, l)).sum();
            assert!(total as usize <= table.n());
        }
    }

    #[test]
    fn invariant_under_subject_permutation() {
        let data = d1();
        let mut reversed: Vec<Subject> = data
            .subjects()
            .iter()
            .map(|s| Subject::clone(s))
            .collect();
        reversed.reverse();
        let permuted = Dataset::new(data.state_space().clone(), reversed).unwrap();
        let a = data.event_table();
        let b = permuted.event_table();
        assert_eq!(a.times(), b.times());
        for j in 0..a.times().len() {
            for l in 0..3 {
                assert_eq!(a.at_risk(j, l), b.at_risk(j, l));
                for m in 0..3 {
                    assert_eq!(a.count(j, l, m), b.count(j, l, m));
                }
            }
        }
    }

    #[test]
    fn firings_carry_subject_attribution() {
        let table = d1().event_table();
        let f: Vec<(usize, usize, usize, usize)> = table
            .firings()
            .iter()
            .map(|f| (f.time_index, f.from, f.to, f.subject))
            .collect();
        assert_eq!(f, [(0, 0, 1, 0), (1, 0, 2, 1), (2, 1, 2, 0)]);
    }
}
