//! Data model for multi-state event histories under left-truncation and
//! right-censoring.
//!
//! A subject's observed trajectory is a chain of [`ObservationRecord`]s, each
//! covering a half-open interval `(entry, exit]` during which the subject
//! holds `from_state`. The first record starts at the (possibly delayed)
//! study-entry time; the last record ends either in a transition or in
//! censoring. A subject entering at time `L` is at risk strictly after `L`,
//! never at `L` itself.

use std::collections::BTreeSet;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("invalid state space: {0}")]
    InvalidStateSpace(String),
    #[error("row {row}: malformed row: {msg}")]
    MalformedRow { row: usize, msg: String },
    #[error("subject {id}{}: entry time {entry} is not strictly before exit time {exit}", fmt_row(*.row))]
    BadInterval {
        id: String,
        row: Option<usize>,
        entry: f64,
        exit: f64,
    },
    #[error("subject {id}{}: transition {from}->{to} is not in the state space", fmt_row(*.row))]
    DisallowedTransition {
        id: String,
        row: Option<usize>,
        from: usize,
        to: usize,
    },
    #[error("subject {id}{}: chain violation: record starts in state {found} at {at}, expected state {expected}", fmt_row(*.row))]
    ChainViolation {
        id: String,
        row: Option<usize>,
        at: f64,
        found: usize,
        expected: usize,
    },
    #[error("subject {id}{}: gap in observation: record starts at {found}, previous record ended at {expected}", fmt_row(*.row))]
    TimeGap {
        id: String,
        row: Option<usize>,
        found: f64,
        expected: f64,
    },
    #[error("subject {id}: records continue after a censoring record")]
    RecordAfterCensoring { id: String },
    #[error("subject {id}: occupies absorbing state {state} on an interval")]
    OccupiesAbsorbingState { id: String, state: usize },
    #[error("subject {id}: has no records")]
    EmptySubject { id: String },
    #[error("subject {id}{}: non-finite or negative time", fmt_row(*.row))]
    BadTime { id: String, row: Option<usize> },
    #[error("landmark state {state} is not a transient state of the model")]
    LandmarkStateNotTransient { state: usize },
    #[error("landmark time must be nonnegative, got {s}")]
    NegativeLandmarkTime { s: f64 },
}

fn fmt_row(row: Option<usize>) -> String {
    match row {
        Some(r) => format!(" (row {r})"),
        None => String::new(),
    }
}

/// Finite state space `{0, .., num_states-1}` with a set of absorbing states
/// and a set of allowed directed transitions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSpace {
    num_states: usize,
    absorbing: BTreeSet<usize>,
    allowed: BTreeSet<(usize, usize)>,
}

impl StateSpace {
    pub fn new(
        num_states: usize,
        absorbing: impl IntoIterator<Item = usize>,
        transitions: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, DataError> {
        if num_states == 0 {
            return Err(DataError::InvalidStateSpace(
                "state space must contain at least one state".into(),
            ));
        }
        let absorbing: BTreeSet<usize> = absorbing.into_iter().collect();
        if let Some(&s) = absorbing.iter().find(|&&s| s >= num_states) {
            return Err(DataError::InvalidStateSpace(format!(
                "absorbing state {s} outside 0..{num_states}"
            )));
        }
        let allowed: BTreeSet<(usize, usize)> = transitions.into_iter().collect();
        for &(from, to) in &allowed {
            if from >= num_states || to >= num_states {
                return Err(DataError::InvalidStateSpace(format!(
                    "transition {from}->{to} outside 0..{num_states}"
                )));
            }
            if from == to {
                return Err(DataError::InvalidStateSpace(format!(
                    "self-transition {from}->{to} is not allowed"
                )));
            }
            if absorbing.contains(&from) {
                return Err(DataError::InvalidStateSpace(format!(
                    "transition {from}->{to} leaves absorbing state {from}"
                )));
            }
        }
        Ok(StateSpace {
            num_states,
            absorbing,
            allowed,
        })
    }

    /// The irreversible illness-death model: states 0 (initial), 1 (illness),
    /// 2 (absorbing), transitions 0->1, 0->2, 1->2.
    pub fn illness_death() -> Self {
        StateSpace::new(3, [2], [(0, 1), (0, 2), (1, 2)]).expect("valid by construction")
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn is_absorbing(&self, state: usize) -> bool {
        self.absorbing.contains(&state)
    }

    pub fn is_transient(&self, state: usize) -> bool {
        state < self.num_states && !self.is_absorbing(state)
    }

    pub fn allows(&self, from: usize, to: usize) -> bool {
        self.allowed.contains(&(from, to))
    }

    pub fn transitions(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.allowed.iter().copied()
    }

    pub fn absorbing_states(&self) -> impl Iterator<Item = usize> + '_ {
        self.absorbing.iter().copied()
    }
}

/// How an observation interval ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// The subject moves to the given state at the interval's exit time.
    Transition(usize),
    /// Observation stops at the exit time with no transition.
    Censored,
}

/// One observed interval `(entry, exit]` during which the subject holds
/// `from_state`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservationRecord {
    pub entry: f64,
    pub exit: f64,
    pub from_state: usize,
    pub outcome: Outcome,
}

impl ObservationRecord {
    pub fn transition(entry: f64, exit: f64, from: usize, to: usize) -> Self {
        ObservationRecord {
            entry,
            exit,
            from_state: from,
            outcome: Outcome::Transition(to),
        }
    }

    pub fn censored(entry: f64, exit: f64, from: usize) -> Self {
        ObservationRecord {
            entry,
            exit,
            from_state: from,
            outcome: Outcome::Censored,
        }
    }

    /// Whether the state held on this record covers time `t` under the
    /// entry-exclusive, exit-inclusive convention.
    #[inline]
    pub fn covers(&self, t: f64) -> bool {
        self.entry < t && t <= self.exit
    }
}

/// A subject: an identifier plus a chain of observation records.
#[derive(Debug, Clone, PartialEq)]
pub struct Subject {
    pub id: String,
    pub records: Vec<ObservationRecord>,
}

impl Subject {
    pub fn new(id: impl Into<String>, records: Vec<ObservationRecord>) -> Self {
        Subject {
            id: id.into(),
            records,
        }
    }

    /// Study-entry time (the first record's entry).
    pub fn entry_time(&self) -> f64 {
        self.records[0].entry
    }

    /// End of observation (the last record's exit).
    pub fn last_exit(&self) -> f64 {
        self.records[self.records.len() - 1].exit
    }

    /// State held on the interval containing `t` under `(entry, exit]`
    /// semantics, `None` if the subject is not under observation at `t`.
    pub fn state_at(&self, t: f64) -> Option<usize> {
        self.records
            .iter()
            .find(|r| r.covers(t))
            .map(|r| r.from_state)
    }

    /// Whether observation of this subject ends in censoring exactly at `t`.
    pub fn censored_at(&self, t: f64) -> bool {
        let last = &self.records[self.records.len() - 1];
        last.outcome == Outcome::Censored && last.exit == t
    }
}

/// A validated collection of subjects over a common state space.
///
/// Immutable after construction; cloning is cheap (subjects are shared).
#[derive(Debug, Clone)]
pub struct Dataset {
    space: Arc<StateSpace>,
    subjects: Vec<Arc<Subject>>,
}

impl Dataset {
    pub fn new(space: StateSpace, subjects: Vec<Subject>) -> Result<Self, DataError> {
        let space = Arc::new(space);
        for subject in &subjects {
            validate_subject(&space, subject, None)?;
        }
        Ok(Dataset {
            space,
            subjects: subjects.into_iter().map(Arc::new).collect(),
        })
    }

    /// Assemble from already-validated parts. Used on hot resampling and
    /// simulation paths; validity is checked in debug builds only.
    pub(crate) fn from_arcs(space: Arc<StateSpace>, subjects: Vec<Arc<Subject>>) -> Self {
        #[cfg(debug_assertions)]
        for subject in &subjects {
            validate_subject(&space, subject, None).expect("internal dataset invariant");
        }
        Dataset { space, subjects }
    }

    pub fn n(&self) -> usize {
        self.subjects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subjects.is_empty()
    }

    pub fn state_space(&self) -> &StateSpace {
        &self.space
    }

    pub(crate) fn space_arc(&self) -> Arc<StateSpace> {
        Arc::clone(&self.space)
    }

    pub fn subjects(&self) -> &[Arc<Subject>] {
        &self.subjects
    }

    /// Whether any subject entered the study strictly after time 0.
    pub fn has_delayed_entry(&self) -> bool {
        self.subjects.iter().any(|s| s.entry_time() > 0.0)
    }

    /// Subjects at risk in each state just after time 0, i.e. `Y_l(0+)`.
    pub fn at_risk_after_origin(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.space.num_states()];
        for subject in &self.subjects {
            let first = &subject.records[0];
            if first.entry == 0.0 {
                counts[first.from_state] += 1;
            }
        }
        counts
    }

    /// The landmark sub-dataset: subjects under observation and in `state` at
    /// time `s`, i.e. those with `L < s < C` and `X(s) = state`.
    ///
    /// `X(s)` is the state held on the record interval containing `s` under
    /// `(entry, exit]` semantics. A subject censored exactly at `s` is
    /// excluded. Records pass through unmodified; estimators restrict to
    /// `(s, t]` themselves. An empty subset is a valid empty `Dataset`.
    pub fn landmark_subset(&self, s: f64, state: usize) -> Result<Dataset, DataError> {
        if !self.space.is_transient(state) {
            return Err(DataError::LandmarkStateNotTransient { state });
        }
        if !(s >= 0.0) {
            return Err(DataError::NegativeLandmarkTime { s });
        }
        let subjects = self
            .subjects
            .iter()
            .filter(|subject| {
                subject.entry_time() < s
                    && subject.state_at(s) == Some(state)
                    && !subject.censored_at(s)
            })
            .cloned()
            .collect();
        Ok(Dataset {
            space: Arc::clone(&self.space),
            subjects,
        })
    }
}

pub(crate) fn validate_subject(
    space: &StateSpace,
    subject: &Subject,
    first_row: Option<usize>,
) -> Result<(), DataError> {
    let id = &subject.id;
    if subject.records.is_empty() {
        return Err(DataError::EmptySubject { id: id.clone() });
    }
    let mut expected_state: Option<usize> = None;
    let mut expected_time = 0.0;
    let mut censored = false;
    for (k, record) in subject.records.iter().enumerate() {
        let row = first_row.map(|r| r + k);
        if !record.entry.is_finite() || !record.exit.is_finite() || record.entry < 0.0 {
            return Err(DataError::BadTime {
                id: id.clone(),
                row,
            });
        }
        if !(record.entry < record.exit) {
            return Err(DataError::BadInterval {
                id: id.clone(),
                row,
                entry: record.entry,
                exit: record.exit,
            });
        }
        if record.from_state >= space.num_states() {
            return Err(DataError::DisallowedTransition {
                id: id.clone(),
                row,
                from: record.from_state,
                to: record.from_state,
            });
        }
        if let Some(expected) = expected_state {
            if record.from_state != expected {
                return Err(DataError::ChainViolation {
                    id: id.clone(),
                    row,
                    at: record.entry,
                    found: record.from_state,
                    expected,
                });
            }
            if record.entry != expected_time {
                return Err(DataError::TimeGap {
                    id: id.clone(),
                    row,
                    found: record.entry,
                    expected: expected_time,
                });
            }
        }
        if censored {
            return Err(DataError::RecordAfterCensoring { id: id.clone() });
        }
        // Covers records continuing past an absorbing transition: the chain
        // forces their from-state to be the absorbing state.
        if space.is_absorbing(record.from_state) {
            return Err(DataError::OccupiesAbsorbingState {
                id: id.clone(),
                state: record.from_state,
            });
        }
        match record.outcome {
            Outcome::Transition(to) => {
                if !space.allows(record.from_state, to) {
                    return Err(DataError::DisallowedTransition {
                        id: id.clone(),
                        row,
                        from: record.from_state,
                        to,
                    });
                }
                expected_state = Some(to);
                expected_time = record.exit;
            }
            Outcome::Censored => {
                censored = true;
                expected_state = Some(record.from_state);
                expected_time = record.exit;
            }
        }
    }
    Ok(())
}
