//! Product integration, state occupation probabilities, and the landmark
//! Aalen-Johansen estimator of transition probabilities.

use thiserror::Error;

use crate::data::{DataError, Dataset};
use crate::hazard::{nelson_aalen, CumulativeHazardMatrix};
use crate::matrix::SquareMatrix;

#[derive(Debug, Error)]
pub enum EstimateError {
    #[error("time window start {s} exceeds end {t}")]
    InvalidWindow { s: f64, t: f64 },
    #[error("multinomial initial distribution requires all subjects to enter at time 0")]
    MultinomialWithDelayedEntry,
    #[error("no subjects at risk just after time 0")]
    NoRiskAtOrigin,
    #[error("supplied initial distribution is not a probability vector of length {expected}")]
    BadInitialVector { expected: usize },
    #[error("state {state} outside the state space")]
    BadState { state: usize },
    #[error("not estimable at landmark s={s}, state {state}: no subject observed in that state at that time")]
    NotEstimable { s: f64, state: usize },
    #[error(transparent)]
    Data(#[from] DataError),
}

/// Policy for the starting distribution `p(0)` of the occupation estimator.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialPolicy {
    /// Everyone starts in the given state: the unit vector.
    CommonState(usize),
    /// `Y_j(0+) / n`. Only valid without delayed entry.
    Multinomial,
    /// `Y_j(0+) / sum_l Y_l(0+)`: treats the subjects at risk at the origin
    /// as a random draw from the underlying population.
    AtRiskRenormalized,
    /// A user-supplied probability vector.
    Supplied(Vec<f64>),
}

/// Estimate the initial distribution under the given policy.
pub fn initial_distribution(
    data: &Dataset,
    policy: &InitialPolicy,
) -> Result<Vec<f64>, EstimateError> {
    let k = data.state_space().num_states();
    match policy {
        InitialPolicy::CommonState(j) => {
            if *j >= k {
                return Err(EstimateError::BadState { state: *j });
            }
            let mut p = vec![0.0; k];
            p[*j] = 1.0;
            Ok(p)
        }
        InitialPolicy::Multinomial => {
            if data.has_delayed_entry() {
                return Err(EstimateError::MultinomialWithDelayedEntry);
            }
            let counts = data.at_risk_after_origin();
            let n = data.n();
            if n == 0 {
                return Err(EstimateError::NoRiskAtOrigin);
            }
            Ok(counts.iter().map(|&c| c as f64 / n as f64).collect())
        }
        InitialPolicy::AtRiskRenormalized => {
            let counts = data.at_risk_after_origin();
            let total: usize = counts.iter().sum();
            if total == 0 {
                return Err(EstimateError::NoRiskAtOrigin);
            }
            Ok(counts.iter().map(|&c| c as f64 / total as f64).collect())
        }
        InitialPolicy::Supplied(p) => {
            let ok = p.len() == k
                && p.iter().all(|&x| (0.0..=1.0).contains(&x))
                && (p.iter().sum::<f64>() - 1.0).abs() <= 1e-10;
            if !ok {
                return Err(EstimateError::BadInitialVector { expected: k });
            }
            Ok(p.clone())
        }
    }
}

/// The finite matrix product `prod_{u in (s,t]} (I + dA(u))` over the jump
/// times of `haz`. Rows are probability vectors; no jumps in the window
/// yields the identity.
pub fn product_integral(
    haz: &CumulativeHazardMatrix,
    s: f64,
    t: f64,
) -> Result<SquareMatrix, EstimateError> {
    if s > t {
        return Err(EstimateError::InvalidWindow { s, t });
    }
    let k = haz.num_states();
    let mut out = SquareMatrix::identity(k);
    let mut scratch = vec![0.0; k];
    let (lo, hi) = window(haz.times(), s, t);
    for inc in &haz.increments()[lo..hi] {
        for row in 0..k {
            propagate_row_mut(out.row_mut(row), inc, &mut scratch);
        }
    }
    clamp_probabilities(&mut out);
    Ok(out)
}

/// Propagate a single distribution row through `(I + dA(u))` for all jump
/// times `u` in `(s, t]`. Equivalent to multiplying by [`product_integral`]
/// but linear in the number of states.
pub(crate) fn propagate_row(
    haz: &CumulativeHazardMatrix,
    row: &mut [f64],
    s: f64,
    t: f64,
) {
    let (lo, hi) = window(haz.times(), s, t);
    let mut scratch = vec![0.0; row.len()];
    for inc in &haz.increments()[lo..hi] {
        propagate_row_mut(row, inc, &mut scratch);
    }
    clamp_row(row);
}

fn window(times: &[f64], s: f64, t: f64) -> (usize, usize) {
    let lo = times.partition_point(|&u| u <= s);
    let hi = times.partition_point(|&u| u <= t);
    (lo, hi)
}

/// `row <- row + row * inc`, exploiting that `inc` has few nonzero rows.
fn propagate_row_mut(row: &mut [f64], inc: &SquareMatrix, scratch: &mut [f64]) {
    let k = row.len();
    scratch[..k].fill(0.0);
    for l in 0..k {
        let mass = row[l];
        if mass == 0.0 {
            continue;
        }
        let inc_row = inc.row(l);
        // Nonnegative off-diagonals with zero row sum: diagonal zero means
        // the whole row is zero.
        if inc_row[l] == 0.0 {
            continue;
        }
        for (m, &delta) in inc_row.iter().enumerate() {
            if delta != 0.0 {
                scratch[m] += mass * delta;
            }
        }
    }
    for (r, &d) in row.iter_mut().zip(scratch.iter()) {
        *r += d;
    }
}

fn clamp_probabilities(m: &mut SquareMatrix) {
    let k = m.dim();
    for row in 0..k {
        for col in 0..k {
            let v = m.get(row, col);
            m.set(row, col, v.clamp(0.0, 1.0));
        }
    }
}

fn clamp_row(row: &mut [f64]) {
    for v in row {
        *v = v.clamp(0.0, 1.0);
    }
}

/// A step-function curve of probability vectors: either occupation vectors
/// `p(t)` (origin 0) or one row of a transition matrix `P(s, .)`.
#[derive(Debug, Clone)]
pub struct ProbabilityCurve {
    origin: f64,
    initial: Vec<f64>,
    times: Vec<f64>,
    rows: Vec<Vec<f64>>,
}

impl ProbabilityCurve {
    pub fn origin(&self) -> f64 {
        self.origin
    }

    /// The vector at the origin (initial distribution or unit vector).
    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// The probability vector at time `t >= origin` (step interpolation).
    pub fn value_at(&self, t: f64) -> &[f64] {
        match self.times.partition_point(|&u| u <= t).checked_sub(1) {
            Some(j) => &self.rows[j],
            None => &self.initial,
        }
    }

    pub fn num_states(&self) -> usize {
        self.initial.len()
    }
}

/// Aalen-Johansen state occupation probabilities: `p(t) = p(0) * PI(0, t]`,
/// evaluated as a step function over all event times.
pub fn state_occupation(
    data: &Dataset,
    policy: &InitialPolicy,
) -> Result<ProbabilityCurve, EstimateError> {
    let initial = initial_distribution(data, policy)?;
    let haz = nelson_aalen(&data.event_table());
    let mut row = initial.clone();
    let mut scratch = vec![0.0; row.len()];
    let mut rows = Vec::with_capacity(haz.times().len());
    for inc in haz.increments() {
        propagate_row_mut(&mut row, inc, &mut scratch);
        clamp_row(&mut row);
        rows.push(row.clone());
    }
    Ok(ProbabilityCurve {
        origin: 0.0,
        initial,
        times: haz.times().to_vec(),
        rows,
    })
}

/// The landmark Aalen-Johansen estimate of the transition probability row
/// `P(X(t) = . | X(s) = from)`.
///
/// Selects the landmark subset at `(s, from)` and propagates the unit vector
/// through that subset's hazard increments on `(s, t]`. An empty landmark
/// subset is reported as [`EstimateError::NotEstimable`], which is distinct
/// from the unit-vector estimate produced by `t = s`.
pub fn landmark_aalen_johansen(
    data: &Dataset,
    s: f64,
    from: usize,
    t: f64,
) -> Result<Vec<f64>, EstimateError> {
    Ok(landmark_curve(data, s, from, t)?.value_at(t).to_vec())
}

/// The whole landmark transition-probability row as a curve on `(s, horizon]`.
pub fn landmark_curve(
    data: &Dataset,
    s: f64,
    from: usize,
    horizon: f64,
) -> Result<ProbabilityCurve, EstimateError> {
    if s > horizon {
        return Err(EstimateError::InvalidWindow { s, t: horizon });
    }
    let subset = data.landmark_subset(s, from)?;
    if subset.is_empty() {
        return Err(EstimateError::NotEstimable { s, state: from });
    }
    let haz = nelson_aalen(&subset.event_table());
    let k = haz.num_states();
    let mut row = vec![0.0; k];
    row[from] = 1.0;
    let initial = row.clone();
    let (lo, hi) = window(haz.times(), s, horizon);
    let mut scratch = vec![0.0; k];
    let mut times = Vec::with_capacity(hi - lo);
    let mut rows = Vec::with_capacity(hi - lo);
    for j in lo..hi {
        propagate_row_mut(&mut row, haz.increment(j), &mut scratch);
        clamp_row(&mut row);
        times.push(haz.times()[j]);
        rows.push(row.clone());
    }
    Ok(ProbabilityCurve {
        origin: s,
        initial,
        times,
        rows,
    })
}

/// The plain Aalen-Johansen transition probability `P_{from,to}(s, t)`: entry
/// of the product integral over `(s, t]` on the full dataset. Consistent only
/// under the Markov assumption; kept as the comparison estimator.
pub fn aalen_johansen_transition(
    haz: &CumulativeHazardMatrix,
    from: usize,
    s: f64,
    t: f64,
) -> Result<Vec<f64>, EstimateError> {
    if s > t {
        return Err(EstimateError::InvalidWindow { s, t });
    }
    let k = haz.num_states();
    let mut row = vec![0.0; k];
    row[from] = 1.0;
    propagate_row(haz, &mut row, s, t);
    Ok(row)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{ObservationRecord, StateSpace, Subject};

    fn d1() -> Dataset {
        crate::io::read_long_format(
            "id,from,to,entry,exit\nA,0,1,0,1\nA,1,2,1,4\nB,0,2,0,2\nC,0,cens,0,3\n".as_bytes(),
        )
        .unwrap()
    }

    #[test]
    fn product_integral_no_jumps_is_identity() {
        let haz = nelson_aalen(&d1().event_table());
        let m = product_integral(&haz, 4.5, 9.0).unwrap();
        assert_eq!(m, SquareMatrix::identity(3));
    }

    #[test]
    fn product_integral_rejects_reversed_window() {
        let haz = nelson_aalen(&d1().event_table());
        assert!(matches!(
            product_integral(&haz, 2.0, 1.0),
            Err(EstimateError::InvalidWindow { .. })
        ));
    }

    fn assert_row(actual: &[f64], expected: &[f64]) {
        for (a, e) in actual.iter().zip(expected) {
            assert!((a - e).abs() <= 1e-15, "{actual:?} vs {expected:?}");
        }
    }

    #[test]
    fn d1_occupation_row() {
        let haz = nelson_aalen(&d1().event_table());
        let m = product_integral(&haz, 0.0, 4.0).unwrap();
        assert_row(m.row(0), &[1.0 / 3.0, 0.0, 2.0 / 3.0]);
        let m2 = product_integral(&haz, 0.0, 2.0).unwrap();
        assert_row(m2.row(0), &[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]);
    }

    #[test]
    fn occupation_curve_matches_common_state_policy() {
        let data = d1();
        let curve = state_occupation(&data, &InitialPolicy::CommonState(0)).unwrap();
        assert_row(curve.value_at(4.0), &[1.0 / 3.0, 0.0, 2.0 / 3.0]);
        assert_row(curve.value_at(0.5), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn initial_policies() {
        let data = d1();
        assert_eq!(
            initial_distribution(&data, &InitialPolicy::Multinomial).unwrap(),
            [1.0, 0.0, 0.0]
        );
        assert_eq!(
            initial_distribution(&data, &InitialPolicy::Supplied(vec![0.5, 0.5, 0.0])).unwrap(),
            [0.5, 0.5, 0.0]
        );
        assert!(matches!(
            initial_distribution(&data, &InitialPolicy::Supplied(vec![0.5, 0.2, 0.0])),
            Err(EstimateError::BadInitialVector { .. })
        ));
    }

    #[test]
    fn multinomial_rejected_under_delayed_entry() {
        let space = StateSpace::illness_death();
        let data = Dataset::new(
            space,
            vec![
                Subject::new("A", vec![ObservationRecord::transition(1.5, 4.0, 1, 2)]),
                Subject::new("B", vec![ObservationRecord::transition(0.0, 2.0, 0, 2)]),
            ],
        )
        .unwrap();
        assert!(matches!(
            initial_distribution(&data, &InitialPolicy::Multinomial),
            Err(EstimateError::MultinomialWithDelayedEntry)
        ));
    }

    #[test]
    fn at_risk_renormalized_ratio() {
        let space = StateSpace::illness_death();
        let mut subjects = vec![
            Subject::new("T", vec![ObservationRecord::transition(0.5, 4.0, 1, 2)]),
        ];
        for i in 0..3 {
            subjects.push(Subject::new(
                format!("S{i}"),
                vec![ObservationRecord::censored(0.0, 5.0, 0)],
            ));
        }
        subjects.push(Subject::new(
            "U",
            vec![ObservationRecord::censored(0.0, 5.0, 1)],
        ));
        let data = Dataset::new(space, subjects).unwrap();
        // Y_0(0+) = 3, Y_1(0+) = 1; the delayed subject T does not count.
        assert_eq!(
            initial_distribution(&data, &InitialPolicy::AtRiskRenormalized).unwrap(),
            [0.75, 0.25, 0.0]
        );
    }

    #[test]
    fn landmark_d1() {
        let data = d1();
        let row = landmark_aalen_johansen(&data, 1.5, 1, 4.0).unwrap();
        assert_eq!(row[1], 0.0);
        assert_eq!(row[2], 1.0);
        let row = landmark_aalen_johansen(&data, 1.5, 1, 3.9).unwrap();
        assert_eq!(row[1], 1.0);
        assert_eq!(row[2], 0.0);
        // t = s: the empty product.
        let row = landmark_aalen_johansen(&data, 1.5, 1, 1.5).unwrap();
        assert_eq!(row, [0.0, 1.0, 0.0]);
    }

    #[test]
    fn landmark_empty_subset_is_not_estimable() {
        let data = d1();
        assert!(matches!(
            landmark_aalen_johansen(&data, 5.0, 0, 6.0),
            Err(EstimateError::NotEstimable { .. })
        ));
    }

    #[test]
    fn kaplan_meier_identity_in_two_state_model() {
        // 0 -> 1 only: the (0,0) entry of the product integral equals the
        // product-limit estimator.
        let space = StateSpace::new(2, [1], [(0, 1)]).unwrap();
        let data = Dataset::new(
            space,
            vec![
                Subject::new("a", vec![ObservationRecord::transition(0.0, 1.0, 0, 1)]),
                Subject::new("b", vec![ObservationRecord::transition(0.0, 3.0, 0, 1)]),
                Subject::new("c", vec![ObservationRecord::censored(0.0, 2.0, 0)]),
                Subject::new("d", vec![ObservationRecord::censored(0.0, 5.0, 0)]),
            ],
        )
        .unwrap();
        let haz = nelson_aalen(&data.event_table());
        let m = product_integral(&haz, 0.0, 5.0).unwrap();
        let km = (1.0 - 1.0 / 4.0) * (1.0 - 1.0 / 2.0);
        assert!((m.get(0, 0) - km).abs() <= 1e-15);
    }
}
