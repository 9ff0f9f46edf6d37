//! Cox partial-likelihood check of the Markov assumption.
//!
//! The entry time into an intermediate state is used as a covariate in a Cox
//! model for the hazard of the transition out of that state. Under the Markov
//! assumption the coefficient is zero; a hazard ratio away from one indicates
//! that the transition intensity depends on the arrival time.

use thiserror::Error;

use crate::data::{Dataset, Outcome};

#[derive(Debug, Error)]
pub enum CoxError {
    #[error("no subject with an observed spell in state {state}")]
    NoSpells { state: usize },
    #[error("no observed {from}->{to} events: coefficient not estimable")]
    NoEvents { from: usize, to: usize },
}

/// Result of the partial-likelihood fit for a single covariate.
#[derive(Debug, Clone)]
pub struct CoxFit {
    pub beta: f64,
    pub hazard_ratio: f64,
    pub std_err: f64,
    /// 95% Wald interval for the hazard ratio, `exp(beta +- 1.96 se)`.
    pub ci_95: (f64, f64),
    pub iterations: usize,
    pub converged: bool,
    pub n_events: usize,
    pub n_spells: usize,
}

const SCORE_TOL: f64 = 1e-8;
const MAX_ITER: usize = 50;

struct Spell {
    entry: f64,
    exit: f64,
    event: bool,
    covariate: f64,
}

/// Fit the Cox model for the `exposure_state -> event_state` transition with
/// the recorded entry time into `exposure_state` as the covariate.
///
/// Each occupancy spell of the exposure state enters the risk set at its
/// record's entry time (the later of study entry and arrival in the state)
/// and leaves at its exit. Ties are handled by Breslow's method and the
/// fitter is Newton-Raphson from `beta = 0` with step-halving; the standard
/// error comes from the observed information.
pub fn cox_markov_check(
    data: &Dataset,
    exposure_state: usize,
    event_state: usize,
) -> Result<CoxFit, CoxError> {
    let mut spells: Vec<Spell> = Vec::new();
    for subject in data.subjects() {
        let mut covariate = None;
        for record in &subject.records {
            if record.from_state != exposure_state {
                continue;
            }
            let z = *covariate.get_or_insert(record.entry);
            spells.push(Spell {
                entry: record.entry,
                exit: record.exit,
                event: record.outcome == Outcome::Transition(event_state),
                covariate: z,
            });
        }
    }
    if spells.is_empty() {
        return Err(CoxError::NoSpells {
            state: exposure_state,
        });
    }
    let n_events = spells.iter().filter(|s| s.event).count();
    if n_events == 0 {
        return Err(CoxError::NoEvents {
            from: exposure_state,
            to: event_state,
        });
    }

    // Center the covariate; the maximizer is invariant, the exponentials are
    // tamer.
    let mean_z = spells.iter().map(|s| s.covariate).sum::<f64>() / spells.len() as f64;
    for s in &mut spells {
        s.covariate -= mean_z;
    }

    let sweep = RiskSetSweep::new(&spells);

    let mut beta = 0.0;
    let mut loglik = sweep.evaluate(beta).loglik;
    let mut converged = false;
    let mut iterations = 0;
    let mut last_info = f64::NAN;
    for iter in 1..=MAX_ITER {
        iterations = iter;
        let at = sweep.evaluate(beta);
        last_info = at.info;
        if at.score.abs() < SCORE_TOL {
            converged = true;
            break;
        }
        if at.info <= 0.0 {
            // Flat likelihood in the current direction; nothing to gain.
            break;
        }
        let mut step = at.score / at.info;
        let mut candidate = beta + step;
        let mut candidate_ll = sweep.evaluate(candidate).loglik;
        let mut halvings = 0;
        while candidate_ll < loglik && halvings < 30 {
            step *= 0.5;
            candidate = beta + step;
            candidate_ll = sweep.evaluate(candidate).loglik;
            halvings += 1;
        }
        // A step below float resolution means the score is as small as the
        // likelihood surface allows.
        if step.abs() <= 1e-10 * (1.0 + beta.abs()) {
            beta = candidate;
            converged = true;
            break;
        }
        beta = candidate;
        loglik = candidate_ll;
    }

    let std_err = if last_info > 0.0 {
        (1.0 / last_info).sqrt()
    } else {
        f64::INFINITY
    };
    let hazard_ratio = beta.exp();
    let ci_95 = (
        (beta - 1.96 * std_err).exp(),
        (beta + 1.96 * std_err).exp(),
    );
    Ok(CoxFit {
        beta,
        hazard_ratio,
        std_err,
        ci_95,
        iterations,
        converged,
        n_events,
        n_spells: spells.len(),
    })
}

struct Evaluation {
    loglik: f64,
    score: f64,
    info: f64,
}

/// Partial-likelihood evaluation in one counting-process sweep: spells enter
/// the risk set when `entry < t` and leave once `exit < t`, with weighted
/// sums maintained incrementally along the ordered event times.
struct RiskSetSweep {
    /// Distinct event times ascending, with tied-event count and covariate sum.
    events: Vec<(f64, f64, f64)>,
    /// (entry, covariate) sorted by entry.
    entries: Vec<(f64, f64)>,
    /// (exit, covariate) sorted by exit.
    exits: Vec<(f64, f64)>,
}

impl RiskSetSweep {
    fn new(spells: &[Spell]) -> Self {
        let mut events: Vec<(f64, f64, f64)> = Vec::new();
        let mut tied: Vec<(f64, f64)> = spells
            .iter()
            .filter(|s| s.event)
            .map(|s| (s.exit, s.covariate))
            .collect();
        tied.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (t, z) in tied {
            match events.last_mut() {
                Some(last) if last.0 == t => {
                    last.1 += 1.0;
                    last.2 += z;
                }
                _ => events.push((t, 1.0, z)),
            }
        }
        let mut entries: Vec<(f64, f64)> =
            spells.iter().map(|s| (s.entry, s.covariate)).collect();
        entries.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut exits: Vec<(f64, f64)> = spells.iter().map(|s| (s.exit, s.covariate)).collect();
        exits.sort_by(|a, b| a.0.total_cmp(&b.0));
        RiskSetSweep {
            events,
            entries,
            exits,
        }
    }

    fn evaluate(&self, beta: f64) -> Evaluation {
        let mut loglik = 0.0;
        let mut score = 0.0;
        let mut info = 0.0;
        let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
        let (mut e_in, mut e_out) = (0usize, 0usize);
        for &(t, d, zsum) in &self.events {
            while e_in < self.entries.len() && self.entries[e_in].0 < t {
                let z = self.entries[e_in].1;
                let w = (beta * z).exp();
                s0 += w;
                s1 += w * z;
                s2 += w * z * z;
                e_in += 1;
            }
            while e_out < self.exits.len() && self.exits[e_out].0 < t {
                let z = self.exits[e_out].1;
                let w = (beta * z).exp();
                s0 -= w;
                s1 -= w * z;
                s2 -= w * z * z;
                e_out += 1;
            }
            let mean = s1 / s0;
            loglik += beta * zsum - d * s0.ln();
            score += zsum - d * mean;
            info += d * (s2 / s0 - mean * mean);
        }
        Evaluation {
            loglik,
            score,
            info,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{ObservationRecord, StateSpace, Subject};

    fn illness_subject(id: &str, z: f64, death: f64, censored: bool) -> Subject {
        let mut records = vec![ObservationRecord::transition(0.0, z, 0, 1)];
        if censored {
            records.push(ObservationRecord::censored(z, death, 1));
        } else {
            records.push(ObservationRecord::transition(z, death, 1, 2));
        }
        Subject::new(id, records)
    }

    fn fit(subjects: Vec<Subject>) -> Result<CoxFit, CoxError> {
        let data = Dataset::new(StateSpace::illness_death(), subjects).unwrap();
        cox_markov_check(&data, 1, 2)
    }

    #[test]
    fn identical_covariates_give_zero_after_one_iteration() {
        let subjects = (0..6)
            .map(|i| illness_subject(&format!("s{i}"), 2.0, 3.0 + i as f64, false))
            .collect();
        let fit = fit(subjects).unwrap();
        assert_eq!(fit.beta, 0.0);
        assert_eq!(fit.hazard_ratio, 1.0);
        assert!(fit.converged);
        assert_eq!(fit.iterations, 1);
    }

    #[test]
    fn matches_grid_search_on_three_subject_likelihood() {
        // Event order mixes the covariate order, so the maximizer is finite.
        let subjects = vec![
            illness_subject("a", 1.0, 6.0, false),
            illness_subject("b", 2.0, 5.0, false),
            illness_subject("c", 3.0, 7.0, false),
        ];
        let fit = fit(subjects.clone()).unwrap();
        assert!(fit.converged);

        // Brute-force grid maximization of the explicit partial likelihood
        // on the raw covariates (centering does not move the maximizer).
        let z = [1.0f64, 2.0, 3.0];
        let loglik = |beta: f64| -> f64 {
            // events: t=5 (z=2, risk {a,b,c}), t=6 (z=1, risk {a,c}), t=7 (z=3, risk {c})
            let t5 = beta * z[1] - (z.iter().map(|&v| (beta * v).exp()).sum::<f64>()).ln();
            let t6 = beta * z[0] - ((beta * z[0]).exp() + (beta * z[2]).exp()).ln();
            let t7 = beta * z[2] - (beta * z[2]).exp().ln();
            t5 + t6 + t7
        };
        let mut best = (f64::NEG_INFINITY, 0.0);
        let mut b = -5.0;
        while b <= 5.0 {
            let ll = loglik(b);
            if ll > best.0 {
                best = (ll, b);
            }
            b += 1e-6;
        }
        assert!(
            (fit.beta - best.1).abs() < 1e-6,
            "newton {} vs grid {}",
            fit.beta,
            best.1
        );
    }

    #[test]
    fn monotone_two_subject_likelihood_drifts_with_huge_std_err() {
        // With two subjects whose earlier death has the smaller covariate the
        // partial likelihood is monotone: no finite maximizer exists. The
        // fitter drifts far negative until the score flattens out; the
        // vanishing information shows up as an enormous standard error.
        let subjects = vec![
            illness_subject("a", 1.0, 5.0, false),
            illness_subject("b", 2.0, 6.0, false),
        ];
        let fit = fit(subjects).unwrap();
        assert!(fit.beta < -10.0, "beta {}", fit.beta);
        assert!(fit.std_err > 100.0, "std_err {}", fit.std_err);
    }

    #[test]
    fn no_events_is_an_error() {
        let subjects = vec![
            illness_subject("a", 1.0, 5.0, true),
            illness_subject("b", 2.0, 6.0, true),
        ];
        assert!(matches!(fit(subjects), Err(CoxError::NoEvents { .. })));
    }

    #[test]
    fn delayed_entry_restricts_risk_sets() {
        // Subject d is truncated into state 1 at time 5.5: it must not sit in
        // the risk set for the event at t=5.
        let mut subjects = vec![
            illness_subject("a", 1.0, 6.0, false),
            illness_subject("b", 2.0, 5.0, false),
            illness_subject("c", 3.0, 7.0, false),
        ];
        subjects.push(Subject::new(
            "d",
            vec![ObservationRecord::transition(5.5, 8.0, 1, 2)],
        ));
        let data = Dataset::new(StateSpace::illness_death(), subjects).unwrap();
        let fit = cox_markov_check(&data, 1, 2).unwrap();
        assert_eq!(fit.n_events, 4);
        assert_eq!(fit.n_spells, 4);
        assert!(fit.beta.is_finite());
    }

    #[test]
    fn ci_contains_hazard_ratio() {
        let subjects = vec![
            illness_subject("a", 1.0, 6.0, false),
            illness_subject("b", 2.0, 5.0, false),
            illness_subject("c", 3.0, 7.0, false),
        ];
        let fit = fit(subjects).unwrap();
        assert_eq!(fit.hazard_ratio, fit.beta.exp());
        assert!(fit.ci_95.0 <= fit.hazard_ratio && fit.hazard_ratio <= fit.ci_95.1);
    }
}
