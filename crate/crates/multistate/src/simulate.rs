//! Scenario generators for irreversible illness-death studies: latent paths
//! under several dependence mechanisms, random left-truncation, and random or
//! event-driven right-censoring.
//!
//! Subjects are generated on per-subject substreams of the scenario seed, so
//! a scenario is reproducible regardless of parallel chunking.

use rand::Rng;
use rand_distr::{Exp, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{Dataset, ObservationRecord, Outcome, StateSpace, Subject};
use crate::seeds::{mix, stream_rng, tags};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid scenario: {0}")]
    Invalid(String),
}

/// Constant baseline transition hazards of the illness-death model.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BaseHazards {
    pub h01: f64,
    pub h02: f64,
    #[serde(default)]
    pub h12: f64,
}

/// How the waiting time in the illness state depends on the past.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Mechanism {
    /// Markov: illness sojourn is exponential with the base hazard.
    Independent,
    /// Absorption at a fixed multiple of the illness time: `Z2 = (1 + d) Z1`.
    ConstantMultiplier { d: f64 },
    /// Cox-type dependence: illness sojourn hazard `baseline * exp(beta * Z1)`.
    CoxSojourn { baseline: f64, beta: f64 },
    /// All three hazards share one gamma frailty draw per subject.
    GammaFrailty { mean: f64, variance: f64 },
    /// The illness-to-death hazard depends on the state occupied at `time`:
    /// subjects still in the initial state at `time` die at `rate_if_initial`
    /// once ill, all others at `rate_otherwise`.
    StateAtTime {
        time: f64,
        rate_if_initial: f64,
        rate_otherwise: f64,
    },
}

/// Random left-truncation law for the study-entry time.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Truncation {
    None,
    SkewNormal { location: f64, scale: f64, shape: f64 },
    Uniform { a: f64, b: f64 },
    Exponential { rate: f64 },
}

/// Right-censoring scheme.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Censoring {
    None,
    /// Independent per-subject exponential censoring times.
    Exponential { rate: f64 },
    /// Event-driven: everyone still under observation is censored when the
    /// m-th entry into the absorbing state has been observed.
    TypeIi { m: usize },
}

/// Full parameterization of one simulation design.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub hazards: BaseHazards,
    pub mechanism: Mechanism,
    pub truncation: Truncation,
    pub censoring: Censoring,
    pub n: usize,
    pub seed: u64,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        let err = |msg: String| Err(SimError::Invalid(msg));
        if self.n == 0 {
            return err("n must be at least 1".into());
        }
        if !(self.hazards.h01 > 0.0) || !(self.hazards.h02 > 0.0) {
            return err("hazards h01 and h02 must be positive".into());
        }
        match &self.mechanism {
            Mechanism::Independent | Mechanism::GammaFrailty { .. } => {
                if !(self.hazards.h12 > 0.0) {
                    return err("h12 must be positive for this mechanism".into());
                }
            }
            Mechanism::ConstantMultiplier { d } => {
                if !(*d > 0.0) {
                    return err("constant multiplier d must be positive".into());
                }
            }
            Mechanism::CoxSojourn { baseline, .. } => {
                if !(*baseline > 0.0) {
                    return err("cox baseline hazard must be positive".into());
                }
            }
            Mechanism::StateAtTime {
                time,
                rate_if_initial,
                rate_otherwise,
            } => {
                if !(*time >= 0.0) || !(*rate_if_initial > 0.0) || !(*rate_otherwise > 0.0) {
                    return err("state_at_time needs nonnegative time and positive rates".into());
                }
            }
        }
        if let Mechanism::GammaFrailty { mean, variance } = self.mechanism {
            if !(mean > 0.0) || !(variance > 0.0) {
                return err("gamma frailty needs positive mean and variance".into());
            }
        }
        match &self.truncation {
            Truncation::None => {}
            Truncation::SkewNormal { scale, .. } => {
                if !(*scale > 0.0) {
                    return err("skew normal scale must be positive".into());
                }
            }
            Truncation::Uniform { a, b } => {
                if !(a < b) {
                    return err("uniform truncation needs a < b".into());
                }
            }
            Truncation::Exponential { rate } => {
                if !(*rate > 0.0) {
                    return err("exponential truncation rate must be positive".into());
                }
            }
        }
        match &self.censoring {
            Censoring::None => {}
            Censoring::Exponential { rate } => {
                if !(*rate > 0.0) {
                    return err("exponential censoring rate must be positive".into());
                }
            }
            Censoring::TypeIi { m } => {
                if *m == 0 || *m > self.n {
                    return err("type II censoring needs 1 <= m <= n".into());
                }
            }
        }
        Ok(())
    }

    /// Copy of the scenario with truncation and censoring switched off, as
    /// used for large-sample oracles.
    pub fn complete_observation(&self, n: usize, seed: u64) -> ScenarioConfig {
        ScenarioConfig {
            n,
            seed,
            truncation: Truncation::None,
            censoring: Censoring::None,
            ..self.clone()
        }
    }
}

/// Which way a latent path leaves the initial state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Direct,
    ViaIllness,
}

/// A complete latent trajectory: entry into illness (if any), absorption
/// time, and the frailty draw (1 when the mechanism has none).
#[derive(Debug, Clone, Copy)]
pub struct LatentPath {
    pub route: Route,
    pub illness_time: Option<f64>,
    pub absorption_time: f64,
    pub frailty: f64,
}

impl LatentPath {
    /// Latent state at time `t` (right-continuous).
    pub fn state_at(&self, t: f64) -> usize {
        if t >= self.absorption_time {
            return 2;
        }
        match self.illness_time {
            Some(z1) if t >= z1 => 1,
            _ => 0,
        }
    }
}

/// Generate `count` latent paths for the scenario.
///
/// The waiting time in the initial state has constant hazard `h01 + h02`
/// (frailty-scaled where applicable) and a binomial experiment with success
/// probability `h01 / (h01 + h02)` decides whether the subject passes through
/// the illness state; the absorption time then follows the mechanism.
pub fn simulate_latent(config: &ScenarioConfig, count: usize) -> Vec<LatentPath> {
    let seed = mix(config.seed, tags::LATENT);
    (0..count)
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            draw_latent_path(config, &mut rng)
        })
        .collect()
}

fn draw_latent_path(config: &ScenarioConfig, rng: &mut impl Rng) -> LatentPath {
    let BaseHazards { h01, h02, h12 } = config.hazards;
    let frailty = match config.mechanism {
        Mechanism::GammaFrailty { mean, variance } => {
            let shape = mean * mean / variance;
            let scale = variance / mean;
            rng.sample(Gamma::new(shape, scale).expect("validated"))
        }
        _ => 1.0,
    };
    let leave_initial = rng.sample(Exp::new((h01 + h02) * frailty).expect("validated"));
    let via_illness = rng.random_bool(h01 / (h01 + h02));
    if !via_illness {
        return LatentPath {
            route: Route::Direct,
            illness_time: None,
            absorption_time: leave_initial,
            frailty,
        };
    }
    let z1 = leave_initial;
    let sojourn = match &config.mechanism {
        Mechanism::Independent => rng.sample(Exp::new(h12).expect("validated")),
        Mechanism::ConstantMultiplier { d } => d * z1,
        Mechanism::CoxSojourn { baseline, beta } => {
            rng.sample(Exp::new(baseline * (beta * z1).exp()).expect("validated"))
        }
        Mechanism::GammaFrailty { .. } => rng.sample(Exp::new(h12 * frailty).expect("validated")),
        Mechanism::StateAtTime {
            time,
            rate_if_initial,
            rate_otherwise,
        } => {
            // The branch is decided by the state occupied at `time`: still in
            // the initial state there means z1 >= time.
            let rate = if z1 >= *time {
                *rate_if_initial
            } else {
                *rate_otherwise
            };
            rng.sample(Exp::new(rate).expect("validated"))
        }
    };
    LatentPath {
        route: Route::ViaIllness,
        illness_time: Some(z1),
        absorption_time: z1 + sojourn,
        frailty,
    }
}

/// Draw `count` skew-normal variates via the conditioning representation:
/// a standard normal pair with correlation `delta = shape / sqrt(1+shape^2)`,
/// sign-flipped by the first coordinate.
pub fn sample_skew_normal(
    location: f64,
    scale: f64,
    shape: f64,
    count: usize,
    seed: u64,
) -> Vec<f64> {
    let mut rng = stream_rng(seed, 0);
    (0..count)
        .map(|_| skew_normal_draw(&mut rng, location, scale, shape))
        .collect()
}

fn skew_normal_draw(rng: &mut impl Rng, location: f64, scale: f64, shape: f64) -> f64 {
    let delta = shape / (1.0 + shape * shape).sqrt();
    let u0: f64 = rng.sample(StandardNormal);
    let v: f64 = rng.sample(StandardNormal);
    let u1 = delta * u0 + (1.0 - delta * delta).sqrt() * v;
    location + scale * if u0 >= 0.0 { u1 } else { -u1 }
}

fn draw_truncation_time(truncation: &Truncation, rng: &mut impl Rng) -> f64 {
    let raw = match truncation {
        Truncation::None => return 0.0,
        Truncation::SkewNormal {
            location,
            scale,
            shape,
        } => skew_normal_draw(rng, *location, *scale, *shape),
        Truncation::Uniform { a, b } => {
            rng.sample(rand::distr::Uniform::new(*a, *b).expect("validated"))
        }
        Truncation::Exponential { rate } => rng.sample(Exp::new(*rate).expect("validated")),
    };
    // Negative entry draws are clamped to the time origin.
    raw.max(0.0)
}

/// Observed records of a path entered at `L`, `None` when the subject is
/// excluded (absorbed at or before entry).
pub(crate) fn records_for_path(path: &LatentPath, entry: f64) -> Option<Vec<ObservationRecord>> {
    if !(entry < path.absorption_time) {
        return None;
    }
    let records = match path.illness_time {
        Some(z1) if entry < z1 => vec![
            ObservationRecord::transition(entry, z1, 0, 1),
            ObservationRecord::transition(z1, path.absorption_time, 1, 2),
        ],
        Some(_) => vec![ObservationRecord::transition(
            entry,
            path.absorption_time,
            1,
            2,
        )],
        None => vec![ObservationRecord::transition(
            entry,
            path.absorption_time,
            0,
            2,
        )],
    };
    Some(records)
}

/// Apply random left-truncation: draw an entry time per subject, keep
/// subjects absorbed strictly after entry, discard history before entry.
/// The entering record starts at the entry time in the state occupied there.
pub fn apply_truncation(paths: &[LatentPath], truncation: &Truncation, seed: u64) -> Dataset {
    let space = StateSpace::illness_death();
    let mut subjects = Vec::new();
    for (i, path) in paths.iter().enumerate() {
        let mut rng = stream_rng(seed, i as u64);
        let entry = draw_truncation_time(truncation, &mut rng);
        if let Some(records) = records_for_path(path, entry) {
            subjects.push(Subject::new(format!("s{i}"), records));
        }
    }
    Dataset::new(space, subjects).expect("generated data is structurally valid")
}

/// Outcome details of a type II censoring pass.
#[derive(Debug, Clone, Copy)]
pub struct TypeIiOutcome {
    /// The censoring time, when it was applied.
    pub censoring_time: Option<f64>,
    /// Set when fewer than `m` absorbing events were observable; nobody is
    /// censored in that case.
    pub short: bool,
}

/// A censored dataset plus bookkeeping about the censoring pass.
#[derive(Debug, Clone)]
pub struct CensoringResult {
    pub data: Dataset,
    pub type_ii: Option<TypeIiOutcome>,
}

/// Apply the right-censoring scheme to an observed dataset.
///
/// Exponential censoring draws one independent time per subject; the records
/// are cut at that time with a terminal censoring record when it precedes
/// absorption. A transition tied exactly with the censoring time is kept.
/// Subjects whose whole observation window is removed are dropped.
pub fn apply_censoring(data: &Dataset, censoring: &Censoring, seed: u64) -> CensoringResult {
    match censoring {
        Censoring::None => CensoringResult {
            data: data.clone(),
            type_ii: None,
        },
        Censoring::Exponential { rate } => {
            let exp = Exp::new(*rate).expect("validated");
            let subjects: Vec<Subject> = data
                .subjects()
                .iter()
                .enumerate()
                .filter_map(|(i, subject)| {
                    let mut rng = stream_rng(seed, i as u64);
                    let c = rng.sample(exp);
                    censor_subject(subject, c)
                })
                .collect();
            CensoringResult {
                data: Dataset::new(data.state_space().clone(), subjects)
                    .expect("censoring preserves validity"),
                type_ii: None,
            }
        }
        Censoring::TypeIi { m } => {
            let space = data.state_space();
            let mut absorbing_exits: Vec<f64> = data
                .subjects()
                .iter()
                .flat_map(|s| s.records.iter())
                .filter_map(|r| match r.outcome {
                    Outcome::Transition(to) if space.is_absorbing(to) => Some(r.exit),
                    _ => None,
                })
                .collect();
            absorbing_exits.sort_by(f64::total_cmp);
            if absorbing_exits.len() < *m {
                return CensoringResult {
                    data: data.clone(),
                    type_ii: Some(TypeIiOutcome {
                        censoring_time: None,
                        short: true,
                    }),
                };
            }
            let tau = absorbing_exits[m - 1];
            let subjects: Vec<Subject> = data
                .subjects()
                .iter()
                .filter_map(|subject| censor_subject(subject, tau))
                .collect();
            CensoringResult {
                data: Dataset::new(data.state_space().clone(), subjects)
                    .expect("censoring preserves validity"),
                type_ii: Some(TypeIiOutcome {
                    censoring_time: Some(tau),
                    short: false,
                }),
            }
        }
    }
}

fn censor_subject(subject: &Subject, c: f64) -> Option<Subject> {
    let mut records = Vec::with_capacity(subject.records.len());
    for record in &subject.records {
        if record.exit <= c {
            records.push(*record);
        } else if record.entry < c {
            records.push(ObservationRecord::censored(record.entry, c, record.from_state));
            break;
        } else {
            break;
        }
    }
    if records.is_empty() {
        None
    } else {
        Some(Subject::new(subject.id.clone(), records))
    }
}

/// Per-study bookkeeping of a simulated scenario.
#[derive(Debug, Clone)]
pub struct StudyMeta {
    /// Subjects simulated (the latent sample size).
    pub simulated: usize,
    /// Subjects included in the study after truncation and censoring.
    pub included: usize,
    /// Included subjects entering exactly at the time origin.
    pub entered_at_origin: usize,
    /// Included subjects whose observation ends in censoring.
    pub censored: usize,
    pub type_ii: Option<TypeIiOutcome>,
}

/// A generated study: the observed dataset plus its bookkeeping.
#[derive(Debug, Clone)]
pub struct SimulatedStudy {
    pub data: Dataset,
    pub meta: StudyMeta,
}

/// Run the whole generation pipeline for a scenario: latent paths, random
/// left-truncation, right-censoring. Identical `(config, seed)` produce an
/// identical dataset.
pub fn simulate_dataset(config: &ScenarioConfig) -> Result<SimulatedStudy, SimError> {
    config.validate()?;
    let paths = simulate_latent(config, config.n);
    let truncated = apply_truncation(&paths, &config.truncation, mix(config.seed, tags::TRUNCATION));
    let censored = apply_censoring(&truncated, &config.censoring, mix(config.seed, tags::CENSORING));
    let data = censored.data;
    let entered_at_origin = data
        .subjects()
        .iter()
        .filter(|s| s.entry_time() == 0.0)
        .count();
    let n_censored = data
        .subjects()
        .iter()
        .filter(|s| s.records.last().unwrap().outcome == Outcome::Censored)
        .count();
    Ok(SimulatedStudy {
        meta: StudyMeta {
            simulated: config.n,
            included: data.n(),
            entered_at_origin,
            censored: n_censored,
            type_ii: censored.type_ii,
        },
        data,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::write_long_format;

    fn base_config(mechanism: Mechanism) -> ScenarioConfig {
        ScenarioConfig {
            hazards: BaseHazards {
                h01: 0.039,
                h02: 0.026,
                h12: 0.1,
            },
            mechanism,
            truncation: Truncation::None,
            censoring: Censoring::None,
            n: 100,
            seed: 20_260_810,
        }
    }

    #[test]
    fn illness_split_probability() {
        let config = base_config(Mechanism::Independent);
        let paths = simulate_latent(&config, 100_000);
        let via = paths
            .iter()
            .filter(|p| p.route == Route::ViaIllness)
            .count() as f64;
        let p = via / paths.len() as f64;
        assert!((p - 0.6).abs() < 0.006, "split {p}");
    }

    #[test]
    fn constant_multiplier_is_deterministic_given_illness_time() {
        let config = base_config(Mechanism::ConstantMultiplier { d: 0.7 });
        for path in simulate_latent(&config, 2_000) {
            if let Some(z1) = path.illness_time {
                assert!((path.absorption_time - 1.7 * z1).abs() <= 1e-12 * z1.max(1.0));
            }
        }
    }

    #[test]
    fn gamma_frailty_moment_matching() {
        let config = base_config(Mechanism::GammaFrailty {
            mean: 2.0,
            variance: 2.0,
        });
        let paths = simulate_latent(&config, 100_000);
        let n = paths.len() as f64;
        let mean = paths.iter().map(|p| p.frailty).sum::<f64>() / n;
        let var = paths
            .iter()
            .map(|p| (p.frailty - mean).powi(2))
            .sum::<f64>()
            / (n - 1.0);
        assert!((mean - 2.0).abs() < 0.03, "frailty mean {mean}");
        assert!((var - 2.0).abs() < 0.1, "frailty variance {var}");
    }

    #[test]
    fn skew_normal_reduces_to_normal_at_shape_zero() {
        let draws = sample_skew_normal(3.0, 2.0, 0.0, 200_000, 11);
        let n = draws.len() as f64;
        let mean = draws.iter().sum::<f64>() / n;
        let sd = (draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        assert!((mean - 3.0).abs() < 0.02, "mean {mean}");
        assert!((sd - 2.0).abs() < 0.02, "sd {sd}");
    }

    #[test]
    fn skew_normal_matches_closed_form_mean() {
        // mean = scale * delta * sqrt(2/pi)
        for (scale, expected) in [(10.0, 7.9393), (13.0, 10.3211)] {
            let draws = sample_skew_normal(0.0, scale, 10.0, 1_000_000, 7);
            let mean = draws.iter().sum::<f64>() / draws.len() as f64;
            assert!((mean - expected).abs() < 0.05, "scale {scale}: mean {mean}");
        }
    }

    #[test]
    fn records_for_path_cases() {
        let path = LatentPath {
            route: Route::ViaIllness,
            illness_time: Some(1.0),
            absorption_time: 5.0,
            frailty: 1.0,
        };
        // Entry between illness and absorption: starts in state 1.
        let records = records_for_path(&path, 2.0).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].entry, 2.0);
        assert_eq!(records[0].from_state, 1);
        // Entry before illness: full two-record chain.
        let records = records_for_path(&path, 0.0).unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(records[0].from_state, 0);
        // Absorption before entry: excluded.
        let short = LatentPath {
            route: Route::Direct,
            illness_time: None,
            absorption_time: 2.0,
            frailty: 1.0,
        };
        assert!(records_for_path(&short, 3.0).is_none());
    }

    #[test]
    fn negative_truncation_draws_clamp_to_origin() {
        let config = ScenarioConfig {
            truncation: Truncation::Uniform { a: -5.0, b: -1.0 },
            ..base_config(Mechanism::Independent)
        };
        let study = simulate_dataset(&config).unwrap();
        assert_eq!(study.meta.included, 100);
        assert_eq!(study.meta.entered_at_origin, 100);
    }

    #[test]
    fn type_ii_censors_at_mth_event() {
        let space = StateSpace::illness_death();
        let subjects: Vec<Subject> = [2.0, 4.0, 6.0, 8.0]
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                Subject::new(
                    format!("s{i}"),
                    vec![ObservationRecord::transition(0.0, t, 0, 2)],
                )
            })
            .collect();
        let data = Dataset::new(space, subjects).unwrap();
        let result = apply_censoring(&data, &Censoring::TypeIi { m: 2 }, 0);
        let info = result.type_ii.unwrap();
        assert_eq!(info.censoring_time, Some(4.0));
        assert!(!info.short);
        let outcomes: Vec<(f64, Outcome)> = result
            .data
            .subjects()
            .iter()
            .map(|s| {
                let last = s.records.last().unwrap();
                (last.exit, last.outcome)
            })
            .collect();
        assert_eq!(outcomes[0], (2.0, Outcome::Transition(2)));
        assert_eq!(outcomes[1], (4.0, Outcome::Transition(2)));
        assert_eq!(outcomes[2], (4.0, Outcome::Censored));
        assert_eq!(outcomes[3], (4.0, Outcome::Censored));
    }

    #[test]
    fn type_ii_with_too_few_events_censors_nobody() {
        let space = StateSpace::illness_death();
        let data = Dataset::new(
            space,
            vec![Subject::new(
                "a",
                vec![ObservationRecord::transition(0.0, 2.0, 0, 2)],
            )],
        )
        .unwrap();
        let result = apply_censoring(&data, &Censoring::TypeIi { m: 5 }, 0);
        assert!(result.type_ii.unwrap().short);
        assert_eq!(result.data.n(), 1);
        assert_eq!(
            result.data.subjects()[0].records.last().unwrap().outcome,
            Outcome::Transition(2)
        );
    }

    #[test]
    fn vanishing_censoring_rate_changes_nothing() {
        let config = ScenarioConfig {
            censoring: Censoring::Exponential { rate: 1e-9 },
            n: 1_000,
            ..base_config(Mechanism::Independent)
        };
        let study = simulate_dataset(&config).unwrap();
        assert_eq!(study.meta.censored, 0);
        assert_eq!(study.meta.included, 1_000);
    }

    #[test]
    fn identical_config_and_seed_give_identical_datasets() {
        let config = ScenarioConfig {
            truncation: Truncation::SkewNormal {
                location: 0.0,
                scale: 10.0,
                shape: 10.0,
            },
            censoring: Censoring::Exponential { rate: 0.01 },
            ..base_config(Mechanism::ConstantMultiplier { d: 0.7 })
        };
        let render = |study: &SimulatedStudy| {
            let mut buf = Vec::new();
            write_long_format(&study.data, &mut buf).unwrap();
            String::from_utf8(buf).unwrap()
        };
        let a = simulate_dataset(&config).unwrap();
        let b = simulate_dataset(&config).unwrap();
        assert_eq!(render(&a), render(&b));
        let other = ScenarioConfig {
            seed: config.seed + 1,
            ..config.clone()
        };
        let c = simulate_dataset(&other).unwrap();
        assert_ne!(render(&a), render(&c));
    }

    #[test]
    fn markov_occupation_matches_closed_form() {
        // Constant-rate Markov illness-death occupation probabilities:
        // p0(t) = exp(-(a+b) t),
        // p1(t) = a (exp(-c t) - exp(-(a+b) t)) / (a + b - c).
        let config = ScenarioConfig {
            hazards: BaseHazards {
                h01: 0.12,
                h02: 0.03,
                h12: 0.1,
            },
            n: 50_000,
            ..base_config(Mechanism::Independent)
        };
        let paths = simulate_latent(&config, config.n);
        let (a, b, c) = (0.12_f64, 0.03_f64, 0.1_f64);
        for t in [2.0_f64, 5.0, 10.0] {
            let p0 = (-(a + b) * t).exp();
            let p1 = a * ((-c * t).exp() - (-(a + b) * t).exp()) / (a + b - c);
            let f0 = paths.iter().filter(|p| p.state_at(t) == 0).count() as f64
                / paths.len() as f64;
            let f1 = paths.iter().filter(|p| p.state_at(t) == 1).count() as f64
                / paths.len() as f64;
            assert!((f0 - p0).abs() < 0.01, "t={t}: p0 {f0} vs {p0}");
            assert!((f1 - p1).abs() < 0.01, "t={t}: p1 {f1} vs {p1}");
        }
    }

    #[test]
    fn scenario_validation_rejects_bad_parameters() {
        let mut config = base_config(Mechanism::Independent);
        config.hazards.h12 = 0.0;
        assert!(config.validate().is_err());
        let mut config = base_config(Mechanism::Independent);
        config.censoring = Censoring::TypeIi { m: 200 };
        assert!(config.validate().is_err());
        let mut config = base_config(Mechanism::GammaFrailty {
            mean: 2.0,
            variance: 0.0,
        });
        config.hazards.h12 = 0.1;
        assert!(config.validate().is_err());
    }
}
