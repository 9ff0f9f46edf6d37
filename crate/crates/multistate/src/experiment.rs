//! Replicated simulation experiments: generate studies, estimate targets,
//! attach bootstrap confidence intervals, and aggregate bias, RMSE and
//! empirical coverage against a large-sample oracle.
//!
//! The whole run is a pure function of the experiment config: replications
//! and bootstrap replicates live on pre-assigned substreams of the master
//! seed and aggregation is sequential in replication order, so outputs do not
//! depend on the number of worker threads.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;
use thiserror::Error;

use crate::data::Dataset;
use crate::estimate::{aalen_johansen_transition, landmark_aalen_johansen};
use crate::hazard::{nelson_aalen, CumulativeHazardMatrix};
use crate::resample::{
    efron_resample, log_transformed_quantile_ci, standardized_quantile_ci,
    wild_bootstrap_nelson_aalen, wild_bootstrap_transition_probability, BootstrapSample,
    ConfidenceInterval, ResampleMethod,
};
use crate::seeds::{mix, tags};
use crate::simulate::{simulate_dataset, simulate_latent, LatentPath, ScenarioConfig, SimError};
use crate::table::EventTable;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid experiment: {0}")]
    Invalid(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("oracle cannot evaluate target {label}: {reason}")]
    OracleNotEstimable { label: String, reason: String },
}

/// Which estimator a target evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EstimatorKind {
    /// Nelson-Aalen cumulative hazard of one transition.
    #[serde(rename = "NA")]
    NelsonAalen,
    /// Aalen-Johansen transition probability (product integral on the full
    /// data; consistent only under the Markov assumption).
    #[serde(rename = "AJ")]
    AalenJohansen,
    /// Landmark Aalen-Johansen transition probability.
    #[serde(rename = "LMAJ")]
    LandmarkAalenJohansen,
}

impl EstimatorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EstimatorKind::NelsonAalen => "NA",
            EstimatorKind::AalenJohansen => "AJ",
            EstimatorKind::LandmarkAalenJohansen => "LMAJ",
        }
    }
}

/// A time point, either fixed or defined through the oracle sample:
/// `quantile` refers to the time-to-absorption distribution,
/// `event_quantile` to the pooled distribution of all transition times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeSpec {
    Fixed(f64),
    Quantile(f64),
    EventQuantile(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CiMethod {
    Efron,
    Wild,
}

impl CiMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            CiMethod::Efron => "efron",
            CiMethod::Wild => "wild",
        }
    }
}

/// One scalar estimand tracked by the experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Target {
    #[serde(default)]
    pub label: Option<String>,
    pub estimator: EstimatorKind,
    pub from: usize,
    pub to: usize,
    /// Window start; required for LMAJ, defaults to 0 for AJ, absent for NA.
    #[serde(default)]
    pub s: Option<TimeSpec>,
    pub t: TimeSpec,
    /// Per-target override of the experiment's CI method.
    #[serde(default)]
    pub ci: Option<CiMethod>,
}

/// A whole estimated curve tracked for plotting: the mean estimate and an
/// empirical envelope of the Aalen-Johansen probability `P_{from,to}(0, t)`
/// over a regular grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveSpec {
    #[serde(default)]
    pub label: Option<String>,
    pub from: usize,
    pub to: usize,
    pub points: usize,
    pub horizon: TimeSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum OracleSpec {
    /// Simulate `n_oracle` complete-observation subjects from the scenario's
    /// latent law and read truths off that sample.
    LargeSample { n_oracle: usize },
    /// Externally supplied true values, one per target (fixed times only).
    Supplied { values: Vec<f64> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub scenario: ScenarioConfig,
    pub replications: usize,
    pub targets: Vec<Target>,
    #[serde(default)]
    pub curves: Vec<CurveSpec>,
    pub ci_method: CiMethod,
    #[serde(rename = "B")]
    pub b: usize,
    pub level: f64,
    pub oracle: OracleSpec,
    pub master_seed: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        let err = |msg: String| Err(ExperimentError::Invalid(msg));
        self.scenario.validate()?;
        if self.replications == 0 {
            return err("replications must be at least 1".into());
        }
        if self.b < 2 {
            return err("B must be at least 2".into());
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return err("level must be in (0, 1)".into());
        }
        if self.targets.is_empty() && self.curves.is_empty() {
            return err("experiment needs at least one target or curve".into());
        }
        let states = 3usize;
        for (k, target) in self.targets.iter().enumerate() {
            let label = target_label(target, k);
            if target.from >= states || target.to >= states {
                return err(format!("target {label}: state outside the illness-death model"));
            }
            match target.estimator {
                EstimatorKind::NelsonAalen => {
                    if target.s.is_some() {
                        return err(format!("target {label}: NA targets take no window start"));
                    }
                    if target.from == target.to {
                        return err(format!("target {label}: NA needs a proper transition"));
                    }
                }
                EstimatorKind::LandmarkAalenJohansen => {
                    if target.s.is_none() {
                        return err(format!("target {label}: LMAJ requires a landmark time s"));
                    }
                    if target.ci.unwrap_or(self.ci_method) == CiMethod::Wild {
                        return err(format!(
                            "target {label}: wild bootstrap for the landmark estimator is not supported"
                        ));
                    }
                }
                EstimatorKind::AalenJohansen => {}
            }
            for spec in target.s.iter().chain(std::iter::once(&target.t)) {
                if let TimeSpec::Quantile(q) | TimeSpec::EventQuantile(q) = spec {
                    if !(*q > 0.0 && *q < 1.0) {
                        return err(format!("target {label}: quantile must be in (0, 1)"));
                    }
                    if matches!(self.oracle, OracleSpec::Supplied { .. }) {
                        return err(format!(
                            "target {label}: quantile-defined times need a large-sample oracle"
                        ));
                    }
                }
            }
        }
        for curve in &self.curves {
            if curve.points == 0 {
                return err("curve needs at least one grid point".into());
            }
            if curve.from >= states || curve.to >= states {
                return err("curve states outside the illness-death model".into());
            }
            if matches!(self.oracle, OracleSpec::Supplied { .. }) {
                return err("curves need a large-sample oracle".into());
            }
        }
        match &self.oracle {
            OracleSpec::LargeSample { n_oracle } => {
                if *n_oracle < 10 * self.scenario.n {
                    return err(format!(
                        "n_oracle = {n_oracle} must be at least 10 * scenario.n = {}",
                        10 * self.scenario.n
                    ));
                }
            }
            OracleSpec::Supplied { values } => {
                if values.len() != self.targets.len() {
                    return err(format!(
                        "supplied oracle has {} values for {} targets",
                        values.len(),
                        self.targets.len()
                    ));
                }
            }
        }
        Ok(())
    }
}

fn target_label(target: &Target, index: usize) -> String {
    target
        .label
        .clone()
        .unwrap_or_else(|| format!("{}-{}", target.estimator.as_str(), index))
}

/// A complete-observation latent sample used to read off true values and
/// quantile-defined times.
pub struct LargeSampleOracle {
    paths: Vec<LatentPath>,
    absorption: Vec<f64>,
    events: Vec<f64>,
    hazard: OnceLock<CumulativeHazardMatrix>,
}

impl LargeSampleOracle {
    /// Simulate `n_oracle` subjects from the scenario's latent law with
    /// truncation and censoring disabled.
    pub fn generate(scenario: &ScenarioConfig, n_oracle: usize, seed: u64) -> Self {
        let complete = scenario.complete_observation(n_oracle, seed);
        let paths = simulate_latent(&complete, n_oracle);
        let mut absorption: Vec<f64> = paths.iter().map(|p| p.absorption_time).collect();
        absorption.sort_by(f64::total_cmp);
        let mut events: Vec<f64> = paths
            .iter()
            .flat_map(|p| p.illness_time.into_iter().chain([p.absorption_time]))
            .collect();
        events.sort_by(f64::total_cmp);
        LargeSampleOracle {
            paths,
            absorption,
            events,
            hazard: OnceLock::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.paths.len()
    }

    /// Resolve a time spec against the oracle sample (inverse-ECDF lower
    /// quantiles).
    pub fn resolve_time(&self, spec: TimeSpec) -> f64 {
        match spec {
            TimeSpec::Fixed(t) => t,
            TimeSpec::Quantile(q) => lower_quantile(&self.absorption, q),
            TimeSpec::EventQuantile(q) => lower_quantile(&self.events, q),
        }
    }

    /// Empirical state occupation frequency `P(X(t) = state)`; exact for the
    /// latent law by the complete-data multinomial identity.
    pub fn state_frequency(&self, state: usize, t: f64) -> f64 {
        let hits = self.paths.iter().filter(|p| p.state_at(t) == state).count();
        hits as f64 / self.paths.len() as f64
    }

    /// Empirical conditional frequency `P(X(t) = to | X(s) = from)`.
    pub fn conditional_frequency(
        &self,
        from: usize,
        s: f64,
        to: usize,
        t: f64,
    ) -> Option<f64> {
        let mut at_s = 0usize;
        let mut both = 0usize;
        for path in &self.paths {
            if path.state_at(s) == from {
                at_s += 1;
                if path.state_at(t) == to {
                    both += 1;
                }
            }
        }
        (at_s > 0).then(|| both as f64 / at_s as f64)
    }

    /// Large-sample Nelson-Aalen value of the cumulative partly conditional
    /// hazard `A_{from,to}(t)` on the complete-observation sample.
    pub fn cumulative_hazard(&self, from: usize, to: usize, t: f64) -> f64 {
        let haz = self.hazard.get_or_init(|| {
            let subjects: Vec<_> = self
                .paths
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    crate::data::Subject::new(
                        format!("o{i}"),
                        crate::simulate::records_for_path(p, 0.0)
                            .expect("complete paths always produce records"),
                    )
                })
                .collect();
            let data = Dataset::new(crate::data::StateSpace::illness_death(), subjects)
                .expect("complete data is valid");
            nelson_aalen(&data.event_table())
        });
        haz.value_at(from, to, t)
    }

    fn true_value(&self, rt: &ResolvedTarget) -> Result<f64, ExperimentError> {
        match rt.estimator {
            EstimatorKind::NelsonAalen => Ok(self.cumulative_hazard(rt.from, rt.to, rt.t)),
            EstimatorKind::AalenJohansen | EstimatorKind::LandmarkAalenJohansen => match rt.s {
                None => Ok(self.state_frequency(rt.to, rt.t)),
                Some(s) => self
                    .conditional_frequency(rt.from, s, rt.to, rt.t)
                    .ok_or_else(|| ExperimentError::OracleNotEstimable {
                        label: rt.label.clone(),
                        reason: format!("no oracle path in state {} at s = {s}", rt.from),
                    }),
            },
        }
    }
}

/// Inverse-ECDF (lower) quantile of a sorted sample.
pub(crate) fn lower_quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    assert!(n > 0, "quantile of an empty sample");
    let rank = (q * n as f64).ceil() as usize;
    sorted[rank.clamp(1, n) - 1]
}

/// Evaluate the true values of the experiment's targets (and resolve their
/// times) on a freshly generated large-sample oracle.
pub fn true_value_oracle(
    scenario: &ScenarioConfig,
    targets: &[Target],
    n_oracle: usize,
    seed: u64,
) -> Result<Vec<(f64, Option<f64>, f64)>, ExperimentError> {
    let oracle = LargeSampleOracle::generate(scenario, n_oracle, seed);
    targets
        .iter()
        .enumerate()
        .map(|(k, target)| {
            let rt = resolve_target(target, k, CiMethod::Efron, Some(&oracle), None)?;
            Ok((rt.t, rt.s, rt.true_value))
        })
        .collect()
}

/// A target with times and truth pinned down.
#[derive(Debug, Clone)]
pub struct ResolvedTarget {
    pub label: String,
    pub estimator: EstimatorKind,
    pub from: usize,
    pub to: usize,
    pub s: Option<f64>,
    pub t: f64,
    pub ci: CiMethod,
    pub true_value: f64,
}

fn resolve_target(
    target: &Target,
    index: usize,
    default_ci: CiMethod,
    oracle: Option<&LargeSampleOracle>,
    supplied: Option<f64>,
) -> Result<ResolvedTarget, ExperimentError> {
    let label = target_label(target, index);
    let resolve = |spec: TimeSpec| -> f64 {
        match oracle {
            Some(o) => o.resolve_time(spec),
            None => match spec {
                TimeSpec::Fixed(t) => t,
                _ => unreachable!("validated: quantile times need an oracle"),
            },
        }
    };
    let s = target.s.map(resolve);
    let t = resolve(target.t);
    let mut rt = ResolvedTarget {
        label,
        estimator: target.estimator,
        from: target.from,
        to: target.to,
        s,
        t,
        ci: target.ci.unwrap_or(default_ci),
        true_value: f64::NAN,
    };
    rt.true_value = match supplied {
        Some(v) => v,
        None => {
            let oracle = oracle.expect("validated: either supplied or large-sample oracle");
            oracle.true_value(&rt)?
        }
    };
    Ok(rt)
}

/// Aggregated metrics of one target.
#[derive(Debug, Clone)]
pub struct TargetMetrics {
    pub bias: f64,
    pub rmse: f64,
    pub coverage_pct: f64,
    pub replications_used: usize,
    pub replications_excluded: usize,
    /// Replications whose CI could not be formed (degenerate bootstrap).
    pub ci_failures: usize,
    /// Target marked failed: more than half the replications not estimable.
    pub failed: bool,
}

/// A tracked curve with oracle truth, mean estimate, and the empirical
/// 2.5%/97.5% envelope across replications.
#[derive(Debug, Clone)]
pub struct CurveReport {
    pub label: String,
    pub from: usize,
    pub to: usize,
    pub grid: Vec<f64>,
    pub truth: Vec<f64>,
    pub mean: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub scenario_n: usize,
    pub replications: usize,
    pub level: f64,
    pub b: usize,
    pub master_seed: u64,
    pub targets: Vec<(ResolvedTarget, TargetMetrics)>,
    pub curves: Vec<CurveReport>,
    /// Mean number of included subjects per study.
    pub n_bar: f64,
    pub inclusion_fraction: f64,
    pub origin_entry_fraction: f64,
    pub type_ii_short_count: usize,
}

struct ReplicationOutcome {
    included: usize,
    entered_at_origin: usize,
    type_ii_short: bool,
    /// Per target: point estimate (None when not estimable) and its CI
    /// (None when the bootstrap was degenerate).
    estimates: Vec<Option<(f64, Option<ConfidenceInterval>)>>,
    /// Per curve: estimate at each grid point.
    curve_values: Vec<Vec<f64>>,
}

/// Run the experiment described by `config`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport, ExperimentError> {
    config.validate()?;
    let oracle = match &config.oracle {
        OracleSpec::LargeSample { n_oracle } => Some(LargeSampleOracle::generate(
            &config.scenario,
            *n_oracle,
            mix(config.master_seed, tags::ORACLE),
        )),
        OracleSpec::Supplied { .. } => None,
    };
    let supplied = match &config.oracle {
        OracleSpec::Supplied { values } => Some(values.clone()),
        _ => None,
    };
    let targets: Vec<ResolvedTarget> = config
        .targets
        .iter()
        .enumerate()
        .map(|(k, target)| {
            resolve_target(
                target,
                k,
                config.ci_method,
                oracle.as_ref(),
                supplied.as_ref().map(|v| v[k]),
            )
        })
        .collect::<Result<_, _>>()?;

    // Curve grids and truths.
    let mut curve_meta = Vec::new();
    for (c, curve) in config.curves.iter().enumerate() {
        let oracle = oracle.as_ref().expect("validated");
        let horizon = oracle.resolve_time(curve.horizon);
        let grid: Vec<f64> = (1..=curve.points)
            .map(|i| horizon * i as f64 / curve.points as f64)
            .collect();
        let truth: Vec<f64> = grid
            .iter()
            .map(|&t| oracle.state_frequency(curve.to, t))
            .collect();
        let label = curve
            .label
            .clone()
            .unwrap_or_else(|| format!("curve-{c}"));
        curve_meta.push((label, curve.clone(), grid, truth));
    }

    let rep_seed_base = mix(config.master_seed, tags::REPLICATION);
    let outcomes: Vec<ReplicationOutcome> = (0..config.replications)
        .into_par_iter()
        .map(|r| run_replication(config, &targets, &curve_meta, mix(rep_seed_base, r as u64)))
        .collect();

    // Sequential aggregation in replication order.
    let reps = config.replications as f64;
    let n_bar = outcomes.iter().map(|o| o.included as f64).sum::<f64>() / reps;
    let origin = outcomes
        .iter()
        .map(|o| o.entered_at_origin as f64)
        .sum::<f64>()
        / reps;
    let type_ii_short_count = outcomes.iter().filter(|o| o.type_ii_short).count();

    let mut target_reports = Vec::with_capacity(targets.len());
    for (k, rt) in targets.iter().enumerate() {
        let mut values = Vec::new();
        let mut covered = 0usize;
        let mut with_ci = 0usize;
        let mut ci_failures = 0usize;
        for outcome in &outcomes {
            if let Some((value, ci)) = &outcome.estimates[k] {
                values.push(*value);
                match ci {
                    Some(ci) => {
                        with_ci += 1;
                        if ci.contains(rt.true_value) {
                            covered += 1;
                        }
                    }
                    None => ci_failures += 1,
                }
            }
        }
        let used = values.len();
        let excluded = config.replications - used;
        let failed = used * 2 < config.replications;
        let (bias, rmse) = if used > 0 {
            let mean = values.iter().sum::<f64>() / used as f64;
            let mse = values
                .iter()
                .map(|v| (v - rt.true_value).powi(2))
                .sum::<f64>()
                / used as f64;
            (mean - rt.true_value, mse.sqrt())
        } else {
            (f64::NAN, f64::NAN)
        };
        let coverage_pct = if with_ci > 0 {
            100.0 * covered as f64 / with_ci as f64
        } else {
            f64::NAN
        };
        target_reports.push((
            rt.clone(),
            TargetMetrics {
                bias,
                rmse,
                coverage_pct,
                replications_used: used,
                replications_excluded: excluded,
                ci_failures,
                failed,
            },
        ));
    }

    let mut curve_reports = Vec::new();
    for (c, (label, curve, grid, truth)) in curve_meta.iter().enumerate() {
        let points = grid.len();
        let mut mean = vec![0.0; points];
        let mut lower = vec![0.0; points];
        let mut upper = vec![0.0; points];
        let mut column = vec![0.0; outcomes.len()];
        for p in 0..points {
            for (i, outcome) in outcomes.iter().enumerate() {
                column[i] = outcome.curve_values[c][p];
            }
            mean[p] = column.iter().sum::<f64>() / column.len() as f64;
            let mut sorted = column.clone();
            sorted.sort_by(f64::total_cmp);
            lower[p] = lower_quantile(&sorted, 0.025);
            upper[p] = lower_quantile(&sorted, 0.975);
        }
        curve_reports.push(CurveReport {
            label: label.clone(),
            from: curve.from,
            to: curve.to,
            grid: grid.clone(),
            truth: truth.clone(),
            mean,
            lower,
            upper,
        });
    }

    Ok(ExperimentReport {
        scenario_n: config.scenario.n,
        replications: config.replications,
        level: config.level,
        b: config.b,
        master_seed: config.master_seed,
        targets: target_reports,
        curves: curve_reports,
        n_bar,
        inclusion_fraction: n_bar / config.scenario.n as f64,
        origin_entry_fraction: origin / config.scenario.n as f64,
        type_ii_short_count,
    })
}

fn run_replication(
    config: &ExperimentConfig,
    targets: &[ResolvedTarget],
    curves: &[(String, CurveSpec, Vec<f64>, Vec<f64>)],
    rep_seed: u64,
) -> ReplicationOutcome {
    let scenario = ScenarioConfig {
        seed: rep_seed,
        ..config.scenario.clone()
    };
    let study = simulate_dataset(&scenario).expect("validated scenario");
    let data = &study.data;
    let table = data.event_table();
    let haz = nelson_aalen(&table);

    let points: Vec<Option<f64>> = targets
        .iter()
        .map(|rt| evaluate_target(data, &haz, rt))
        .collect();

    let boot_seed = mix(rep_seed, tags::BOOTSTRAP);
    let efron_samples = efron_target_samples(config, targets, data, boot_seed);

    let mut estimates = Vec::with_capacity(targets.len());
    for (k, rt) in targets.iter().enumerate() {
        let Some(point) = points[k] else {
            estimates.push(None);
            continue;
        };
        let sample = match rt.ci {
            CiMethod::Efron => efron_samples[k].clone(),
            CiMethod::Wild => wild_target_sample(config, rt, &table, &haz, mix(boot_seed, 1 + k as u64)),
        };
        // Hazard targets use the log-transformed form of the quantile
        // interval (the usual asymptotic formula for cumulative hazards);
        // probability targets stay on the plain scale clamped to [0, 1].
        let ci = sample.and_then(|sample| match rt.estimator {
            EstimatorKind::NelsonAalen => {
                log_transformed_quantile_ci(&sample, point, data.n(), config.level).ok()
            }
            _ => standardized_quantile_ci(&sample, point, data.n(), config.level, (0.0, 1.0))
                .ok(),
        });
        estimates.push(Some((point, ci)));
    }

    let curve_values = curves
        .iter()
        .map(|(_, curve, grid, _)| {
            let mut row = vec![0.0; haz.num_states()];
            row[curve.from] = 1.0;
            let mut values = Vec::with_capacity(grid.len());
            let mut last = 0.0;
            for &t in grid {
                crate::estimate::propagate_row(&haz, &mut row, last, t);
                values.push(row[curve.to]);
                last = t;
            }
            values
        })
        .collect();

    ReplicationOutcome {
        included: study.meta.included,
        entered_at_origin: study.meta.entered_at_origin,
        type_ii_short: study.meta.type_ii.map(|t| t.short).unwrap_or(false),
        estimates,
        curve_values,
    }
}

fn evaluate_target(
    data: &Dataset,
    haz: &CumulativeHazardMatrix,
    rt: &ResolvedTarget,
) -> Option<f64> {
    match rt.estimator {
        EstimatorKind::NelsonAalen => Some(haz.value_at(rt.from, rt.to, rt.t)),
        EstimatorKind::AalenJohansen => {
            aalen_johansen_transition(haz, rt.from, rt.s.unwrap_or(0.0), rt.t)
                .ok()
                .map(|row| row[rt.to])
        }
        EstimatorKind::LandmarkAalenJohansen => {
            landmark_aalen_johansen(data, rt.s.expect("validated"), rt.from, rt.t)
                .ok()
                .map(|row| row[rt.to])
        }
    }
}

/// One shared set of Efron resamples per replication, evaluated at every
/// Efron-CI target. Entries for wild-CI targets are `None`.
fn efron_target_samples(
    config: &ExperimentConfig,
    targets: &[ResolvedTarget],
    data: &Dataset,
    boot_seed: u64,
) -> Vec<Option<BootstrapSample<f64>>> {
    let efron_indices: Vec<usize> = targets
        .iter()
        .enumerate()
        .filter(|(_, rt)| rt.ci == CiMethod::Efron)
        .map(|(k, _)| k)
        .collect();
    let mut samples: Vec<Option<BootstrapSample<f64>>> = vec![None; targets.len()];
    if efron_indices.is_empty() {
        return samples;
    }
    let mut replicate_values: Vec<Vec<f64>> = vec![Vec::with_capacity(config.b); targets.len()];
    let mut dropped = vec![0usize; targets.len()];
    for b in 0..config.b {
        let resample = efron_resample(data, boot_seed, b as u64);
        let table = resample.event_table();
        let haz = nelson_aalen(&table);
        for &k in &efron_indices {
            match evaluate_target(&resample, &haz, &targets[k]) {
                Some(v) => replicate_values[k].push(v),
                None => dropped[k] += 1,
            }
        }
    }
    for &k in &efron_indices {
        let replicates = std::mem::take(&mut replicate_values[k]);
        if replicates.is_empty() {
            samples[k] = None;
        } else {
            samples[k] = Some(BootstrapSample {
                method: ResampleMethod::Efron,
                seed: boot_seed,
                requested: config.b,
                replicates,
                dropped: dropped[k],
            });
        }
    }
    samples
}

fn wild_target_sample(
    config: &ExperimentConfig,
    rt: &ResolvedTarget,
    table: &EventTable,
    haz: &CumulativeHazardMatrix,
    seed: u64,
) -> Option<BootstrapSample<f64>> {
    match rt.estimator {
        EstimatorKind::NelsonAalen => {
            let base = haz.value_at(rt.from, rt.to, rt.t);
            wild_bootstrap_nelson_aalen(table, (rt.from, rt.to), config.b, seed)
                .ok()
                .map(|sample| sample.map(|curve| base + curve.value_at(rt.t)))
        }
        EstimatorKind::AalenJohansen => {
            let s = rt.s.unwrap_or(0.0);
            wild_bootstrap_transition_probability(table, s, rt.t, config.b, seed)
                .ok()
                .map(|sample| sample.map(|m| m.get(rt.from, rt.to)))
        }
        EstimatorKind::LandmarkAalenJohansen => None,
    }
}
