//! Efron and wild (multiplier) bootstrap with standardized-quantile
//! confidence intervals.
//!
//! Replicates are generated on independent counter-based substreams of the
//! master seed, so a sample is bit-for-bit reproducible from
//! `(method, seed, B, input)` no matter how many workers evaluate it.

use rand::distr::Uniform;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use thiserror::Error;

use crate::data::Dataset;
use crate::matrix::SquareMatrix;
use crate::seeds::stream_rng;
use crate::step::StepCurve;
use crate::table::EventTable;

#[derive(Debug, Error)]
pub enum ResampleError {
    #[error("bootstrap requires at least one replicate")]
    NoReplicatesRequested,
    #[error("all {0} bootstrap replicates were not estimable")]
    AllReplicatesDropped(usize),
    #[error("degenerate bootstrap sample: needs at least two distinct replicate values")]
    DegenerateSample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResampleMethod {
    Efron,
    Wild,
}

/// A bootstrap sample of `B` replicates of a statistic.
///
/// `replicates` holds the estimable replicates in replicate order; `dropped`
/// counts replicates where the statistic was not estimable.
#[derive(Debug, Clone)]
pub struct BootstrapSample<T = f64> {
    pub method: ResampleMethod,
    pub seed: u64,
    pub requested: usize,
    pub replicates: Vec<T>,
    pub dropped: usize,
}

impl<T> BootstrapSample<T> {
    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> BootstrapSample<U> {
        BootstrapSample {
            method: self.method,
            seed: self.seed,
            requested: self.requested,
            replicates: self.replicates.iter().map(f).collect(),
            dropped: self.dropped,
        }
    }

    /// Fraction of requested replicates that were dropped as not estimable.
    pub fn dropped_fraction(&self) -> f64 {
        self.dropped as f64 / self.requested as f64
    }
}

/// A two-sided pointwise confidence interval.
#[derive(Debug, Clone, Copy)]
pub struct ConfidenceInterval {
    pub lower: f64,
    pub upper: f64,
    /// Nominal coverage in (0, 1).
    pub level: f64,
    pub point: f64,
    /// Set when more than 10% of the bootstrap replicates were dropped.
    pub unreliable: bool,
}

impl ConfidenceInterval {
    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }
}

/// Efron's bootstrap: draw `n` subjects with replacement (records travel with
/// their subject) and evaluate the statistic on each resampled dataset.
///
/// The statistic returns `None` when not estimable on a given resample; such
/// replicates are dropped and counted.
pub fn efron_bootstrap<F>(
    data: &Dataset,
    statistic: F,
    b: usize,
    seed: u64,
) -> Result<BootstrapSample<f64>, ResampleError>
where
    F: Fn(&Dataset) -> Option<f64> + Sync,
{
    let raw = efron_bootstrap_multi(data, |ds| statistic(ds).map(|v| vec![v]), b, seed)?;
    Ok(BootstrapSample {
        method: raw.method,
        seed: raw.seed,
        requested: raw.requested,
        replicates: raw.replicates.into_iter().map(|v| v[0]).collect(),
        dropped: raw.dropped,
    })
}

/// Efron's bootstrap for a vector-valued statistic, evaluating several
/// estimators on one shared set of resamples.
pub fn efron_bootstrap_multi<F>(
    data: &Dataset,
    statistic: F,
    b: usize,
    seed: u64,
) -> Result<BootstrapSample<Vec<f64>>, ResampleError>
where
    F: Fn(&Dataset) -> Option<Vec<f64>> + Sync,
{
    if b == 0 {
        return Err(ResampleError::NoReplicatesRequested);
    }
    let n = data.n();
    let space = data.space_arc();
    let subjects = data.subjects();
    let index = Uniform::new(0, n.max(1)).expect("nonempty range");
    let raw: Vec<Option<Vec<f64>>> = (0..b)
        .into_par_iter()
        .map(|replicate| {
            let mut rng = stream_rng(seed, replicate as u64);
            let picks: Vec<_> = (0..n)
                .map(|_| subjects[rng.sample(index)].clone())
                .collect();
            let resample = Dataset::from_arcs(space.clone(), picks);
            statistic(&resample)
        })
        .collect();
    let dropped = raw.iter().filter(|r| r.is_none()).count();
    let replicates: Vec<Vec<f64>> = raw.into_iter().flatten().collect();
    if replicates.is_empty() {
        return Err(ResampleError::AllReplicatesDropped(b));
    }
    Ok(BootstrapSample {
        method: ResampleMethod::Efron,
        seed,
        requested: b,
        replicates,
        dropped,
    })
}

/// Draw one resampled dataset (used by callers that need the resample itself
/// rather than a statistic of it).
pub fn efron_resample(data: &Dataset, seed: u64, replicate: u64) -> Dataset {
    let n = data.n();
    let mut rng = stream_rng(seed, replicate);
    let index = Uniform::new(0, n.max(1)).expect("nonempty range");
    let picks: Vec<_> = (0..n)
        .map(|_| data.subjects()[rng.sample(index)].clone())
        .collect();
    Dataset::from_arcs(data.space_arc(), picks)
}

/// The wild-bootstrap perturbation of the Nelson-Aalen estimator for one
/// transition, with explicit per-subject multipliers.
///
/// Returns the step curve of `A*(t) - A(t) = sum_i G_i int J/Y dN_{i;lm}`:
/// the observed counting and at-risk processes are held fixed and only the
/// multipliers vary.
pub fn wild_perturbation_with_multipliers(
    table: &EventTable,
    transition: (usize, usize),
    multipliers: &[f64],
) -> StepCurve {
    assert_eq!(multipliers.len(), table.n());
    let (from, to) = transition;
    let mut times = Vec::new();
    let mut values = Vec::new();
    let mut acc = 0.0;
    for firing in table.firings() {
        if firing.from != from || firing.to != to {
            continue;
        }
        let t = table.times()[firing.time_index];
        let risk = f64::from(table.at_risk(firing.time_index, from));
        acc += multipliers[firing.subject] / risk;
        if times.last() == Some(&t) {
            *values.last_mut().unwrap() = acc;
        } else {
            times.push(t);
            values.push(acc);
        }
    }
    StepCurve::new(times, values)
}

/// Wild bootstrap of the Nelson-Aalen estimator for one transition: `B`
/// replicates of the perturbation `A* - A` as step curves.
///
/// One standard normal multiplier is drawn per subject and held fixed across
/// that subject's whole path within a replicate.
pub fn wild_bootstrap_nelson_aalen(
    table: &EventTable,
    transition: (usize, usize),
    b: usize,
    seed: u64,
) -> Result<BootstrapSample<StepCurve>, ResampleError> {
    if b == 0 {
        return Err(ResampleError::NoReplicatesRequested);
    }
    let n = table.n();
    let replicates: Vec<StepCurve> = (0..b)
        .into_par_iter()
        .map(|replicate| {
            let mut rng = stream_rng(seed, replicate as u64);
            let multipliers: Vec<f64> =
                (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            wild_perturbation_with_multipliers(table, transition, &multipliers)
        })
        .collect();
    Ok(BootstrapSample {
        method: ResampleMethod::Wild,
        seed,
        requested: b,
        replicates,
        dropped: 0,
    })
}

/// Wild bootstrap of a transition probability matrix `P(s, t)`: the
/// perturbed hazard increments are pushed through the compact (Hadamard)
/// derivative of the product integral,
/// `P* - P = sum_j P(s, u_j-) dD(u_j) P(u_j, t)` over jump times in `(s, t]`.
pub fn wild_bootstrap_transition_probability(
    table: &EventTable,
    s: f64,
    t: f64,
    b: usize,
    seed: u64,
) -> Result<BootstrapSample<SquareMatrix>, ResampleError> {
    if b == 0 {
        return Err(ResampleError::NoReplicatesRequested);
    }
    let haz = crate::hazard::nelson_aalen(table);
    let k = haz.num_states();
    let n = table.n();
    let times = haz.times();
    let lo = times.partition_point(|&u| u <= s);
    let hi = times.partition_point(|&u| u <= t);

    // Prefix products P(s, u_j] and suffix products P(u_j, t].
    let count = hi - lo;
    let mut prefix = Vec::with_capacity(count + 1);
    prefix.push(SquareMatrix::identity(k));
    for j in lo..hi {
        let mut step = SquareMatrix::identity(k);
        add_increment(&mut step, haz.increment(j));
        prefix.push(prefix.last().unwrap().matmul(&step));
    }
    let mut suffix = vec![SquareMatrix::identity(k); count + 1];
    for j in (lo..hi).rev() {
        let mut step = SquareMatrix::identity(k);
        add_increment(&mut step, haz.increment(j));
        suffix[j - lo] = step.matmul(&suffix[j - lo + 1]);
    }
    let base = prefix[count].clone();

    // Group firings by time index within the window.
    let firings: Vec<_> = table
        .firings()
        .iter()
        .filter(|f| f.time_index >= lo && f.time_index < hi)
        .collect();

    let replicates: Vec<SquareMatrix> = (0..b)
        .into_par_iter()
        .map(|replicate| {
            let mut rng = stream_rng(seed, replicate as u64);
            let multipliers: Vec<f64> =
                (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let mut perturbed = base.clone();
            let mut idx = 0;
            while idx < firings.len() {
                let j = firings[idx].time_index;
                let mut delta = SquareMatrix::zeros(k);
                while idx < firings.len() && firings[idx].time_index == j {
                    let f = firings[idx];
                    let risk = f64::from(table.at_risk(j, f.from));
                    let g = multipliers[f.subject] / risk;
                    delta.add_to(f.from, f.to, g);
                    delta.add_to(f.from, f.from, -g);
                    idx += 1;
                }
                // prefix[j - lo] is P(s, u_j-): the product up to but not
                // including u_j.
                let contribution = prefix[j - lo].matmul(&delta).matmul(&suffix[j - lo + 1]);
                for row in 0..k {
                    for col in 0..k {
                        perturbed.add_to(row, col, contribution.get(row, col));
                    }
                }
            }
            perturbed
        })
        .collect();
    Ok(BootstrapSample {
        method: ResampleMethod::Wild,
        seed,
        requested: b,
        replicates,
        dropped: 0,
    })
}

fn add_increment(target: &mut SquareMatrix, inc: &SquareMatrix) {
    let k = target.dim();
    for row in 0..k {
        for col in 0..k {
            let v = inc.get(row, col);
            if v != 0.0 {
                target.add_to(row, col, v);
            }
        }
    }
}

/// Confidence interval from the quantiles of the standardized bootstrap
/// statistic `W*_b = sqrt(n) (theta*_b - theta_hat) / sigma*`, where
/// `sigma*` is the empirical standard deviation of the replicates:
/// `[theta - q_{1-a/2} sigma*/sqrt(n), theta - q_{a/2} sigma*/sqrt(n)]`,
/// clamped to the statistic's natural range.
///
/// Quantiles use the inverse-ECDF (lower) convention.
pub fn standardized_quantile_ci(
    sample: &BootstrapSample<f64>,
    point: f64,
    n: usize,
    level: f64,
    range: (f64, f64),
) -> Result<ConfidenceInterval, ResampleError> {
    let replicates = &sample.replicates;
    if replicates.len() < 2 {
        return Err(ResampleError::DegenerateSample);
    }
    let b = replicates.len() as f64;
    let mean = replicates.iter().sum::<f64>() / b;
    let var = replicates.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (b - 1.0);
    let sd = var.sqrt();
    if !(sd > 0.0) {
        return Err(ResampleError::DegenerateSample);
    }
    let scale = (n as f64).sqrt();
    let alpha = 1.0 - level;
    let mut w: Vec<f64> = replicates
        .iter()
        .map(|&x| scale * (x - point) / sd)
        .collect();
    w.sort_by(f64::total_cmp);
    let q_lo = lower_quantile(&w, alpha / 2.0);
    let q_hi = lower_quantile(&w, 1.0 - alpha / 2.0);
    let mut lower = point - q_hi * sd / scale;
    let mut upper = point - q_lo * sd / scale;
    lower = lower.min(point);
    upper = upper.max(point);
    let (lo_bound, hi_bound) = range;
    Ok(ConfidenceInterval {
        lower: lower.clamp(lo_bound, hi_bound),
        upper: upper.clamp(lo_bound, hi_bound),
        level,
        point: point.clamp(lo_bound, hi_bound),
        unreliable: sample.dropped_fraction() > 0.10,
    })
}

/// Standardized-quantile interval on the log scale, the usual asymptotic
/// formula for nonnegative cumulative-hazard statistics:
/// `point * exp(offset / point)` with the offsets of
/// [`standardized_quantile_ci`]. Requires a strictly positive point estimate.
pub fn log_transformed_quantile_ci(
    sample: &BootstrapSample<f64>,
    point: f64,
    n: usize,
    level: f64,
) -> Result<ConfidenceInterval, ResampleError> {
    if !(point > 0.0) {
        return Err(ResampleError::DegenerateSample);
    }
    let plain = standardized_quantile_ci(sample, point, n, level, (0.0, f64::INFINITY))?;
    Ok(ConfidenceInterval {
        lower: point * ((plain.lower - point) / point).exp(),
        upper: point * ((plain.upper - point) / point).exp(),
        level,
        point,
        unreliable: plain.unreliable,
    })
}

/// Inverse-ECDF (lower) empirical quantile of sorted values.
fn lower_quantile(sorted: &[f64], p: f64) -> f64 {
    let b = sorted.len();
    let rank = (p * b as f64).ceil() as usize;
    sorted[rank.clamp(1, b) - 1]
}
