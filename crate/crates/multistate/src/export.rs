//! CSV writers for estimates, confidence intervals and experiment reports.
//!
//! Files are staged in a temporary file and persisted atomically, so a failed
//! run never leaves a half-written output behind.

use std::fmt::Write as _;
use std::path::Path;

use crate::cox::CoxFit;
use crate::estimate::ProbabilityCurve;
use crate::experiment::{CurveReport, ExperimentReport};
use crate::hazard::CumulativeHazardMatrix;
use crate::resample::{BootstrapSample, ConfidenceInterval};

/// Write `contents` to `path` atomically (temp file + rename).
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut file = match dir {
        Some(dir) => tempfile::NamedTempFile::new_in(dir)?,
        None => tempfile::NamedTempFile::new_in(".")?,
    };
    std::io::Write::write_all(&mut file, contents.as_bytes())?;
    file.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Step-function rows `time,state_or_pair,value` for all states of an
/// occupation or landmark curve.
pub fn probability_curve_csv(curve: &ProbabilityCurve, pair_prefix: Option<usize>) -> String {
    let mut out = String::from("time,state_or_pair,value\n");
    let k = curve.num_states();
    let label = |state: usize| match pair_prefix {
        Some(from) => format!("{from}->{state}"),
        None => state.to_string(),
    };
    for state in 0..k {
        let _ = writeln!(
            out,
            "{},{},{}",
            curve.origin(),
            label(state),
            curve.initial()[state]
        );
    }
    for (j, t) in curve.times().iter().enumerate() {
        for state in 0..k {
            let _ = writeln!(out, "{},{},{}", t, label(state), curve.rows()[j][state]);
        }
    }
    out
}

/// Step-function rows `time,state_or_pair,value` for every allowed transition
/// of the cumulative hazard matrix.
pub fn hazard_csv(haz: &CumulativeHazardMatrix) -> String {
    let mut out = String::from("time,state_or_pair,value\n");
    let k = haz.num_states();
    for from in 0..k {
        for to in 0..k {
            if from == to {
                continue;
            }
            let curve = haz.cumulative(from, to);
            if curve.is_empty() {
                continue;
            }
            for (t, v) in curve.iter() {
                let _ = writeln!(out, "{t},{from}->{to},{v}");
            }
        }
    }
    out
}

/// `lower,point,upper,level` single-row export.
pub fn ci_csv(ci: &ConfidenceInterval) -> String {
    format!(
        "lower,point,upper,level\n{},{},{},{}\n",
        ci.lower, ci.point, ci.upper, ci.level
    )
}

/// One-column export of scalar bootstrap replicates.
pub fn replicates_csv(sample: &BootstrapSample<f64>) -> String {
    let mut out = String::from("replicate\n");
    for v in &sample.replicates {
        let _ = writeln!(out, "{v}");
    }
    out
}

/// Key-value summary of a Cox fit.
pub fn cox_fit_text(fit: &CoxFit) -> String {
    format!(
        "beta={}\nhazard_ratio={}\nstd_err={}\nci_95_lower={}\nci_95_upper={}\niterations={}\nconverged={}\nn_events={}\nn_spells={}\n",
        fit.beta,
        fit.hazard_ratio,
        fit.std_err,
        fit.ci_95.0,
        fit.ci_95.1,
        fit.iterations,
        fit.converged,
        fit.n_events,
        fit.n_spells
    )
}

/// The experiment metrics table, one row per target.
pub fn metrics_csv(report: &ExperimentReport) -> String {
    let mut out = String::from(
        "label,estimator,n,method,from,to,s,t,true_value,n_bar,bias,rmse,coverage_pct,replications_used,replications_excluded,ci_failures,failed\n",
    );
    for (rt, metrics) in &report.targets {
        let s = rt.s.map(|v| v.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            rt.label,
            rt.estimator.as_str(),
            report.scenario_n,
            rt.ci.as_str(),
            rt.from,
            rt.to,
            s,
            rt.t,
            rt.true_value,
            report.n_bar,
            metrics.bias,
            metrics.rmse,
            metrics.coverage_pct,
            metrics.replications_used,
            metrics.replications_excluded,
            metrics.ci_failures,
            metrics.failed
        );
    }
    out
}

/// Plot-ready curve data: truth, replication mean, and empirical envelope.
pub fn curve_csv(curve: &CurveReport) -> String {
    let mut out = String::from("t,truth,mean,lower_2_5,upper_97_5\n");
    for i in 0..curve.grid.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            curve.grid[i], curve.truth[i], curve.mean[i], curve.lower[i], curve.upper[i]
        );
    }
    out
}

/// Study-level summary of an experiment run.
pub fn experiment_summary_csv(report: &ExperimentReport) -> String {
    format!(
        "m,replications,B,level,master_seed,n_bar,inclusion_fraction,origin_entry_fraction,type_ii_short_count\n{},{},{},{},{},{},{},{},{}\n",
        report.scenario_n,
        report.replications,
        report.b,
        report.level,
        report.master_seed,
        report.n_bar,
        report.inclusion_fraction,
        report.origin_entry_fraction,
        report.type_ii_short_count
    )
}
