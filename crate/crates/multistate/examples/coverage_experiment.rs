//! A small replicated coverage experiment, entirely in code: simulate
//! studies, estimate a cumulative hazard, wrap wild and Efron intervals
//! around it, and compare empirical coverage against a large-sample oracle.
//!
//! Desk-scale version of the full configs under ./configs/.

use multistate::experiment::{
    run_experiment, CiMethod, EstimatorKind, ExperimentConfig, OracleSpec, Target, TimeSpec,
};
use multistate::simulate::{
    BaseHazards, Censoring, Mechanism, ScenarioConfig, Truncation,
};

fn main() {
    let scenario = ScenarioConfig {
        hazards: BaseHazards {
            h01: 0.12,
            h02: 0.03,
            h12: 0.1,
        },
        mechanism: Mechanism::GammaFrailty {
            mean: 1.0,
            variance: 2.0,
        },
        truncation: Truncation::None,
        censoring: Censoring::Exponential { rate: 0.004 },
        n: 30,
        seed: 0,
    };
    let mut targets = Vec::new();
    for t in [15.0, 20.0, 25.0] {
        for ci in [CiMethod::Efron, CiMethod::Wild] {
            targets.push(Target {
                label: Some(format!("{}-T{t}", ci.as_str())),
                estimator: EstimatorKind::NelsonAalen,
                from: 1,
                to: 2,
                s: None,
                t: TimeSpec::Fixed(t),
                ci: Some(ci),
            });
        }
    }
    let config = ExperimentConfig {
        scenario,
        replications: 50,
        targets,
        curves: vec![],
        ci_method: CiMethod::Wild,
        b: 500,
        level: 0.95,
        oracle: OracleSpec::LargeSample { n_oracle: 50_000 },
        master_seed: 20_260_810,
    };

    let report = run_experiment(&config).unwrap();
    println!(
        "{} replications of n={} (mean included {:.1})\n",
        report.replications, report.scenario_n, report.n_bar
    );
    println!("{:<12} {:>8} {:>9} {:>8} {:>9}", "target", "truth", "bias", "rmse", "coverage");
    for (rt, m) in &report.targets {
        println!(
            "{:<12} {:>8.4} {:>+9.4} {:>8.4} {:>8.1}%",
            rt.label, rt.true_value, m.bias, m.rmse, m.coverage_pct
        );
    }
    println!("\nThe wild bootstrap keeps close-to-nominal coverage at this small");
    println!("sample size; Efron's bootstrap runs visibly liberal.");
}
