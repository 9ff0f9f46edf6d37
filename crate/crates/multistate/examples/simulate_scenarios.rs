//! Generate one dataset from each simulation scenario family and write them
//! in long format under ./out/.

use multistate::io::write_long_format;
use multistate::simulate::{
    simulate_dataset, BaseHazards, Censoring, Mechanism, ScenarioConfig, Truncation,
};

fn main() {
    let scenarios: Vec<(&str, ScenarioConfig)> = vec![
        (
            "constant_multiplier",
            ScenarioConfig {
                hazards: BaseHazards { h01: 0.039, h02: 0.026, h12: 0.0 },
                mechanism: Mechanism::ConstantMultiplier { d: 0.7 },
                truncation: Truncation::SkewNormal { location: 0.0, scale: 10.0, shape: 10.0 },
                censoring: Censoring::None,
                n: 1000,
                seed: 1,
            },
        ),
        (
            "cox_sojourn",
            ScenarioConfig {
                hazards: BaseHazards { h01: 0.039, h02: 0.026, h12: 0.0 },
                mechanism: Mechanism::CoxSojourn { baseline: 0.1, beta: 0.01 },
                truncation: Truncation::SkewNormal { location: 0.0, scale: 13.0, shape: 10.0 },
                censoring: Censoring::None,
                n: 1000,
                seed: 2,
            },
        ),
        (
            "frailty",
            ScenarioConfig {
                hazards: BaseHazards { h01: 0.12, h02: 0.03, h12: 0.1 },
                mechanism: Mechanism::GammaFrailty { mean: 1.0, variance: 2.0 },
                truncation: Truncation::Exponential { rate: 0.13 },
                censoring: Censoring::None,
                n: 1000,
                seed: 3,
            },
        ),
        (
            "non_markov",
            ScenarioConfig {
                hazards: BaseHazards { h01: 0.12, h02: 0.03, h12: 0.1 },
                mechanism: Mechanism::StateAtTime {
                    time: 4.0,
                    rate_if_initial: 0.05,
                    rate_otherwise: 0.1,
                },
                truncation: Truncation::Uniform { a: -1.0, b: 13.0 },
                censoring: Censoring::None,
                n: 1000,
                seed: 4,
            },
        ),
        (
            "type_ii_censoring",
            ScenarioConfig {
                hazards: BaseHazards { h01: 0.01, h02: 0.03, h12: 0.1 },
                mechanism: Mechanism::Independent,
                truncation: Truncation::None,
                censoring: Censoring::TypeIi { m: 500 },
                n: 1000,
                seed: 5,
            },
        ),
    ];

    std::fs::create_dir_all("out").unwrap();
    for (name, scenario) in scenarios {
        let study = simulate_dataset(&scenario).unwrap();
        let path = format!("out/{name}.csv");
        let mut file = std::fs::File::create(&path).unwrap();
        write_long_format(&study.data, &mut file).unwrap();
        print!(
            "{path}: {}/{} included, {} entered at the origin, {} censored",
            study.meta.included, study.meta.simulated, study.meta.entered_at_origin,
            study.meta.censored
        );
        if let Some(type_ii) = study.meta.type_ii {
            if let Some(tau) = type_ii.censoring_time {
                print!(", type II cutoff at {tau:.2}");
            }
        }
        println!();
    }
}
