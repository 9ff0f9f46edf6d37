//! Thin command-line front end over the `multistate` library.

use std::fs::File;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use multistate::estimate::{landmark_curve, state_occupation, InitialPolicy};
use multistate::experiment::{run_experiment, ExperimentConfig};
use multistate::export;
use multistate::hazard::nelson_aalen;
use multistate::resample::{
    efron_bootstrap, log_transformed_quantile_ci, standardized_quantile_ci,
    wild_bootstrap_nelson_aalen, BootstrapSample,
};
use multistate::simulate::{simulate_dataset, ScenarioConfig};
use multistate::{cox_markov_check, io::read_long_format, io::write_long_format, Dataset};

#[derive(Parser)]
#[command(
    name = "multistate",
    about = "Nonparametric multi-state estimation under left-truncation and right-censoring",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate state occupation probabilities and cumulative hazards from a
    /// long-format file.
    Estimate(EstimateArgs),
    /// Landmark Aalen-Johansen transition probabilities from a given state at
    /// a given time.
    Landmark(LandmarkArgs),
    /// Bootstrap confidence interval for a scalar estimate.
    Bootstrap(BootstrapArgs),
    /// Generate a dataset from a scenario config.
    Simulate(SimulateArgs),
    /// Run a replicated simulation experiment from a config file.
    Experiment(ExperimentArgs),
    /// Cox partial-likelihood check of the Markov assumption.
    CoxCheck(CoxCheckArgs),
}

#[derive(Args)]
struct EstimateArgs {
    /// Long-format input file (id,from,to,entry,exit).
    #[arg(long)]
    input: PathBuf,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Write state occupation probabilities (occupation.csv).
    #[arg(long)]
    occupation: bool,
    /// Write Nelson-Aalen cumulative hazards (nelson_aalen.csv).
    #[arg(long)]
    hazards: bool,
    /// Initial distribution policy: common:<state>, multinomial, atrisk, or
    /// supplied:<p0,p1,...>.
    #[arg(long, default_value = "multinomial")]
    initial: String,
}

#[derive(Args)]
struct LandmarkArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Landmark time s.
    #[arg(long)]
    s: f64,
    /// State occupied at the landmark.
    #[arg(long)]
    from: usize,
    /// Horizon; defaults to the last event time of the data.
    #[arg(long)]
    t: Option<f64>,
}

#[derive(Args)]
struct BootstrapArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Statistic: na:<l>-><m> | occupation:<m> | landmark:<l>-><m>.
    #[arg(long)]
    statistic: String,
    /// Evaluation time t.
    #[arg(long)]
    t: f64,
    /// Landmark / window start s (landmark statistic only).
    #[arg(long)]
    s: Option<f64>,
    /// Resampling method.
    #[arg(long, value_parser = ["efron", "wild"], default_value = "efron")]
    bootstrap: String,
    /// Number of bootstrap replicates.
    #[arg(long = "B", default_value_t = 1000)]
    b: usize,
    /// Nominal coverage level.
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Also write the replicate values (replicates.csv).
    #[arg(long)]
    dump_replicates: bool,
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output file for the generated long-format dataset.
    #[arg(long)]
    out: PathBuf,
    /// Override the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for metrics.csv, summary.csv and curve files.
    #[arg(long)]
    out: PathBuf,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct CoxCheckArgs {
    #[arg(long)]
    input: PathBuf,
    /// Intermediate state whose entry time is the covariate.
    #[arg(long)]
    exposure: usize,
    /// Event state of the checked transition.
    #[arg(long)]
    event: usize,
    /// Output file for the fit summary.
    #[arg(long, default_value = "cox_fit.txt")]
    out: PathBuf,
}

fn main() {
    if let Err(err) = run() {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn run() -> Result<()> {
    match Cli::parse().command {
        Command::Estimate(args) => estimate(args),
        Command::Landmark(args) => landmark(args),
        Command::Bootstrap(args) => bootstrap(args),
        Command::Simulate(args) => simulate(args),
        Command::Experiment(args) => experiment(args),
        Command::CoxCheck(args) => cox_check(args),
    }
}

fn load_dataset(path: &Path) -> Result<Dataset> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_long_format(file).with_context(|| format!("reading {}", path.display()))
}

fn parse_initial(text: &str) -> Result<InitialPolicy> {
    if let Some(state) = text.strip_prefix("common:") {
        return Ok(InitialPolicy::CommonState(state.parse()?));
    }
    if let Some(values) = text.strip_prefix("supplied:") {
        let parsed: Result<Vec<f64>, _> = values.split(',').map(str::parse).collect();
        return Ok(InitialPolicy::Supplied(parsed?));
    }
    match text {
        "multinomial" => Ok(InitialPolicy::Multinomial),
        "atrisk" => Ok(InitialPolicy::AtRiskRenormalized),
        other => bail!("unknown initial policy {other:?}"),
    }
}

fn parse_transition(text: &str) -> Result<(usize, usize)> {
    let (from, to) = text
        .split_once("->")
        .with_context(|| format!("expected <from>-><to>, got {text:?}"))?;
    Ok((from.trim().parse()?, to.trim().parse()?))
}

fn estimate(args: EstimateArgs) -> Result<()> {
    if !args.occupation && !args.hazards {
        bail!("nothing to do: pass --occupation and/or --hazards");
    }
    let data = load_dataset(&args.input)?;
    std::fs::create_dir_all(&args.out)?;
    // Compute everything before writing anything.
    let occupation = if args.occupation {
        let policy = parse_initial(&args.initial)?;
        Some(export::probability_curve_csv(
            &state_occupation(&data, &policy)?,
            None,
        ))
    } else {
        None
    };
    let hazards = if args.hazards {
        Some(export::hazard_csv(&nelson_aalen(&data.event_table())))
    } else {
        None
    };
    if let Some(csv) = occupation {
        let path = args.out.join("occupation.csv");
        export::write_atomic(&path, &csv)?;
        println!("wrote {}", path.display());
    }
    if let Some(csv) = hazards {
        let path = args.out.join("nelson_aalen.csv");
        export::write_atomic(&path, &csv)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn landmark(args: LandmarkArgs) -> Result<()> {
    let data = load_dataset(&args.input)?;
    let horizon = args.t.unwrap_or_else(|| {
        data.subjects()
            .iter()
            .map(|s| s.last_exit())
            .fold(args.s, f64::max)
    });
    let curve = landmark_curve(&data, args.s, args.from, horizon)?;
    std::fs::create_dir_all(&args.out)?;
    let path = args.out.join("landmark.csv");
    export::write_atomic(&path, &export::probability_curve_csv(&curve, Some(args.from)))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn bootstrap(args: BootstrapArgs) -> Result<()> {
    let data = load_dataset(&args.input)?;
    let n = data.n();
    let (kind, rest) = args
        .statistic
        .split_once(':')
        .with_context(|| format!("expected <kind>:<spec>, got {:?}", args.statistic))?;

    let (point, sample, hazard_scale): (f64, BootstrapSample<f64>, bool) = match (kind, args.bootstrap.as_str()) {
        ("na", "wild") => {
            let (from, to) = parse_transition(rest)?;
            let table = data.event_table();
            let haz = nelson_aalen(&table);
            let point = haz.value_at(from, to, args.t);
            let sample = wild_bootstrap_nelson_aalen(&table, (from, to), args.b, args.seed)?
                .map(|curve| point + curve.value_at(args.t));
            (point, sample, true)
        }
        ("na", "efron") => {
            let (from, to) = parse_transition(rest)?;
            let point = nelson_aalen(&data.event_table()).value_at(from, to, args.t);
            let t = args.t;
            let sample = efron_bootstrap(
                &data,
                move |ds: &Dataset| Some(nelson_aalen(&ds.event_table()).value_at(from, to, t)),
                args.b,
                args.seed,
            )?;
            (point, sample, true)
        }
        ("occupation", "efron") => {
            let state: usize = rest.parse()?;
            let policy = InitialPolicy::CommonState(0);
            let point = state_occupation(&data, &policy)?.value_at(args.t)[state];
            let t = args.t;
            let sample = efron_bootstrap(
                &data,
                move |ds: &Dataset| {
                    state_occupation(ds, &InitialPolicy::CommonState(0))
                        .ok()
                        .map(|c| c.value_at(t)[state])
                },
                args.b,
                args.seed,
            )?;
            (point, sample, false)
        }
        ("landmark", "efron") => {
            let (from, to) = parse_transition(rest)?;
            let s = args.s.context("landmark statistic needs --s")?;
            let t = args.t;
            let point = multistate::landmark_aalen_johansen(&data, s, from, t)?[to];
            let sample = efron_bootstrap(
                &data,
                move |ds: &Dataset| {
                    multistate::landmark_aalen_johansen(ds, s, from, t)
                        .ok()
                        .map(|row| row[to])
                },
                args.b,
                args.seed,
            )?;
            (point, sample, false)
        }
        (kind, method) => bail!("statistic {kind:?} does not support the {method} bootstrap"),
    };

    let ci = if hazard_scale {
        log_transformed_quantile_ci(&sample, point, n, args.level)?
    } else {
        standardized_quantile_ci(&sample, point, n, args.level, (0.0, 1.0))?
    };
    std::fs::create_dir_all(&args.out)?;
    let ci_path = args.out.join("ci.csv");
    export::write_atomic(&ci_path, &export::ci_csv(&ci))?;
    println!("wrote {}", ci_path.display());
    if ci.unreliable {
        eprintln!(
            "warning: {} of {} replicates were not estimable; interval may be unreliable",
            sample.dropped, sample.requested
        );
    }
    if args.dump_replicates {
        let rep_path = args.out.join("replicates.csv");
        export::write_atomic(&rep_path, &export::replicates_csv(&sample))?;
        println!("wrote {}", rep_path.display());
    }
    Ok(())
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let file = File::open(&args.config)
        .with_context(|| format!("opening {}", args.config.display()))?;
    let mut config: ScenarioConfig = serde_json::from_reader(file)
        .with_context(|| format!("parsing {}", args.config.display()))?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let study = simulate_dataset(&config)?;
    let mut buf = Vec::new();
    write_long_format(&study.data, &mut buf)?;
    export::write_atomic(&args.out, std::str::from_utf8(&buf)?)?;
    println!(
        "wrote {} ({} of {} subjects included, {} censored)",
        args.out.display(),
        study.meta.included,
        study.meta.simulated,
        study.meta.censored
    );
    if let Some(type_ii) = study.meta.type_ii {
        if type_ii.short {
            eprintln!("warning: fewer observed events than the type II threshold; nobody censored");
        }
    }
    Ok(())
}

fn experiment(args: ExperimentArgs) -> Result<()> {
    let file = File::open(&args.config)
        .with_context(|| format!("opening {}", args.config.display()))?;
    let mut config: ExperimentConfig = serde_json::from_reader(file)
        .with_context(|| format!("parsing {}", args.config.display()))?;
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    let report = match args.threads {
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()?;
            pool.install(|| run_experiment(&config))?
        }
        None => run_experiment(&config)?,
    };
    std::fs::create_dir_all(&args.out)?;
    let metrics_path = args.out.join("metrics.csv");
    export::write_atomic(&metrics_path, &export::metrics_csv(&report))?;
    println!("wrote {}", metrics_path.display());
    let summary_path = args.out.join("summary.csv");
    export::write_atomic(&summary_path, &export::experiment_summary_csv(&report))?;
    println!("wrote {}", summary_path.display());
    for curve in &report.curves {
        let path = args.out.join(format!("curve_{}.csv", curve.label));
        export::write_atomic(&path, &export::curve_csv(curve))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cox_check(args: CoxCheckArgs) -> Result<()> {
    let data = load_dataset(&args.input)?;
    let fit = cox_markov_check(&data, args.exposure, args.event)?;
    let text = export::cox_fit_text(&fit);
    export::write_atomic(&args.out, &text)?;
    print!("{text}");
    println!("wrote {}", args.out.display());
    Ok(())
}
