use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use aircomp::altermin::{altermin, AlterMinSettings};
use aircomp::channel::generate_scenario;
use aircomp::config::load_scenario_config;
use aircomp_bench::brute::brute_force_small;
use aircomp_bench::runner::{run_experiment, write_csv};
use aircomp_bench::spec::load_experiment_spec;
use aircomp_bench::timing::{timing_sweep, TimingSpec};

#[derive(Parser)]
#[command(name = "aircomp-bench", about = "Experiment harness for RIS-assisted AirComp optimization", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep described by an experiment file and emit a CSV table.
    Run(RunArgs),
    /// Check the optimizer against exhaustive search on a tiny scenario.
    Oracle(OracleArgs),
    /// Measure per-iteration solver cost across problem sizes.
    Timing(TimingArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment TOML file.
    spec: PathBuf,
    /// Override the experiment seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the trial count.
    #[arg(long)]
    trials: Option<usize>,
    /// Output CSV path (defaults to the spec's `out`, then stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit nonzero when any trial is flagged infeasible.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct OracleArgs {
    /// Scenario TOML file (N <= 3, M <= 2, K <= 3).
    scenario: PathBuf,
    /// Phase grid points per RIS element.
    #[arg(long, default_value_t = 61)]
    grid: usize,
    /// Beam-sphere sampling density.
    #[arg(long, default_value_t = 64)]
    beams: usize,
    /// Override the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Independent optimizer starts; the best MSE is reported.
    #[arg(long, default_value_t = 4)]
    restarts: usize,
}

#[derive(Args)]
struct TimingArgs {
    /// Device counts, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "64,128,256")]
    devices: Vec<usize>,
    /// Element counts, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "64,128,256")]
    elements: Vec<usize>,
    #[arg(long, default_value_t = 128)]
    fixed_devices: usize,
    #[arg(long, default_value_t = 128)]
    fixed_elements: usize,
    /// Iterations per measured solve.
    #[arg(long, default_value_t = 300)]
    iters: usize,
    /// Repeats per size (median reported).
    #[arg(long, default_value_t = 5)]
    repeats: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Run(args) => run(args),
        Command::Oracle(args) => oracle(args),
        Command::Timing(args) => timing(args),
    }
}

fn run(args: RunArgs) -> anyhow::Result<()> {
    let mut spec = load_experiment_spec(&args.spec)?;
    if let Some(seed) = args.seed {
        spec.seed_base = seed;
    }
    if let Some(trials) = args.trials {
        spec.trials = trials;
    }
    let table = run_experiment(&spec)?;

    let out_path = args.out.or(spec.output.clone());
    match &out_path {
        Some(path) => {
            let file = std::fs::File::create(path)
                .with_context(|| format!("creating {}", path.display()))?;
            write_csv(&table, file)?;
            eprintln!(
                "wrote {} trial rows and {} mean rows to {}",
                table.rows.len(),
                table.means.len(),
                path.display()
            );
        }
        None => write_csv(&table, std::io::stdout().lock())?,
    }

    if args.strict && table.any_infeasible() {
        let flagged = table.rows.iter().filter(|r| r.infeasible).count();
        eprintln!("{flagged} infeasible rows");
        std::process::exit(2);
    }
    Ok(())
}

fn oracle(args: OracleArgs) -> anyhow::Result<()> {
    let scenario = load_scenario_config(&args.scenario).map_err(anyhow::Error::new)?;
    let config = scenario.config;
    let seed = args.seed.unwrap_or(scenario.seed);
    let channels = generate_scenario(&config, seed).map_err(anyhow::Error::new)?;

    let brute = brute_force_small(
        &channels,
        config.power,
        config.noise_power,
        args.grid,
        args.beams,
    )?;

    let settings = AlterMinSettings::default();
    let mut best_mse = f64::INFINITY;
    for r in 0..args.restarts.max(1) {
        let out = altermin(
            &channels,
            config.power,
            config.noise_power,
            &settings,
            seed.wrapping_add(r as u64),
        )
        .map_err(anyhow::Error::new)?;
        best_mse = best_mse.min(out.mse);
    }

    let rel = (best_mse - brute.mse) / brute.mse;
    println!("brute_force_mse,{}", brute.mse);
    println!("optimizer_mse,{}", best_mse);
    println!("relative_gap,{}", rel);
    Ok(())
}

fn timing(args: TimingArgs) -> anyhow::Result<()> {
    let spec = TimingSpec {
        devices: args.devices,
        elements: args.elements,
        fixed_devices: args.fixed_devices,
        fixed_elements: args.fixed_elements,
        iters: args.iters,
        repeats: args.repeats,
        seed: args.seed,
    };
    let table = timing_sweep(&spec);
    match &args.out {
        Some(path) => {
            let file = std::fs::File::create(path)
                .with_context(|| format!("creating {}", path.display()))?;
            table.write_csv(file)?;
        }
        None => table.write_csv(std::io::stdout().lock())?,
    }
    eprintln!(
        "log-log slope vs devices: {:.3}, vs elements: {:.3}",
        table.slope_devices, table.slope_elements
    );
    Ok(())
}
