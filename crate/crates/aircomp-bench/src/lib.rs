//! Experiment harness around the `aircomp` optimizer: sweep execution with
//! paired trials, the random-phase and no-RIS baselines, an exhaustive
//! brute-force oracle for tiny networks, and solver timing sweeps. The
//! `aircomp-bench` binary exposes all of it behind `run`, `oracle`, and
//! `timing` subcommands.

pub mod baselines;
pub mod brute;
pub mod runner;
pub mod spec;
pub mod timing;

pub use baselines::{no_ris_baseline, random_phase_baseline, BaselineOutcome};
pub use brute::{brute_force_small, BruteForceResult, BRUTE_FORCE_CAP};
pub use runner::{csv_string, run_experiment, write_csv, ResultRow, ResultTable};
pub use spec::{load_experiment_spec, parse_experiment_spec, ExperimentSpec, Method, SweepAxis};
pub use timing::{timing_sweep, TimingSpec, TimingTable};
