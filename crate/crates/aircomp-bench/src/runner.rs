//! Sweep execution: every requested method runs on the identical channel
//! realization per (sweep value, trial), rows merge deterministically, and
//! per-point means are appended.

use std::io::Write;

use anyhow::Context;
use rayon::prelude::*;

use aircomp::altermin::altermin;
use aircomp::channel::generate_scenario;
use aircomp::error::Error;

use crate::baselines::{no_ris_baseline, random_phase_baseline};
use crate::brute::brute_force_small;
use crate::spec::{ExperimentSpec, Method};

/// One (method, sweep value, trial) outcome.
#[derive(Debug, Clone)]
pub struct ResultRow {
    pub method: Method,
    pub sweep_value: usize,
    /// Scenario seed of the trial.
    pub seed: u64,
    pub mse: f64,
    pub mse_db: f64,
    pub time_ms: f64,
    pub outer_iters: usize,
    pub converged: bool,
    /// Set when the method could not produce a finite MSE on this draw.
    pub infeasible: bool,
}

/// Per-(method, sweep value) aggregate over the feasible trials.
#[derive(Debug, Clone)]
pub struct MeanRow {
    pub method: Method,
    pub sweep_value: usize,
    pub mean_mse: f64,
    pub mean_mse_db: f64,
    pub trials: usize,
}

#[derive(Debug, Clone, Default)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
    pub means: Vec<MeanRow>,
}

impl ResultTable {
    pub fn any_infeasible(&self) -> bool {
        self.rows.iter().any(|r| r.infeasible)
    }

    pub fn mean(&self, method: Method, sweep_value: usize) -> Option<f64> {
        self.means
            .iter()
            .find(|m| m.method == method && m.sweep_value == sweep_value)
            .map(|m| m.mean_mse)
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

fn mix(a: u64, b: u64) -> u64 {
    splitmix64(a ^ splitmix64(b.wrapping_add(0x9E3779B97F4A7C15)))
}

fn run_method(
    spec: &ExperimentSpec,
    method: Method,
    channels: &aircomp::channel::ChannelRealization,
    algo_seed: u64,
) -> anyhow::Result<(f64, usize, bool)> {
    let (p, s2) = (spec.base.power, spec.base.noise_power);
    match method {
        Method::Proposed => {
            let mut best: Option<(f64, usize, bool)> = None;
            for r in 0..spec.restarts {
                let out = altermin(channels, p, s2, &spec.settings, algo_seed.wrapping_add(r as u64))
                    .map_err(anyhow::Error::new)?;
                let cand = (out.mse, out.log.rows.len(), out.converged);
                if best.as_ref().is_none_or(|b| cand.0 < b.0) {
                    best = Some(cand);
                }
            }
            Ok(best.expect("restarts >= 1"))
        }
        Method::RandomPhase => {
            let out = random_phase_baseline(channels, p, s2, &spec.settings, algo_seed)?;
            Ok((out.mse, out.iterations, out.converged))
        }
        Method::NoRis => {
            let out = no_ris_baseline(channels, p, s2, &spec.settings)?;
            Ok((out.mse, out.iterations, out.converged))
        }
        Method::BruteForce => {
            let out =
                brute_force_small(channels, p, s2, spec.phase_grid, spec.beam_samples)?;
            Ok((out.mse, 0, true))
        }
    }
}

fn is_infeasible_error(e: &anyhow::Error) -> bool {
    matches!(
        e.downcast_ref::<Error>(),
        Some(Error::ZeroProjection | Error::InfeasibleChannels)
    )
}

/// Runs the full sweep. Trials are independent and run in parallel; the
/// output ordering is fixed by the (method, sweep value, seed) sort key.
pub fn run_experiment(spec: &ExperimentSpec) -> anyhow::Result<ResultTable> {
    spec.validate()?;
    let points = spec.sweep_points();

    let mut jobs = Vec::new();
    for (value_idx, &value) in points.iter().enumerate() {
        for trial in 0..spec.trials {
            jobs.push((value_idx, value, trial));
        }
    }

    let rows: Vec<Vec<ResultRow>> = jobs
        .par_iter()
        .map(|&(value_idx, value, trial)| {
            let config = spec.config_at(value);
            let scenario_seed = mix(spec.seed_base, (value_idx as u64) << 32 | trial as u64);
            let algo_seed = mix(scenario_seed, 0xA17E);
            let channels = match generate_scenario(&config, scenario_seed) {
                Ok(ch) => ch,
                Err(e) => return Err(anyhow::Error::new(e)),
            };
            let mut out = Vec::with_capacity(spec.methods.len());
            for &method in &spec.methods {
                let start = std::time::Instant::now();
                let run = run_method(spec, method, &channels, algo_seed);
                let time_ms = start.elapsed().as_secs_f64() * 1e3;
                let row = match run {
                    Ok((mse, outer_iters, converged)) => ResultRow {
                        method,
                        sweep_value: value,
                        seed: scenario_seed,
                        mse,
                        mse_db: 10.0 * mse.log10(),
                        time_ms,
                        outer_iters,
                        converged,
                        infeasible: false,
                    },
                    Err(err) => {
                        // Infeasible draws are flagged, never dropped.
                        if !is_infeasible_error(&err) {
                            return Err(err.context(format!(
                                "{} at sweep value {value}, trial {trial}",
                                method.name()
                            )));
                        }
                        ResultRow {
                            method,
                            sweep_value: value,
                            seed: scenario_seed,
                            mse: f64::NAN,
                            mse_db: f64::NAN,
                            time_ms,
                            outer_iters: 0,
                            converged: false,
                            infeasible: true,
                        }
                    }
                };
                out.push(row);
            }
            Ok(out)
        })
        .collect::<anyhow::Result<_>>()?;

    let mut rows: Vec<ResultRow> = rows.into_iter().flatten().collect();
    rows.sort_by(|a, b| {
        (a.method, a.sweep_value, a.seed).cmp(&(b.method, b.sweep_value, b.seed))
    });

    let mut means = Vec::new();
    for &method in &spec.methods {
        for &value in &points {
            let feasible: Vec<&ResultRow> = rows
                .iter()
                .filter(|r| r.method == method && r.sweep_value == value && !r.infeasible)
                .collect();
            if feasible.is_empty() {
                continue;
            }
            let mean_mse =
                feasible.iter().map(|r| r.mse).sum::<f64>() / feasible.len() as f64;
            means.push(MeanRow {
                method,
                sweep_value: value,
                mean_mse,
                mean_mse_db: 10.0 * mean_mse.log10(),
                trials: feasible.len(),
            });
        }
    }
    means.sort_by(|a, b| (a.method, a.sweep_value).cmp(&(b.method, b.sweep_value)));

    Ok(ResultTable { rows, means })
}

pub const CSV_HEADER: &str =
    "kind,method,sweep_value,seed,mse,mse_db,time_ms,outer_iters,converged,infeasible";

/// Writes trial rows followed by mean rows under a fixed header.
pub fn write_csv<W: Write>(table: &ResultTable, mut w: W) -> anyhow::Result<()> {
    let mut out = csv::Writer::from_writer(&mut w);
    out.write_record(CSV_HEADER.split(','))?;
    for r in &table.rows {
        out.write_record([
            "trial".to_string(),
            r.method.name().to_string(),
            r.sweep_value.to_string(),
            r.seed.to_string(),
            r.mse.to_string(),
            r.mse_db.to_string(),
            r.time_ms.to_string(),
            r.outer_iters.to_string(),
            r.converged.to_string(),
            r.infeasible.to_string(),
        ])?;
    }
    for m in &table.means {
        out.write_record([
            "mean".to_string(),
            m.method.name().to_string(),
            m.sweep_value.to_string(),
            String::new(),
            m.mean_mse.to_string(),
            m.mean_mse_db.to_string(),
            String::new(),
            m.trials.to_string(),
            String::new(),
            String::new(),
        ])?;
    }
    out.flush().context("flushing CSV")?;
    Ok(())
}

/// Renders the CSV to a string (used by the CLI and the tests).
pub fn csv_string(table: &ResultTable) -> anyhow::Result<String> {
    let mut buf = Vec::new();
    write_csv(table, &mut buf)?;
    Ok(String::from_utf8(buf)?)
}
