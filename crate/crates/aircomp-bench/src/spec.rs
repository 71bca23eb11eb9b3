//! Experiment specification files.
//!
//! An experiment is a scenario plus a sweep description:
//!
//! ```toml
//! [scenario]
//! k = 20
//! m = 10
//! n = 50
//! power_dbm = 30.0
//! noise_dbm = -90.0
//! t0_db = -30.0
//! alpha_da = 3.8
//! alpha_dr = 2.5
//! alpha_ra = 2.2
//! rician_beta = 3.0
//! radius = 20.0
//!
//! [scenario.positions]
//! ap = [0.0, 0.0, 20.0]
//! ris = [100.0, 0.0, 20.0]
//! devices = [100.0, 20.0, 0.0]
//!
//! [experiment]
//! axis = "m"                 # "m" | "n" | "k" | "none"
//! values = [5, 10, 15, 20]
//! trials = 100
//! methods = ["proposed", "random_phase", "no_ris"]
//! seed = 1
//! out = "results.csv"
//! ```

use std::path::PathBuf;

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use aircomp::config::{Scenario, ScenarioToml};
use aircomp::channel::SystemConfig;
use aircomp::altermin::AlterMinSettings;

use crate::brute;

/// Which network dimension the experiment sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    None,
    /// AP antennas M.
    M,
    /// RIS elements N.
    N,
    /// Devices K.
    K,
}

/// Optimization methods the harness can run on a realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Proposed,
    RandomPhase,
    NoRis,
    BruteForce,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Proposed => "proposed",
            Method::RandomPhase => "random_phase",
            Method::NoRis => "no_ris",
            Method::BruteForce => "brute_force",
        }
    }
}

/// A fully validated experiment description.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub base: SystemConfig,
    pub axis: SweepAxis,
    /// Sweep values; a single implicit point when the axis is `None`.
    pub values: Vec<usize>,
    pub trials: usize,
    pub methods: Vec<Method>,
    pub seed_base: u64,
    pub output: Option<PathBuf>,
    /// Independent starts per proposed-method run; the best MSE wins.
    pub restarts: usize,
    pub settings: AlterMinSettings,
    /// Phase grid points per RIS element for the brute-force method.
    pub phase_grid: usize,
    /// Beam-sphere sampling density for the brute-force method.
    pub beam_samples: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExperimentToml {
    scenario: ScenarioToml,
    experiment: ExperimentSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExperimentSection {
    #[serde(default = "default_axis")]
    axis: SweepAxis,
    #[serde(default)]
    values: Vec<usize>,
    #[serde(default = "default_trials")]
    trials: usize,
    methods: Vec<Method>,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    out: Option<PathBuf>,
    #[serde(default = "default_restarts")]
    restarts: usize,
    /// Single threshold applied to the outer, inner, and saddle loops.
    #[serde(default = "default_eps")]
    eps: f64,
    #[serde(default)]
    max_outer: Option<usize>,
    #[serde(default)]
    max_inner: Option<usize>,
    #[serde(default)]
    max_saddle_iter: Option<usize>,
    #[serde(default = "default_phase_grid")]
    phase_grid: usize,
    #[serde(default = "default_beam_samples")]
    beam_samples: usize,
}

fn default_axis() -> SweepAxis {
    SweepAxis::None
}
fn default_trials() -> usize {
    100
}
fn default_restarts() -> usize {
    1
}
fn default_eps() -> f64 {
    1e-5
}
fn default_phase_grid() -> usize {
    41
}
fn default_beam_samples() -> usize {
    64
}

impl ExperimentSpec {
    /// The scenario config at one sweep point.
    pub fn config_at(&self, value: usize) -> SystemConfig {
        let mut config = self.base.clone();
        match self.axis {
            SweepAxis::None => {}
            SweepAxis::M => config.antennas = value,
            SweepAxis::N => config.elements = value,
            SweepAxis::K => config.devices = value,
        }
        config
    }

    /// Sweep points; `[0]` stands for the unmodified base config.
    pub fn sweep_points(&self) -> Vec<usize> {
        if self.axis == SweepAxis::None {
            vec![0]
        } else {
            self.values.clone()
        }
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        self.base
            .validate()
            .map_err(anyhow::Error::new)?;
        self.settings
            .validate()
            .map_err(anyhow::Error::new)?;
        if self.trials < 1 {
            bail!("trials must be at least 1");
        }
        if self.restarts < 1 {
            bail!("restarts must be at least 1");
        }
        if self.methods.is_empty() {
            bail!("at least one method is required");
        }
        match self.axis {
            SweepAxis::None => {
                if !self.values.is_empty() {
                    bail!("sweep values given but axis is \"none\"");
                }
            }
            _ => {
                if self.values.is_empty() {
                    bail!("sweep axis set but no values given");
                }
                if self.values[0] == 0 {
                    bail!("sweep values must be positive");
                }
                if !self.values.windows(2).all(|w| w[0] < w[1]) {
                    bail!("sweep values must be strictly increasing");
                }
            }
        }
        if self.methods.contains(&Method::BruteForce) {
            for value in self.sweep_points() {
                let c = self.config_at(if value == 0 { 1 } else { value });
                let c = if value == 0 { self.base.clone() } else { c };
                let cells = c.devices * c.antennas * c.elements;
                if cells > brute::BRUTE_FORCE_CAP {
                    bail!(
                        "brute_force needs K*M*N <= {}, got {} at sweep value {}",
                        brute::BRUTE_FORCE_CAP,
                        cells,
                        value
                    );
                }
            }
        }
        Ok(())
    }
}

/// Parses experiment TOML text into a validated [`ExperimentSpec`].
pub fn parse_experiment_spec(text: &str) -> anyhow::Result<ExperimentSpec> {
    let raw: ExperimentToml = toml::from_str(text).context("invalid experiment file")?;
    let exp = raw.experiment;
    let scenario =
        Scenario::try_from(raw.scenario).map_err(anyhow::Error::new)?;
    let mut settings = AlterMinSettings {
        eps_outer: exp.eps,
        eps_inner: exp.eps,
        eps_saddle: exp.eps,
        ..AlterMinSettings::default()
    };
    if let Some(v) = exp.max_outer {
        settings.max_outer = v;
    }
    if let Some(v) = exp.max_inner {
        settings.max_inner = v;
    }
    if let Some(v) = exp.max_saddle_iter {
        settings.max_saddle_iter = v;
    }
    let spec = ExperimentSpec {
        base: scenario.config,
        axis: exp.axis,
        values: exp.values,
        trials: exp.trials,
        methods: exp.methods,
        seed_base: exp.seed,
        output: exp.out,
        restarts: exp.restarts,
        settings,
        phase_grid: exp.phase_grid,
        beam_samples: exp.beam_samples,
    };
    spec.validate()?;
    Ok(spec)
}

/// Reads and parses an experiment file.
pub fn load_experiment_spec(path: impl AsRef<std::path::Path>) -> anyhow::Result<ExperimentSpec> {
    let text = std::fs::read_to_string(path.as_ref())
        .with_context(|| format!("reading {}", path.as_ref().display()))?;
    parse_experiment_spec(&text)
}
