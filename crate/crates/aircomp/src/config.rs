//! Scenario configuration files.
//!
//! Scenarios are described by a TOML key-value file; power-like fields are
//! given in dB/dBm and converted to linear units at load time:
//!
//! ```toml
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
//! seed = 7
//!
//! [positions]
//! ap = [0.0, 0.0, 20.0]
//! ris = [100.0, 0.0, 20.0]
//! devices = [100.0, 20.0, 0.0]
//! ```

use serde::{Deserialize, Serialize};

use crate::channel::{Geometry, PathLossExponents, SystemConfig};
use crate::error::{Error, Result};

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

/// On-disk scenario schema. All power fields are logarithmic.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioToml {
    pub k: usize,
    pub m: usize,
    pub n: usize,
    pub power_dbm: f64,
    pub noise_dbm: f64,
    pub t0_db: f64,
    pub alpha_da: f64,
    pub alpha_dr: f64,
    pub alpha_ra: f64,
    pub rician_beta: f64,
    pub positions: PositionsToml,
    pub radius: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PositionsToml {
    pub ap: [f64; 3],
    pub ris: [f64; 3],
    pub devices: [f64; 3],
}

/// A parsed scenario: validated config plus the file's seed.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: SystemConfig,
    pub seed: u64,
}

impl TryFrom<ScenarioToml> for Scenario {
    type Error = Error;

    fn try_from(raw: ScenarioToml) -> Result<Self> {
        let config = SystemConfig {
            devices: raw.k,
            antennas: raw.m,
            elements: raw.n,
            power: dbm_to_watts(raw.power_dbm),
            noise_power: dbm_to_watts(raw.noise_dbm),
            ref_path_loss: db_to_linear(raw.t0_db),
            exponents: PathLossExponents {
                device_ap: raw.alpha_da,
                device_ris: raw.alpha_dr,
                ris_ap: raw.alpha_ra,
            },
            rician_beta: raw.rician_beta,
            geometry: Geometry {
                ap: raw.positions.ap,
                ris: raw.positions.ris,
                device_center: raw.positions.devices,
                device_radius: raw.radius,
            },
        };
        config.validate()?;
        Ok(Scenario {
            config,
            seed: raw.seed,
        })
    }
}

/// Parses scenario TOML text into a validated [`Scenario`].
pub fn parse_scenario_config(text: &str) -> Result<Scenario> {
    let raw: ScenarioToml = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    Scenario::try_from(raw)
}

/// Reads and parses a scenario file.
pub fn load_scenario_config(path: impl AsRef<std::path::Path>) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)?;
    parse_scenario_config(&text)
}
