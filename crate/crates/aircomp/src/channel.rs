//! Random channel realizations for the RIS-assisted uplink.
//!
//! Large-scale fading is distance-based path loss `T0 * (d/d0)^-alpha` with
//! reference distance `d0 = 1` m. Small-scale fading is Rayleigh on the
//! direct device-to-AP links and Rician on both reflecting links, with a
//! rank-one line-of-sight component built from far-field steering vectors
//! (uniform linear array at the AP, uniform planar array at the RIS,
//! half-wavelength spacing).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Reference distance for the path-loss model, meters.
pub const REFERENCE_DISTANCE: f64 = 1.0;

/// 3-D positions of the AP, the RIS, and the device region, meters.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Geometry {
    pub ap: [f64; 3],
    pub ris: [f64; 3],
    /// Center of the circular device region (devices lie in its z-plane).
    pub device_center: [f64; 3],
    pub device_radius: f64,
}

/// Path-loss exponents per link class.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PathLossExponents {
    /// Device -> AP (direct) links.
    pub device_ap: f64,
    /// Device -> RIS links.
    pub device_ris: f64,
    /// RIS -> AP link.
    pub ris_ap: f64,
}

/// Static description of the network: sizes, powers, fading parameters,
/// and geometry.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SystemConfig {
    /// Number of devices K.
    pub devices: usize,
    /// Number of AP antennas M.
    pub antennas: usize,
    /// Number of RIS reflecting elements N.
    pub elements: usize,
    /// Maximum transmit power P, watts.
    pub power: f64,
    /// Noise power sigma^2, watts.
    pub noise_power: f64,
    /// Path loss at the reference distance, linear.
    pub ref_path_loss: f64,
    pub exponents: PathLossExponents,
    /// Rician factor of the reflecting links (0 = Rayleigh).
    pub rician_beta: f64,
    pub geometry: Geometry,
}

impl SystemConfig {
    /// The simulation defaults: AP at (0, 0, 20) m, RIS at (100, 0, 20) m,
    /// devices uniform in a 20 m disk centered at (100, 20, 0) m,
    /// exponents 3.8 / 2.5 / 2.2, beta = 3, T0 = -30 dB, P = 30 dBm,
    /// sigma^2 = -90 dBm.
    pub fn default_scenario(devices: usize, antennas: usize, elements: usize) -> Self {
        Self {
            devices,
            antennas,
            elements,
            power: 1.0,
            noise_power: 1e-12,
            ref_path_loss: 1e-3,
            exponents: PathLossExponents {
                device_ap: 3.8,
                device_ris: 2.5,
                ris_ap: 2.2,
            },
            rician_beta: 3.0,
            geometry: Geometry {
                ap: [0.0, 0.0, 20.0],
                ris: [100.0, 0.0, 20.0],
                device_center: [100.0, 20.0, 0.0],
                device_radius: 20.0,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        fn check(ok: bool, msg: &str) -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidConfig(msg.to_string()))
            }
        }
        check(self.devices >= 1, "device count K must be >= 1")?;
        check(self.antennas >= 1, "antenna count M must be >= 1")?;
        check(self.elements >= 1, "RIS element count N must be >= 1")?;
        check(
            self.power > 0.0 && self.power.is_finite(),
            "transmit power P must be positive",
        )?;
        check(
            self.noise_power > 0.0 && self.noise_power.is_finite(),
            "noise power sigma^2 must be positive",
        )?;
        check(
            self.ref_path_loss > 0.0 && self.ref_path_loss.is_finite(),
            "reference path loss T0 must be positive",
        )?;
        check(
            self.exponents.device_ap > 0.0
                && self.exponents.device_ris > 0.0
                && self.exponents.ris_ap > 0.0,
            "path-loss exponents must be positive",
        )?;
        check(
            self.rician_beta >= 0.0 && self.rician_beta.is_finite(),
            "Rician factor must be nonnegative",
        )?;
        check(
            self.geometry.device_radius >= 0.0,
            "device region radius must be nonnegative",
        )?;
        let finite = self
            .geometry
            .ap
            .iter()
            .chain(self.geometry.ris.iter())
            .chain(self.geometry.device_center.iter())
            .all(|c| c.is_finite());
        check(finite, "geometry coordinates must be finite")?;
        Ok(())
    }
}

/// One draw of every channel in the network.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// Direct links h_dk, one length-M vector per device.
    pub direct: Vec<DVector<Complex64>>,
    /// RIS -> AP link G, M x N.
    pub ris_to_ap: DMatrix<Complex64>,
    /// Device -> RIS links h_rk, one length-N vector per device.
    pub reflect: Vec<DVector<Complex64>>,
}

impl ChannelRealization {
    pub fn devices(&self) -> usize {
        self.direct.len()
    }

    pub fn antennas(&self) -> usize {
        self.ris_to_ap.nrows()
    }

    pub fn elements(&self) -> usize {
        self.ris_to_ap.ncols()
    }

    /// Checks the dimension and finiteness invariants.
    pub fn validate(&self) -> Result<()> {
        let (m, n) = (self.antennas(), self.elements());
        if self.reflect.len() != self.direct.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} direct links but {} reflect links",
                self.direct.len(),
                self.reflect.len()
            )));
        }
        for (k, h) in self.direct.iter().enumerate() {
            if h.len() != m {
                return Err(Error::DimensionMismatch(format!(
                    "direct link {k} has length {} but the AP has {m} antennas",
                    h.len()
                )));
            }
        }
        for (k, h) in self.reflect.iter().enumerate() {
            if h.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "reflect link {k} has length {} but the RIS has {n} elements",
                    h.len()
                )));
            }
        }
        let all_finite = self
            .direct
            .iter()
            .chain(self.reflect.iter())
            .flat_map(|v| v.iter())
            .chain(self.ris_to_ap.iter())
            .all(|z| z.re.is_finite() && z.im.is_finite());
        if !all_finite {
            return Err(Error::InvalidConfig(
                "channel realization contains non-finite entries".to_string(),
            ));
        }
        Ok(())
    }
}

/// Large-scale power gain `T0 * (d / 1m)^-alpha`.
///
/// `alpha = 0` is allowed (distance-independent gain); configs additionally
/// require strictly positive exponents.
pub fn path_loss(distance: f64, alpha: f64, t0: f64) -> Result<f64> {
    if !(distance >= REFERENCE_DISTANCE) {
        return Err(Error::BelowReferenceDistance { distance });
    }
    if !(alpha >= 0.0) || !(t0 > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "path loss needs alpha >= 0 and t0 > 0, got alpha = {alpha}, t0 = {t0}"
        )));
    }
    Ok(t0 * (distance / REFERENCE_DISTANCE).powf(-alpha))
}

/// One circularly-symmetric complex Gaussian sample with unit variance.
fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix of i.i.d. unit-variance circularly-symmetric complex Gaussians.
///
/// Entries are drawn in column-major order; the draw order is part of the
/// determinism contract.
pub fn sample_nlos<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Rician draw `sqrt(beta/(1+beta)) * los + sqrt(1/(1+beta)) * nlos` with
/// unit mean power per entry.
pub fn sample_rician<R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    beta: f64,
    los: &DMatrix<Complex64>,
    rng: &mut R,
) -> Result<DMatrix<Complex64>> {
    if !(beta >= 0.0) {
        return Err(Error::NegativeRicianFactor { beta });
    }
    if los.nrows() != rows || los.ncols() != cols {
        return Err(Error::DimensionMismatch(format!(
            "LoS component is {}x{}, expected {rows}x{cols}",
            los.nrows(),
            los.ncols()
        )));
    }
    for z in los.iter() {
        let modulus = z.norm();
        if (modulus - 1.0).abs() > 1e-9 {
            return Err(Error::NonUnitModulusLos { modulus });
        }
    }
    let los_coeff = (beta / (1.0 + beta)).sqrt();
    let nlos_coeff = (1.0 / (1.0 + beta)).sqrt();
    let nlos = sample_nlos(rows, cols, rng);
    Ok(los.map(|z| z * los_coeff) + nlos.map(|z| z * nlos_coeff))
}

/// Far-field steering vector of a uniform linear array along the x axis
/// with half-wavelength spacing: element i has phase `pi * i * u_x` for a
/// unit propagation direction `u`.
pub fn ula_steering(antennas: usize, direction: [f64; 3]) -> DVector<Complex64> {
    DVector::from_fn(antennas, |i, _| {
        Complex64::from_polar(1.0, std::f64::consts::PI * i as f64 * direction[0])
    })
}

/// Near-square factorization used to arrange N elements as a planar array.
pub fn upa_dims(elements: usize) -> (usize, usize) {
    let mut rows = (elements as f64).sqrt().floor() as usize;
    while rows > 1 && elements % rows != 0 {
        rows -= 1;
    }
    (rows.max(1), elements / rows.max(1))
}

/// Far-field steering vector of a uniform planar array in the x-z plane
/// with half-wavelength spacing. Element e maps to grid position
/// `(e % rows, e / rows)` on the (x, z) axes.
pub fn upa_steering(elements: usize, direction: [f64; 3]) -> DVector<Complex64> {
    let (rows, _) = upa_dims(elements);
    DVector::from_fn(elements, |e, _| {
        let ix = (e % rows) as f64;
        let iz = (e / rows) as f64;
        let phase = std::f64::consts::PI * (ix * direction[0] + iz * direction[2]);
        Complex64::from_polar(1.0, phase)
    })
}

fn distance(a: [f64; 3], b: [f64; 3]) -> f64 {
    let mut s = 0.0;
    for i in 0..3 {
        s += (a[i] - b[i]).powi(2);
    }
    s.sqrt()
}

fn unit_direction(from: [f64; 3], to: [f64; 3]) -> [f64; 3] {
    let d = distance(from, to);
    if d == 0.0 {
        return [0.0, 0.0, 0.0];
    }
    [(to[0] - from[0]) / d, (to[1] - from[1]) / d, (to[2] - from[2]) / d]
}

/// Deterministic per-trial RNG: one seed, one stream index. Streams are
/// pairwise independent, so concurrent trial workers can share a base seed.
pub fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draws one full channel realization: device positions uniform in the
/// configured disk, Rayleigh direct links, Rician reflecting links with
/// steering-vector LoS components, all scaled by their path losses.
///
/// Identical `(config, seed)` pairs produce bit-identical realizations.
pub fn generate_scenario(config: &SystemConfig, seed: u64) -> Result<ChannelRealization> {
    let mut rng = trial_rng(seed, 0);
    generate_scenario_with(config, &mut rng)
}

/// As [`generate_scenario`], from a caller-managed RNG stream.
pub fn generate_scenario_with<R: Rng + ?Sized>(
    config: &SystemConfig,
    rng: &mut R,
) -> Result<ChannelRealization> {
    config.validate()?;
    let geo = &config.geometry;
    let (k, m, n) = (config.devices, config.antennas, config.elements);
    let t0 = config.ref_path_loss;

    // Device drops first, then direct links, then G, then reflect links:
    // the draw order is fixed so seeds stay meaningful across versions.
    let mut positions = Vec::with_capacity(k);
    for _ in 0..k {
        let radius = geo.device_radius * rng.random::<f64>().sqrt();
        let angle = std::f64::consts::TAU * rng.random::<f64>();
        positions.push([
            geo.device_center[0] + radius * angle.cos(),
            geo.device_center[1] + radius * angle.sin(),
            geo.device_center[2],
        ]);
    }

    let mut direct = Vec::with_capacity(k);
    for pos in &positions {
        let gain = path_loss(distance(*pos, geo.ap), config.exponents.device_ap, t0)?;
        let scale = gain.sqrt();
        direct.push(DVector::from_fn(m, |_, _| complex_gaussian(rng) * scale));
    }

    let gain_ra = path_loss(distance(geo.ris, geo.ap), config.exponents.ris_ap, t0)?;
    let ap_steer = ula_steering(m, unit_direction(geo.ap, geo.ris));
    let ris_steer_ap = upa_steering(n, unit_direction(geo.ris, geo.ap));
    let g_los = &ap_steer * ris_steer_ap.adjoint();
    let ris_to_ap = sample_rician(m, n, config.rician_beta, &g_los, rng)?
        .map(|z| z * gain_ra.sqrt());

    let mut reflect = Vec::with_capacity(k);
    for pos in &positions {
        let gain = path_loss(distance(*pos, geo.ris), config.exponents.device_ris, t0)?;
        let los = DMatrix::from_column_slice(
            n,
            1,
            upa_steering(n, unit_direction(geo.ris, *pos)).as_slice(),
        );
        let draw = sample_rician(n, 1, config.rician_beta, &los, rng)?;
        reflect.push(DVector::from_column_slice(draw.as_slice()).map(|z| z * gain.sqrt()));
    }

    Ok(ChannelRealization {
        direct,
        ris_to_ap,
        reflect,
    })
}
