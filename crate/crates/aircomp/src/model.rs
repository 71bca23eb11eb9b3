//! AirComp MSE model: composite channels, the zero-forcing transmit design,
//! and the complex-to-real lifting of both alternation subproblems.
//!
//! With receive beamformer `m`, phase shifts `v`, and composite channels
//! `h_k(v) = h_dk + G diag(h_rk) v`, the zero-forcing scalars
//! `w_k = sqrt(eta) (m^H h_k)^H / |m^H h_k|^2` with denoising factor
//! `eta = P min_k |m^H h_k|^2` cancel the misalignment term exactly, leaving
//!
//! ```text
//! MSE(m, v) = sigma^2 ||m||^2 / (P min_k |m^H h_k(v)|^2).
//! ```
//!
//! Both alternation subproblems minimize `max_k` of a concave quadratic; the
//! lifts here map them to real symmetric negative-semidefinite data so the
//! solver layer can work over `R^{2N}` / `R^{2M}`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::channel::ChannelRealization;
use crate::error::{Error, Result};

/// Squared projections below this are treated as an infeasible (infinite
/// MSE) condition instead of producing an overflowed quotient.
pub const ZERO_PROJECTION_FLOOR: f64 = 1e-30;

/// Stacks a complex vector as `[Re(x); Im(x)]`.
pub fn real_lift(x: &DVector<Complex64>) -> DVector<f64> {
    let n = x.len();
    DVector::from_fn(2 * n, |i, _| if i < n { x[i].re } else { x[i - n].im })
}

/// Inverse of [`real_lift`].
pub fn complex_from_lift(x: &DVector<f64>) -> Result<DVector<Complex64>> {
    if x.len() % 2 != 0 {
        return Err(Error::DimensionMismatch(format!(
            "real lift must have even length, got {}",
            x.len()
        )));
    }
    let n = x.len() / 2;
    Ok(DVector::from_fn(n, |i, _| Complex64::new(x[i], x[n + i])))
}

/// Real lift of `-x x^H`: the block matrix `[Re S, -Im S; Im S, Re S]`
/// with `S = -x x^H`. Symmetric and negative semidefinite.
fn lift_negative_outer(x: &DVector<Complex64>) -> DMatrix<f64> {
    let n = x.len();
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let s = -(x[i] * x[j].conj());
            out[(i, j)] = s.re;
            out[(i, j + n)] = -s.im;
            out[(i + n, j)] = s.im;
            out[(i + n, j + n)] = s.re;
        }
    }
    out
}

/// RIS phase-shift vector. Feasible points have unit-modulus entries;
/// relaxed iterates (entries inside the unit disk) are representable too.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseShiftVector {
    v: DVector<Complex64>,
}

impl PhaseShiftVector {
    pub fn from_complex(v: DVector<Complex64>) -> Self {
        Self { v }
    }

    /// Unit-modulus vector with the given phases.
    pub fn from_phases(phases: &[f64]) -> Self {
        Self {
            v: DVector::from_iterator(
                phases.len(),
                phases.iter().map(|&t| Complex64::from_polar(1.0, t)),
            ),
        }
    }

    /// Rebuilds from a `[Re; Im]` stacking.
    pub fn from_real_lift(lift: &DVector<f64>) -> Result<Self> {
        Ok(Self {
            v: complex_from_lift(lift)?,
        })
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.len() == 0
    }

    pub fn as_complex(&self) -> &DVector<Complex64> {
        &self.v
    }

    pub fn real_lift(&self) -> DVector<f64> {
        real_lift(&self.v)
    }

    pub fn phases(&self) -> Vec<f64> {
        self.v.iter().map(|z| z.arg()).collect()
    }

    /// True when every entry is within `tol` of unit modulus.
    pub fn is_unit_modulus(&self, tol: f64) -> bool {
        self.v.iter().all(|z| (z.norm() - 1.0).abs() <= tol)
    }
}

/// Receive beamforming vector at the AP.
#[derive(Debug, Clone, PartialEq)]
pub struct Beamformer {
    m: DVector<Complex64>,
}

impl Beamformer {
    pub fn from_complex(m: DVector<Complex64>) -> Self {
        Self { m }
    }

    pub fn from_real_lift(lift: &DVector<f64>) -> Result<Self> {
        Ok(Self {
            m: complex_from_lift(lift)?,
        })
    }

    pub fn len(&self) -> usize {
        self.m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m.len() == 0
    }

    pub fn as_complex(&self) -> &DVector<Complex64> {
        &self.m
    }

    pub fn real_lift(&self) -> DVector<f64> {
        real_lift(&self.m)
    }

    pub fn norm(&self) -> f64 {
        self.m.norm()
    }

    /// Scales to unit norm. Errors on a (numerically) zero vector.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.m.norm();
        if n * n < ZERO_PROJECTION_FLOOR {
            return Err(Error::ZeroProjection);
        }
        Ok(Self {
            m: self.m.map(|z| z / n),
        })
    }
}

/// Total energy reaching the AP from one device across the direct link and
/// every reflected path: `||h_dk||^2 + sum_i ||g_i||^2 |h_rk,i|^2`. Zero
/// means no phase configuration can serve the device.
pub fn device_energy(channels: &ChannelRealization, device: usize) -> f64 {
    let mut energy = channels.direct[device].norm_squared();
    for i in 0..channels.elements() {
        energy += channels.ris_to_ap.column(i).norm_squared()
            * channels.reflect[device][i].norm_sqr();
    }
    energy
}

/// Amplitude scale of a realization: square root of the largest per-device
/// energy. Dividing the direct links and `G` by this scale maps composite
/// channels to order one without moving the min-max solution, which keeps
/// absolute convergence thresholds meaningful at physical path-loss scales.
pub fn channel_scale(channels: &ChannelRealization) -> f64 {
    (0..channels.devices())
        .map(|k| device_energy(channels, k))
        .fold(0.0f64, f64::max)
        .sqrt()
}

/// Scales the direct links and the RIS-to-AP matrix by `factor`, which
/// scales every composite channel by `factor`.
pub fn scale_channels(channels: &ChannelRealization, factor: f64) -> ChannelRealization {
    ChannelRealization {
        direct: channels
            .direct
            .iter()
            .map(|h| h.map(|z| z * factor))
            .collect(),
        ris_to_ap: channels.ris_to_ap.map(|z| z * factor),
        reflect: channels.reflect.clone(),
    }
}

/// Composite channel `h_k(v) = h_dk + G diag(h_rk) v` of one device.
pub fn composite_channel(
    channels: &ChannelRealization,
    device: usize,
    v: &PhaseShiftVector,
) -> Result<DVector<Complex64>> {
    if device >= channels.devices() {
        return Err(Error::DimensionMismatch(format!(
            "device index {device} out of range for {} devices",
            channels.devices()
        )));
    }
    if v.len() != channels.elements() {
        return Err(Error::DimensionMismatch(format!(
            "phase vector has {} entries but the RIS has {} elements",
            v.len(),
            channels.elements()
        )));
    }
    let reflect = &channels.reflect[device];
    let weighted = DVector::from_fn(channels.elements(), |i, _| reflect[i] * v.as_complex()[i]);
    Ok(&channels.direct[device] + &channels.ris_to_ap * weighted)
}

/// Composite channels of every device.
pub fn composite_channels(
    channels: &ChannelRealization,
    v: &PhaseShiftVector,
) -> Result<Vec<DVector<Complex64>>> {
    (0..channels.devices())
        .map(|k| composite_channel(channels, k, v))
        .collect()
}

/// `min_k |m^H h_k|^2` over a list of composite channels.
fn min_projection(m: &Beamformer, composites: &[DVector<Complex64>]) -> Result<f64> {
    if composites.is_empty() {
        return Err(Error::DimensionMismatch("no composite channels".into()));
    }
    let mut min = f64::INFINITY;
    for h in composites {
        if h.len() != m.len() {
            return Err(Error::DimensionMismatch(format!(
                "beamformer has {} entries but a channel has {}",
                m.len(),
                h.len()
            )));
        }
        let proj = m.as_complex().dotc(h).norm_sqr();
        min = min.min(proj);
    }
    Ok(min)
}

/// Denoising factor `eta = P min_k |m^H h_k|^2` for explicit composites.
pub fn denoising_factor_for_composites(
    m: &Beamformer,
    composites: &[DVector<Complex64>],
    power: f64,
) -> Result<f64> {
    let min = min_projection(m, composites)?;
    if min < ZERO_PROJECTION_FLOOR {
        return Err(Error::ZeroProjection);
    }
    Ok(power * min)
}

/// Denoising factor at a phase-shift vector.
pub fn denoising_factor(
    m: &Beamformer,
    v: &PhaseShiftVector,
    channels: &ChannelRealization,
    power: f64,
) -> Result<f64> {
    denoising_factor_for_composites(m, &composite_channels(channels, v)?, power)
}

/// MSE for explicit composite channels:
/// `sigma^2 ||m||^2 / (P min_k |m^H h_k|^2)`.
pub fn mse_for_composites(
    m: &Beamformer,
    composites: &[DVector<Complex64>],
    power: f64,
    noise_power: f64,
) -> Result<f64> {
    let eta = denoising_factor_for_composites(m, composites, power)?;
    Ok(noise_power * m.norm().powi(2) / eta)
}

/// MSE formula at `(m, v)` without checking phase feasibility; used to
/// track progress while `v` still lives in the relaxed disk product.
pub fn mse_relaxed(
    m: &Beamformer,
    v: &PhaseShiftVector,
    channels: &ChannelRealization,
    power: f64,
    noise_power: f64,
) -> Result<f64> {
    mse_for_composites(m, &composite_channels(channels, v)?, power, noise_power)
}

/// AirComp MSE at a feasible point: requires `||m|| > 0` and all `|v_i| = 1`
/// (within 1e-6). A zero worst-case projection is reported as
/// [`Error::ZeroProjection`] rather than an overflowed value.
pub fn mse(
    m: &Beamformer,
    v: &PhaseShiftVector,
    channels: &ChannelRealization,
    power: f64,
    noise_power: f64,
) -> Result<f64> {
    if !v.is_unit_modulus(1e-6) {
        return Err(Error::InvalidConfig(
            "phase-shift vector is not unit modulus".to_string(),
        ));
    }
    if m.norm() == 0.0 {
        return Err(Error::ZeroProjection);
    }
    mse_relaxed(m, v, channels, power, noise_power)
}

/// Zero-forcing transmit scalars `w_k = sqrt(eta) (m^H h_k)^H / |m^H h_k|^2`.
pub fn transmit_scalars(
    m: &Beamformer,
    v: &PhaseShiftVector,
    channels: &ChannelRealization,
    eta: f64,
) -> Result<Vec<Complex64>> {
    let composites = composite_channels(channels, v)?;
    let sqrt_eta = eta.sqrt();
    composites
        .iter()
        .map(|h| {
            let proj = m.as_complex().dotc(h);
            if proj.norm_sqr() < ZERO_PROJECTION_FLOOR {
                return Err(Error::ZeroProjection);
            }
            Ok(sqrt_eta * proj.conj() / proj.norm_sqr())
        })
        .collect()
}

/// Real-domain data of the phase-shift subproblem: for each device,
/// `-|c_k + a_k^H v|^2 = v~^T A~_k v~ - 2 v~^T b_k - |c_k|^2` with
/// `c_k = m^H h_dk` and `a_k^H = m^H G diag(h_rk)`.
#[derive(Debug, Clone)]
pub struct LiftedVSubproblem {
    /// Lifts of `-a_k a_k^H`, each `2N x 2N`.
    pub a_tilde: Vec<DMatrix<f64>>,
    /// Lifts `[Re(c_k a_k); Im(c_k a_k)]`, each length `2N`.
    pub b: Vec<DVector<f64>>,
    /// Constant offsets `|c_k|^2`.
    pub c_abs2: Vec<f64>,
}

impl LiftedVSubproblem {
    pub fn devices(&self) -> usize {
        self.a_tilde.len()
    }

    pub fn dim(&self) -> usize {
        self.a_tilde.first().map_or(0, |a| a.nrows())
    }

    /// One device's quadratic `v~^T A~_k v~ - 2 v~^T b_k - |c_k|^2`.
    pub fn objective_term(&self, device: usize, v_lift: &DVector<f64>) -> f64 {
        (v_lift.transpose() * &self.a_tilde[device] * v_lift)[(0, 0)]
            - 2.0 * v_lift.dot(&self.b[device])
            - self.c_abs2[device]
    }

    /// The subproblem objective `max_k` of the quadratics.
    pub fn objective(&self, v_lift: &DVector<f64>) -> f64 {
        (0..self.devices())
            .map(|k| self.objective_term(k, v_lift))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Real-domain data of the beamformer subproblem:
/// `-|m^H h_k|^2 = m~^T H~_k m~` with composite channels fixed.
#[derive(Debug, Clone)]
pub struct LiftedMSubproblem {
    /// Lifts of `-h_k h_k^H`, each `2M x 2M`.
    pub h_tilde: Vec<DMatrix<f64>>,
}

impl LiftedMSubproblem {
    pub fn devices(&self) -> usize {
        self.h_tilde.len()
    }

    pub fn dim(&self) -> usize {
        self.h_tilde.first().map_or(0, |h| h.nrows())
    }

    pub fn objective_term(&self, device: usize, m_lift: &DVector<f64>) -> f64 {
        (m_lift.transpose() * &self.h_tilde[device] * m_lift)[(0, 0)]
    }

    pub fn objective(&self, m_lift: &DVector<f64>) -> f64 {
        (0..self.devices())
            .map(|k| self.objective_term(k, m_lift))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Builds the lifted phase-shift subproblem for a fixed beamformer.
pub fn lift_v_subproblem(
    m: &Beamformer,
    channels: &ChannelRealization,
) -> Result<LiftedVSubproblem> {
    if m.len() != channels.antennas() {
        return Err(Error::DimensionMismatch(format!(
            "beamformer has {} entries but the AP has {} antennas",
            m.len(),
            channels.antennas()
        )));
    }
    let n = channels.elements();
    let mut a_tilde = Vec::with_capacity(channels.devices());
    let mut b = Vec::with_capacity(channels.devices());
    let mut c_abs2 = Vec::with_capacity(channels.devices());
    // a_k^H = m^H G diag(h_rk)  =>  a_k[i] = conj(m^H g_i) * conj(h_rk[i])
    let m_h_g: Vec<Complex64> = (0..n)
        .map(|i| m.as_complex().dotc(&channels.ris_to_ap.column(i).into_owned()))
        .collect();
    for k in 0..channels.devices() {
        let c = m.as_complex().dotc(&channels.direct[k]);
        let a = DVector::from_fn(n, |i, _| (m_h_g[i] * channels.reflect[k][i]).conj());
        let ca = a.map(|ai| c * ai);
        a_tilde.push(lift_negative_outer(&a));
        b.push(real_lift(&ca));
        c_abs2.push(c.norm_sqr());
    }
    Ok(LiftedVSubproblem { a_tilde, b, c_abs2 })
}

/// Builds the lifted beamformer subproblem for fixed phase shifts.
pub fn lift_m_subproblem(
    v: &PhaseShiftVector,
    channels: &ChannelRealization,
) -> Result<LiftedMSubproblem> {
    let composites = composite_channels(channels, v)?;
    Ok(lift_m_subproblem_for_composites(&composites))
}

/// As [`lift_m_subproblem`] for explicit composite channels (used by the
/// no-RIS configuration, where the composites are just the direct links).
pub fn lift_m_subproblem_for_composites(composites: &[DVector<Complex64>]) -> LiftedMSubproblem {
    LiftedMSubproblem {
        h_tilde: composites.iter().map(lift_negative_outer).collect(),
    }
}
