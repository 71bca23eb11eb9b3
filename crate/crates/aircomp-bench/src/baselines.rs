//! Reference schemes: random fixed phase shifts, and no RIS at all. Both
//! optimize only the receive beamformer, through the same SCA machinery as
//! the proposed method.

use anyhow::Context;
use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;

use aircomp::altermin::{sca_loop_m, AlterMinSettings};
use aircomp::channel::{trial_rng, ChannelRealization};
use aircomp::model::{
    composite_channels, lift_m_subproblem_for_composites, mse_for_composites, real_lift,
    Beamformer, PhaseShiftVector,
};

/// Outcome of a beamformer-only optimization.
#[derive(Debug, Clone)]
pub struct BaselineOutcome {
    pub beamformer: Beamformer,
    /// The (fixed) phase-shift vector the scheme used, when it has one.
    pub phases: Option<PhaseShiftVector>,
    pub mse: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn matched_filter(composites: &[DVector<Complex64>]) -> anyhow::Result<Beamformer> {
    let m_dim = composites[0].len();
    let mut sum = DVector::zeros(m_dim);
    for h in composites {
        sum += h;
    }
    Beamformer::from_complex(sum)
        .normalized()
        .context("matched filter start is numerically zero")
}

/// Optimizes the beamformer for a fixed list of composite channels and
/// reports the resulting MSE.
fn optimize_beamformer(
    composites: &[DVector<Complex64>],
    power: f64,
    noise_power: f64,
    settings: &AlterMinSettings,
) -> anyhow::Result<(Beamformer, f64, usize, bool)> {
    // Same normalization as the joint optimizer: order-one objectives keep
    // the absolute thresholds meaningful.
    let scale = composites
        .iter()
        .map(|h| h.norm_squared())
        .fold(0.0f64, f64::max)
        .sqrt();
    if scale <= 0.0 || !scale.is_finite() {
        anyhow::bail!("all composite channels are zero");
    }
    let scaled: Vec<DVector<Complex64>> = composites
        .iter()
        .map(|h| h.map(|z| z / scale))
        .collect();
    let lifted = lift_m_subproblem_for_composites(&scaled);
    let m0 = matched_filter(&scaled)?;
    let out = sca_loop_m(&real_lift(m0.as_complex()), &lifted, settings)
        .map_err(anyhow::Error::new)?;
    let m = Beamformer::from_real_lift(&out.x)
        .and_then(|b| b.normalized())
        .map_err(anyhow::Error::new)?;
    let mse = mse_for_composites(&m, composites, power, noise_power)
        .map_err(anyhow::Error::new)?;
    Ok((m, mse, out.iterations, out.converged))
}

/// Draws unit-modulus phases from the seed (the same draw a jointly
/// optimized run with this seed would start from), keeps them fixed, and
/// optimizes the beamformer alone.
pub fn random_phase_baseline(
    channels: &ChannelRealization,
    power: f64,
    noise_power: f64,
    settings: &AlterMinSettings,
    seed: u64,
) -> anyhow::Result<BaselineOutcome> {
    let mut rng = trial_rng(seed, 0);
    let phases: Vec<f64> = (0..channels.elements())
        .map(|_| rng.random::<f64>() * std::f64::consts::TAU)
        .collect();
    let v = PhaseShiftVector::from_phases(&phases);
    let composites =
        composite_channels(channels, &v).map_err(anyhow::Error::new)?;
    let (beamformer, mse, iterations, converged) =
        optimize_beamformer(&composites, power, noise_power, settings)?;
    Ok(BaselineOutcome {
        beamformer,
        phases: Some(v),
        mse,
        iterations,
        converged,
    })
}

/// Ignores the RIS entirely (zero reflection) and optimizes the beamformer
/// against the direct links.
pub fn no_ris_baseline(
    channels: &ChannelRealization,
    power: f64,
    noise_power: f64,
    settings: &AlterMinSettings,
) -> anyhow::Result<BaselineOutcome> {
    let (beamformer, mse, iterations, converged) =
        optimize_beamformer(&channels.direct, power, noise_power, settings)?;
    Ok(BaselineOutcome {
        beamformer,
        phases: None,
        mse,
        iterations,
        converged,
    })
}
