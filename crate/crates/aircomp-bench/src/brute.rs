//! Exhaustive search oracle for tiny networks.
//!
//! Every RIS element phase runs over a uniform grid; for each candidate
//! phase vector the beamformer maximizing the worst-device projection is
//! found by sampling the unit sphere (exact for a single antenna, a
//! two-parameter grid plus local zoom for two antennas). Intended purely as
//! an independent check of the iterative optimizer at sizes where
//! exhaustive search is affordable.

use anyhow::bail;
use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;

use aircomp::channel::ChannelRealization;
use aircomp::model::{composite_channels, Beamformer, PhaseShiftVector};

pub const MAX_ELEMENTS: usize = 3;
pub const MAX_ANTENNAS: usize = 2;
pub const MAX_DEVICES: usize = 3;
/// Largest `K * M * N` the brute-force method accepts.
pub const BRUTE_FORCE_CAP: usize = MAX_ELEMENTS * MAX_ANTENNAS * MAX_DEVICES;

/// Result of the exhaustive search.
#[derive(Debug, Clone)]
pub struct BruteForceResult {
    pub beamformer: Beamformer,
    pub phases: PhaseShiftVector,
    pub mse: f64,
    /// Worst-device projection `min_k |m^H h_k|^2` at the optimum.
    pub worst_projection: f64,
}

/// Candidate beamformers for two antennas: `(cos a, sin a e^{j phi})` on an
/// `(a, phi)` grid. A global phase never changes any `|m^H h|`.
struct BeamGrid {
    candidates: Vec<[Complex64; 2]>,
}

impl BeamGrid {
    fn uniform(beam_samples: usize) -> Self {
        let alphas = (beam_samples / 4).max(3);
        let phis = beam_samples.max(4);
        let mut candidates = Vec::with_capacity(alphas * phis);
        for a in 0..alphas {
            let alpha = std::f64::consts::FRAC_PI_2 * a as f64 / (alphas - 1) as f64;
            let (s, c) = alpha.sin_cos();
            for p in 0..phis {
                let phi = std::f64::consts::TAU * p as f64 / phis as f64;
                candidates.push([Complex64::new(c, 0.0), Complex64::from_polar(s, phi)]);
            }
        }
        Self { candidates }
    }

    fn refined(center_alpha: f64, center_phi: f64, half_width: f64, steps: usize) -> Self {
        let mut candidates = Vec::with_capacity((2 * steps + 1).pow(2));
        for a in 0..=2 * steps {
            let alpha = (center_alpha + half_width * (a as f64 / steps as f64 - 1.0))
                .clamp(0.0, std::f64::consts::FRAC_PI_2);
            let (s, c) = alpha.sin_cos();
            for p in 0..=2 * steps {
                let phi = center_phi + half_width * 4.0 * (p as f64 / steps as f64 - 1.0);
                candidates.push([Complex64::new(c, 0.0), Complex64::from_polar(s, phi)]);
            }
        }
        Self { candidates }
    }

    /// `max_m min_k |m^H h_k|^2` over the candidates.
    fn best_worst_projection(&self, composites: &[DVector<Complex64>]) -> (f64, usize) {
        let mut best = f64::NEG_INFINITY;
        let mut best_idx = 0;
        for (idx, m) in self.candidates.iter().enumerate() {
            let mut worst = f64::INFINITY;
            for h in composites {
                let proj = (m[0].conj() * h[0] + m[1].conj() * h[1]).norm_sqr();
                if proj < worst {
                    worst = proj;
                }
            }
            if worst > best {
                best = worst;
                best_idx = idx;
            }
        }
        (best, best_idx)
    }
}

/// Coarse sweep plus local zoom around its winner. A pure function of the
/// composites and `beam_samples`, so every phase candidate is ranked by the
/// same rule and refining the phase grid can only improve the optimum.
fn refined_beam_search(
    composites: &[DVector<Complex64>],
    beam: &BeamGrid,
    beam_samples: usize,
) -> (f64, [Complex64; 2]) {
    let (mut best_val, coarse_idx) = beam.best_worst_projection(composites);
    let alphas = (beam_samples / 4).max(3);
    let phis = beam_samples.max(4);
    let mut alpha = std::f64::consts::FRAC_PI_2 * (coarse_idx / phis) as f64 / (alphas - 1) as f64;
    let mut phi = std::f64::consts::TAU * (coarse_idx % phis) as f64 / phis as f64;
    let mut best_m = beam.candidates[coarse_idx];
    let mut width = std::f64::consts::FRAC_PI_2 / (alphas - 1) as f64;
    for _ in 0..4 {
        let refined = BeamGrid::refined(alpha, phi, width, 8);
        let (val, idx) = refined.best_worst_projection(composites);
        if val > best_val {
            best_val = val;
            best_m = refined.candidates[idx];
            alpha = best_m[0].re.acos();
            phi = best_m[1].arg();
        }
        width /= 4.0;
    }
    (best_val, best_m)
}

fn decode_phases(index: usize, elements: usize, grid: usize) -> Vec<f64> {
    let mut rest = index;
    (0..elements)
        .map(|_| {
            let digit = rest % grid;
            rest /= grid;
            std::f64::consts::TAU * digit as f64 / grid as f64
        })
        .collect()
}

/// Worst-device projection for one phase candidate.
fn evaluate(
    channels: &ChannelRealization,
    beam: &BeamGrid,
    phases: &[f64],
) -> anyhow::Result<f64> {
    let v = PhaseShiftVector::from_phases(phases);
    let composites =
        composite_channels(channels, &v).map_err(anyhow::Error::new)?;
    Ok(if channels.antennas() == 1 {
        // |m| = 1 makes |m^H h|^2 = |h|^2: the beamformer is irrelevant.
        composites
            .iter()
            .map(|h| h[0].norm_sqr())
            .fold(f64::INFINITY, f64::min)
    } else {
        beam.best_worst_projection(&composites).0
    })
}

/// Exhaustive grid search over per-element phases (`phase_grid_size` points
/// each). Accepts only networks with `N <= 3`, `M <= 2`, `K <= 3`.
pub fn brute_force_small(
    channels: &ChannelRealization,
    power: f64,
    noise_power: f64,
    phase_grid_size: usize,
    beam_samples: usize,
) -> anyhow::Result<BruteForceResult> {
    let (k, m, n) = (channels.devices(), channels.antennas(), channels.elements());
    if n > MAX_ELEMENTS || m > MAX_ANTENNAS || k > MAX_DEVICES {
        bail!("brute force accepts N <= {MAX_ELEMENTS}, M <= {MAX_ANTENNAS}, K <= {MAX_DEVICES}; got N={n}, M={m}, K={k}");
    }
    if phase_grid_size < 1 {
        bail!("phase grid must have at least one point");
    }
    let beam = BeamGrid::uniform(beam_samples);
    let total = phase_grid_size.pow(n as u32);

    // Deterministic parallel max: ties resolve to the smallest index.
    let (_, best_idx) = (0..total)
        .into_par_iter()
        .map(|idx| {
            let phases = decode_phases(idx, n, phase_grid_size);
            let val = evaluate(channels, &beam, &phases).expect("validated dimensions");
            (val, idx)
        })
        .reduce(
            || (f64::NEG_INFINITY, usize::MAX),
            |a, b| {
                if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            },
        );

    let phases = decode_phases(best_idx, n, phase_grid_size);
    let v = PhaseShiftVector::from_phases(&phases);
    let composites =
        composite_channels(channels, &v).map_err(anyhow::Error::new)?;

    let (worst_projection, beamformer) = if m == 1 {
        let worst = composites
            .iter()
            .map(|h| h[0].norm_sqr())
            .fold(f64::INFINITY, f64::min);
        (
            worst,
            Beamformer::from_complex(DVector::from_element(1, Complex64::new(1.0, 0.0))),
        )
    } else {
        // Zoom the beam grid around the coarse winner for the final value.
        let (mut best_val, coarse_idx) = beam.best_worst_projection(&composites);
        let alphas = (beam_samples / 4).max(3);
        let phis = beam_samples.max(4);
        let mut alpha =
            std::f64::consts::FRAC_PI_2 * (coarse_idx / phis) as f64 / (alphas - 1) as f64;
        let mut phi = std::f64::consts::TAU * (coarse_idx % phis) as f64 / phis as f64;
        let mut best_m = beam.candidates[coarse_idx];
        let mut width = std::f64::consts::FRAC_PI_2 / (alphas - 1) as f64;
        for _ in 0..4 {
            let refined = BeamGrid::refined(alpha, phi, width, 8);
            let (val, idx) = refined.best_worst_projection(&composites);
            if val > best_val {
                best_val = val;
                best_m = refined.candidates[idx];
                alpha = best_m[0].re.acos();
                phi = best_m[1].arg();
            }
            width /= 4.0;
        }
        (
            best_val,
            Beamformer::from_complex(DVector::from_column_slice(&best_m)),
        )
    };

    if worst_projection <= 0.0 {
        bail!("no candidate served every device");
    }
    Ok(BruteForceResult {
        beamformer,
        phases: v,
        mse: noise_power / (power * worst_projection),
        worst_projection,
    })
}
