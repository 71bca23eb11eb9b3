//! Cross-checks of the complex-domain model against naive re-evaluation:
//! every lifted quantity is compared with a direct loop over complex
//! entries that never touches the lifting code.

use aircomp::channel::{generate_scenario, ChannelRealization, SystemConfig};
use aircomp::model::{
    composite_channel, denoising_factor, lift_m_subproblem, lift_v_subproblem, mse,
    transmit_scalars, Beamformer, PhaseShiftVector,
};
use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_complex_vec(rng: &mut ChaCha8Rng, len: usize) -> DVector<Complex64> {
    DVector::from_fn(len, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

fn random_unit_phases(rng: &mut ChaCha8Rng, len: usize) -> PhaseShiftVector {
    let phases: Vec<f64> = (0..len)
        .map(|_| rng.random::<f64>() * std::f64::consts::TAU)
        .collect();
    PhaseShiftVector::from_phases(&phases)
}

fn scenario(rng: &mut ChaCha8Rng) -> ChannelRealization {
    let devices = 1 + (rng.random::<u64>() % 4) as usize;
    let antennas = 1 + (rng.random::<u64>() % 4) as usize;
    let elements = 1 + (rng.random::<u64>() % 6) as usize;
    let config = SystemConfig::default_scenario(devices, antennas, elements);
    generate_scenario(&config, rng.random()).unwrap()
}

fn assert_close(a: f64, b: f64, rel: f64) {
    let scale = a.abs().max(b.abs()).max(1e-300);
    assert!(
        (a - b).abs() <= rel * scale,
        "{a} vs {b} (relative error {})",
        (a - b).abs() / scale
    );
}

/// Elementwise triple loop for `m^H (h_d + G diag(h_r) v)`.
fn naive_projection(
    channels: &ChannelRealization,
    device: usize,
    m: &DVector<Complex64>,
    v: &DVector<Complex64>,
) -> Complex64 {
    let mut total = Complex64::new(0.0, 0.0);
    for i in 0..channels.antennas() {
        let mut entry = channels.direct[device][i];
        for j in 0..channels.elements() {
            entry += channels.ris_to_ap[(i, j)] * channels.reflect[device][j] * v[j];
        }
        total += m[i].conj() * entry;
    }
    total
}

#[test]
fn composite_channel_matches_triple_loop() {
    let mut rng = rng(100);
    for _ in 0..20 {
        let ch = scenario(&mut rng);
        let v = random_unit_phases(&mut rng, ch.elements());
        let m = random_complex_vec(&mut rng, ch.antennas());
        let composite = composite_channel(&ch, 0, &v).unwrap();
        let via_lib: Complex64 = m.dotc(&composite);
        let via_loop = naive_projection(&ch, 0, &m, v.as_complex());
        assert!((via_lib - via_loop).norm() <= 1e-10 * via_loop.norm().max(1e-300));
    }
}

#[test]
fn lift_v_quadratic_equals_complex_objective() {
    let mut rng = rng(200);
    for _ in 0..100 {
        let ch = scenario(&mut rng);
        let m = Beamformer::from_complex(random_complex_vec(&mut rng, ch.antennas()));
        let lifted = lift_v_subproblem(&m, &ch).unwrap();
        let v_lift = DVector::from_fn(2 * ch.elements(), |_, _| rng.random::<f64>() * 2.0 - 1.0);
        let v = PhaseShiftVector::from_real_lift(&v_lift).unwrap();
        for k in 0..ch.devices() {
            let quad = lifted.objective_term(k, &v_lift);
            let s = naive_projection(&ch, k, m.as_complex(), v.as_complex());
            assert_close(quad, -s.norm_sqr(), 1e-10);
        }
    }
}

#[test]
fn lift_m_quadratic_equals_complex_objective() {
    let mut rng = rng(300);
    for _ in 0..100 {
        let ch = scenario(&mut rng);
        let v = random_unit_phases(&mut rng, ch.elements());
        let lifted = lift_m_subproblem(&v, &ch).unwrap();
        let m_lift = DVector::from_fn(2 * ch.antennas(), |_, _| rng.random::<f64>() * 2.0 - 1.0);
        let m = Beamformer::from_real_lift(&m_lift).unwrap();
        for k in 0..ch.devices() {
            let quad = lifted.objective_term(k, &m_lift);
            let s = naive_projection(&ch, k, m.as_complex(), v.as_complex());
            assert_close(quad, -s.norm_sqr(), 1e-10);
        }
    }
}

#[test]
fn mse_matches_term_by_term_evaluation() {
    let mut rng = rng(400);
    for _ in 0..20 {
        let ch = scenario(&mut rng);
        let v = random_unit_phases(&mut rng, ch.elements());
        let m = Beamformer::from_complex(random_complex_vec(&mut rng, ch.antennas()));
        let p = 0.5 + rng.random::<f64>();
        let sigma2 = 1e-12 * (0.5 + rng.random::<f64>());
        let got = mse(&m, &v, &ch, p, sigma2).unwrap();

        let mut min_proj = f64::INFINITY;
        for k in 0..ch.devices() {
            min_proj = min_proj.min(naive_projection(&ch, k, m.as_complex(), v.as_complex()).norm_sqr());
        }
        let want = sigma2 * m.as_complex().norm_squared() / (p * min_proj);
        assert_close(got, want, 1e-10);
    }
}

#[test]
fn denoising_factor_matches_loop_minimum() {
    let mut rng = rng(500);
    for _ in 0..20 {
        let ch = scenario(&mut rng);
        let v = random_unit_phases(&mut rng, ch.elements());
        let m = Beamformer::from_complex(random_complex_vec(&mut rng, ch.antennas()));
        let p = 2.0;
        let got = denoising_factor(&m, &v, &ch, p).unwrap();
        let want = p * (0..ch.devices())
            .map(|k| naive_projection(&ch, k, m.as_complex(), v.as_complex()).norm_sqr())
            .fold(f64::INFINITY, f64::min);
        assert_close(got, want, 1e-10);
    }
}

/// The closed-form MSE equals the full distortion expression evaluated with
/// the zero-forcing scalars: the misalignment term vanishes.
#[test]
fn closed_form_mse_equals_full_expression_with_zero_forcing() {
    let mut rng = rng(600);
    for _ in 0..20 {
        let ch = scenario(&mut rng);
        let v = random_unit_phases(&mut rng, ch.elements());
        let m = Beamformer::from_complex(random_complex_vec(&mut rng, ch.antennas()));
        let p = 1.0;
        let sigma2 = 1e-11;

        let eta = denoising_factor(&m, &v, &ch, p).unwrap();
        let w = transmit_scalars(&m, &v, &ch, eta).unwrap();
        let mut full = sigma2 * m.as_complex().norm_squared() / eta;
        for k in 0..ch.devices() {
            let gain = naive_projection(&ch, k, m.as_complex(), v.as_complex()) * w[k]
                / Complex64::new(eta.sqrt(), 0.0);
            full += (gain - Complex64::new(1.0, 0.0)).norm_sqr();
        }
        let closed = mse(&m, &v, &ch, p, sigma2).unwrap();
        assert_close(closed, full, 1e-10);
    }
}
