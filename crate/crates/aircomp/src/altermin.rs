//! Alternating minimization with successive convex approximation.
//!
//! The outer loop alternates between the phase-shift block and the
//! beamformer block of the min-max objective `max_k -|m^H h_k(v)|^2`. Each
//! block is handled by an inner SCA loop: the concave quadratics are
//! replaced by their tangent planes at the current iterate, and the
//! resulting piecewise-linear program is solved by Mirror-Prox
//! ([`crate::saddle`]). Both loops stop when the true objective decrease
//! falls below threshold; the relaxed phase vector is projected back onto
//! the unit-modulus set at the very end.
//!
//! The inner solver returns an eps-accurate (not exact) minimizer, so each
//! SCA step is guarded: an iterate that would increase the true objective
//! beyond a 1e-9 slack triggers a tighter re-solve, and the incumbent is
//! kept if that fails. This preserves the non-increasing objective
//! sequences that the exact-minimizer analysis promises.

use nalgebra::DVector;
use rand::Rng;

use crate::channel::{trial_rng, ChannelRealization};
use crate::error::{Error, Result};
use crate::model::{
    channel_scale, composite_channels, device_energy, lift_m_subproblem, lift_v_subproblem,
    mse_relaxed, scale_channels, Beamformer, LiftedMSubproblem, LiftedVSubproblem,
    PhaseShiftVector, ZERO_PROJECTION_FLOOR,
};
use crate::saddle::{solve_saddle, DomainKind, SaddlePoint, SurrogateData};

/// Accepted objective increase per step; keeps the logged sequences
/// non-increasing up to rounding.
pub const DESCENT_SLACK: f64 = 1e-9;

/// How the iteration is seeded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitStrategy {
    /// Uniform random phases; beamformer matched to the sum of the
    /// resulting composite channels.
    #[default]
    MatchedFilter,
    /// Uniform random phases and a random isotropic beamformer.
    Random,
}

/// Thresholds and iteration caps for the nested loops.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlterMinSettings {
    /// Outer (alternation) stopping threshold on the objective decrease.
    pub eps_outer: f64,
    /// Inner (SCA) stopping threshold on the objective decrease.
    pub eps_inner: f64,
    /// Mirror-Prox stopping threshold on the Bregman step.
    pub eps_saddle: f64,
    pub max_outer: usize,
    pub max_inner: usize,
    pub max_saddle_iter: usize,
    /// Re-solve with tighter `eps_saddle` when a step would increase the
    /// true objective.
    pub descent_safeguard: bool,
    pub init: InitStrategy,
}

impl Default for AlterMinSettings {
    fn default() -> Self {
        Self {
            eps_outer: 1e-5,
            eps_inner: 1e-5,
            eps_saddle: 1e-5,
            max_outer: 100,
            max_inner: 200,
            max_saddle_iter: 100_000,
            descent_safeguard: true,
            init: InitStrategy::MatchedFilter,
        }
    }
}

impl AlterMinSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps_outer > 0.0 && self.eps_inner > 0.0 && self.eps_saddle > 0.0) {
            return Err(Error::InvalidConfig(
                "convergence thresholds must be positive".to_string(),
            ));
        }
        if self.max_outer < 1 || self.max_inner < 1 || self.max_saddle_iter < 1 {
            return Err(Error::InvalidConfig(
                "iteration caps must be at least 1".to_string(),
            ));
        }
        Ok(())
    }
}

/// One outer iteration of the log.
#[derive(Debug, Clone, Copy)]
pub struct OuterRecord {
    pub outer_iter: usize,
    /// Min-max objective `max_k -|m^H h_k(v)|^2` after the iteration.
    pub objective: f64,
    /// MSE at the current (possibly relaxed) iterate.
    pub mse: f64,
    pub inner_iters_v: usize,
    pub inner_iters_m: usize,
    /// Cumulative wall time at the end of the iteration.
    pub elapsed_ms: f64,
}

/// Per-outer-iteration convergence history.
#[derive(Debug, Clone, Default)]
pub struct ConvergenceLog {
    pub rows: Vec<OuterRecord>,
}

impl ConvergenceLog {
    /// True when the objective column is non-increasing within `slack`.
    pub fn objective_is_monotone(&self, slack: f64) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].objective <= w[0].objective + slack)
    }

    /// Writes `outer_iter,objective,mse,inner_iters_v,inner_iters_m,elapsed_ms` rows.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "outer_iter,objective,mse,inner_iters_v,inner_iters_m,elapsed_ms")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                r.outer_iter, r.objective, r.mse, r.inner_iters_v, r.inner_iters_m, r.elapsed_ms
            )?;
        }
        Ok(())
    }
}

/// Tangent-plane surrogate of the phase-shift subproblem at `v_lift`:
/// `p_k = 2 (A~_k v - b_k)`, `q_k = -v^T A~_k v - |c_k|^2`.
pub fn surrogate_v(v_lift: &DVector<f64>, lifted: &LiftedVSubproblem) -> SurrogateData {
    let dim = lifted.dim();
    assert_eq!(v_lift.len(), dim, "expansion point dimension mismatch");
    let devices = lifted.devices();
    let mut p = nalgebra::DMatrix::zeros(devices, dim);
    let mut q = DVector::zeros(devices);
    for k in 0..devices {
        let av = &lifted.a_tilde[k] * v_lift;
        let row = (&av - &lifted.b[k]) * 2.0;
        p.row_mut(k).copy_from(&row.transpose());
        q[k] = -v_lift.dot(&av) - lifted.c_abs2[k];
    }
    SurrogateData::new(p, q, DomainKind::DiskProduct { disks: dim / 2 })
        .expect("surrogate data from a finite lift is valid")
}

/// Tangent-plane surrogate of the beamformer subproblem at `m_lift`:
/// `p_k = 2 H~_k m`, `q_k = -m^T H~_k m`.
pub fn surrogate_m(m_lift: &DVector<f64>, lifted: &LiftedMSubproblem) -> SurrogateData {
    let dim = lifted.dim();
    assert_eq!(m_lift.len(), dim, "expansion point dimension mismatch");
    let devices = lifted.devices();
    let mut p = nalgebra::DMatrix::zeros(devices, dim);
    let mut q = DVector::zeros(devices);
    for k in 0..devices {
        let hm = &lifted.h_tilde[k] * m_lift;
        p.row_mut(k).copy_from(&(&hm * 2.0).transpose());
        q[k] = -m_lift.dot(&hm);
    }
    SurrogateData::new(p, q, DomainKind::UnitBall { dim })
        .expect("surrogate data from a finite lift is valid")
}

/// Result of one SCA loop.
#[derive(Debug, Clone)]
pub struct ScaOutcome {
    pub x: DVector<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// True objective at the returned iterate.
    pub objective: f64,
    /// True objective at the start point and after each iteration.
    pub objective_trace: Vec<f64>,
}

fn sca_loop(
    x0: &DVector<f64>,
    objective: impl Fn(&DVector<f64>) -> f64,
    surrogate: impl Fn(&DVector<f64>) -> SurrogateData,
    settings: &AlterMinSettings,
) -> Result<ScaOutcome> {
    settings.validate()?;
    let probe = surrogate(x0);
    let domain = probe.domain();
    let mut x = domain.project(x0);
    let mut value = objective(&x);
    let mut trace = vec![value];
    let mut iterations = 0;
    let mut converged = false;

    while iterations < settings.max_inner {
        iterations += 1;
        let data = if iterations == 1 { probe.clone() } else { surrogate(&x) };
        let z0 = SaddlePoint::warm(x.clone(), data.devices());

        let mut eps = settings.eps_saddle;
        let mut candidate = solve_saddle(&data, &z0, eps, settings.max_saddle_iter)?.x;
        let mut candidate_value = objective(&candidate);
        if settings.descent_safeguard {
            let mut retries = 0;
            while candidate_value > value + DESCENT_SLACK && retries < 3 {
                eps *= 0.1;
                candidate = solve_saddle(&data, &z0, eps, settings.max_saddle_iter)?.x;
                candidate_value = objective(&candidate);
                retries += 1;
            }
            if candidate_value > value + DESCENT_SLACK {
                // Keep the incumbent; the loop has stalled at solver accuracy.
                converged = true;
                break;
            }
        }

        let decrease = value - candidate_value;
        if candidate_value <= value {
            x = candidate;
            value = candidate_value;
        }
        trace.push(value);
        if decrease < settings.eps_inner {
            converged = true;
            break;
        }
    }

    Ok(ScaOutcome {
        x,
        iterations,
        converged,
        objective: value,
        objective_trace: trace,
    })
}

/// SCA loop for the phase-shift subproblem over the disk product.
pub fn sca_loop_v(
    v_start: &DVector<f64>,
    lifted: &LiftedVSubproblem,
    settings: &AlterMinSettings,
) -> Result<ScaOutcome> {
    sca_loop(
        v_start,
        |x| lifted.objective(x),
        |x| surrogate_v(x, lifted),
        settings,
    )
}

/// SCA loop for the beamformer subproblem over the unit ball.
pub fn sca_loop_m(
    m_start: &DVector<f64>,
    lifted: &LiftedMSubproblem,
    settings: &AlterMinSettings,
) -> Result<ScaOutcome> {
    sca_loop(
        m_start,
        |x| lifted.objective(x),
        |x| surrogate_m(x, lifted),
        settings,
    )
}

/// Scales every pair `(v_i, v_{N+i})` to unit norm; a zero pair maps to
/// phase 0, i.e. the pair `(1, 0)`.
pub fn project_unit_modulus(v_lift: &DVector<f64>) -> PhaseShiftVector {
    assert_eq!(v_lift.len() % 2, 0, "phase lifts have even length");
    let n = v_lift.len() / 2;
    let mut out = DVector::zeros(2 * n);
    for i in 0..n {
        let norm = (v_lift[i].powi(2) + v_lift[n + i].powi(2)).sqrt();
        if norm == 0.0 {
            out[i] = 1.0;
            out[n + i] = 0.0;
        } else {
            out[i] = v_lift[i] / norm;
            out[n + i] = v_lift[n + i] / norm;
        }
    }
    PhaseShiftVector::from_real_lift(&out).expect("even-length lift")
}

/// Joint optimization result.
#[derive(Debug, Clone)]
pub struct AlterMinResult {
    pub beamformer: Beamformer,
    pub phases: PhaseShiftVector,
    /// MSE at the returned (unit-modulus) phases and unit-norm beamformer.
    pub mse: f64,
    /// MSE just before the final unit-modulus projection.
    pub mse_before_projection: f64,
    /// Final min-max objective `max_k -|m^H h_k(v)|^2`.
    pub objective: f64,
    pub converged: bool,
    pub log: ConvergenceLog,
}

/// Min-max objective `max_k -|m^H h_k(v)|^2` at a complex-domain pair.
pub fn minmax_objective(
    m: &Beamformer,
    v: &PhaseShiftVector,
    channels: &ChannelRealization,
) -> Result<f64> {
    let composites = composite_channels(channels, v)?;
    Ok(composites
        .iter()
        .map(|h| -m.as_complex().dotc(h).norm_sqr())
        .fold(f64::NEG_INFINITY, f64::max))
}

fn feasibility_probe(channels: &ChannelRealization) -> Result<()> {
    for k in 0..channels.devices() {
        if device_energy(channels, k) < ZERO_PROJECTION_FLOOR {
            return Err(Error::InfeasibleChannels);
        }
    }
    Ok(())
}

/// Alternating SCA minimization of `max_k -|m^H h_k(v)|^2` over unit-norm
/// `m` and unit-modulus `v`, followed by the final projection of `v`.
///
/// `power` and `noise_power` only scale the reported MSE values; the
/// iterates do not depend on them.
pub fn altermin(
    channels: &ChannelRealization,
    power: f64,
    noise_power: f64,
    settings: &AlterMinSettings,
    seed: u64,
) -> Result<AlterMinResult> {
    settings.validate()?;
    channels.validate()?;
    feasibility_probe(channels)?;
    let start = std::time::Instant::now();
    let (m_dim, n_dim) = (channels.antennas(), channels.elements());
    let mut rng = trial_rng(seed, 0);

    // Optimize on amplitude-normalized channels so the absolute decrease
    // thresholds see order-one objectives; the solution is scale invariant
    // and everything reported refers to the original channels.
    let scale = channel_scale(channels);
    let scaled = scale_channels(channels, 1.0 / scale);
    let scale2 = scale * scale;

    // Uniform random phases; this draw comes first so baselines seeded the
    // same way see the identical phase vector.
    let phases: Vec<f64> = (0..n_dim)
        .map(|_| rng.random::<f64>() * std::f64::consts::TAU)
        .collect();
    let v0 = PhaseShiftVector::from_phases(&phases);

    let m0 = match settings.init {
        InitStrategy::MatchedFilter => {
            let composites = composite_channels(&scaled, &v0)?;
            let mut sum = DVector::zeros(m_dim);
            for h in &composites {
                sum += h;
            }
            match Beamformer::from_complex(sum).normalized() {
                Ok(b) => b,
                Err(Error::ZeroProjection) => random_beamformer(m_dim, &mut rng)?,
                Err(e) => return Err(e),
            }
        }
        InitStrategy::Random => random_beamformer(m_dim, &mut rng)?,
    };

    let mut v_lift = v0.real_lift();
    let mut m_lift = m0.real_lift();
    let mut objective = minmax_objective(&m0, &v0, &scaled)?;
    let mut log = ConvergenceLog::default();
    let mut converged = false;

    for outer in 1..=settings.max_outer {
        let m_cur = Beamformer::from_real_lift(&m_lift)?;
        let lifted_v = lift_v_subproblem(&m_cur, &scaled)?;
        let sv = sca_loop_v(&v_lift, &lifted_v, settings)?;
        v_lift = sv.x;

        let v_cur = PhaseShiftVector::from_real_lift(&v_lift)?;
        let lifted_m = lift_m_subproblem(&v_cur, &scaled)?;
        let sm = sca_loop_m(&m_lift, &lifted_m, settings)?;
        m_lift = sm.x;

        let m_now = Beamformer::from_real_lift(&m_lift)?;
        let new_objective = minmax_objective(&m_now, &v_cur, &scaled)?;
        let mse_now = mse_relaxed(&m_now, &v_cur, channels, power, noise_power)?;
        log.rows.push(OuterRecord {
            outer_iter: outer,
            objective: new_objective * scale2,
            mse: mse_now,
            inner_iters_v: sv.iterations,
            inner_iters_m: sm.iterations,
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        });

        let decrease = objective - new_objective;
        objective = new_objective;
        if decrease < settings.eps_outer {
            converged = true;
            break;
        }
    }

    let m_final = Beamformer::from_real_lift(&m_lift)?.normalized()?;
    let v_relaxed = PhaseShiftVector::from_real_lift(&v_lift)?;
    let mse_before_projection = mse_relaxed(&m_final, &v_relaxed, channels, power, noise_power)?;
    let phases_final = project_unit_modulus(&v_lift);
    let mse = mse_relaxed(&m_final, &phases_final, channels, power, noise_power)?;
    let objective = minmax_objective(&m_final, &phases_final, channels)?;

    Ok(AlterMinResult {
        beamformer: m_final,
        phases: phases_final,
        mse,
        mse_before_projection,
        objective,
        converged,
        log,
    })
}

fn random_beamformer<R: Rng + ?Sized>(m_dim: usize, rng: &mut R) -> Result<Beamformer> {
    use rand_distr::StandardNormal;
    let raw = DVector::from_fn(m_dim, |_, _| {
        num_complex::Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    Beamformer::from_complex(raw).normalized()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{generate_scenario, SystemConfig};
    use nalgebra::{dvector, DMatrix};

    fn small_scenario(seed: u64) -> ChannelRealization {
        generate_scenario(&SystemConfig::default_scenario(3, 2, 4), seed).unwrap()
    }

    #[test]
    fn surrogate_v_hand_computed_case() {
        // A~ = -I, b = 0, c = 0 at expansion point e1: p = -2 e1, q = 1.
        let lifted = LiftedVSubproblem {
            a_tilde: vec![-DMatrix::identity(2, 2)],
            b: vec![DVector::zeros(2)],
            c_abs2: vec![0.0],
        };
        let x = dvector![1.0, 0.0];
        let data = surrogate_v(&x, &lifted);
        assert_eq!(data.p().row(0).transpose(), dvector![-2.0, 0.0]);
        assert_eq!(data.q()[0], 1.0);
        // Surrogate touches the true value -1 at the expansion point.
        assert!((data.primal_value(&x) - (-1.0)).abs() < 1e-15);
        assert!((lifted.objective(&x) - (-1.0)).abs() < 1e-15);
    }

    #[test]
    fn surrogate_m_zero_lift_is_constant() {
        let lifted = LiftedMSubproblem {
            h_tilde: vec![DMatrix::zeros(4, 4)],
        };
        let x = dvector![0.5, 0.0, 0.0, 0.0];
        let data = surrogate_m(&x, &lifted);
        assert_eq!(data.p().row(0).transpose(), DVector::zeros(4));
        assert_eq!(data.q()[0], 0.0);
    }

    #[test]
    fn sca_v_stationary_point_stops_in_one_iteration() {
        // With A~ = 0 the surrogate is constant: nothing can decrease.
        let lifted = LiftedVSubproblem {
            a_tilde: vec![DMatrix::zeros(4, 4)],
            b: vec![DVector::zeros(4)],
            c_abs2: vec![2.0],
        };
        let out = sca_loop_v(
            &dvector![0.5, 0.0, 0.5, 0.0],
            &lifted,
            &AlterMinSettings::default(),
        )
        .unwrap();
        assert_eq!(out.iterations, 1);
        assert!(out.converged);
    }

    #[test]
    fn sca_loops_are_descending() {
        let ch = small_scenario(5);
        let m = Beamformer::from_complex(DVector::from_fn(2, |i, _| {
            num_complex::Complex64::new(1.0, i as f64)
        }))
        .normalized()
        .unwrap();
        let lifted = lift_v_subproblem(&m, &ch).unwrap();
        let v0 = PhaseShiftVector::from_phases(&[0.0, 1.0, 2.0, 3.0]).real_lift();
        let out = sca_loop_v(&v0, &lifted, &AlterMinSettings::default()).unwrap();
        for w in out.objective_trace.windows(2) {
            assert!(w[1] <= w[0] + DESCENT_SLACK);
        }
        assert!(out.objective <= out.objective_trace[0] + DESCENT_SLACK);
    }

    #[test]
    fn sca_m_single_device_reaches_matched_filter_power() {
        let ch = small_scenario(8);
        let v = PhaseShiftVector::from_phases(&[0.4, -0.3, 1.0, 2.0]);
        let composites = composite_channels(&ch, &v).unwrap();
        let lifted = crate::model::lift_m_subproblem_for_composites(&composites[..1]);
        let settings = AlterMinSettings {
            eps_inner: 1e-12,
            eps_saddle: 1e-12,
            ..AlterMinSettings::default()
        };
        let m0 = dvector![1.0, 0.0, 0.0, 0.0];
        let out = sca_loop_m(&m0, &lifted, &settings).unwrap();
        // Best value is -(largest |eigenvalue| of the lift) = -||h1||^2.
        let want = -composites[0].norm_squared();
        assert!(
            (out.objective - want).abs() <= 1e-4 * want.abs(),
            "objective {} vs eigen value {}",
            out.objective,
            want
        );
        assert!((out.x.norm() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn unit_modulus_projection_cases() {
        let v = project_unit_modulus(&dvector![0.6, 3.0, 0.8, 4.0]);
        let lift = v.real_lift();
        assert!((lift[0] - 0.6).abs() < 1e-15 && (lift[2] - 0.8).abs() < 1e-15);
        assert!((lift[1] - 0.6).abs() < 1e-15 && (lift[3] - 0.8).abs() < 1e-15);
        let zero = project_unit_modulus(&dvector![0.0, 0.0]);
        assert_eq!(zero.real_lift(), dvector![1.0, 0.0]);
    }

    #[test]
    fn altermin_descends_and_projects() {
        let ch = small_scenario(21);
        let settings = AlterMinSettings::default();
        let out = altermin(&ch, 1.0, 1e-12, &settings, 3).unwrap();
        assert!(out.log.objective_is_monotone(DESCENT_SLACK));
        assert!(out.phases.is_unit_modulus(1e-12));
        assert!((out.beamformer.norm() - 1.0).abs() < 1e-12);
        assert!(out.converged);
        // Descent from the very first logged iterate.
        let first = out.log.rows.first().unwrap().objective;
        let last = out.log.rows.last().unwrap().objective;
        assert!(last <= first + DESCENT_SLACK);
    }

    #[test]
    fn altermin_is_deterministic() {
        let ch = small_scenario(33);
        let settings = AlterMinSettings::default();
        let a = altermin(&ch, 1.0, 1e-12, &settings, 7).unwrap();
        let b = altermin(&ch, 1.0, 1e-12, &settings, 7).unwrap();
        assert_eq!(a.mse, b.mse);
        assert_eq!(a.phases, b.phases);
        assert_eq!(a.beamformer, b.beamformer);
    }

    #[test]
    fn altermin_rejects_dead_channels() {
        let ch = ChannelRealization {
            direct: vec![DVector::zeros(2)],
            ris_to_ap: DMatrix::zeros(2, 3),
            reflect: vec![DVector::zeros(3)],
        };
        assert!(matches!(
            altermin(&ch, 1.0, 1e-12, &AlterMinSettings::default(), 0),
            Err(Error::InfeasibleChannels)
        ));
    }

    #[test]
    fn settings_validation() {
        let mut s = AlterMinSettings::default();
        s.eps_outer = 0.0;
        assert!(s.validate().is_err());
        let mut s = AlterMinSettings::default();
        s.max_inner = 0;
        assert!(s.validate().is_err());
    }
}
