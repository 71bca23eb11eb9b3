//! Mirror-Prox solver for piecewise-linear min-max programs.
//!
//! Each SCA iteration produces a problem `min_x max_k (p_k^T x + q_k)` over
//! a compact convex domain (the disk product relaxing unit-modulus phases,
//! or the unit ball holding the beamformer lift). Dualizing the max turns it
//! into the bilinear saddle problem `min_x max_{y in simplex} y^T (P x + q)`
//! whose optimality condition is a variational inequality with the monotone
//! operator `F(z) = [P^T y; -(P x + q)]`, Lipschitz with constant
//! `L = max_k ||p_k||`.
//!
//! The solver runs the extragradient (Mirror-Prox) iteration with step
//! `gamma = 1/(2L)` under the mixed geometry: Euclidean on the primal block,
//! entropy on the dual simplex. Every update is closed form: a Euclidean
//! shift and projection for `x`, a multiplicative update and an l1
//! normalization for `y`.
//!
//! A projected-subgradient solver for the same primal problem is included
//! as an independent cross-check.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Feasible set of the primal block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainKind {
    /// Product of `disks` unit disks: pairs `(x_i, x_{disks+i})` each with
    /// norm at most 1. Dimension `2 * disks`.
    DiskProduct { disks: usize },
    /// Euclidean unit ball of the given dimension.
    UnitBall { dim: usize },
}

impl DomainKind {
    pub fn dim(&self) -> usize {
        match *self {
            DomainKind::DiskProduct { disks } => 2 * disks,
            DomainKind::UnitBall { dim } => dim,
        }
    }

    /// Radius of the smallest origin-centered ball containing the domain.
    pub fn radius(&self) -> f64 {
        match *self {
            DomainKind::DiskProduct { disks } => (disks as f64).sqrt(),
            DomainKind::UnitBall { .. } => 1.0,
        }
    }

    /// Euclidean projection onto the domain.
    pub fn project(&self, u: &DVector<f64>) -> DVector<f64> {
        match *self {
            DomainKind::DiskProduct { .. } => project_disks(u),
            DomainKind::UnitBall { .. } => project_ball(u),
        }
    }

    /// Whether `x` is feasible within `tol`.
    pub fn contains(&self, x: &DVector<f64>, tol: f64) -> bool {
        match *self {
            DomainKind::DiskProduct { disks } => {
                x.len() == 2 * disks
                    && (0..disks).all(|i| {
                        (x[i].powi(2) + x[disks + i].powi(2)).sqrt() <= 1.0 + tol
                    })
            }
            DomainKind::UnitBall { dim } => x.len() == dim && x.norm() <= 1.0 + tol,
        }
    }

    /// `min_{x in domain} g^T x`, closed form for both domain kinds.
    pub fn support_min(&self, g: &DVector<f64>) -> f64 {
        match *self {
            DomainKind::DiskProduct { disks } => {
                debug_assert_eq!(g.len(), 2 * disks);
                -(0..disks)
                    .map(|i| (g[i].powi(2) + g[disks + i].powi(2)).sqrt())
                    .sum::<f64>()
            }
            DomainKind::UnitBall { .. } => -g.norm(),
        }
    }
}

/// One linearized min-max instance: rows `p_k` and offsets `q_k`.
#[derive(Debug, Clone)]
pub struct SurrogateData {
    p: DMatrix<f64>,
    q: DVector<f64>,
    domain: DomainKind,
}

impl SurrogateData {
    pub fn new(p: DMatrix<f64>, q: DVector<f64>, domain: DomainKind) -> Result<Self> {
        if p.nrows() != q.len() {
            return Err(Error::DimensionMismatch(format!(
                "P has {} rows but q has {} entries",
                p.nrows(),
                q.len()
            )));
        }
        if p.ncols() != domain.dim() {
            return Err(Error::DimensionMismatch(format!(
                "P has {} columns but the domain has dimension {}",
                p.ncols(),
                domain.dim()
            )));
        }
        if p.nrows() == 0 {
            return Err(Error::DimensionMismatch("P must have at least one row".into()));
        }
        if !p.iter().chain(q.iter()).all(|v| v.is_finite()) {
            return Err(Error::InvalidConfig(
                "surrogate data contains non-finite entries".to_string(),
            ));
        }
        Ok(Self { p, q, domain })
    }

    pub fn devices(&self) -> usize {
        self.p.nrows()
    }

    pub fn dim(&self) -> usize {
        self.p.ncols()
    }

    pub fn domain(&self) -> DomainKind {
        self.domain
    }

    pub fn p(&self) -> &DMatrix<f64> {
        &self.p
    }

    pub fn q(&self) -> &DVector<f64> {
        &self.q
    }

    /// Primal objective `max_k (p_k^T x + q_k)`.
    pub fn primal_value(&self, x: &DVector<f64>) -> f64 {
        let vals = &self.p * x + &self.q;
        vals.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Index attaining the primal max (first on ties).
    pub fn argmax_device(&self, x: &DVector<f64>) -> usize {
        let vals = &self.p * x + &self.q;
        let mut best = 0;
        for k in 1..vals.len() {
            if vals[k] > vals[best] {
                best = k;
            }
        }
        best
    }

    /// Dual objective `q^T y + min_{x in domain} (P^T y)^T x`.
    pub fn dual_value(&self, y: &DVector<f64>) -> f64 {
        self.q.dot(y) + self.domain.support_min(&self.p.tr_mul(y))
    }

    /// Nonnegative duality gap of a primal-dual pair.
    pub fn gap(&self, z: &SaddlePoint) -> f64 {
        self.primal_value(&z.x) - self.dual_value(&z.y)
    }
}

/// Joint primal-dual iterate `z = (x, y)` with `y` on the simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct SaddlePoint {
    pub x: DVector<f64>,
    pub y: DVector<f64>,
}

impl SaddlePoint {
    /// Warm start: given primal point, uniform dual weights.
    pub fn warm(x: DVector<f64>, devices: usize) -> Self {
        Self {
            x,
            y: DVector::from_element(devices, 1.0 / devices as f64),
        }
    }

    /// Largest violation of the domain, nonnegativity, and unit-sum
    /// constraints.
    pub fn feasibility_error(&self, domain: DomainKind) -> f64 {
        let mut err: f64 = 0.0;
        match domain {
            DomainKind::DiskProduct { disks } => {
                for i in 0..disks {
                    let norm = (self.x[i].powi(2) + self.x[disks + i].powi(2)).sqrt();
                    err = err.max(norm - 1.0);
                }
            }
            DomainKind::UnitBall { .. } => err = err.max(self.x.norm() - 1.0),
        }
        for &yk in self.y.iter() {
            err = err.max(-yk);
        }
        err.max((self.y.sum() - 1.0).abs())
    }
}

/// The variational-inequality operator `F(z) = [P^T y; -(P x + q)]`.
pub fn vi_operator(z: &SaddlePoint, data: &SurrogateData) -> DVector<f64> {
    assert_eq!(z.x.len(), data.dim(), "primal block dimension mismatch");
    assert_eq!(z.y.len(), data.devices(), "dual block dimension mismatch");
    let top = data.p.tr_mul(&z.y);
    let bottom = -(&data.p * &z.x + &data.q);
    let mut out = DVector::zeros(data.dim() + data.devices());
    out.rows_mut(0, data.dim()).copy_from(&top);
    out.rows_mut(data.dim(), data.devices()).copy_from(&bottom);
    out
}

/// Lipschitz constant `L = max_k ||p_k||` of the operator.
pub fn lipschitz_const(data: &SurrogateData) -> f64 {
    (0..data.devices())
        .map(|k| data.p.row(k).norm())
        .fold(0.0, f64::max)
}

/// Mirror-Prox step size `1 / (2L)`.
pub fn step_size(lipschitz: f64) -> f64 {
    1.0 / (2.0 * lipschitz)
}

/// Bregman distance `D(z, z_ref)` of the mixed Euclidean/entropy mirror map:
/// `0.5 ||x - x_ref||^2 + sum_k y_k log(y_k / yref_k) - sum_k (y_k - yref_k)`
/// with the `0 log 0 = 0` convention.
pub fn bregman(z: &SaddlePoint, z_ref: &SaddlePoint) -> Result<f64> {
    assert_eq!(z.x.len(), z_ref.x.len(), "primal dimension mismatch");
    assert_eq!(z.y.len(), z_ref.y.len(), "dual dimension mismatch");
    let mut total = 0.5 * (&z.x - &z_ref.x).norm_squared();
    for (&yk, &rk) in z.y.iter().zip(z_ref.y.iter()) {
        if yk > 0.0 {
            if rk <= 0.0 {
                return Err(Error::BregmanDomain);
            }
            total += yk * (yk / rk).ln();
        }
        total -= yk - rk;
    }
    // Rounding can leave a tiny negative residue on coincident points.
    Ok(total.max(0.0))
}

/// Projects each disk pair `(u_i, u_{disks+i})` onto the unit disk; pairs
/// are rescaled jointly, interior pairs are untouched.
pub fn project_disks(u: &DVector<f64>) -> DVector<f64> {
    assert_eq!(u.len() % 2, 0, "disk product vectors have even length");
    let disks = u.len() / 2;
    let mut out = u.clone();
    for i in 0..disks {
        let norm = (u[i].powi(2) + u[disks + i].powi(2)).sqrt();
        if norm > 1.0 {
            out[i] /= norm;
            out[disks + i] /= norm;
        }
    }
    out
}

/// Euclidean projection onto the unit ball: `u / max(1, ||u||)`.
pub fn project_ball(u: &DVector<f64>) -> DVector<f64> {
    let norm = u.norm();
    if norm > 1.0 {
        u / norm
    } else {
        u.clone()
    }
}

/// Bregman (entropy) projection of a positive vector onto the simplex:
/// `e` itself when it already sums to one, otherwise `e / ||e||_1`.
pub fn project_simplex(e: &DVector<f64>) -> Result<DVector<f64>> {
    for &v in e.iter() {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::NonPositiveSimplexEntry { value: v });
        }
    }
    let sum: f64 = e.sum();
    Ok(e / sum)
}

/// One mirror step from `z` against `direction`: the primal block moves
/// Euclidean and is projected onto the domain; the dual block is updated
/// multiplicatively in log space (with a max shift, which the simplex
/// normalization cancels exactly) and renormalized.
pub fn mirror_step(
    z: &SaddlePoint,
    direction: &DVector<f64>,
    gamma: f64,
    domain: DomainKind,
) -> Result<SaddlePoint> {
    let dim = domain.dim();
    let devices = z.y.len();
    assert_eq!(z.x.len(), dim, "primal block dimension mismatch");
    assert_eq!(
        direction.len(),
        dim + devices,
        "direction must cover both blocks"
    );
    for &yk in z.y.iter() {
        if !(yk > 0.0) {
            return Err(Error::NonPositiveSimplexEntry { value: yk });
        }
    }

    let shifted = DVector::from_fn(dim, |i, _| z.x[i] - gamma * direction[i]);
    let x = domain.project(&shifted);
    if !x.iter().all(|v| v.is_finite()) {
        return Err(Error::StepFailure);
    }

    let mut logs = DVector::from_fn(devices, |k, _| z.y[k].ln() - gamma * direction[dim + k]);
    let max_log = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max_log.is_finite() {
        return Err(Error::StepFailure);
    }
    // The max shift bounds every exponent by zero; weights of strongly
    // dominated devices can still underflow, so floor them at the smallest
    // normal float to keep the simplex iterate strictly positive.
    logs.apply(|v| *v = (*v - max_log).exp().max(f64::MIN_POSITIVE));
    let y = project_simplex(&logs)?;
    if !y.iter().all(|v| v.is_finite()) {
        return Err(Error::StepFailure);
    }
    Ok(SaddlePoint { x, y })
}

/// Per-iteration trace record.
#[derive(Debug, Clone, Copy)]
pub struct TraceRow {
    pub iteration: usize,
    pub primal_value: f64,
    pub bregman_step: f64,
}

/// Iteration statistics of one solve.
#[derive(Debug, Clone, Default)]
pub struct SolveLog {
    pub iterations: usize,
    pub converged: bool,
    /// Bregman distance between the last pair of iterates.
    pub final_step: f64,
    /// Present only when tracing was requested.
    pub trace: Vec<TraceRow>,
}

impl SolveLog {
    /// Writes the trace as CSV rows (`iteration,primal_value,bregman_step`).
    pub fn write_trace_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "iteration,primal_value,bregman_step")?;
        for row in &self.trace {
            writeln!(w, "{},{},{}", row.iteration, row.primal_value, row.bregman_step)?;
        }
        Ok(())
    }
}

/// Solver output: the primal solution, the averaged and final iterates, and
/// the iteration log.
#[derive(Debug, Clone)]
pub struct SaddleSolution {
    /// Primal solution (the better of the averaged and final iterates).
    pub x: DVector<f64>,
    /// Tail-averaged iterate; carries the dual certificate for gap checks.
    pub z_avg: SaddlePoint,
    /// Final iterate.
    pub z_last: SaddlePoint,
    pub log: SolveLog,
}

fn step_with_retry(
    z: &SaddlePoint,
    direction: &DVector<f64>,
    gamma: &mut f64,
    domain: DomainKind,
) -> Result<SaddlePoint> {
    for _ in 0..64 {
        match mirror_step(z, direction, *gamma, domain) {
            Ok(next) => return Ok(next),
            Err(Error::StepFailure) => *gamma *= 0.5,
            Err(e) => return Err(e),
        }
    }
    Err(Error::StepFailure)
}

/// Runs Mirror-Prox until the Bregman distance between consecutive iterates
/// drops below `eps` and every iterate in the current averaging window
/// carries a duality gap of at most `10 * eps` (or until `max_iter`; the
/// result is then flagged as non-converged). The second condition costs
/// nothing extra — the gap at the running iterate reuses the operator
/// values — and guarantees, by convexity of the gap, that the returned
/// average satisfies the same bound.
///
/// The warm start's primal block is projected onto the domain; its dual
/// block must be strictly positive.
pub fn solve_saddle(
    data: &SurrogateData,
    z0: &SaddlePoint,
    eps: f64,
    max_iter: usize,
) -> Result<SaddleSolution> {
    solve_saddle_traced(data, z0, eps, max_iter, false)
}

/// As [`solve_saddle`], optionally recording a per-iteration trace.
pub fn solve_saddle_traced(
    data: &SurrogateData,
    z0: &SaddlePoint,
    eps: f64,
    max_iter: usize,
    trace: bool,
) -> Result<SaddleSolution> {
    if z0.x.len() != data.dim() || z0.y.len() != data.devices() {
        return Err(Error::DimensionMismatch(format!(
            "start point is ({}, {}) but the problem is ({}, {})",
            z0.x.len(),
            z0.y.len(),
            data.dim(),
            data.devices()
        )));
    }
    let (dim, devices) = (data.dim(), data.devices());
    let domain = data.domain();
    let mut z = SaddlePoint {
        x: domain.project(&z0.x),
        y: project_simplex(&z0.y)?,
    };

    let lipschitz = lipschitz_const(data);
    if lipschitz == 0.0 {
        // Constant objective: the projected start is already optimal.
        return Ok(SaddleSolution {
            x: z.x.clone(),
            z_avg: z.clone(),
            z_last: z,
            log: SolveLog {
                iterations: 0,
                converged: true,
                final_step: 0.0,
                trace: Vec::new(),
            },
        });
    }
    let mut gamma = step_size(lipschitz);

    // Tail averaging with doubling restarts: the running sum always covers
    // the iterates since the last power-of-two boundary, so the window is
    // a constant fraction of the trajectory and forgets the transient.
    let mut sum_x = DVector::zeros(dim);
    let mut sum_y = DVector::zeros(devices);
    let mut window = 0usize;
    let mut window_max_gap = f64::NEG_INFINITY;
    let mut next_restart = 2usize;

    let mut log = SolveLog::default();
    for t in 1..=max_iter {
        let field = vi_operator(&z, data);
        // Gap of z_t from the operator blocks: the dual block is -(P x + q)
        // and the primal block is P^T y.
        let primal_t = (0..devices)
            .map(|k| -field[dim + k])
            .fold(f64::NEG_INFINITY, f64::max);
        let dual_t = data.q.dot(&z.y) + domain.support_min(&field.rows(0, dim).clone_owned());
        let gap_t = primal_t - dual_t;

        if t == next_restart {
            sum_x.fill(0.0);
            sum_y.fill(0.0);
            window = 0;
            window_max_gap = f64::NEG_INFINITY;
            next_restart *= 2;
        }
        sum_x += &z.x;
        sum_y += &z.y;
        window += 1;
        window_max_gap = window_max_gap.max(gap_t);

        let lead = step_with_retry(&z, &field, &mut gamma, domain)?;
        let lead_field = vi_operator(&lead, data);
        let next = step_with_retry(&z, &lead_field, &mut gamma, domain)?;
        let dist = bregman(&z, &next)?;

        if trace {
            log.trace.push(TraceRow {
                iteration: t,
                primal_value: primal_t,
                bregman_step: dist,
            });
        }

        z = next;
        log.iterations = t;
        log.final_step = dist;
        if dist < eps && window_max_gap <= 10.0 * eps {
            log.converged = true;
            break;
        }
    }

    let z_avg = SaddlePoint {
        x: &sum_x / window as f64,
        y: &sum_y / window as f64,
    };
    let x = if data.primal_value(&z_avg.x) <= data.primal_value(&z.x) {
        z_avg.x.clone()
    } else {
        z.x.clone()
    };
    Ok(SaddleSolution {
        x,
        z_avg,
        z_last: z,
        log,
    })
}

/// Projected subgradient descent on `max_k (p_k^T x + q_k)` with step
/// `c / sqrt(t)`, tracking the best iterate. Validation oracle only: slow
/// but independent of the Mirror-Prox path.
pub fn subgradient_oracle(data: &SurrogateData, x0: &DVector<f64>, iters: usize) -> DVector<f64> {
    let domain = data.domain();
    let mut x = domain.project(x0);
    let lipschitz = lipschitz_const(data);
    if lipschitz == 0.0 {
        return x;
    }
    let c = domain.radius() / lipschitz;
    let mut best = x.clone();
    let mut best_val = data.primal_value(&x);
    for t in 1..=iters {
        let k = data.argmax_device(&x);
        let step = c / (t as f64).sqrt();
        let moved = &x - step * data.p.row(k).transpose();
        x = domain.project(&moved);
        let val = data.primal_value(&x);
        if val < best_val {
            best_val = val;
            best.copy_from(&x);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    fn data(p: DMatrix<f64>, q: DVector<f64>, domain: DomainKind) -> SurrogateData {
        SurrogateData::new(p, q, domain).unwrap()
    }

    #[test]
    fn operator_at_origin_uniform_dual() {
        let p = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let q = dvector![5.0, 6.0];
        let d = data(p.clone(), q.clone(), DomainKind::UnitBall { dim: 2 });
        let z = SaddlePoint::warm(DVector::zeros(2), 2);
        let f = vi_operator(&z, &d);
        // top = P^T 1/K, bottom = -q
        assert_eq!(f, dvector![2.0, 3.0, -5.0, -6.0]);
    }

    #[test]
    fn lipschitz_is_max_row_norm() {
        let p = DMatrix::from_row_slice(2, 2, &[3.0, 4.0, 0.0, 1.0]);
        let d = data(p, dvector![0.0, 0.0], DomainKind::UnitBall { dim: 2 });
        let l = lipschitz_const(&d);
        assert_eq!(l, 5.0);
        assert_eq!(step_size(l), 0.1);
    }

    #[test]
    fn lipschitz_zero_row() {
        let p = DMatrix::from_row_slice(1, 2, &[0.0, 0.0]);
        let d = data(p, dvector![7.0], DomainKind::UnitBall { dim: 2 });
        assert_eq!(lipschitz_const(&d), 0.0);
    }

    #[test]
    fn bregman_identical_points_is_zero() {
        let z = SaddlePoint {
            x: dvector![0.3, -0.2],
            y: dvector![0.25, 0.75],
        };
        assert_eq!(bregman(&z, &z).unwrap(), 0.0);
    }

    #[test]
    fn bregman_euclidean_part() {
        let a = SaddlePoint {
            x: dvector![1.0, 0.0],
            y: dvector![0.5, 0.5],
        };
        let b = SaddlePoint {
            x: dvector![0.0, 0.0],
            y: dvector![0.5, 0.5],
        };
        assert!((bregman(&a, &b).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn bregman_rejects_zero_reference_mass() {
        let a = SaddlePoint {
            x: dvector![0.0],
            y: dvector![0.5, 0.5],
        };
        let b = SaddlePoint {
            x: dvector![0.0],
            y: dvector![0.0, 1.0],
        };
        assert!(matches!(bregman(&a, &b), Err(Error::BregmanDomain)));
    }

    #[test]
    fn disk_projection_pairs() {
        let u = dvector![3.0, 0.3, 4.0, 0.4];
        let p = project_disks(&u);
        assert!((p[0] - 0.6).abs() < 1e-15);
        assert!((p[2] - 0.8).abs() < 1e-15);
        assert_eq!(p[1], 0.3);
        assert_eq!(p[3], 0.4);
    }

    #[test]
    fn ball_projection() {
        assert_eq!(project_ball(&dvector![0.3, 0.4]), dvector![0.3, 0.4]);
        let p = project_ball(&dvector![0.0, 2.0]);
        assert!((p[1] - 1.0).abs() < 1e-15 && p[0] == 0.0);
    }

    #[test]
    fn simplex_projection_cases() {
        let e = dvector![0.25, 0.25, 0.25, 0.25];
        assert_eq!(project_simplex(&e).unwrap(), e);
        assert_eq!(project_simplex(&dvector![1.0, 1.0]).unwrap(), dvector![0.5, 0.5]);
        let e = dvector![0.2, 0.3, 0.5];
        assert_eq!(project_simplex(&e).unwrap(), e);
        assert!(project_simplex(&dvector![0.0, 1.0]).is_err());
    }

    #[test]
    fn mirror_step_zero_direction_is_identity() {
        let z = SaddlePoint {
            x: dvector![0.2, -0.1],
            y: dvector![0.4, 0.6],
        };
        let step = mirror_step(
            &z,
            &DVector::zeros(4),
            0.5,
            DomainKind::UnitBall { dim: 2 },
        )
        .unwrap();
        assert!((step.x - &z.x).norm() < 1e-15);
        assert!((step.y - &z.y).norm() < 1e-15);
    }

    #[test]
    fn mirror_step_dual_update_is_softmax_like() {
        let z = SaddlePoint {
            x: dvector![0.0, 0.0],
            y: dvector![0.5, 0.5],
        };
        let direction = dvector![0.0, 0.0, 1.0, -1.0];
        let gamma = 0.3;
        let step = mirror_step(&z, &direction, gamma, DomainKind::UnitBall { dim: 2 }).unwrap();
        let raw = [0.5 * (-gamma).exp(), 0.5 * gamma.exp()];
        let sum = raw[0] + raw[1];
        assert!((step.y[0] - raw[0] / sum).abs() < 1e-15);
        assert!((step.y[1] - raw[1] / sum).abs() < 1e-15);
    }

    #[test]
    fn solve_unit_ball_single_device() {
        let p = DMatrix::from_row_slice(1, 3, &[1.0, -2.0, 2.0]);
        let d = data(p, dvector![0.0], DomainKind::UnitBall { dim: 3 });
        let z0 = SaddlePoint::warm(DVector::zeros(3), 1);
        let sol = solve_saddle(&d, &z0, 1e-12, 50_000).unwrap();
        assert!(sol.log.converged);
        let expected = dvector![-1.0 / 3.0, 2.0 / 3.0, -2.0 / 3.0];
        assert!((sol.x - expected).norm() < 1e-6);
        assert!((d.primal_value(&sol.z_last.x) + 3.0).abs() < 1e-6);
    }

    #[test]
    fn solve_disk_product_single_device() {
        let p = DMatrix::from_row_slice(1, 4, &[3.0, 0.0, 4.0, 1.0]);
        let d = data(p, dvector![0.0], DomainKind::DiskProduct { disks: 2 });
        let z0 = SaddlePoint::warm(DVector::zeros(4), 1);
        let sol = solve_saddle(&d, &z0, 1e-12, 50_000).unwrap();
        // Each pair aligns against its own (p_i, p_{N+i}) block.
        assert!((sol.x[0] + 0.6).abs() < 1e-6);
        assert!((sol.x[2] + 0.8).abs() < 1e-6);
        assert!((sol.x[1] - 0.0).abs() < 1e-6);
        assert!((sol.x[3] + 1.0).abs() < 1e-6);
    }

    #[test]
    fn zero_operator_terminates_immediately() {
        let p = DMatrix::zeros(2, 4);
        let d = data(p, dvector![1.0, -1.0], DomainKind::DiskProduct { disks: 2 });
        let z0 = SaddlePoint::warm(DVector::from_element(4, 5.0), 2);
        let sol = solve_saddle(&d, &z0, 1e-9, 100).unwrap();
        assert_eq!(sol.log.iterations, 0);
        assert!(sol.log.converged);
        // Start point was projected onto the disks.
        assert!(d.domain().contains(&sol.x, 1e-12));
    }

    #[test]
    fn subgradient_single_device_ball() {
        let p = DMatrix::from_row_slice(1, 2, &[3.0, 4.0]);
        let d = data(p, dvector![0.5], DomainKind::UnitBall { dim: 2 });
        let x = subgradient_oracle(&d, &DVector::zeros(2), 100_000);
        assert!((x[0] + 0.6).abs() < 1e-3);
        assert!((x[1] + 0.8).abs() < 1e-3);
    }

    #[test]
    fn subgradient_constant_objective() {
        let p = DMatrix::zeros(3, 2);
        let d = data(p, dvector![1.0, 2.0, 3.0], DomainKind::UnitBall { dim: 2 });
        let x0 = dvector![0.1, -0.2];
        let x = subgradient_oracle(&d, &x0, 1000);
        assert_eq!(x, x0);
        assert_eq!(d.primal_value(&x), 3.0);
    }

    #[test]
    fn trace_is_recorded_when_requested() {
        let p = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let d = data(p, dvector![0.0, 0.0], DomainKind::UnitBall { dim: 2 });
        let z0 = SaddlePoint::warm(dvector![0.5, 0.5], 2);
        let sol = solve_saddle_traced(&d, &z0, 1e-10, 1000, true).unwrap();
        assert_eq!(sol.log.trace.len(), sol.log.iterations);
        let mut buf = Vec::new();
        sol.log.write_trace_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("iteration,primal_value,bregman_step\n"));
        assert_eq!(text.lines().count(), sol.log.iterations + 1);
    }
}
