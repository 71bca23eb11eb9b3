//! Per-iteration cost measurement of the saddle solver across problem
//! sizes, with a log-log slope fit against the expected linear growth in
//! `K * N`.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use aircomp::saddle::{solve_saddle, DomainKind, SaddlePoint, SurrogateData};

#[derive(Debug, Clone)]
pub struct TimingSpec {
    /// Device counts swept at `fixed_elements`.
    pub devices: Vec<usize>,
    /// Element counts swept at `fixed_devices`.
    pub elements: Vec<usize>,
    pub fixed_devices: usize,
    pub fixed_elements: usize,
    /// Iterations per measured solve.
    pub iters: usize,
    /// Repeats per size; the median is reported.
    pub repeats: usize,
    pub seed: u64,
}

impl Default for TimingSpec {
    fn default() -> Self {
        Self {
            devices: vec![64, 128, 256],
            elements: vec![64, 128, 256],
            fixed_devices: 128,
            fixed_elements: 128,
            iters: 300,
            repeats: 5,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TimingRow {
    pub devices: usize,
    pub elements: usize,
    pub per_iter_us: f64,
}

#[derive(Debug, Clone)]
pub struct TimingTable {
    /// Rows of the device sweep, then the element sweep.
    pub rows: Vec<TimingRow>,
    /// Log-log slope of time versus K at fixed N (1 = linear).
    pub slope_devices: f64,
    /// Log-log slope of time versus N at fixed K.
    pub slope_elements: f64,
}

impl TimingTable {
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "devices,elements,per_iter_us")?;
        for r in &self.rows {
            writeln!(w, "{},{},{}", r.devices, r.elements, r.per_iter_us)?;
        }
        Ok(())
    }
}

fn random_instance(rng: &mut ChaCha8Rng, devices: usize, elements: usize) -> SurrogateData {
    let dim = 2 * elements;
    let p = DMatrix::from_fn(devices, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    let q = DVector::from_fn(devices, |_, _| rng.sample::<f64, _>(StandardNormal));
    SurrogateData::new(p, q, DomainKind::DiskProduct { disks: elements }).unwrap()
}

/// Median per-iteration wall time of a fixed-length solve.
pub fn per_iteration_time_us(
    devices: usize,
    elements: usize,
    iters: usize,
    repeats: usize,
    seed: u64,
) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = random_instance(&mut rng, devices, elements);
    let z0 = SaddlePoint::warm(DVector::zeros(data.dim()), devices);
    let mut samples = Vec::with_capacity(repeats);
    for _ in 0..repeats.max(1) {
        let start = std::time::Instant::now();
        // eps = 0 never triggers the stop, so exactly `iters` iterations run.
        let sol = solve_saddle(&data, &z0, 0.0, iters).expect("finite data");
        let elapsed = start.elapsed().as_secs_f64();
        assert_eq!(sol.log.iterations, iters);
        samples.push(elapsed / iters as f64 * 1e6);
    }
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    samples[samples.len() / 2]
}

fn fit_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0.ln()).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for p in points {
        num += (p.0.ln() - mean_x) * (p.1.ln() - mean_y);
        den += (p.0.ln() - mean_x).powi(2);
    }
    num / den
}

/// Measures the device and element sweeps and fits the log-log slopes.
pub fn timing_sweep(spec: &TimingSpec) -> TimingTable {
    let mut rows = Vec::new();
    let mut device_points = Vec::new();
    for &k in &spec.devices {
        let t = per_iteration_time_us(k, spec.fixed_elements, spec.iters, spec.repeats, spec.seed);
        rows.push(TimingRow {
            devices: k,
            elements: spec.fixed_elements,
            per_iter_us: t,
        });
        device_points.push((k as f64, t));
    }
    let mut element_points = Vec::new();
    for &n in &spec.elements {
        let t = per_iteration_time_us(spec.fixed_devices, n, spec.iters, spec.repeats, spec.seed);
        rows.push(TimingRow {
            devices: spec.fixed_devices,
            elements: n,
            per_iter_us: t,
        });
        element_points.push((n as f64, t));
    }
    TimingTable {
        rows,
        slope_devices: fit_slope(&device_points),
        slope_elements: fit_slope(&element_points),
    }
}
