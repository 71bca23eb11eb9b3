// Dev probe for solver behavior; not part of the deliverable surface.
use aircomp::saddle::{
    lipschitz_const, solve_saddle, subgradient_oracle, DomainKind, SaddlePoint, SurrogateData,
};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn random_instance(rng: &mut ChaCha8Rng, k: usize, disks: usize, ball: bool) -> SurrogateData {
    let dim = 2 * disks;
    let p = DMatrix::from_fn(k, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    let q = DVector::from_fn(k, |_, _| rng.sample::<f64, _>(StandardNormal));
    let domain = if ball {
        DomainKind::UnitBall { dim }
    } else {
        DomainKind::DiskProduct { disks }
    };
    SurrogateData::new(p, q, domain).unwrap()
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for trial in 0..12 {
        let k = 2 + (trial % 9);
        let disks = 2 + (trial % 7);
        let ball = trial % 2 == 0;
        let data = random_instance(&mut rng, k, disks, ball);
        let z0 = SaddlePoint::warm(DVector::zeros(data.dim()), k);
        for eps in [1e-6, 1e-8, 1e-10] {
            let sol = solve_saddle(&data, &z0, eps, 400_000).unwrap();
            let gap_avg = data.gap(&sol.z_avg);
            let gap_last = data.gap(&sol.z_last);
            let f_mp = data.primal_value(&sol.x);
            let x_sg = subgradient_oracle(&data, &DVector::zeros(data.dim()), 1_000_000);
            let f_sg = data.primal_value(&x_sg);
            println!(
                "k={k} disks={disks} ball={ball} eps={eps:.0e} iters={} conv={} gap_avg={gap_avg:.3e} gap_last={gap_last:.3e} f_mp={f_mp:.9} f_sg={f_sg:.9} diff={:.3e} L={:.2}",
                sol.log.iterations,
                sol.log.converged,
                (f_mp - f_sg).abs(),
                lipschitz_const(&data),
            );
        }
    }
}
