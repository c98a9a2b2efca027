// scratch: EM weak-bias curve for N g2 vs dt (deleted before release)
use chaos_core::estimator::{estimate_correlations, FreqProbe};
use chaos_core::fourier::{FreqVec, SpectralField};
use chaos_core::mckean::{solve_b, solve_rho_trajectory, PdeRunConfig, TransportSign};
use chaos_core::sim::{mix_seed, run, SimConfig};
use chaos_core::KernelSpec;
use num_complex::Complex64;

fn cosine_density(cutoff: i64) -> SpectralField {
    let mut rho = SpectralField::uniform_density(1, cutoff).unwrap();
    rho.set(&FreqVec::new(1, vec![1]).unwrap(), Complex64::new(0.25, 0.0))
        .unwrap();
    rho.set(&FreqVec::new(1, vec![-1]).unwrap(), Complex64::new(0.25, 0.0))
        .unwrap();
    rho
}

fn main() {
    let fv = |a: i64, c: i64| FreqVec::new(1, vec![a, c]).unwrap();
    // refined b reference
    let pde = PdeRunConfig {
        sigma: 2.0,
        dt: 2e-5,
        t_end: 1.0,
        obs_times: vec![1.0],
        cutoff: 4,
        kernel: KernelSpec::kuramoto(),
        rho0: cosine_density(4),
        b_transport_sign: TransportSign::Minus,
    };
    let t0 = std::time::Instant::now();
    let traj = solve_rho_trajectory(&pde).unwrap();
    let (_, b) = solve_b(&traj, &pde).unwrap().pop().unwrap();
    println!(
        "refined b(1,-1) = {} ({:?})",
        b.get(&fv(1, -1)).re,
        t0.elapsed()
    );

    let n = 64usize;
    let r = 10_000usize;
    for dt in [0.01, 0.004, 0.002, 0.001] {
        let t0 = std::time::Instant::now();
        let sim = SimConfig {
            n,
            d: 1,
            sigma: 2.0,
            dt,
            t_end: 1.0,
            obs_times: vec![1.0],
            replicas: r,
            seed: mix_seed(99, (dt * 1e6) as u64),
            kernel: KernelSpec::kuramoto(),
            rho0: cosine_density(4),
        };
        let snaps = run(&sim).unwrap();
        let probe = FreqProbe::box_probe(2, 1, 1, false).unwrap();
        let est = estimate_correlations(&snaps[0].positions, 1, 1.0, &probe).unwrap();
        let e = est.entry(&fv(1, -1)).unwrap();
        println!(
            "dt={dt}: N*g2(1,-1) = {:.5} ± {:.5} | N*g2(1,1) = {:.5} ({:?})",
            e.mean.re * n as f64,
            n as f64 * e.se_re,
            est.entry(&fv(1, 1)).unwrap().mean.re * n as f64,
            t0.elapsed()
        );
    }
}
