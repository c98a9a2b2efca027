// scratch calibration probe (deleted before release)
use chaos_core::clt::{linear_statistic, variance_limit, TestFunction};
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
    let t0 = std::time::Instant::now();
    // PDE reference
    let pde = PdeRunConfig {
        sigma: 2.0,
        dt: 1e-3,
        t_end: 1.0,
        obs_times: vec![1.0],
        cutoff: 8,
        kernel: KernelSpec::kuramoto(),
        rho0: cosine_density(8),
        b_transport_sign: TransportSign::Minus,
    };
    let traj = solve_rho_trajectory(&pde).unwrap();
    let (_, b) = solve_b(&traj, &pde).unwrap().pop().unwrap();
    let fv = |a: i64, c: i64| FreqVec::new(1, vec![a, c]).unwrap();
    println!("b(1,-1) = {}", b.get(&fv(1, -1)));
    println!("b(1,1)  = {}", b.get(&fv(1, 1)));
    println!("b(2,-2) = {}", b.get(&fv(2, -2)));
    let rho_t = traj.fields.last().unwrap();
    println!("rho_t(1) = {}", rho_t.get(&FreqVec::new(1, vec![1]).unwrap()));

    let phi = TestFunction::cosine(1);
    let zero_b = SpectralField::zeros(2, 1, 8).unwrap();
    println!(
        "variance limit = {} (without b: {})",
        variance_limit(&phi, rho_t, &b).unwrap(),
        variance_limit(&phi, rho_t, &zero_b).unwrap()
    );

    // particle runs
    for (n, r) in [(64usize, 2000usize), (128, 2000)] {
        let sim = SimConfig {
            n,
            d: 1,
            sigma: 2.0,
            dt: 0.01,
            t_end: 1.0,
            obs_times: vec![1.0],
            replicas: r,
            seed: mix_seed(1234, n as u64),
            kernel: KernelSpec::kuramoto(),
            rho0: cosine_density(8),
        };
        let snaps = run(&sim).unwrap();
        let snap = &snaps[0];
        let probe = FreqProbe::box_probe(2, 1, 2, false).unwrap();
        let est = estimate_correlations(&snap.positions, 1, snap.time, &probe).unwrap();
        let e = est.entry(&fv(1, -1)).unwrap();
        println!(
            "N={n} R={r}: N*g2(1,-1) = {} ± ({}, {})  [b target {}]",
            e.mean * n as f64,
            n as f64 * e.se_re,
            n as f64 * e.se_im,
            b.get(&fv(1, -1))
        );
        let e2 = est.entry(&fv(1, 1)).unwrap();
        println!(
            "       N*g2(1,1)  = {} ± ({}, {})  [b target {}]",
            e2.mean * n as f64,
            n as f64 * e2.se_re,
            n as f64 * e2.se_im,
            b.get(&fv(1, 1))
        );
        // variance of linear statistic
        let samples: Vec<f64> = snap
            .positions
            .iter()
            .map(|p| linear_statistic(p, 1, &phi).unwrap())
            .collect();
        let mean = samples.iter().sum::<f64>() / r as f64;
        let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (r as f64 - 1.0);
        println!("       N*Var = {}", n as f64 * var);
    }
    println!("elapsed {:?}", t0.elapsed());
}
