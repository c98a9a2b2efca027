// scratch: N-dependence of N*g2 at fixed dt (deleted before release)
use chaos_core::estimator::{estimate_correlations, FreqProbe};
use chaos_core::fourier::{FreqVec, SpectralField};
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
    let args: Vec<String> = std::env::args().collect();
    let r: usize = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(10_000);
    let dt: f64 = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(0.004);
    for n in [16usize, 32, 64, 128] {
        let t0 = std::time::Instant::now();
        let sim = SimConfig {
            n,
            d: 1,
            sigma: 2.0,
            dt,
            t_end: 1.0,
            obs_times: vec![1.0],
            replicas: r,
            seed: mix_seed(7, n as u64),
            kernel: KernelSpec::kuramoto(),
            rho0: cosine_density(4),
        };
        let snaps = run(&sim).unwrap();
        let probe = FreqProbe::box_probe(2, 1, 2, false).unwrap();
        let est = estimate_correlations(&snaps[0].positions, 1, 1.0, &probe).unwrap();
        let e = est.entry(&fv(1, -1)).unwrap();
        let norms = chaos_core::estimator::chaos_norms(&est).unwrap();
        println!(
            "N={n}: N*g2(1,-1) = {:.5} ± {:.5} | linf = {:.6} (linf*N = {:.4}) ({:?})",
            e.mean.re * n as f64,
            n as f64 * e.se_re,
            norms.linf,
            norms.linf * n as f64,
            t0.elapsed()
        );
    }
}
