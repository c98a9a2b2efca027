//! Monte Carlo simulation of the interacting particle system
//! `dX^i = (1/N) Σ_j K(X^i, X^j) dt + sqrt(2σ) dW^i` on the torus, with
//! i.i.d. initial sampling from a band-limited density, a direct O(N²)
//! drift oracle and an O(N·modes) spectral fast path, and Euler–Maruyama
//! time stepping.
//!
//! Reproducibility: replica r draws from a ChaCha stream keyed by
//! (seed, r), so (seed, replica, step) fully determines every draw and
//! replicas are independent without coordination.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fourier::{FourierError, KernelSpec, SpectralField};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("config invalid: {0}")]
    InvalidConfig(String),
    #[error("initial density is negative at grid point {point:?} (value {value:.3e})")]
    NegativeDensity { point: Vec<f64>, value: f64 },
    #[error("rejection sampling exceeded {0} attempts per particle")]
    RejectionStalled(usize),
    #[error(transparent)]
    Fourier(#[from] FourierError),
}

/// Particle-run configuration. `sigma` is the diffusion coefficient of
/// `sqrt(2σ) dW`; `rho0` must be a real probability density (mode 0 = 1).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub n: usize,
    pub d: usize,
    pub sigma: f64,
    pub dt: f64,
    pub t_end: f64,
    pub obs_times: Vec<f64>,
    pub replicas: usize,
    pub seed: u64,
    pub kernel: KernelSpec,
    pub rho0: SpectralField,
}

impl SimConfig {
    /// Every violated invariant, not just the first.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.n < 2 {
            out.push(format!("N ≥ 2 required, got {}", self.n));
        }
        if self.d == 0 {
            out.push("d ≥ 1 required".into());
        }
        if !(self.dt > 0.0) {
            out.push(format!("dt > 0 required, got {}", self.dt));
        }
        if !(self.t_end >= 0.0) {
            out.push(format!("t_end ≥ 0 required, got {}", self.t_end));
        }
        if self.sigma < 0.0 {
            out.push(format!("sigma ≥ 0 required, got {}", self.sigma));
        }
        if self.replicas < 1 {
            out.push("replicas ≥ 1 required".into());
        }
        for &t in &self.obs_times {
            if !(0.0..=self.t_end + 0.5 * self.dt).contains(&t) {
                out.push(format!("obs_time {t} outside [0, t_end]"));
            }
        }
        if self.kernel.dim() != self.d {
            out.push(format!(
                "kernel dimension {} ≠ d = {}",
                self.kernel.dim(),
                self.d
            ));
        }
        if self.rho0.dim() != self.d {
            out.push(format!(
                "rho0 dimension {} ≠ d = {}",
                self.rho0.dim(),
                self.d
            ));
        }
        if self.rho0.num_vars() != 1 {
            out.push("rho0 must be a one-variable field".into());
        }
        if !self.rho0.real_tag() {
            out.push("rho0 must be tagged real".into());
        }
        let zero = crate::fourier::FreqVec::zero(1, self.rho0.dim().max(1));
        if self.rho0.num_vars() == 1 && self.rho0.get(&zero) != Complex64::new(1.0, 0.0) {
            out.push("rho0 mode-0 coefficient must be exactly 1".into());
        }
        out
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(SimError::InvalidConfig(v.join("; ")))
        }
    }

    pub fn num_steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    /// Nearest step index for an observation time.
    pub fn obs_step(&self, t: f64) -> usize {
        ((t / self.dt).round() as usize).min(self.num_steps())
    }
}

/// One replica: positions (flattened particle-major) and its RNG stream.
#[derive(Clone, Debug)]
pub struct Replica {
    pub positions: Vec<f64>,
    pub rng: ChaCha8Rng,
}

/// R independent replicas of N particle positions on `[0,1)^d`.
#[derive(Clone, Debug)]
pub struct Ensemble {
    pub time: f64,
    pub step_index: usize,
    pub replicas: Vec<Replica>,
}

/// Positions of every replica at one recorded time.
#[derive(Clone, Debug)]
pub struct Snapshot {
    pub time: f64,
    pub step_index: usize,
    /// `[replica][particle*d + coordinate]`
    pub positions: Vec<Vec<f64>>,
}

fn replica_rng(seed: u64, replica: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica as u64);
    rng
}

/// Derive an independent sub-seed for a parameter-sweep cell (splitmix64
/// finalizer), so runs at different N do not share noise streams.
pub fn mix_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Verification grid with roughly 4096 points total (tensorized per axis).
fn density_grid_axis(d: usize) -> usize {
    match d {
        1 => 4096,
        2 => 64,
        3 => 16,
        _ => 8,
    }
}

/// Reject configs whose density goes negative on the verification grid.
pub fn check_density_nonnegative(rho0: &SpectralField) -> Result<(), SimError> {
    let d = rho0.dim();
    let g = density_grid_axis(d);
    let tol = -1e-12 * (1.0 + rho0.l1_norm());
    let mut idx = vec![0usize; d];
    let total = g.pow(d as u32);
    let mut point = vec![0.0; d];
    for _ in 0..total {
        for (p, &i) in point.iter_mut().zip(&idx) {
            *p = i as f64 / g as f64;
        }
        let v = rho0.eval(&point)?.re;
        if v < tol {
            return Err(SimError::NegativeDensity {
                point: point.clone(),
                value: v,
            });
        }
        for slot in idx.iter_mut() {
            *slot += 1;
            if *slot < g {
                break;
            }
            *slot = 0;
        }
    }
    Ok(())
}

const MAX_REJECTION_ATTEMPTS: usize = 1_000_000;

fn sample_initial_unchecked(
    rho0: &SpectralField,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<f64>, SimError> {
    let d = rho0.dim();
    // Envelope: sup ρ₀ ≤ Σ|ρ̂₀| (l¹ bound for band-limited densities).
    let envelope = rho0.l1_norm();
    let mut out = Vec::with_capacity(n * d);
    let mut candidate = vec![0.0; d];
    for _ in 0..n {
        let mut attempts = 0;
        loop {
            attempts += 1;
            if attempts > MAX_REJECTION_ATTEMPTS {
                return Err(SimError::RejectionStalled(MAX_REJECTION_ATTEMPTS));
            }
            for c in candidate.iter_mut() {
                *c = rng.random::<f64>();
            }
            let u: f64 = rng.random::<f64>();
            let density = rho0.eval(&candidate)?.re;
            if u * envelope <= density {
                out.extend_from_slice(&candidate);
                break;
            }
        }
    }
    Ok(out)
}

/// i.i.d. draws from the band-limited density via rejection sampling under
/// the `Σ|ρ̂₀|` envelope. Densities negative on the verification grid are
/// rejected.
pub fn sample_initial(
    rho0: &SpectralField,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<f64>, SimError> {
    check_density_nonnegative(rho0)?;
    sample_initial_unchecked(rho0, n, rng)
}

/// Drift evaluation strategy: `Direct` is the O(N²) pairwise oracle,
/// `Spectral` the O(N·modes) power-sum path. They agree to 1e−12.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DriftMode {
    Direct,
    Spectral,
}

/// `z^k` for `|z| = 1` by squaring (conjugate for negative k); avoids a
/// sincos per mode in the hot loops.
pub(crate) fn unit_power(z: Complex64, k: i64) -> Complex64 {
    if k == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut exp = k.unsigned_abs();
    let mut base = z;
    let mut acc = Complex64::new(1.0, 0.0);
    while exp > 0 {
        if exp & 1 == 1 {
            acc *= base;
        }
        base *= base;
        exp >>= 1;
    }
    if k < 0 {
        acc.conj()
    } else {
        acc
    }
}

/// `e^{2πi ξ·x}` from per-coordinate unit complexes.
pub(crate) fn oscillator(units: &[Complex64], xi: &[i64]) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for (&z, &k) in units.iter().zip(xi) {
        if k != 0 {
            acc *= unit_power(z, k);
        }
    }
    acc
}

/// `(1/N) Σ_j K(X_i, X_j)` for every particle. The self-interaction j = i
/// is included, as in the particle system's defining sum.
pub fn drift(positions: &[f64], d: usize, kernel: &KernelSpec, mode: DriftMode) -> Vec<f64> {
    let n = positions.len() / d;
    match mode {
        DriftMode::Direct => {
            let mut out = vec![0.0; n * d];
            for i in 0..n {
                let xi = &positions[i * d..(i + 1) * d];
                let mut acc = vec![0.0; d];
                for j in 0..n {
                    let xj = &positions[j * d..(j + 1) * d];
                    let k = kernel.eval(xi, xj);
                    for (a, b) in acc.iter_mut().zip(&k) {
                        *a += b;
                    }
                }
                for (o, a) in out[i * d..(i + 1) * d].iter_mut().zip(&acc) {
                    *o = a / n as f64;
                }
            }
            out
        }
        DriftMode::Spectral => {
            // one pass of per-mode power sums:
            // Σ_{λ,η} K̂(λ,η) e^{2πiλ·x_i} (1/N Σ_j e^{2πiη·x_j})
            let modes = kernel.modes();
            let mut units = vec![Complex64::new(0.0, 0.0); n * d];
            for (u, &x) in units.iter_mut().zip(positions) {
                *u = Complex64::cis(TWO_PI * x);
            }
            let mut eta_sums = vec![Complex64::new(0.0, 0.0); modes.len()];
            for (mode_idx, mode) in modes.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..n {
                    acc += oscillator(&units[j * d..(j + 1) * d], &mode.eta);
                }
                eta_sums[mode_idx] = acc / n as f64;
            }
            let mut out = vec![0.0; n * d];
            for i in 0..n {
                let zi = &units[i * d..(i + 1) * d];
                for (mode, &eta_sum) in modes.iter().zip(&eta_sums) {
                    let factor = oscillator(zi, &mode.lambda) * eta_sum;
                    for (c, slot) in mode.coeff.iter().zip(out[i * d..(i + 1) * d].iter_mut()) {
                        *slot += (c * factor).re;
                    }
                }
            }
            out
        }
    }
}

fn wrap_unit(x: f64) -> f64 {
    let w = x.rem_euclid(1.0);
    // rem_euclid can return exactly 1.0 for tiny negative inputs
    if w >= 1.0 {
        0.0
    } else {
        w
    }
}

fn step_replica(replica: &mut Replica, config: &SimConfig) {
    let d = config.d;
    let v = drift(&replica.positions, d, &config.kernel, DriftMode::Spectral);
    let noise_scale = (2.0 * config.sigma * config.dt).sqrt();
    for (x, dv) in replica.positions.iter_mut().zip(&v) {
        let g: f64 = replica.rng.sample(StandardNormal);
        *x = wrap_unit(*x + dv * config.dt + noise_scale * g);
    }
}

/// Advance the whole ensemble by one Euler–Maruyama step:
/// `X ← X + drift·dt + sqrt(2σ·dt)·G (mod 1)`.
pub fn step(ensemble: &mut Ensemble, config: &SimConfig) {
    ensemble
        .replicas
        .par_iter_mut()
        .for_each(|replica| step_replica(replica, config));
    ensemble.step_index += 1;
    ensemble.time = ensemble.step_index as f64 * config.dt;
}

/// Fresh ensemble with i.i.d. initial data per replica.
pub fn init_ensemble(config: &SimConfig) -> Result<Ensemble, SimError> {
    config.validate()?;
    check_density_nonnegative(&config.rho0)?;
    let replicas: Result<Vec<Replica>, SimError> = (0..config.replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(config.seed, r);
            let positions = sample_initial_unchecked(&config.rho0, config.n, &mut rng)?;
            Ok(Replica { positions, rng })
        })
        .collect();
    Ok(Ensemble {
        time: 0.0,
        step_index: 0,
        replicas: replicas?,
    })
}

fn snapshot_of(ensemble: &Ensemble) -> Snapshot {
    Snapshot {
        time: ensemble.time,
        step_index: ensemble.step_index,
        positions: ensemble
            .replicas
            .iter()
            .map(|r| r.positions.clone())
            .collect(),
    }
}

/// Integrate to `t_end`, recording a snapshot at the grid step nearest each
/// observation time. Replicas advance independently (and in parallel).
pub fn run(config: &SimConfig) -> Result<Vec<Snapshot>, SimError> {
    let mut ensemble = init_ensemble(config)?;
    let n_steps = config.num_steps();
    let mut obs_steps: Vec<usize> = config.obs_times.iter().map(|&t| config.obs_step(t)).collect();
    obs_steps.sort_unstable();
    obs_steps.dedup();
    let mut snapshots = Vec::with_capacity(obs_steps.len());
    if obs_steps.first() == Some(&0) {
        snapshots.push(snapshot_of(&ensemble));
    }
    for s in 1..=n_steps {
        step(&mut ensemble, config);
        if obs_steps.binary_search(&s).is_ok() {
            snapshots.push(snapshot_of(&ensemble));
        }
    }
    Ok(snapshots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::FreqVec;

    fn cosine_density(epsilon: f64) -> SpectralField {
        // 1 + ε cos(2πx)
        let mut rho = SpectralField::uniform_density(1, 4).unwrap();
        rho.set(
            &FreqVec::new(1, vec![1]).unwrap(),
            Complex64::new(epsilon / 2.0, 0.0),
        )
        .unwrap();
        rho.set(
            &FreqVec::new(1, vec![-1]).unwrap(),
            Complex64::new(epsilon / 2.0, 0.0),
        )
        .unwrap();
        rho
    }

    fn base_config() -> SimConfig {
        SimConfig {
            n: 16,
            d: 1,
            sigma: 0.5,
            dt: 0.01,
            t_end: 0.1,
            obs_times: vec![0.0, 0.1],
            replicas: 3,
            seed: 9,
            kernel: KernelSpec::kuramoto(),
            rho0: cosine_density(0.5),
        }
    }

    #[test]
    fn config_violations_are_collected() {
        let mut cfg = base_config();
        cfg.dt = 0.0;
        cfg.n = 1;
        let v = cfg.violations();
        assert!(v.iter().any(|s| s.contains("dt > 0")));
        assert!(v.iter().any(|s| s.contains("N ≥ 2")));
        assert_eq!(v.len(), 2);
    }

    #[test]
    fn uniform_density_sampling_accepts_everything() {
        let rho = SpectralField::uniform_density(1, 2).unwrap();
        let mut rng = replica_rng(1, 0);
        let xs = sample_initial(&rho, 2000, &mut rng).unwrap();
        assert_eq!(xs.len(), 2000);
        assert!(xs.iter().all(|&x| (0.0..1.0).contains(&x)));
        // acceptance rate 1 ⇒ exactly 2 draws (x, u) per particle; the mean
        // of a fresh uniform sample has SE 1/√(12·2000)
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        assert!((mean - 0.5).abs() < 0.02);
    }

    #[test]
    fn cosine_density_sampling_matches_first_moment() {
        // ∫ cos(2πx)(1 + ε cos 2πx) dx = ε/2
        let eps = 0.5;
        let rho = cosine_density(eps);
        let mut rng = replica_rng(2, 0);
        let n = 100_000;
        let xs = sample_initial(&rho, n, &mut rng).unwrap();
        let mean_cos =
            xs.iter().map(|&x| (TWO_PI * x).cos()).sum::<f64>() / n as f64;
        let se = 3.0 / (n as f64).sqrt();
        assert!(
            (mean_cos - eps / 2.0).abs() < se,
            "mean {mean_cos}, target {}",
            eps / 2.0
        );
    }

    #[test]
    fn sampling_ks_statistic_below_critical() {
        // CDF of 1 + ε cos(2πx) is x + ε sin(2πx)/(2π): analytic, so the KS
        // statistic against it needs no quadrature error budget.
        let eps = 0.5;
        let rho = cosine_density(eps);
        let mut rng = replica_rng(3, 0);
        let n = 100_000;
        let mut xs = sample_initial(&rho, n, &mut rng).unwrap();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let cdf = |x: f64| x + eps * (TWO_PI * x).sin() / TWO_PI;
        let mut d_stat = 0.0f64;
        for (i, &x) in xs.iter().enumerate() {
            let f = cdf(x);
            d_stat = d_stat.max(((i + 1) as f64 / n as f64 - f).abs());
            d_stat = d_stat.max((f - i as f64 / n as f64).abs());
        }
        // asymptotic 1% critical value
        let critical = 1.63 / (n as f64).sqrt();
        assert!(d_stat < critical, "KS {d_stat} ≥ {critical}");
    }

    #[test]
    fn negative_density_is_rejected() {
        // 1 + 2cos(2πx) dips below zero
        let rho = cosine_density(2.0);
        let mut rng = replica_rng(4, 0);
        assert!(matches!(
            sample_initial(&rho, 10, &mut rng),
            Err(SimError::NegativeDensity { .. })
        ));
    }

    #[test]
    fn zero_kernel_zero_drift() {
        let positions = vec![0.1, 0.5, 0.9];
        let v = drift(&positions, 1, &KernelSpec::zero(1), DriftMode::Spectral);
        assert!(v.iter().all(|&x| x == 0.0));
        let v = drift(&positions, 1, &KernelSpec::zero(1), DriftMode::Direct);
        assert!(v.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn drift_hand_value_two_particles() {
        // K(x,y) = −sin(2π(x−y)), positions {0, 1/4}: particle 1 feels
        // (1/2)[−sin(0) − sin(−π/2)] = 1/2.
        let positions = vec![0.0, 0.25];
        let v = drift(&positions, 1, &KernelSpec::kuramoto(), DriftMode::Direct);
        assert!((v[0] - 0.5).abs() < 1e-12, "got {}", v[0]);
        assert!((v[1] + 0.5).abs() < 1e-12);
    }

    #[test]
    fn spectral_drift_matches_direct_oracle() {
        use crate::fourier::random_kernel;
        let mut rng = replica_rng(5, 0);
        for d in [1usize, 2] {
            for trial in 0..10 {
                let kernel = random_kernel(d, 2, 3, &mut rng);
                let n = 20 + trial;
                let positions: Vec<f64> = (0..n * d).map(|_| rng.random::<f64>()).collect();
                let fast = drift(&positions, d, &kernel, DriftMode::Spectral);
                let slow = drift(&positions, d, &kernel, DriftMode::Direct);
                for (a, b) in fast.iter().zip(&slow) {
                    assert!((a - b).abs() < 1e-12, "d={d} trial={trial}");
                }
            }
        }
    }

    #[test]
    fn drift_is_periodic_in_positions() {
        let kernel = KernelSpec::kuramoto();
        let positions = vec![0.1, 0.7];
        let shifted: Vec<f64> = positions.iter().map(|x| x + 1.0).collect();
        let a = drift(&positions, 1, &kernel, DriftMode::Direct);
        let b = drift(&shifted, 1, &kernel, DriftMode::Direct);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn frozen_dynamics_keeps_positions() {
        let mut cfg = base_config();
        cfg.sigma = 0.0;
        cfg.kernel = KernelSpec::zero(1);
        let mut ensemble = init_ensemble(&cfg).unwrap();
        let before = ensemble.replicas[0].positions.clone();
        step(&mut ensemble, &cfg);
        assert_eq!(ensemble.replicas[0].positions, before);
        assert_eq!(ensemble.step_index, 1);
    }

    #[test]
    fn pure_diffusion_increment_variance() {
        // zero kernel: one step adds N(0, 2σ dt) per coordinate (pre-wrap)
        let mut cfg = base_config();
        cfg.kernel = KernelSpec::zero(1);
        cfg.rho0 = SpectralField::uniform_density(1, 2).unwrap();
        cfg.n = 20_000;
        cfg.replicas = 1;
        cfg.sigma = 0.02; // keep increments well below the wrap scale
        cfg.dt = 0.05;
        let mut ensemble = init_ensemble(&cfg).unwrap();
        let before = ensemble.replicas[0].positions.clone();
        step(&mut ensemble, &cfg);
        let mut sum_sq = 0.0;
        for (a, b) in ensemble.replicas[0].positions.iter().zip(&before) {
            let mut diff = a - b;
            if diff > 0.5 {
                diff -= 1.0;
            }
            if diff < -0.5 {
                diff += 1.0;
            }
            sum_sq += diff * diff;
        }
        let var = sum_sq / cfg.n as f64;
        let expected = 2.0 * cfg.sigma * cfg.dt;
        // sample variance of n draws has relative SE sqrt(2/n)
        assert!((var / expected - 1.0).abs() < 4.0 * (2.0 / cfg.n as f64).sqrt());
    }

    #[test]
    fn equal_seeds_give_bit_identical_trajectories() {
        let cfg = base_config();
        let a = run(&cfg).unwrap();
        let b = run(&cfg).unwrap();
        assert_eq!(a.len(), b.len());
        for (sa, sb) in a.iter().zip(&b) {
            assert_eq!(sa.positions, sb.positions);
        }
    }

    #[test]
    fn replica_streams_differ() {
        let cfg = base_config();
        let ensemble = init_ensemble(&cfg).unwrap();
        assert_ne!(
            ensemble.replicas[0].positions,
            ensemble.replicas[1].positions
        );
    }

    #[test]
    fn zero_t_end_returns_initial_snapshot() {
        let mut cfg = base_config();
        cfg.t_end = 0.0;
        cfg.obs_times = vec![0.0];
        let snaps = run(&cfg).unwrap();
        assert_eq!(snaps.len(), 1);
        assert_eq!(snaps[0].time, 0.0);
    }

    #[test]
    fn snapshot_times_snap_to_grid() {
        let mut cfg = base_config();
        cfg.dt = 0.01;
        cfg.t_end = 1.0;
        cfg.obs_times = vec![0.0, 0.503, 1.0];
        let snaps = run(&cfg).unwrap();
        assert_eq!(snaps.len(), 3);
        for (snap, &want) in snaps.iter().zip(&[0.0, 0.503, 1.0]) {
            assert!((snap.time - want).abs() <= cfg.dt / 2.0 + 1e-12);
        }
    }

    #[test]
    fn heat_decay_of_first_mode() {
        // K = 0, σ = 0.5, ρ₀ = 1 + 0.5cos(2πx): the law of X_t has
        // ρ̂_t(1) = 0.25 e^{−σ(2π)² t}; replica-averaged cos(2πX) estimates
        // 2·Re ρ̂_t(1) = 0.5 e^{−σ(2π)²t}, which at t = 1 is ≈ 0.
        let mut cfg = base_config();
        cfg.kernel = KernelSpec::zero(1);
        cfg.sigma = 0.5;
        cfg.dt = 0.01;
        cfg.t_end = 1.0;
        cfg.obs_times = vec![1.0];
        cfg.n = 4000;
        cfg.replicas = 50;
        cfg.seed = 11;
        let snaps = run(&cfg).unwrap();
        let per_replica: Vec<f64> = snaps[0]
            .positions
            .iter()
            .map(|xs| xs.iter().map(|&x| (TWO_PI * x).cos()).sum::<f64>() / xs.len() as f64)
            .collect();
        let r = per_replica.len() as f64;
        let mean = per_replica.iter().sum::<f64>() / r;
        let var =
            per_replica.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (r - 1.0);
        let se = (var / r).sqrt();
        let target = 0.5 * (-cfg.sigma * TWO_PI * TWO_PI * 1.0).exp();
        assert!(
            (mean - target).abs() <= 3.0 * se + 1e-12,
            "mean {mean:.3e}, target {target:.3e}, se {se:.3e}"
        );
    }
}
