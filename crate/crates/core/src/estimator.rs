//! Correlation-function estimation from particle snapshots.
//!
//! Marginal Fourier modes are estimated by U-statistics over distinct index
//! tuples, computed from complex power sums by inclusion–exclusion over set
//! partitions (O(N) per frequency instead of O(N^j)). Marginals are averaged
//! across replicas first and then Möbius-combined into correlation modes
//! ĝ_[m]; standard errors come from a delete-one-replica jackknife, which is
//! the right tool for that nonlinear combination of averages.
//!
//! Estimates at frequency tuples containing a zero variable cancel exactly
//! by construction of the estimators (the empirical analogue of
//! ∫g_[m] dx_l = 0), so norms are taken over zero-free tuples.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::fourier::{FreqVec, SpectralField};
use crate::partitions::{enumerate_partitions, PartitionError, SetPartition};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

#[derive(Debug, Error)]
pub enum EstimatorError {
    #[error("correlation order m = {0} unsupported (estimators cover m ≤ 3)")]
    OrderTooLarge(usize),
    #[error("need N ≥ j distinct particles: N = {n}, j = {j}")]
    TooFewParticles { n: usize, j: usize },
    #[error("at least 2 replicas required for error bars, got {0}")]
    TooFewReplicas(usize),
    #[error("probe contains no zero-free frequency tuples")]
    EmptyProbe,
    #[error("probe tuple has {got} variables, expected {expected}")]
    ProbeArityMismatch { got: usize, expected: usize },
    #[error("scaling fit needs ≥ 3 particle counts, got {0}")]
    TooFewPoints(usize),
    #[error("degenerate fit: every norm sits at its noise floor")]
    DegenerateFit,
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

/// Largest correlation order the estimators expose. The m = 4 signal
/// `(m−1)!/(m²N^{m−1})` sits below any realistic Monte Carlo floor, so this
/// is a scope decision rather than a code limit.
pub const MAX_CORRELATION_ORDER: usize = 3;

/// Frequency tuples at which ĝ_[m] is evaluated.
#[derive(Clone, Debug)]
pub struct FreqProbe {
    m: usize,
    d: usize,
    freqs: Vec<FreqVec>,
    include_zero_planes: bool,
}

impl FreqProbe {
    /// Deduplicating constructor; every tuple must have m variables of
    /// dimension d. With `include_zero_planes` false, tuples containing a
    /// zero variable are dropped (they are exact zeros of ĝ).
    pub fn new(
        m: usize,
        d: usize,
        freqs: Vec<FreqVec>,
        include_zero_planes: bool,
    ) -> Result<Self, EstimatorError> {
        let mut cleaned = Vec::with_capacity(freqs.len());
        for f in freqs {
            if f.num_vars() != m || f.dim() != d {
                return Err(EstimatorError::ProbeArityMismatch {
                    got: f.num_vars(),
                    expected: m,
                });
            }
            if !include_zero_planes && f.has_zero_var() {
                continue;
            }
            cleaned.push(f);
        }
        cleaned.sort();
        cleaned.dedup();
        Ok(Self {
            m,
            d,
            freqs: cleaned,
            include_zero_planes,
        })
    }

    /// All tuples in the box `|component| ≤ radius`.
    pub fn box_probe(
        m: usize,
        d: usize,
        radius: i64,
        include_zero_planes: bool,
    ) -> Result<Self, EstimatorError> {
        let side = (2 * radius + 1) as usize;
        let total = side.pow((m * d) as u32);
        let mut freqs = Vec::with_capacity(total);
        for mut idx in 0..total {
            let mut data = vec![0i64; m * d];
            for slot in data.iter_mut() {
                *slot = (idx % side) as i64 - radius;
                idx /= side;
            }
            freqs.push(FreqVec::new(d, data).expect("valid tuple"));
        }
        Self::new(m, d, freqs, include_zero_planes)
    }

    pub fn num_vars(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn freqs(&self) -> &[FreqVec] {
        &self.freqs
    }

    pub fn include_zero_planes(&self) -> bool {
        self.include_zero_planes
    }
}

/// Exact complex power sums `e_ξ = Σ_i exp(−2πi ξ·X_i)` for one-variable
/// frequencies, aligned with the input order.
pub fn power_sums(positions: &[f64], d: usize, freqs: &[FreqVec]) -> Vec<Complex64> {
    let n = positions.len() / d;
    let mut units = vec![Complex64::new(0.0, 0.0); positions.len()];
    for (u, &x) in units.iter_mut().zip(positions) {
        // conjugated so that integer powers give e^{−2πi ξ·x} directly
        *u = Complex64::cis(-TWO_PI * x);
    }
    freqs
        .iter()
        .map(|freq| {
            let xi = freq.var(0);
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..n {
                acc += crate::sim::oscillator(&units[i * d..(i + 1) * d], xi);
            }
            acc
        })
        .collect()
}

/// Sum of the variable frequencies of `tuple` over the index set `vars`.
fn block_sum(tuple: &FreqVec, vars: &[usize]) -> FreqVec {
    let d = tuple.dim();
    let mut data = vec![0i64; d];
    for &k in vars {
        for (slot, &x) in data.iter_mut().zip(tuple.var(k)) {
            *slot += x;
        }
    }
    FreqVec::new(d, data).expect("nonempty")
}

/// U-statistic marginal mode from a power-sum lookup:
/// `f̂_j(ξ₁..ξ_j) = (1/(N)_j) Σ_{π⊢[j]} Π_{B∈π} (−1)^{|B|−1}(|B|−1)! e_{ξ_B}`.
fn u_statistic(
    tuple: &FreqVec,
    partitions: &[SetPartition],
    lookup: &BTreeMap<Vec<i64>, Complex64>,
    n: usize,
) -> Complex64 {
    let j = tuple.num_vars();
    let mut acc = Complex64::new(0.0, 0.0);
    for pi in partitions {
        let mut term = Complex64::new(1.0, 0.0);
        for block in pi.blocks() {
            let vars: Vec<usize> = block.iter().map(|&e| e - 1).collect();
            let key = block_sum(tuple, &vars);
            let e = lookup[key.components()];
            let sign_fact = {
                let f: f64 = (1..block.len()).map(|x| x as f64).product();
                if block.len() % 2 == 1 {
                    f
                } else {
                    -f
                }
            };
            term *= e * sign_fact;
        }
        acc += term;
    }
    let falling: f64 = (0..j).map(|r| (n - r) as f64).product();
    acc / falling
}

fn partitions_up_to(m: usize) -> Result<Vec<Vec<SetPartition>>, EstimatorError> {
    let mut out = Vec::with_capacity(m + 1);
    out.push(Vec::new()); // order 0 unused
    for j in 1..=m {
        out.push(enumerate_partitions(j)?.collect());
    }
    Ok(out)
}

fn nonempty_subsets(j: usize) -> Vec<Vec<usize>> {
    (1..(1usize << j))
        .map(|mask| (0..j).filter(|k| mask & (1 << k) != 0).collect())
        .collect()
}

/// Marginal Fourier modes `f̂_j` at the given j-variable tuples for a single
/// snapshot (one replica). U-statistics over distinct index tuples.
pub fn empirical_marginal_fourier(
    positions: &[f64],
    d: usize,
    tuples: &[FreqVec],
) -> Result<Vec<Complex64>, EstimatorError> {
    let n = positions.len() / d;
    let mut needed: Vec<FreqVec> = Vec::new();
    let mut max_j = 1;
    for tuple in tuples {
        let j = tuple.num_vars();
        max_j = max_j.max(j);
        if j > MAX_CORRELATION_ORDER {
            return Err(EstimatorError::OrderTooLarge(j));
        }
        if n < j {
            return Err(EstimatorError::TooFewParticles { n, j });
        }
        for subset in nonempty_subsets(j) {
            needed.push(block_sum(tuple, &subset));
        }
    }
    needed.sort();
    needed.dedup();
    let sums = power_sums(positions, d, &needed);
    let lookup: BTreeMap<Vec<i64>, Complex64> = needed
        .iter()
        .map(|f| f.components().to_vec())
        .zip(sums)
        .collect();
    let parts = partitions_up_to(max_j)?;
    Ok(tuples
        .iter()
        .map(|tuple| u_statistic(tuple, &parts[tuple.num_vars()], &lookup, n))
        .collect())
}

/// One estimated correlation mode with jackknife standard errors.
#[derive(Clone, Debug)]
pub struct CorrelationEntry {
    pub freq: FreqVec,
    pub mean: Complex64,
    pub se_re: f64,
    pub se_im: f64,
}

/// ĝ_[m] estimates at the probed tuples for one snapshot time.
#[derive(Clone, Debug)]
pub struct CorrelationEstimate {
    pub m: usize,
    pub time: f64,
    pub replicas: usize,
    pub entries: Vec<CorrelationEntry>,
}

/// Per-replica marginal tables for all block sub-tuples of the probed
/// tuples; the raw material for ĝ means, jackknife errors and the
/// cumulant-formula cross-checks.
pub struct MarginalTable {
    /// sorted sub-tuple keys (each a FreqVec of ≤ m variables)
    subtuples: Vec<FreqVec>,
    index: BTreeMap<Vec<i64>, usize>,
    /// `[replica][subtuple]` marginal estimates
    per_replica: Vec<Vec<Complex64>>,
    column_sums: Vec<Complex64>,
}

impl MarginalTable {
    pub fn replicas(&self) -> usize {
        self.per_replica.len()
    }

    pub fn subtuples(&self) -> &[FreqVec] {
        &self.subtuples
    }

    pub fn column_mean(&self, col: usize) -> Complex64 {
        self.column_sums[col] / self.per_replica.len() as f64
    }

    pub fn column_mean_without(&self, col: usize, replica: usize) -> Complex64 {
        (self.column_sums[col] - self.per_replica[replica][col])
            / (self.per_replica.len() - 1) as f64
    }

    pub fn col(&self, tuple: &FreqVec) -> usize {
        self.index[tuple.components()]
    }
}

/// The estimator is symmetric in its arguments, so sub-tuples are keyed in
/// sorted variable order.
pub(crate) fn canonical_subtuple(tuple: &FreqVec, vars: &[usize]) -> FreqVec {
    let d = tuple.dim();
    let mut parts: Vec<Vec<i64>> = vars.iter().map(|&k| tuple.var(k).to_vec()).collect();
    parts.sort();
    let data: Vec<i64> = parts.into_iter().flatten().collect();
    FreqVec::new(d, data).expect("nonempty subtuple")
}

/// Compute per-replica marginal estimates for every block sub-tuple needed
/// to Möbius-combine the probed tuples.
pub fn marginal_table(
    replica_positions: &[Vec<f64>],
    d: usize,
    probe_tuples: &[FreqVec],
) -> Result<MarginalTable, EstimatorError> {
    let mut subtuples: Vec<FreqVec> = Vec::new();
    for tuple in probe_tuples {
        let j = tuple.num_vars();
        if j > MAX_CORRELATION_ORDER {
            return Err(EstimatorError::OrderTooLarge(j));
        }
        for subset in nonempty_subsets(j) {
            subtuples.push(canonical_subtuple(tuple, &subset));
        }
    }
    subtuples.sort();
    subtuples.dedup();
    let index: BTreeMap<Vec<i64>, usize> = subtuples
        .iter()
        .enumerate()
        .map(|(i, f)| (f.components().to_vec(), i))
        .collect();
    let per_replica: Result<Vec<Vec<Complex64>>, EstimatorError> = replica_positions
        .par_iter()
        .map(|positions| empirical_marginal_fourier(positions, d, &subtuples))
        .collect();
    let per_replica = per_replica?;
    let mut column_sums = vec![Complex64::new(0.0, 0.0); subtuples.len()];
    for row in &per_replica {
        for (acc, v) in column_sums.iter_mut().zip(row) {
            *acc += v;
        }
    }
    Ok(MarginalTable {
        subtuples,
        index,
        per_replica,
        column_sums,
    })
}

/// Möbius combination of (averaged) marginal columns into ĝ at one tuple.
pub fn combine_g(
    tuple: &FreqVec,
    partitions: &[SetPartition],
    table: &MarginalTable,
    column_value: impl Fn(usize) -> Complex64,
) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for pi in partitions {
        let sign_fact = {
            let f: f64 = (1..pi.num_blocks() as i64).map(|x| x as f64).product();
            if pi.num_blocks() % 2 == 1 {
                f
            } else {
                -f
            }
        };
        let mut term = Complex64::new(sign_fact, 0.0);
        for block in pi.blocks() {
            let vars: Vec<usize> = block.iter().map(|&e| e - 1).collect();
            let sub = canonical_subtuple(tuple, &vars);
            term *= column_value(table.col(&sub));
        }
        acc += term;
    }
    acc
}

/// Estimate ĝ_[m] at the probed tuples: replica-averaged marginals first,
/// Möbius combination second, delete-one-replica jackknife for the errors.
pub fn estimate_correlations(
    replica_positions: &[Vec<f64>],
    d: usize,
    time: f64,
    probe: &FreqProbe,
) -> Result<CorrelationEstimate, EstimatorError> {
    let r = replica_positions.len();
    if r < 2 {
        return Err(EstimatorError::TooFewReplicas(r));
    }
    if probe.num_vars() > MAX_CORRELATION_ORDER {
        return Err(EstimatorError::OrderTooLarge(probe.num_vars()));
    }
    let table = marginal_table(replica_positions, d, probe.freqs())?;
    let partitions: Vec<SetPartition> = enumerate_partitions(probe.num_vars())?.collect();
    let entries: Vec<CorrelationEntry> = probe
        .freqs()
        .par_iter()
        .map(|tuple| {
            let mean = combine_g(tuple, &partitions, &table, |col| table.column_mean(col));
            // delete-one estimates
            let mut jack = Vec::with_capacity(r);
            for replica in 0..r {
                jack.push(combine_g(tuple, &partitions, &table, |col| {
                    table.column_mean_without(col, replica)
                }));
            }
            let jack_mean = jack.iter().sum::<Complex64>() / r as f64;
            let mut var_re = 0.0;
            let mut var_im = 0.0;
            for v in &jack {
                var_re += (v.re - jack_mean.re).powi(2);
                var_im += (v.im - jack_mean.im).powi(2);
            }
            let scale = (r - 1) as f64 / r as f64;
            CorrelationEntry {
                freq: tuple.clone(),
                mean,
                se_re: (scale * var_re).sqrt(),
                se_im: (scale * var_im).sqrt(),
            }
        })
        .collect();
    Ok(CorrelationEstimate {
        m: probe.num_vars(),
        time,
        replicas: r,
        entries,
    })
}

impl CorrelationEstimate {
    /// Estimated modes as a sparse spectral field (means only).
    pub fn to_field(&self, d: usize) -> SpectralField {
        let cutoff = self
            .entries
            .iter()
            .map(|e| e.freq.max_abs())
            .max()
            .unwrap_or(0);
        let mut field = SpectralField::zeros(self.m, d, cutoff).expect("valid shape");
        for e in &self.entries {
            field.set(&e.freq, e.mean).expect("inside box");
        }
        field
    }

    pub fn entry(&self, freq: &FreqVec) -> Option<&CorrelationEntry> {
        self.entries.iter().find(|e| &e.freq == freq)
    }
}

/// Truncated norms of a correlation estimate over zero-free tuples.
#[derive(Clone, Copy, Debug)]
pub struct ChaosNorms {
    pub linf: f64,
    pub l2_truncated: f64,
    /// standard error of |ĝ| at the argmax tuple (for fit weighting)
    pub linf_se: f64,
}

/// `linf = max |ĝ|`, `l2 = sqrt(Σ|ĝ|²)` over the probed zero-free tuples.
pub fn chaos_norms(estimate: &CorrelationEstimate) -> Result<ChaosNorms, EstimatorError> {
    let mut linf = 0.0f64;
    let mut linf_se = 0.0f64;
    let mut sum_sq = 0.0f64;
    let mut any = false;
    for e in &estimate.entries {
        if estimate.m >= 2 && e.freq.has_zero_var() {
            continue;
        }
        any = true;
        let mag = e.mean.norm();
        sum_sq += e.mean.norm_sqr();
        if mag > linf {
            linf = mag;
            linf_se = (e.se_re * e.se_re + e.se_im * e.se_im).sqrt();
        }
    }
    if !any {
        return Err(EstimatorError::EmptyProbe);
    }
    Ok(ChaosNorms {
        linf,
        l2_truncated: sum_sq.sqrt(),
        linf_se,
    })
}

#[derive(Clone, Copy, Debug)]
pub struct ScalingPoint {
    pub n: usize,
    pub value: f64,
    pub se: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct SlopeFit {
    pub slope: f64,
    pub slope_se: f64,
    pub intercept: f64,
}

/// Weighted least squares of `log value` against `log N`, weights from the
/// delta-method error of the log (`se/value`). Flags a degenerate fit when
/// every point sits at its noise floor (value ≤ 3·se).
pub fn scaling_slope(points: &[ScalingPoint]) -> Result<SlopeFit, EstimatorError> {
    if points.len() < 3 {
        return Err(EstimatorError::TooFewPoints(points.len()));
    }
    if points.iter().all(|p| p.value <= 3.0 * p.se) {
        return Err(EstimatorError::DegenerateFit);
    }
    let mut sw = 0.0;
    let mut swx = 0.0;
    let mut swy = 0.0;
    let mut swxx = 0.0;
    let mut swxy = 0.0;
    for p in points {
        let x = (p.n as f64).ln();
        let y = p.value.ln();
        let sigma = (p.se / p.value).max(1e-6);
        let w = 1.0 / (sigma * sigma);
        sw += w;
        swx += w * x;
        swy += w * y;
        swxx += w * x * x;
        swxy += w * x * y;
    }
    let denom = sw * swxx - swx * swx;
    let slope = (sw * swxy - swx * swy) / denom;
    let intercept = (swy - slope * swx) / sw;
    let slope_se = (sw / denom).sqrt();
    Ok(SlopeFit {
        slope,
        slope_se,
        intercept,
    })
}
