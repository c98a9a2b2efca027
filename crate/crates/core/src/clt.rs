//! Fluctuations of the linear statistic `∫φ dμ_N = (1/N)Σφ(X_i)`: empirical
//! cumulants, the partition-weighted cumulant formula with weights `K_N(ρ)`,
//! the bound audit `(8‖φ̂‖₁)^m (m!)⁴ / N^{m−1}`, Kolmogorov–Smirnov distance
//! to the standard normal, and the limiting variance
//! `∫φ²dρ − (∫φdρ)² + ∫φ⊗φ db`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::estimator::{combine_g, marginal_table, EstimatorError};
use crate::fourier::{
    convolve, integral_of_product, tensor_product, FourierError, FreqVec, SpectralField,
};
use crate::partitions::{
    assemble_partition_tensor, enumerate_partitions, k_n_eval, moments_to_cumulants,
    PartitionError, SetPartition,
};

#[derive(Debug, Error)]
pub enum CltError {
    #[error("test function must be a real-tagged one-variable field")]
    BadTestFunction,
    #[error("linear statistic has imaginary part {0:.3e} > 1e-12")]
    NonRealStatistic(f64),
    #[error("{got} replicas insufficient for cumulant order {order} (need ≥ {need})")]
    TooFewReplicas { got: usize, order: usize, need: usize },
    #[error("fewer than 2 samples")]
    TooFewSamples,
    #[error("cumulant order {0} unsupported for the correlation formula (m ≤ 3)")]
    OrderTooLarge(usize),
    #[error("no correlation field supplied for cardinality {0}")]
    MissingCorrelationOrder(usize),
    #[error(transparent)]
    Fourier(#[from] FourierError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
}

/// Smooth test function φ given by finitely many Fourier modes, with its
/// cached `‖φ̂‖_{l¹}`.
#[derive(Clone, Debug)]
pub struct TestFunction {
    field: SpectralField,
    l1: f64,
}

impl TestFunction {
    pub fn new(field: SpectralField) -> Result<Self, CltError> {
        if field.num_vars() != 1 || !field.real_tag() {
            return Err(CltError::BadTestFunction);
        }
        field
            .check_conjugate_symmetry(1e-12)
            .map_err(|_| CltError::BadTestFunction)?;
        let l1 = field.l1_norm();
        Ok(Self { field, l1 })
    }

    /// `φ(x) = cos(2πk·x)` on T¹.
    pub fn cosine(k: i64) -> Self {
        let mut f = SpectralField::zeros(1, 1, k.abs().max(1)).unwrap();
        f.set(&FreqVec::new(1, vec![k]).unwrap(), Complex64::new(0.5, 0.0))
            .unwrap();
        f.set(&FreqVec::new(1, vec![-k]).unwrap(), Complex64::new(0.5, 0.0))
            .unwrap();
        f.set_real_tag(true);
        Self::new(f).expect("cosine is real")
    }

    pub fn field(&self) -> &SpectralField {
        &self.field
    }

    pub fn l1_norm(&self) -> f64 {
        self.l1
    }
}

/// `(1/N) Σ_i φ(X_i)`; the imaginary dust of the spectral evaluation is
/// checked against 1e−12 and discarded.
pub fn linear_statistic(
    positions: &[f64],
    d: usize,
    phi: &TestFunction,
) -> Result<f64, CltError> {
    let n = positions.len() / d;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        acc += phi.field.eval(&positions[i * d..(i + 1) * d])?;
    }
    acc /= n as f64;
    if acc.im.abs() > 1e-12 {
        return Err(CltError::NonRealStatistic(acc.im.abs()));
    }
    Ok(acc.re)
}

#[derive(Clone, Copy, Debug)]
pub struct CumulantEstimate {
    pub order: usize,
    pub value: f64,
    pub se: f64,
}

/// Raw moments across replicas, Möbius-inverted to cumulants, with
/// delete-one-replica jackknife errors. Requires ≥ 10·max_order replicas.
pub fn empirical_cumulants(
    samples: &[f64],
    max_order: usize,
) -> Result<Vec<CumulantEstimate>, CltError> {
    let r = samples.len();
    let need = max_order * 10;
    if r < need {
        return Err(CltError::TooFewReplicas {
            got: r,
            order: max_order,
            need,
        });
    }
    let mut power_sums = vec![0.0f64; max_order];
    for &s in samples {
        let mut p = 1.0;
        for slot in power_sums.iter_mut() {
            p *= s;
            *slot += p;
        }
    }
    let moments: Vec<f64> = power_sums.iter().map(|&t| t / r as f64).collect();
    let kappa = moments_to_cumulants(&moments)?;
    // jackknife
    let mut jack: Vec<Vec<f64>> = Vec::with_capacity(r);
    for &s in samples {
        let mut p = 1.0;
        let deleted: Vec<f64> = power_sums
            .iter()
            .map(|&t| {
                p *= s;
                (t - p) / (r - 1) as f64
            })
            .collect();
        jack.push(moments_to_cumulants(&deleted)?);
    }
    let mut out = Vec::with_capacity(max_order);
    for order in 0..max_order {
        let mean_jack: f64 = jack.iter().map(|k| k[order]).sum::<f64>() / r as f64;
        let var: f64 = jack
            .iter()
            .map(|k| (k[order] - mean_jack).powi(2))
            .sum::<f64>();
        let se = ((r - 1) as f64 / r as f64 * var).sqrt();
        out.push(CumulantEstimate {
            order: order + 1,
            value: kappa[order],
            se,
        });
    }
    Ok(out)
}

fn phi_powers(phi: &TestFunction, max_power: usize) -> Result<Vec<SpectralField>, CltError> {
    // powers by repeated self-convolution; φ has finitely many modes so the
    // boxes stay finite
    let mut out = Vec::with_capacity(max_power + 1);
    out.push(SpectralField::constant(1, phi.field.dim(), 0, Complex64::new(1.0, 0.0))?);
    for p in 1..=max_power {
        let prev = &out[p - 1];
        out.push(if p == 1 {
            phi.field.clone()
        } else {
            convolve(prev, &phi.field)?
        });
    }
    Ok(out)
}

/// `κ_m = Σ_{π⊢[m]} N^{|π|−m} Σ_{ρ⊢π} K_N(ρ) ⟨⊗_{B∈π} φ^{|B|}, ⊗_{P∈ρ} g_{|P|}⟩`
/// with the Plancherel pairing; `g` maps cardinality to the correlation
/// field of that order.
pub fn cumulants_from_correlations(
    phi: &TestFunction,
    g: &BTreeMap<usize, SpectralField>,
    n: usize,
    m: usize,
) -> Result<f64, CltError> {
    if m > 3 {
        return Err(CltError::OrderTooLarge(m));
    }
    for card in 1..=m {
        if !g.contains_key(&card) {
            return Err(CltError::MissingCorrelationOrder(card));
        }
    }
    let powers = phi_powers(phi, m)?;
    let mut total = Complex64::new(0.0, 0.0);
    for pi in enumerate_partitions(m)? {
        let p = pi.num_blocks();
        // F = ⊗_{B∈π} φ^{|B|}, one torus variable per block
        let mut f_field: Option<SpectralField> = None;
        for block in pi.blocks() {
            let factor = &powers[block.len()];
            f_field = Some(match f_field {
                None => factor.clone(),
                Some(acc) => tensor_product(&acc, factor)?,
            });
        }
        let f_field = f_field.expect("partition nonempty");
        let n_weight = (n as f64).powi(p as i32 - m as i32);
        for rho in enumerate_partitions(p)? {
            let kn = k_n_eval(&rho, n as u64)?
                .to_f64()
                .expect("K_N fits in f64");
            let g_field = assemble_partition_tensor(&rho, g)?;
            let pairing = integral_of_product(&f_field, &g_field);
            total += pairing * (n_weight * kn);
        }
    }
    Ok(total.re)
}

/// Box radii per cardinality so the correlation fields cover every
/// frequency the order-m formula pairs against (slot loads ≤ (m+1−j)·Mφ).
pub fn formula_probe_radius(phi: &TestFunction, m: usize, j: usize) -> i64 {
    let m_phi = phi.field.cutoff();
    (m + 1 - j) as i64 * m_phi
}

#[derive(Clone, Debug)]
pub struct FormulaCumulants {
    pub estimates: Vec<CumulantEstimate>,
}

/// Formula-path cumulants κ₁..κ_m with empirically estimated correlation
/// fields, jackknifed over replicas. The independent cross-check of
/// [`empirical_cumulants`] on the same snapshot data.
pub fn cumulants_from_snapshots(
    phi: &TestFunction,
    replica_positions: &[Vec<f64>],
    d: usize,
    m: usize,
) -> Result<FormulaCumulants, CltError> {
    if m > 3 {
        return Err(CltError::OrderTooLarge(m));
    }
    let n = replica_positions
        .first()
        .map(|p| p.len() / d)
        .unwrap_or(0);
    let r = replica_positions.len();
    if r < 2 {
        return Err(CltError::TooFewReplicas {
            got: r,
            order: m,
            need: 2,
        });
    }
    // tuples per cardinality on the boxes the pairings touch
    let mut tuples_by_card: BTreeMap<usize, Vec<FreqVec>> = BTreeMap::new();
    let mut all_tuples: Vec<FreqVec> = Vec::new();
    for j in 1..=m {
        let radius = formula_probe_radius(phi, m, j);
        let probe = crate::estimator::FreqProbe::box_probe(j, d, radius, true)?;
        tuples_by_card.insert(j, probe.freqs().to_vec());
        all_tuples.extend_from_slice(probe.freqs());
    }
    let table = marginal_table(replica_positions, d, &all_tuples)?;
    let partitions_by_card: BTreeMap<usize, Vec<SetPartition>> = (1..=m)
        .map(|j| Ok((j, enumerate_partitions(j)?.collect())))
        .collect::<Result<_, PartitionError>>()?;

    let g_fields = |column_value: &dyn Fn(usize) -> Complex64| -> Result<BTreeMap<usize, SpectralField>, CltError> {
        let mut out = BTreeMap::new();
        for (&j, tuples) in &tuples_by_card {
            let radius = formula_probe_radius(phi, m, j);
            let mut field = SpectralField::zeros(j, d, radius.max(1))?;
            for tuple in tuples {
                let v = combine_g(tuple, &partitions_by_card[&j], &table, column_value);
                field.set(tuple, v)?;
            }
            out.insert(j, field);
        }
        Ok(out)
    };

    let full = g_fields(&|col| table.column_mean(col))?;
    let mut values = Vec::with_capacity(m);
    for order in 1..=m {
        values.push(cumulants_from_correlations(phi, &full, n, order)?);
    }
    // delete-one jackknife through the whole pipeline
    let mut jack: Vec<Vec<f64>> = Vec::with_capacity(r);
    for replica in 0..r {
        let fields = g_fields(&|col| table.column_mean_without(col, replica))?;
        let mut row = Vec::with_capacity(m);
        for order in 1..=m {
            row.push(cumulants_from_correlations(phi, &fields, n, order)?);
        }
        jack.push(row);
    }
    let mut estimates = Vec::with_capacity(m);
    for order in 0..m {
        let mean_jack: f64 = jack.iter().map(|k| k[order]).sum::<f64>() / r as f64;
        let var: f64 = jack
            .iter()
            .map(|k| (k[order] - mean_jack).powi(2))
            .sum::<f64>();
        let se = ((r - 1) as f64 / r as f64 * var).sqrt();
        estimates.push(CumulantEstimate {
            order: order + 1,
            value: values[order],
            se,
        });
    }
    Ok(FormulaCumulants { estimates })
}

#[derive(Clone, Copy, Debug)]
pub struct CumulantBoundCheck {
    pub order: usize,
    pub value: f64,
    pub se: f64,
    pub bound: f64,
    pub pass: bool,
}

/// `(8‖φ̂‖₁)^m (m!)⁴ / N^{m−1}` per order; a value fails only when it
/// exceeds the bound beyond its standard error.
pub fn cumulant_bound_audit(
    phi: &TestFunction,
    cumulants: &[CumulantEstimate],
    n: usize,
) -> Vec<CumulantBoundCheck> {
    cumulants
        .iter()
        .map(|c| {
            let m = c.order;
            let fact: f64 = (1..=m as u64).map(|x| x as f64).product();
            let bound = (8.0 * phi.l1).powi(m as i32) * fact.powi(4)
                / (n as f64).powi(m as i32 - 1);
            CumulantBoundCheck {
                order: m,
                value: c.value,
                se: c.se,
                bound,
                pass: c.value.abs() <= bound + c.se,
            }
        })
        .collect()
}

/// Standard normal CDF.
fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Kolmogorov statistic of the samples (standardized by their own mean and
/// SD) against the standard normal. Zero-variance samples are centered
/// only, so a point mass gives 0.5.
pub fn ks_distance(samples: &[f64]) -> Result<f64, CltError> {
    if samples.len() < 2 {
        return Err(CltError::TooFewSamples);
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let sd = var.sqrt();
    let mut standardized: Vec<f64> = if sd < 1e-12 {
        samples.iter().map(|s| s - mean).collect()
    } else {
        samples.iter().map(|s| (s - mean) / sd).collect()
    };
    standardized.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut d_stat = 0.0f64;
    for (i, &x) in standardized.iter().enumerate() {
        let f = normal_cdf(x);
        d_stat = d_stat.max(((i + 1) as f64 / n - f).abs());
        d_stat = d_stat.max((f - i as f64 / n).abs());
    }
    Ok(d_stat)
}

/// Limiting variance `∫φ²dρ − (∫φdρ)² + ∫φ⊗φ db` of the rescaled linear
/// statistic, all pairings in Fourier space.
pub fn variance_limit(
    phi: &TestFunction,
    rho: &SpectralField,
    b: &SpectralField,
) -> Result<f64, CltError> {
    let phi_sq = convolve(&phi.field, &phi.field)?;
    let term1 = integral_of_product(&phi_sq, rho).re;
    let mean = integral_of_product(&phi.field, rho).re;
    let phi_otimes_phi = tensor_product(&phi.field, &phi.field)?;
    let term3 = integral_of_product(&phi_otimes_phi, b).re;
    Ok(term1 - mean * mean + term3)
}
