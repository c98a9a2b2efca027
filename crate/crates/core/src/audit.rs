//! Batch invariant audits: the operator-norm bounds of `|∇_k|⁻¹H_k` and
//! `|∇_k|⁻¹S_{k,l}` on random fields and kernels, and the exact-arithmetic
//! combinatorial checks on `K_N(ρ)` and the polynomial `K(x, ρ)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::fourier::{
    apply_h, apply_inv_grad, apply_s, random_field, random_kernel, FourierError,
};
use crate::partitions::{
    big_factorial, enumerate_partitions, k_n_eval, k_polynomial, PartitionError,
};

/// Relative slack tolerance: a bound may be violated by at most
/// `1e-12 · (1 + bound)` before the audit flags it.
pub const SLACK_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    HStar,
    SOffDiagonal,
    SDiagonal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    L2,
    Linf,
}

/// One bound check: `‖|∇_k|⁻¹ Op h‖ ≤ ‖K̂‖_{l¹}·‖h‖`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct OperatorAuditRow {
    pub trial: usize,
    pub op: OperatorKind,
    pub norm: NormKind,
    pub bound: f64,
    pub value: f64,
    pub slack: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct OperatorAuditReport {
    pub trials: usize,
    pub rows: Vec<OperatorAuditRow>,
    pub min_slack: f64,
    pub all_pass: bool,
}

/// Run `trials` random (field, kernel) draws and check all operator/norm
/// combinations. Fields are two-variable (the star slot is the second), the
/// kernels conjugate-symmetric with up to three mode pairs.
pub fn operator_audit(trials: usize, seed: u64) -> Result<OperatorAuditReport, FourierError> {
    let rows: Result<Vec<Vec<OperatorAuditRow>>, FourierError> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64);
            let field = random_field(2, 1, 4, 12, &mut rng);
            let kernel = random_kernel(1, 2, 3, &mut rng);
            let l1 = kernel.l1_mass();
            let norms_in = field.norms();
            let mut out = Vec::with_capacity(6);
            let push = |op: OperatorKind,
                            result: &crate::fourier::SpectralField,
                            out: &mut Vec<OperatorAuditRow>| {
                let norms_out = result.norms();
                for (norm, value, input) in [
                    (NormKind::L2, norms_out.l2, norms_in.l2),
                    (NormKind::Linf, norms_out.linf, norms_in.linf),
                ] {
                    let bound = l1 * input;
                    let slack = bound - value;
                    out.push(OperatorAuditRow {
                        trial,
                        op,
                        norm,
                        bound,
                        value,
                        slack,
                        pass: slack >= -SLACK_TOL * (1.0 + bound),
                    });
                }
            };
            let h = apply_inv_grad(&apply_h(&kernel, &field, 0, 1)?, 0)?;
            push(OperatorKind::HStar, &h, &mut out);
            let s_off = apply_inv_grad(&apply_s(&kernel, &field, 0, 1)?, 0)?;
            push(OperatorKind::SOffDiagonal, &s_off, &mut out);
            let s_diag = apply_inv_grad(&apply_s(&kernel, &field, 0, 0)?, 0)?;
            push(OperatorKind::SDiagonal, &s_diag, &mut out);
            Ok(out)
        })
        .collect();
    let rows: Vec<OperatorAuditRow> = rows?.into_iter().flatten().collect();
    let min_slack = rows.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min);
    let all_pass = rows.iter().all(|r| r.pass);
    Ok(OperatorAuditReport {
        trials,
        rows,
        min_slack,
        all_pass,
    })
}

/// Exact-arithmetic combinatorial audit for one (m, N) cell: the worst
/// normalized weight `max_ρ |K_N(ρ)|·N^{|ρ|−1}/m!` (≤ 1 required) plus the
/// Appendix polynomial checks (`C_l = 0` below `|ρ|−1`, `Σ|C_l| ≤ m!`).
#[derive(Clone, Debug, Serialize)]
pub struct PartitionAuditRow {
    pub m: usize,
    pub n: u64,
    pub partitions: usize,
    pub max_ratio: f64,
    pub bound_pass: bool,
    pub low_coeffs_vanish: bool,
    pub coeff_sum_pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PartitionAuditReport {
    pub rows: Vec<PartitionAuditRow>,
    pub all_pass: bool,
}

/// Audit every ρ ⊢ [m] for m ≤ m_max against all the given N values.
pub fn partition_audit(
    m_max: usize,
    n_values: &[u64],
) -> Result<PartitionAuditReport, PartitionError> {
    let mut rows = Vec::new();
    for m in 1..=m_max {
        let m_fact = big_factorial(m);
        let m_fact_rat = BigRational::from(m_fact.clone());
        // polynomial data is N-independent: compute once per ρ
        let polys: Vec<(usize, crate::partitions::IntPolynomial)> = enumerate_partitions(m)?
            .map(|rho| k_polynomial(&rho).map(|p| (rho.num_blocks(), p)))
            .collect::<Result<_, _>>()?;
        let low_coeffs_vanish = polys.iter().all(|(blocks, poly)| {
            (0..blocks.saturating_sub(1)).all(|l| poly.coeff(l) == BigInt::from(0))
        });
        let coeff_sum_pass = polys
            .iter()
            .all(|(_, poly)| poly.abs_coeff_sum() <= m_fact);
        for &n in n_values {
            let mut max_ratio = BigRational::from(BigInt::from(0));
            let x = BigRational::new(BigInt::from(1), BigInt::from(n));
            for (blocks, poly) in &polys {
                // |K_N(ρ)|·N^{|ρ|−1}/m!
                let value = poly.eval_rational(&x).abs();
                let scale = BigRational::from(BigInt::from(n).pow(*blocks as u32 - 1));
                let ratio = value * scale / m_fact_rat.clone();
                if ratio > max_ratio {
                    max_ratio = ratio;
                }
            }
            let bound_pass = max_ratio <= BigRational::from(BigInt::from(1));
            rows.push(PartitionAuditRow {
                m,
                n,
                partitions: polys.len(),
                max_ratio: max_ratio.to_f64().unwrap_or(f64::NAN),
                bound_pass,
                low_coeffs_vanish,
                coeff_sum_pass,
            });
        }
    }
    let all_pass = rows
        .iter()
        .all(|r| r.bound_pass && r.low_coeffs_vanish && r.coeff_sum_pass);
    Ok(PartitionAuditReport { rows, all_pass })
}

/// The standard N sweep {1, 2, 4, …, 1024}.
pub fn default_n_values() -> Vec<u64> {
    (0..=10).map(|k| 1u64 << k).collect()
}

/// Cross-check `k_n_eval` against the polynomial route for every ρ ⊢ [m],
/// m ≤ m_max, over the given N values. Returns the number of comparisons.
pub fn k_n_dual_route_check(m_max: usize, n_values: &[u64]) -> Result<usize, PartitionError> {
    let mut checked = 0usize;
    for m in 1..=m_max {
        for rho in enumerate_partitions(m)? {
            let poly = k_polynomial(&rho)?;
            for &n in n_values {
                let x = BigRational::new(BigInt::from(1), BigInt::from(n));
                assert_eq!(poly.eval_rational(&x), k_n_eval(&rho, n)?);
                checked += 1;
            }
        }
    }
    Ok(checked)
}
