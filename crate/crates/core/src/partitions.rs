//! Set-partition lattice machinery: enumeration in restricted-growth-string
//! order, refinement tests, the Möbius alternating sums linking marginals to
//! correlation functions and moments to cumulants, and the combinatorial
//! weight `K_N(ρ)` with its polynomial form `K(x, ρ)`.
//!
//! Ordering convention: a partition π *refines* σ when every block of π is
//! contained in a block of σ. Sums written `σ ≤ π` (or `ι ≥ ρ`) run over the
//! partitions *coarser* than the given one, i.e. over merges of its blocks.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::fourier::{permute_vars, tensor_product, FourierError, SpectralField};

/// Bell numbers explode past this; enumeration is guarded.
pub const MAX_GROUND_SET: usize = 12;

#[derive(Debug, Error)]
pub enum PartitionError {
    #[error("ground-set size {0} outside the supported range 1..={MAX_GROUND_SET}")]
    GroundSetSize(usize),
    #[error("blocks do not form a partition of {{1..{m}}}: {reason}")]
    NotAPartition { m: usize, reason: String },
    #[error("ground-set mismatch: {0} vs {1}")]
    GroundSetMismatch(usize, usize),
    #[error("no field supplied for block cardinality {0}")]
    MissingCardinality(usize),
    #[error("empty moment sequence")]
    EmptyMoments,
    #[error(transparent)]
    Fourier(#[from] FourierError),
}

/// Partition of `{1..m}` in canonical form: each block ascending, blocks
/// ordered by least element.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SetPartition {
    m: usize,
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    pub fn new(blocks: Vec<Vec<usize>>) -> Result<Self, PartitionError> {
        let m: usize = blocks.iter().map(Vec::len).sum();
        if m == 0 {
            return Err(PartitionError::NotAPartition {
                m,
                reason: "no elements".into(),
            });
        }
        let mut seen = vec![false; m + 1];
        for block in &blocks {
            if block.is_empty() {
                return Err(PartitionError::NotAPartition {
                    m,
                    reason: "empty block".into(),
                });
            }
            for &e in block {
                if e == 0 || e > m {
                    return Err(PartitionError::NotAPartition {
                        m,
                        reason: format!("element {e} outside 1..={m}"),
                    });
                }
                if seen[e] {
                    return Err(PartitionError::NotAPartition {
                        m,
                        reason: format!("element {e} repeated"),
                    });
                }
                seen[e] = true;
            }
        }
        let mut blocks: Vec<Vec<usize>> = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        blocks.sort_by_key(|b| b[0]);
        Ok(Self { m, blocks })
    }

    /// The one-block partition of `{1..m}`.
    pub fn single_block(m: usize) -> Result<Self, PartitionError> {
        Self::new(vec![(1..=m).collect()])
    }

    /// All-singletons partition of `{1..m}`.
    pub fn singletons(m: usize) -> Result<Self, PartitionError> {
        Self::new((1..=m).map(|e| vec![e]).collect())
    }

    pub fn ground_set_size(&self) -> usize {
        self.m
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    /// True iff every block of `self` is contained in a block of `sigma`
    /// (self is finer; sigma is a merge of self's blocks).
    pub fn is_refinement_of(&self, sigma: &SetPartition) -> Result<bool, PartitionError> {
        if self.m != sigma.m {
            return Err(PartitionError::GroundSetMismatch(self.m, sigma.m));
        }
        let mut owner = vec![0usize; self.m + 1];
        for (i, block) in sigma.blocks.iter().enumerate() {
            for &e in block {
                owner[e] = i;
            }
        }
        Ok(self
            .blocks
            .iter()
            .all(|b| b.iter().all(|&e| owner[e] == owner[b[0]])))
    }
}

/// `refines(sigma, pi)`: true iff every block of `pi` is contained in a
/// block of `sigma`.
pub fn refines(sigma: &SetPartition, pi: &SetPartition) -> Result<bool, PartitionError> {
    pi.is_refinement_of(sigma)
}

impl Serialize for SetPartition {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.blocks.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SetPartition {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let blocks = Vec::<Vec<usize>>::deserialize(deserializer)?;
        SetPartition::new(blocks).map_err(serde::de::Error::custom)
    }
}

/// Iterator over all partitions of `{1..m}` in restricted-growth-string
/// order.
pub struct Partitions {
    m: usize,
    rgs: Vec<usize>,
    done: bool,
    started: bool,
}

impl Partitions {
    fn new(m: usize) -> Self {
        Self {
            m,
            rgs: vec![0; m],
            done: false,
            started: false,
        }
    }

    fn current(&self) -> SetPartition {
        let num_blocks = self.rgs.iter().max().copied().unwrap_or(0) + 1;
        let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); num_blocks];
        for (i, &label) in self.rgs.iter().enumerate() {
            blocks[label].push(i + 1);
        }
        // first-appearance labels already give canonical block order
        SetPartition { m: self.m, blocks }
    }

    fn advance(&mut self) -> bool {
        // rightmost position that can still grow: rgs[i] ≤ max(prefix)
        for i in (1..self.m).rev() {
            let prefix_max = self.rgs[..i].iter().max().copied().unwrap_or(0);
            if self.rgs[i] <= prefix_max {
                self.rgs[i] += 1;
                for j in i + 1..self.m {
                    self.rgs[j] = 0;
                }
                return true;
            }
        }
        false
    }
}

impl Iterator for Partitions {
    type Item = SetPartition;

    fn next(&mut self) -> Option<SetPartition> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(self.current());
        }
        if self.advance() {
            Some(self.current())
        } else {
            self.done = true;
            None
        }
    }
}

/// Every partition of `{1..m}` exactly once, restricted-growth order.
pub fn enumerate_partitions(m: usize) -> Result<Partitions, PartitionError> {
    if m == 0 || m > MAX_GROUND_SET {
        return Err(PartitionError::GroundSetSize(m));
    }
    Ok(Partitions::new(m))
}

/// `(−1)^{|π|−1} (|π|−1)!` as an exact integer.
fn mobius_weight_int(num_blocks: usize) -> i64 {
    let fact: i64 = (1..num_blocks as i64).product();
    if num_blocks % 2 == 1 {
        fact
    } else {
        -fact
    }
}

/// `Σ_{σ≤π} (−1)^{|σ|−1}(|σ|−1)!` over the partitions σ coarser than π.
/// Equals 1 when π has one block and 0 otherwise.
pub fn mobius_identity_check(pi: &SetPartition) -> Result<i64, PartitionError> {
    let mut acc = 0i64;
    for sigma in enumerate_partitions(pi.ground_set_size())? {
        if pi.is_refinement_of(&sigma)? {
            acc += mobius_weight_int(sigma.num_blocks());
        }
    }
    Ok(acc)
}

/// Tensor the per-cardinality fields over the blocks of `pi`, landing each
/// block's field on that block's variable slots (element `e` ↦ slot `e−1`).
pub fn assemble_partition_tensor(
    pi: &SetPartition,
    fields_by_card: &BTreeMap<usize, SpectralField>,
) -> Result<SpectralField, PartitionError> {
    let mut product: Option<SpectralField> = None;
    for block in pi.blocks() {
        let field = fields_by_card
            .get(&block.len())
            .ok_or(PartitionError::MissingCardinality(block.len()))?;
        product = Some(match product {
            None => field.clone(),
            Some(acc) => tensor_product(&acc, field)?,
        });
    }
    let product = product.expect("partition has at least one block");
    // slots of the raw tensor follow the blocks in canonical order
    let concat: Vec<usize> = pi.blocks().iter().flatten().copied().collect();
    let mut perm = vec![0usize; pi.ground_set_size()];
    for (pos, &element) in concat.iter().enumerate() {
        perm[element - 1] = pos;
    }
    Ok(permute_vars(&product, &perm)?)
}

/// Möbius inversion of marginals into the m-particle correlation function:
/// `g_[m] = Σ_{π⊢[m]} (−1)^{|π|−1}(|π|−1)! ⊗_{P∈π} f_{|P|}`.
///
/// Marginals are supplied per cardinality (the exchangeable setting) and
/// re-slotted onto each block's variables during assembly.
pub fn marginals_to_correlations(
    marginals: &BTreeMap<usize, SpectralField>,
    m: usize,
) -> Result<SpectralField, PartitionError> {
    for card in 1..=m {
        if !marginals.contains_key(&card) {
            return Err(PartitionError::MissingCardinality(card));
        }
    }
    let mut acc: Option<SpectralField> = None;
    for pi in enumerate_partitions(m)? {
        let term = assemble_partition_tensor(&pi, marginals)?;
        let w = Complex64::new(mobius_weight_int(pi.num_blocks()) as f64, 0.0);
        acc = Some(match acc {
            None => term.scaled(w),
            Some(a) => a.add_scaled(&term, w)?,
        });
    }
    Ok(acc.expect("at least one partition"))
}

/// Inverse assembly: `f_[j] = Σ_{π⊢[j]} ⊗_{P∈π} g_{|P|}`.
pub fn correlations_to_marginals(
    correlations: &BTreeMap<usize, SpectralField>,
    j: usize,
) -> Result<SpectralField, PartitionError> {
    for card in 1..=j {
        if !correlations.contains_key(&card) {
            return Err(PartitionError::MissingCardinality(card));
        }
    }
    let mut acc: Option<SpectralField> = None;
    for pi in enumerate_partitions(j)? {
        let term = assemble_partition_tensor(&pi, correlations)?;
        acc = Some(match acc {
            None => term,
            Some(a) => a.add_scaled(&term, Complex64::new(1.0, 0.0))?,
        });
    }
    Ok(acc.expect("at least one partition"))
}

/// `κ_m = Σ_{π⊢[m]} (−1)^{|π|−1}(|π|−1)! Π_{B∈π} μ_{|B|}` for every order up
/// to the length of the input.
pub fn moments_to_cumulants(moments: &[f64]) -> Result<Vec<f64>, PartitionError> {
    if moments.is_empty() {
        return Err(PartitionError::EmptyMoments);
    }
    let mut out = Vec::with_capacity(moments.len());
    for order in 1..=moments.len() {
        let mut kappa = 0.0;
        for pi in enumerate_partitions(order)? {
            let prod: f64 = pi.blocks().iter().map(|b| moments[b.len() - 1]).product();
            kappa += mobius_weight_int(pi.num_blocks()) as f64 * prod;
        }
        out.push(kappa);
    }
    Ok(out)
}

/// Inverse of [`moments_to_cumulants`]: `μ_m = Σ_{π⊢[m]} Π_B κ_{|B|}`.
pub fn cumulants_to_moments(cumulants: &[f64]) -> Result<Vec<f64>, PartitionError> {
    if cumulants.is_empty() {
        return Err(PartitionError::EmptyMoments);
    }
    let mut out = Vec::with_capacity(cumulants.len());
    for order in 1..=cumulants.len() {
        let mut mu = 0.0;
        for pi in enumerate_partitions(order)? {
            let prod: f64 = pi.blocks().iter().map(|b| cumulants[b.len() - 1]).product();
            mu += prod;
        }
        out.push(mu);
    }
    Ok(out)
}

/// Polynomial with exact integer coefficients, `coeffs[l] = C_l`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self {
            coeffs: vec![BigInt::from(1)],
        }
    }

    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c == &BigInt::from(0)) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    /// `c0 + c1·x`.
    pub fn linear(c0: i64, c1: i64) -> Self {
        Self::from_coeffs(vec![BigInt::from(c0), BigInt::from(c1)])
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, l: usize) -> BigInt {
        self.coeffs
            .get(l)
            .cloned()
            .unwrap_or_else(|| BigInt::from(0))
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::zero();
        }
        let mut out = vec![BigInt::from(0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::from_coeffs(out)
    }

    pub fn add_scaled(&self, other: &Self, scale: &BigInt) -> Self {
        let mut out = self.coeffs.clone();
        if out.len() < other.coeffs.len() {
            out.resize(other.coeffs.len(), BigInt::from(0));
        }
        for (o, b) in out.iter_mut().zip(&other.coeffs) {
            *o += scale * b;
        }
        Self::from_coeffs(out)
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::from(BigInt::from(0));
        for c in self.coeffs.iter().rev() {
            acc = acc * x + BigRational::from(c.clone());
        }
        acc
    }

    pub fn abs_coeff_sum(&self) -> BigInt {
        let mut acc = BigInt::from(0);
        for c in &self.coeffs {
            acc += if c < &BigInt::from(0) { -c } else { c.clone() };
        }
        acc
    }
}

pub fn big_factorial(n: usize) -> BigInt {
    (1..=n as u64).map(BigInt::from).product()
}

fn signed_weight_big(num_blocks: usize) -> BigInt {
    let f = big_factorial(num_blocks.saturating_sub(1));
    if num_blocks % 2 == 1 {
        f
    } else {
        -f
    }
}

/// Merged block sizes of the coarsening of `rho` induced by a partition
/// `tau` of rho's block indices.
fn merged_sizes(rho: &SetPartition, tau: &SetPartition) -> Vec<usize> {
    tau.blocks()
        .iter()
        .map(|c| c.iter().map(|&i| rho.blocks()[i - 1].len()).sum())
        .collect()
}

/// `K(x, ρ) = Σ_{ι≥ρ} (−1)^{|ι|−1}(|ι|−1)! Π_{C∈ι} (1−x)···(1−(|C|−1)x)`
/// with the sum over coarsenings of ρ, as an exact integer polynomial.
/// `K_N(ρ) = K(1/N, ρ)`.
pub fn k_polynomial(rho: &SetPartition) -> Result<IntPolynomial, PartitionError> {
    let mut acc = IntPolynomial::zero();
    for tau in enumerate_partitions(rho.num_blocks())? {
        let mut prod = IntPolynomial::one();
        for size in merged_sizes(rho, &tau) {
            for r in 1..size {
                prod = prod.mul(&IntPolynomial::linear(1, -(r as i64)));
            }
        }
        acc = acc.add_scaled(&prod, &signed_weight_big(tau.num_blocks()));
    }
    Ok(acc)
}

/// `K_N(ρ)` by direct evaluation of the defining sum in exact rational
/// arithmetic (an independent route from [`k_polynomial`]).
pub fn k_n_eval(rho: &SetPartition, n: u64) -> Result<BigRational, PartitionError> {
    let one = BigRational::from(BigInt::from(1));
    let n_rat = BigRational::from(BigInt::from(n));
    let mut acc = BigRational::from(BigInt::from(0));
    for tau in enumerate_partitions(rho.num_blocks())? {
        let mut prod = one.clone();
        for size in merged_sizes(rho, &tau) {
            for r in 1..size {
                prod *= &one - BigRational::from(BigInt::from(r as u64)) / n_rat.clone();
            }
        }
        acc += BigRational::from(signed_weight_big(tau.num_blocks())) * prod;
    }
    Ok(acc)
}
