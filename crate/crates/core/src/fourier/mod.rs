//! Fourier algebra on `(T^d)^m`.
//!
//! Functions of `m` torus variables are kept as truncated Fourier
//! coefficient tables over the box `|ξ_k|_∞ ≤ M`. Products and operator
//! applications are exact convolutions over the listed modes, truncated to
//! the box; contributions that land outside the box are dropped, not
//! aliased.

mod ops;
mod serde_impl;

pub use ops::{
    apply_h, apply_inv_grad, apply_s, convolve, integral_of_product, permute_vars, random_field,
    random_kernel, tensor_product,
};

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

/// Dense coefficient storage is used only while the full box stays below
/// this many entries; larger boxes (in particular anything with m ≥ 3 at a
/// useful cutoff) fall back to sparse storage keyed by frequency.
const DENSE_MAX_ENTRIES: usize = 1 << 20;

#[derive(Debug, Error)]
pub enum FourierError {
    #[error("frequency data of length {len} is not a multiple of the space dimension {d}")]
    BadFreqLength { len: usize, d: usize },
    #[error("number of variables must be at least 1")]
    EmptyVariableSet,
    #[error("space dimension must be at least 1")]
    ZeroDimension,
    #[error("cutoff must be nonnegative, got {0}")]
    NegativeCutoff(i64),
    #[error("frequency {freq:?} lies outside the cutoff box |ξ|_∞ ≤ {cutoff}")]
    OutsideCutoff { freq: Vec<i64>, cutoff: i64 },
    #[error("field has {expected} variables but index {index} was addressed")]
    VariableOutOfRange { index: usize, expected: usize },
    #[error("point arity {got} does not match m·d = {expected}")]
    PointArityMismatch { got: usize, expected: usize },
    #[error("dimension mismatch: field d = {field_d}, kernel d = {kernel_d}")]
    KernelDimensionMismatch { field_d: usize, kernel_d: usize },
    #[error("dimension mismatch between fields: {0} vs {1}")]
    FieldDimensionMismatch(usize, usize),
    #[error("variable count mismatch between fields: {0} vs {1}")]
    VariableCountMismatch(usize, usize),
    #[error("star variable and transported variable coincide (index {0})")]
    StarEqualsTarget(usize),
    #[error("{0:?} is not a permutation of 0..{1}")]
    NotAPermutation(Vec<usize>, usize),
    #[error("negative propagation time {0}")]
    NegativeTime(f64),
    #[error("kernel mode {index}: component vectors must all have length d = {d}")]
    BadKernelMode { index: usize, d: usize },
    #[error("kernel modes are not conjugate-symmetric: missing or mismatched partner of (λ, η) = {0:?}")]
    KernelNotConjugateSymmetric(Vec<i64>),
    #[error("duplicate kernel mode (λ, η) = {0:?}")]
    DuplicateKernelMode(Vec<i64>),
    #[error("field is tagged real but coefficients are not conjugate-symmetric at ξ = {0:?}")]
    NotConjugateSymmetric(Vec<i64>),
    #[error("coefficient at {0:?} is not finite")]
    NonFiniteCoefficient(Vec<i64>),
}

/// Frequency multi-index: one integer vector `ξ_k ∈ Z^d` per torus variable,
/// stored flattened variable-major.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FreqVec {
    d: usize,
    data: Vec<i64>,
}

impl FreqVec {
    pub fn new(d: usize, data: Vec<i64>) -> Result<Self, FourierError> {
        if d == 0 {
            return Err(FourierError::ZeroDimension);
        }
        if data.is_empty() || data.len() % d != 0 {
            return Err(FourierError::BadFreqLength {
                len: data.len(),
                d,
            });
        }
        Ok(Self { d, data })
    }

    pub fn zero(m: usize, d: usize) -> Self {
        Self {
            d,
            data: vec![0; m * d],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.data.len() / self.d
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn components(&self) -> &[i64] {
        &self.data
    }

    /// The frequency vector `ξ_k` of variable `k`.
    pub fn var(&self, k: usize) -> &[i64] {
        &self.data[k * self.d..(k + 1) * self.d]
    }

    pub fn negated(&self) -> Self {
        Self {
            d: self.d,
            data: self.data.iter().map(|x| -x).collect(),
        }
    }

    pub fn max_abs(&self) -> i64 {
        self.data.iter().map(|x| x.abs()).max().unwrap_or(0)
    }

    /// `|ξ_k|²` as a float.
    pub fn var_norm_sq(&self, k: usize) -> f64 {
        self.var(k).iter().map(|&x| (x as f64) * (x as f64)).sum()
    }

    /// True if some variable's whole frequency vector is zero.
    pub fn has_zero_var(&self) -> bool {
        (0..self.num_vars()).any(|k| self.var(k).iter().all(|&x| x == 0))
    }

    pub fn concat(&self, other: &FreqVec) -> FreqVec {
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        FreqVec { d: self.d, data }
    }

    /// Sub-tuple on the given (0-based) variable indices.
    pub fn select_vars(&self, vars: &[usize]) -> FreqVec {
        let mut data = Vec::with_capacity(vars.len() * self.d);
        for &k in vars {
            data.extend_from_slice(self.var(k));
        }
        FreqVec { d: self.d, data }
    }
}

impl fmt::Debug for FreqVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FreqVec{:?}", self.data)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Storage {
    /// Full box, index arithmetic over side = 2M+1 per flattened dimension.
    Dense { side: usize, coeffs: Vec<Complex64> },
    /// Frequency-keyed table; BTreeMap keeps iteration (and hence every
    /// floating-point reduction over the field) in a fixed order.
    Sparse(BTreeMap<Vec<i64>, Complex64>),
}

/// Truncated Fourier coefficient table of a function of `m` torus variables.
#[derive(Clone, Debug)]
pub struct SpectralField {
    m: usize,
    d: usize,
    cutoff: i64,
    real_tag: bool,
    storage: Storage,
}

/// Plancherel norms of a coefficient table: `l2 = sqrt(Σ|c|²)` (the L² norm
/// of the band-limited function) and `linf = max|c|` (the l̂∞ norm).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldNorms {
    pub l2: f64,
    pub linf: f64,
}

fn dense_len(m: usize, d: usize, cutoff: i64) -> Option<usize> {
    let side = usize::try_from(2 * cutoff + 1).ok()?;
    let mut len: usize = 1;
    for _ in 0..m * d {
        len = len.checked_mul(side)?;
        if len > DENSE_MAX_ENTRIES {
            return None;
        }
    }
    Some(len)
}

fn dense_index(cutoff: i64, side: usize, data: &[i64]) -> usize {
    let mut idx = 0usize;
    for &x in data.iter().rev() {
        idx = idx * side + (x + cutoff) as usize;
    }
    idx
}

impl SpectralField {
    /// Zero field with the given shape. Storage is dense for small boxes
    /// (in practice m ≤ 2) and sparse otherwise.
    pub fn zeros(m: usize, d: usize, cutoff: i64) -> Result<Self, FourierError> {
        if m == 0 {
            return Err(FourierError::EmptyVariableSet);
        }
        if d == 0 {
            return Err(FourierError::ZeroDimension);
        }
        if cutoff < 0 {
            return Err(FourierError::NegativeCutoff(cutoff));
        }
        let storage = match dense_len(m, d, cutoff) {
            Some(len) => Storage::Dense {
                side: (2 * cutoff + 1) as usize,
                coeffs: vec![Complex64::new(0.0, 0.0); len],
            },
            None => Storage::Sparse(BTreeMap::new()),
        };
        Ok(Self {
            m,
            d,
            cutoff,
            real_tag: false,
            storage,
        })
    }

    /// Field holding a single constant `c` (only the zero mode).
    pub fn constant(m: usize, d: usize, cutoff: i64, c: Complex64) -> Result<Self, FourierError> {
        let mut f = Self::zeros(m, d, cutoff)?;
        f.set(&FreqVec::zero(m, d), c)?;
        f.real_tag = c.im == 0.0;
        Ok(f)
    }

    /// One-variable probability field `1 + Σ ε_k cos(2π k·x)` style helper:
    /// uniform density (mode 0 = 1).
    pub fn uniform_density(d: usize, cutoff: i64) -> Result<Self, FourierError> {
        let mut f = Self::constant(1, d, cutoff, Complex64::new(1.0, 0.0))?;
        f.real_tag = true;
        Ok(f)
    }

    pub fn from_coeffs<I>(
        m: usize,
        d: usize,
        cutoff: i64,
        real_tag: bool,
        coeffs: I,
    ) -> Result<Self, FourierError>
    where
        I: IntoIterator<Item = (FreqVec, Complex64)>,
    {
        let mut f = Self::zeros(m, d, cutoff)?;
        for (freq, c) in coeffs {
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(FourierError::NonFiniteCoefficient(freq.data));
            }
            f.set(&freq, c)?;
        }
        f.real_tag = real_tag;
        if real_tag {
            f.check_conjugate_symmetry(1e-12)?;
        }
        Ok(f)
    }

    pub fn num_vars(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn cutoff(&self) -> i64 {
        self.cutoff
    }

    pub fn real_tag(&self) -> bool {
        self.real_tag
    }

    pub fn set_real_tag(&mut self, tag: bool) {
        self.real_tag = tag;
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.storage, Storage::Dense { .. })
    }

    fn check_shape(&self, freq: &FreqVec) -> Result<(), FourierError> {
        if freq.d != self.d || freq.num_vars() != self.m {
            return Err(FourierError::BadFreqLength {
                len: freq.data.len(),
                d: self.d,
            });
        }
        Ok(())
    }

    fn in_box_slice(&self, data: &[i64]) -> bool {
        data.iter().all(|&x| x.abs() <= self.cutoff)
    }

    /// Coefficient at `freq`; frequencies outside the box read as 0.
    pub fn get(&self, freq: &FreqVec) -> Complex64 {
        if freq.d != self.d || freq.num_vars() != self.m {
            return Complex64::new(0.0, 0.0);
        }
        self.get_slice(&freq.data)
    }

    fn get_slice(&self, data: &[i64]) -> Complex64 {
        if !self.in_box_slice(data) {
            return Complex64::new(0.0, 0.0);
        }
        match &self.storage {
            Storage::Dense { side, coeffs } => coeffs[dense_index(self.cutoff, *side, data)],
            Storage::Sparse(map) => map.get(data).copied().unwrap_or(Complex64::new(0.0, 0.0)),
        }
    }

    /// Set the coefficient at `freq`. Frequencies outside the box are an
    /// error (the box invariant is enforced at construction; silent
    /// truncation only happens inside operator applications).
    pub fn set(&mut self, freq: &FreqVec, value: Complex64) -> Result<(), FourierError> {
        self.check_shape(freq)?;
        if !self.in_box_slice(&freq.data) {
            return Err(FourierError::OutsideCutoff {
                freq: freq.data.clone(),
                cutoff: self.cutoff,
            });
        }
        self.set_slice(&freq.data, value);
        Ok(())
    }

    fn set_slice(&mut self, data: &[i64], value: Complex64) {
        let cutoff = self.cutoff;
        match &mut self.storage {
            Storage::Dense { side, coeffs } => {
                let idx = dense_index(cutoff, *side, data);
                coeffs[idx] = value;
            }
            Storage::Sparse(map) => {
                if value == Complex64::new(0.0, 0.0) {
                    map.remove(data);
                } else {
                    map.insert(data.to_vec(), value);
                }
            }
        }
    }

    /// Accumulate into the coefficient at `data`, dropping out-of-box
    /// contributions (the truncation convention for operator output).
    pub(crate) fn accumulate_truncating(&mut self, data: &[i64], value: Complex64) {
        if !self.in_box_slice(data) {
            return;
        }
        let cutoff = self.cutoff;
        match &mut self.storage {
            Storage::Dense { side, coeffs } => {
                let idx = dense_index(cutoff, *side, data);
                coeffs[idx] += value;
            }
            Storage::Sparse(map) => {
                *map.entry(data.to_vec())
                    .or_insert(Complex64::new(0.0, 0.0)) += value;
            }
        }
    }

    /// Iterate nonzero coefficients in a deterministic order.
    pub fn iter_nonzero(&self) -> Box<dyn Iterator<Item = (FreqVec, Complex64)> + '_> {
        let d = self.d;
        let cutoff = self.cutoff;
        match &self.storage {
            Storage::Dense { side, coeffs } => {
                let side = *side;
                let md = self.m * self.d;
                Box::new(coeffs.iter().enumerate().filter_map(move |(idx, &c)| {
                    if c == Complex64::new(0.0, 0.0) {
                        return None;
                    }
                    let mut data = vec![0i64; md];
                    let mut rem = idx;
                    for slot in data.iter_mut() {
                        *slot = (rem % side) as i64 - cutoff;
                        rem /= side;
                    }
                    Some((FreqVec { d, data }, c))
                }))
            }
            Storage::Sparse(map) => Box::new(map.iter().map(move |(k, &c)| {
                (
                    FreqVec {
                        d,
                        data: k.clone(),
                    },
                    c,
                )
            })),
        }
    }

    pub fn num_nonzero(&self) -> usize {
        self.iter_nonzero().count()
    }

    /// Evaluate `Σ_ξ c(ξ) exp(2πi Σ_k ξ_k·x_k)` at a point of `(T^d)^m`
    /// given as `m·d` coordinates in `[0,1)`.
    pub fn eval(&self, point: &[f64]) -> Result<Complex64, FourierError> {
        if point.len() != self.m * self.d {
            return Err(FourierError::PointArityMismatch {
                got: point.len(),
                expected: self.m * self.d,
            });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (freq, c) in self.iter_nonzero() {
            let phase: f64 = freq
                .data
                .iter()
                .zip(point)
                .map(|(&xi, &x)| xi as f64 * x)
                .sum();
            acc += c * Complex64::cis(2.0 * std::f64::consts::PI * phase);
        }
        Ok(acc)
    }

    /// Truncated Plancherel norms over the box.
    pub fn norms(&self) -> FieldNorms {
        let mut sum_sq = 0.0;
        let mut max_abs: f64 = 0.0;
        for (_, c) in self.iter_nonzero() {
            sum_sq += c.norm_sqr();
            max_abs = max_abs.max(c.norm());
        }
        FieldNorms {
            l2: sum_sq.sqrt(),
            linf: max_abs,
        }
    }

    /// `Σ|c(ξ)|` over the box — an upper bound for `sup |h|`.
    pub fn l1_norm(&self) -> f64 {
        self.iter_nonzero().map(|(_, c)| c.norm()).sum()
    }

    /// Heat semigroup factor `c(ξ) ↦ c(ξ)·exp(−σ(2π)² Σ_k |ξ_k|² dt)`.
    pub fn heat_propagate(&self, sigma: f64, dt: f64) -> Result<Self, FourierError> {
        if dt < 0.0 {
            return Err(FourierError::NegativeTime(dt));
        }
        let mut out = Self::zeros(self.m, self.d, self.cutoff)?;
        out.real_tag = self.real_tag;
        let four_pi_sq = 4.0 * std::f64::consts::PI * std::f64::consts::PI;
        for (freq, c) in self.iter_nonzero() {
            let lap: f64 = (0..self.m).map(|k| freq.var_norm_sq(k)).sum();
            let factor = (-sigma * four_pi_sq * lap * dt).exp();
            out.set_slice(&freq.data, c * factor);
        }
        Ok(out)
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        let mut out = Self::zeros(self.m, self.d, self.cutoff).expect("same shape");
        out.real_tag = self.real_tag && s.im == 0.0;
        for (freq, c) in self.iter_nonzero() {
            out.set_slice(&freq.data, c * s);
        }
        out
    }

    /// `self + s·other`. Fields must share m and d; the result's box is the
    /// larger of the two.
    pub fn add_scaled(&self, other: &Self, s: Complex64) -> Result<Self, FourierError> {
        if self.d != other.d {
            return Err(FourierError::FieldDimensionMismatch(self.d, other.d));
        }
        if self.m != other.m {
            return Err(FourierError::VariableCountMismatch(self.m, other.m));
        }
        let cutoff = self.cutoff.max(other.cutoff);
        let mut out = Self::zeros(self.m, self.d, cutoff)?;
        out.real_tag = self.real_tag && other.real_tag && s.im == 0.0;
        for (freq, c) in self.iter_nonzero() {
            out.accumulate_truncating(&freq.data, c);
        }
        for (freq, c) in other.iter_nonzero() {
            out.accumulate_truncating(&freq.data, c * s);
        }
        Ok(out)
    }

    /// Re-box the same coefficients into a (usually larger) cutoff.
    pub fn with_cutoff(&self, cutoff: i64) -> Result<Self, FourierError> {
        let mut out = Self::zeros(self.m, self.d, cutoff)?;
        out.real_tag = self.real_tag;
        for (freq, c) in self.iter_nonzero() {
            out.set(&freq, c)?;
        }
        Ok(out)
    }

    /// Verify conjugate symmetry `c(−ξ) = conj(c(ξ))` within `tol`.
    pub fn check_conjugate_symmetry(&self, tol: f64) -> Result<(), FourierError> {
        for (freq, c) in self.iter_nonzero() {
            let partner = self.get_slice(&freq.negated().data);
            if (partner - c.conj()).norm() > tol * (1.0 + c.norm()) {
                return Err(FourierError::NotConjugateSymmetric(freq.data));
            }
        }
        Ok(())
    }

    /// Max deviation of `c(−ξ) − conj(c(ξ))` over the support.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (freq, c) in self.iter_nonzero() {
            let partner = self.get_slice(&freq.negated().data);
            worst = worst.max((partner - c.conj()).norm());
        }
        worst
    }
}

/// Interaction kernel `K(x, y)` given by finitely many Fourier modes
/// `K̂(λ, η) ∈ C^d`. The mode list must be conjugate-symmetric so that K is
/// a real vector field; `l1_mass = Σ |K̂(λ,η)|` (Euclidean magnitude per
/// mode) is cached and bounds both `‖K‖_{L∞}` and the operator norms of
/// `|∇_k|⁻¹ H_k` and `|∇_k|⁻¹ S_{k,l}`.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelSpec {
    d: usize,
    modes: Vec<KernelMode>,
    l1_mass: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KernelMode {
    pub lambda: Vec<i64>,
    pub eta: Vec<i64>,
    pub coeff: Vec<Complex64>,
}

impl KernelMode {
    fn magnitude(&self) -> f64 {
        self.coeff
            .iter()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

impl KernelSpec {
    pub fn new(d: usize, mut modes: Vec<KernelMode>) -> Result<Self, FourierError> {
        if d == 0 {
            return Err(FourierError::ZeroDimension);
        }
        for (index, mode) in modes.iter().enumerate() {
            if mode.lambda.len() != d || mode.eta.len() != d || mode.coeff.len() != d {
                return Err(FourierError::BadKernelMode { index, d });
            }
            if mode.coeff.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                let mut key = mode.lambda.clone();
                key.extend_from_slice(&mode.eta);
                return Err(FourierError::NonFiniteCoefficient(key));
            }
        }
        modes.sort_by(|a, b| (&a.lambda, &a.eta).cmp(&(&b.lambda, &b.eta)));
        for w in modes.windows(2) {
            if w[0].lambda == w[1].lambda && w[0].eta == w[1].eta {
                let mut key = w[0].lambda.clone();
                key.extend_from_slice(&w[0].eta);
                return Err(FourierError::DuplicateKernelMode(key));
            }
        }
        // Real vector field iff K̂(−λ,−η) = conj(K̂(λ,η)) for every mode.
        let table: BTreeMap<(Vec<i64>, Vec<i64>), &KernelMode> = modes
            .iter()
            .map(|m| ((m.lambda.clone(), m.eta.clone()), m))
            .collect();
        for mode in &modes {
            let neg = (
                mode.lambda.iter().map(|x| -x).collect::<Vec<_>>(),
                mode.eta.iter().map(|x| -x).collect::<Vec<_>>(),
            );
            let partner = table.get(&neg).ok_or_else(|| {
                let mut key = mode.lambda.clone();
                key.extend_from_slice(&mode.eta);
                FourierError::KernelNotConjugateSymmetric(key)
            })?;
            let defect: f64 = mode
                .coeff
                .iter()
                .zip(&partner.coeff)
                .map(|(c, p)| (p.conj() - c).norm())
                .sum();
            if defect > 1e-12 {
                let mut key = mode.lambda.clone();
                key.extend_from_slice(&mode.eta);
                return Err(FourierError::KernelNotConjugateSymmetric(key));
            }
        }
        let l1_mass = modes.iter().map(KernelMode::magnitude).sum();
        Ok(Self { d, modes, l1_mass })
    }

    /// Build from one representative of each conjugate pair; the partner
    /// `K̂(−λ,−η) = conj(K̂(λ,η))` is added automatically (except for
    /// self-paired modes with λ = η = 0, which are kept as given and must be
    /// real).
    pub fn from_half_modes(d: usize, half: Vec<KernelMode>) -> Result<Self, FourierError> {
        let mut modes = Vec::with_capacity(half.len() * 2);
        for mode in half {
            let self_paired =
                mode.lambda.iter().all(|&x| x == 0) && mode.eta.iter().all(|&x| x == 0);
            if !self_paired {
                modes.push(KernelMode {
                    lambda: mode.lambda.iter().map(|x| -x).collect(),
                    eta: mode.eta.iter().map(|x| -x).collect(),
                    coeff: mode.coeff.iter().map(|c| c.conj()).collect(),
                });
            }
            modes.push(mode);
        }
        Self::new(d, modes)
    }

    pub fn zero(d: usize) -> Self {
        Self {
            d,
            modes: Vec::new(),
            l1_mass: 0.0,
        }
    }

    /// The mean-field Kuramoto-type kernel `K(x, y) = −sin(2π(x − y))` on
    /// `T^1`: modes `K̂(1,−1) = i/2`, `K̂(−1,1) = −i/2`, so `‖K̂‖_{l¹} = 1`.
    pub fn kuramoto() -> Self {
        Self::from_half_modes(
            1,
            vec![KernelMode {
                lambda: vec![1],
                eta: vec![-1],
                coeff: vec![Complex64::new(0.0, 0.5)],
            }],
        )
        .expect("static mode list is valid")
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn modes(&self) -> &[KernelMode] {
        &self.modes
    }

    pub fn l1_mass(&self) -> f64 {
        self.l1_mass
    }

    pub fn is_zero(&self) -> bool {
        self.modes.is_empty()
    }

    /// Largest `|component|` over all λ and η — the frequency footprint.
    pub fn max_mode_abs(&self) -> i64 {
        self.modes
            .iter()
            .flat_map(|m| m.lambda.iter().chain(m.eta.iter()))
            .map(|x| x.abs())
            .max()
            .unwrap_or(0)
    }

    /// Pointwise value `K(x, y) ∈ R^d` (imaginary parts cancel by the
    /// conjugate-symmetry invariant).
    pub fn eval(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let two_pi = 2.0 * std::f64::consts::PI;
        let mut out = vec![Complex64::new(0.0, 0.0); self.d];
        for mode in &self.modes {
            let phase: f64 = mode
                .lambda
                .iter()
                .zip(x)
                .map(|(&l, &xc)| l as f64 * xc)
                .sum::<f64>()
                + mode
                    .eta
                    .iter()
                    .zip(y)
                    .map(|(&e, &yc)| e as f64 * yc)
                    .sum::<f64>();
            let osc = Complex64::cis(two_pi * phase);
            for (o, c) in out.iter_mut().zip(&mode.coeff) {
                *o += c * osc;
            }
        }
        out.into_iter().map(|c| c.re).collect()
    }
}

#[cfg(test)]
mod tests;
