//! Operators on spectral fields: the transport operators `Ĥ_k` and
//! `Ŝ_{k,l}`, the half-inverse gradient `|∇_k|⁻¹`, tensor products,
//! convolution (pointwise products), variable permutation and the
//! Plancherel pairing.
//!
//! All outputs keep the input cutoff; shifted frequencies that fall outside
//! the box are dropped.

use num_complex::Complex64;

use super::{FourierError, FreqVec, KernelSpec, SpectralField};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// `(2πi ξ_k) · v` for a kernel coefficient vector `v ∈ C^d`.
fn div_factor(xi_k: &[i64], coeff: &[Complex64]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (&x, c) in xi_k.iter().zip(coeff) {
        acc += Complex64::new(0.0, TWO_PI * x as f64) * c;
    }
    acc
}

/// `Ĥ_k`: eliminate the star variable of `field` against the kernel.
///
/// Output coefficient at `ξ` (star slot removed):
/// `Σ_{λ,η} (2πi ξ_k)·K̂(λ,η) · ĥ(…, ξ_k − λ, …, −η)` where `−η` sits in the
/// star slot. `k` and `star` are 0-based variable slots of the input field.
pub fn apply_h(
    kernel: &KernelSpec,
    field: &SpectralField,
    k: usize,
    star: usize,
) -> Result<SpectralField, FourierError> {
    let m = field.num_vars();
    let d = field.dim();
    if kernel.dim() != d {
        return Err(FourierError::KernelDimensionMismatch {
            field_d: d,
            kernel_d: kernel.dim(),
        });
    }
    if k >= m {
        return Err(FourierError::VariableOutOfRange {
            index: k,
            expected: m,
        });
    }
    if star >= m {
        return Err(FourierError::VariableOutOfRange {
            index: star,
            expected: m,
        });
    }
    if k == star {
        return Err(FourierError::StarEqualsTarget(k));
    }
    if m < 2 {
        return Err(FourierError::EmptyVariableSet);
    }
    let mut out = SpectralField::zeros(m - 1, d, field.cutoff())?;
    out.set_real_tag(field.real_tag());
    // Push-based: an input entry at (…, a_k, …, a_*) contributes to the
    // output frequency with slot k at a_k + λ whenever a_* == −η.
    for (freq, c) in field.iter_nonzero() {
        let star_freq = freq.var(star);
        for mode in kernel.modes() {
            if !star_freq
                .iter()
                .zip(&mode.eta)
                .all(|(&a, &e)| a == -e)
            {
                continue;
            }
            let mut data = Vec::with_capacity((m - 1) * d);
            for v in 0..m {
                if v == star {
                    continue;
                }
                if v == k {
                    data.extend(freq.var(v).iter().zip(&mode.lambda).map(|(&a, &l)| a + l));
                } else {
                    data.extend_from_slice(freq.var(v));
                }
            }
            // slot index of k in the output after removing star
            let k_out = if star < k { k - 1 } else { k };
            let xi_k = &data[k_out * d..(k_out + 1) * d];
            let factor = div_factor(xi_k, &mode.coeff);
            out.accumulate_truncating(&data, factor * c);
        }
    }
    Ok(out)
}

/// `Ŝ_{k,l}`: multiply by `K(x_k, x_l)` and take `div_{x_k}`, in Fourier
/// variables. For `k ≠ l` the input is read at `(ξ_k − λ, ξ_l − η)`; for
/// `k = l` at `ξ_k − λ − η`.
pub fn apply_s(
    kernel: &KernelSpec,
    field: &SpectralField,
    k: usize,
    l: usize,
) -> Result<SpectralField, FourierError> {
    let m = field.num_vars();
    let d = field.dim();
    if kernel.dim() != d {
        return Err(FourierError::KernelDimensionMismatch {
            field_d: d,
            kernel_d: kernel.dim(),
        });
    }
    for idx in [k, l] {
        if idx >= m {
            return Err(FourierError::VariableOutOfRange {
                index: idx,
                expected: m,
            });
        }
    }
    let mut out = SpectralField::zeros(m, d, field.cutoff())?;
    out.set_real_tag(field.real_tag());
    for (freq, c) in field.iter_nonzero() {
        for mode in kernel.modes() {
            let mut data = freq.components().to_vec();
            for (j, &lam) in mode.lambda.iter().enumerate() {
                data[k * d + j] += lam;
            }
            for (j, &eta) in mode.eta.iter().enumerate() {
                data[l * d + j] += eta;
            }
            let xi_k = &data[k * d..(k + 1) * d];
            let factor = div_factor(xi_k, &mode.coeff);
            out.accumulate_truncating(&data, factor * c);
        }
    }
    Ok(out)
}

/// `|∇_k|⁻¹`: divide by `|2π ξ_k|`, mapping the `ξ_k = 0` plane to zero.
pub fn apply_inv_grad(field: &SpectralField, k: usize) -> Result<SpectralField, FourierError> {
    let m = field.num_vars();
    if k >= m {
        return Err(FourierError::VariableOutOfRange {
            index: k,
            expected: m,
        });
    }
    let mut out = SpectralField::zeros(m, field.dim(), field.cutoff())?;
    out.set_real_tag(field.real_tag());
    for (freq, c) in field.iter_nonzero() {
        let norm_sq = freq.var_norm_sq(k);
        if norm_sq == 0.0 {
            continue;
        }
        let scale = 1.0 / (TWO_PI * norm_sq.sqrt());
        out.set_slice(freq.components(), c * scale);
    }
    Ok(out)
}

/// Tensor product over disjoint variable slots: the output has `f`'s
/// variables first, then `g`'s, and `coeff(ξ_P, ξ_Q) = f̂(ξ_P)·ĝ(ξ_Q)`.
/// The output box is the larger of the two cutoffs.
pub fn tensor_product(
    f: &SpectralField,
    g: &SpectralField,
) -> Result<SpectralField, FourierError> {
    if f.dim() != g.dim() {
        return Err(FourierError::FieldDimensionMismatch(f.dim(), g.dim()));
    }
    let cutoff = f.cutoff().max(g.cutoff());
    let mut out = SpectralField::zeros(f.num_vars() + g.num_vars(), f.dim(), cutoff)?;
    out.set_real_tag(f.real_tag() && g.real_tag());
    for (ff, fc) in f.iter_nonzero() {
        for (gf, gc) in g.iter_nonzero() {
            let joint = ff.concat(&gf);
            out.set_slice(joint.components(), fc * gc);
        }
    }
    Ok(out)
}

/// Relabel variables: output variable `j` carries input variable `perm[j]`.
pub fn permute_vars(
    field: &SpectralField,
    perm: &[usize],
) -> Result<SpectralField, FourierError> {
    let m = field.num_vars();
    let d = field.dim();
    let mut seen = vec![false; m];
    if perm.len() != m || perm.iter().any(|&p| p >= m || std::mem::replace(&mut seen[p], true)) {
        return Err(FourierError::NotAPermutation(perm.to_vec(), m));
    }
    let mut out = SpectralField::zeros(m, d, field.cutoff())?;
    out.set_real_tag(field.real_tag());
    for (freq, c) in field.iter_nonzero() {
        let mut data = Vec::with_capacity(m * d);
        for j in 0..m {
            data.extend_from_slice(freq.var(perm[j]));
        }
        out.set_slice(&data, c);
    }
    Ok(out)
}

/// Frequency-side convolution = pointwise product of the two functions
/// (same variable set). The output box grows to the sum of the cutoffs so
/// no product mass is lost.
pub fn convolve(f: &SpectralField, g: &SpectralField) -> Result<SpectralField, FourierError> {
    if f.dim() != g.dim() {
        return Err(FourierError::FieldDimensionMismatch(f.dim(), g.dim()));
    }
    if f.num_vars() != g.num_vars() {
        return Err(FourierError::VariableCountMismatch(f.num_vars(), g.num_vars()));
    }
    let mut out = SpectralField::zeros(f.num_vars(), f.dim(), f.cutoff() + g.cutoff())?;
    out.set_real_tag(f.real_tag() && g.real_tag());
    for (ff, fc) in f.iter_nonzero() {
        for (gf, gc) in g.iter_nonzero() {
            let data: Vec<i64> = ff
                .components()
                .iter()
                .zip(gf.components())
                .map(|(&a, &b)| a + b)
                .collect();
            out.accumulate_truncating(&data, fc * gc);
        }
    }
    Ok(out)
}

/// Plancherel pairing `∫ f·g = Σ_ξ f̂(ξ) ĝ(−ξ)` over `(T^d)^m`. Exact for
/// band-limited fields; for real `g` this equals `⟨f, g⟩_{L²}`.
pub fn integral_of_product(f: &SpectralField, g: &SpectralField) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (freq, c) in f.iter_nonzero() {
        let gv = g.get(&freq.negated());
        if gv != Complex64::new(0.0, 0.0) {
            acc += c * gv;
        }
    }
    acc
}

/// Random band-limited field with `nnz` nonzero modes, used by the operator
/// audits and property tests. Not conjugate-symmetrized.
pub fn random_field<R: rand::Rng>(
    m: usize,
    d: usize,
    cutoff: i64,
    nnz: usize,
    rng: &mut R,
) -> SpectralField {
    let mut field = SpectralField::zeros(m, d, cutoff).expect("valid shape");
    for _ in 0..nnz {
        let data: Vec<i64> = (0..m * d)
            .map(|_| rng.random_range(-cutoff..=cutoff))
            .collect();
        let freq = FreqVec::new(d, data).expect("in-range freq");
        let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        field.set(&freq, c).expect("inside box");
    }
    field
}

/// Random conjugate-symmetric kernel with `pairs` mode pairs drawn from the
/// box `|component| ≤ max_index`.
pub fn random_kernel<R: rand::Rng>(
    d: usize,
    max_index: i64,
    pairs: usize,
    rng: &mut R,
) -> KernelSpec {
    use super::KernelMode;
    loop {
        let mut half = Vec::with_capacity(pairs);
        for _ in 0..pairs {
            let lambda: Vec<i64> = (0..d).map(|_| rng.random_range(-max_index..=max_index)).collect();
            let eta: Vec<i64> = (0..d).map(|_| rng.random_range(-max_index..=max_index)).collect();
            let self_paired = lambda.iter().all(|&x| x == 0) && eta.iter().all(|&x| x == 0);
            let coeff: Vec<Complex64> = (0..d)
                .map(|_| {
                    if self_paired {
                        Complex64::new(rng.random_range(-1.0..1.0), 0.0)
                    } else {
                        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                    }
                })
                .collect();
            half.push(KernelMode { lambda, eta, coeff });
        }
        // Duplicate (λ,η) draws are rare; just redraw the whole kernel.
        if let Ok(kernel) = KernelSpec::from_half_modes(d, half) {
            return kernel;
        }
    }
}
