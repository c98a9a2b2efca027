use super::*;
use crate::fourier::ops::{
    apply_h, apply_inv_grad, apply_s, convolve, integral_of_product, permute_vars, random_field,
    random_kernel, tensor_product,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PI: f64 = std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn fv(d: usize, data: &[i64]) -> FreqVec {
    FreqVec::new(d, data.to_vec()).unwrap()
}

/// Equal-weight quadrature average over the G^vars tensor grid; exact for
/// band-limited integrands with total frequency below G in every variable.
fn grid_avg(vars: usize, g: usize, mut f: impl FnMut(&[f64]) -> Complex64) -> Complex64 {
    let mut point = vec![0.0; vars];
    let mut idx = vec![0usize; vars];
    let total = g.pow(vars as u32);
    let mut acc = c(0.0, 0.0);
    for _ in 0..total {
        for (p, &i) in point.iter_mut().zip(&idx) {
            *p = i as f64 / g as f64;
        }
        acc += f(&point);
        for slot in idx.iter_mut() {
            *slot += 1;
            if *slot < g {
                break;
            }
            *slot = 0;
        }
    }
    acc / total as f64
}

#[test]
fn eval_constant_field() {
    let f = SpectralField::constant(1, 1, 3, c(2.5, 0.0)).unwrap();
    let v = f.eval(&[0.37]).unwrap();
    assert!((v - c(2.5, 0.0)).norm() < 1e-15);
}

#[test]
fn eval_two_cosine_modes_at_zero() {
    // coeff(1) = coeff(−1) = 1 is 2cos(2πx); at x = 0 that is 2.
    let mut f = SpectralField::zeros(1, 1, 2).unwrap();
    f.set(&fv(1, &[1]), c(1.0, 0.0)).unwrap();
    f.set(&fv(1, &[-1]), c(1.0, 0.0)).unwrap();
    let v = f.eval(&[0.0]).unwrap();
    assert!((v - c(2.0, 0.0)).norm() < 1e-14);
}

#[test]
fn eval_matches_direct_trigonometric_sum() {
    // Oracle: real/imaginary trig expansion accumulated mode by mode,
    // independent of the complex-exponential path used by eval().
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let f = random_field(1, 1, 4, 7, &mut rng);
    for i in 0..32 {
        let x = i as f64 / 32.0;
        let mut re = 0.0;
        let mut im = 0.0;
        for (freq, coeff) in f.iter_nonzero() {
            let th = 2.0 * PI * freq.components()[0] as f64 * x;
            re += coeff.re * th.cos() - coeff.im * th.sin();
            im += coeff.re * th.sin() + coeff.im * th.cos();
        }
        let v = f.eval(&[x]).unwrap();
        assert!((v - c(re, im)).norm() < 1e-12);
    }
}

#[test]
fn eval_rejects_wrong_arity() {
    let f = SpectralField::constant(2, 1, 1, c(1.0, 0.0)).unwrap();
    assert!(matches!(
        f.eval(&[0.1]),
        Err(FourierError::PointArityMismatch { .. })
    ));
}

#[test]
fn apply_h_zero_kernel_gives_zero_field() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let h = random_field(2, 1, 3, 5, &mut rng);
    let out = apply_h(&KernelSpec::zero(1), &h, 0, 1).unwrap();
    assert_eq!(out.num_nonzero(), 0);
    assert_eq!(out.num_vars(), 1);
}

#[test]
fn apply_h_single_mode_shift() {
    // Kernel pair K̂(1,−1) = c, K̂(−1,1) = conj(c); input ĥ(a, b) = 1 with
    // the star slot holding b = 1. Only the (1,−1) mode can consume the
    // star frequency, so the output is a single coefficient at ξ = a + 1
    // equal to 2πi(a+1)·c.
    let cc = c(0.3, -0.7);
    let kernel = KernelSpec::from_half_modes(
        1,
        vec![KernelMode {
            lambda: vec![1],
            eta: vec![-1],
            coeff: vec![cc],
        }],
    )
    .unwrap();
    let a = 1i64;
    let mut h = SpectralField::zeros(2, 1, 4).unwrap();
    h.set(&fv(1, &[a, 1]), c(1.0, 0.0)).unwrap();
    let out = apply_h(&kernel, &h, 0, 1).unwrap();
    let expected = c(0.0, 2.0 * PI * (a + 1) as f64) * cc;
    assert!((out.get(&fv(1, &[a + 1])) - expected).norm() < 1e-13);
    assert_eq!(out.num_nonzero(), 1);

    // star slot holding anything except ∓η gives zero output
    let mut h2 = SpectralField::zeros(2, 1, 4).unwrap();
    h2.set(&fv(1, &[a, 2]), c(1.0, 0.0)).unwrap();
    let out2 = apply_h(&kernel, &h2, 0, 1).unwrap();
    assert_eq!(out2.num_nonzero(), 0);
}

#[test]
fn apply_h_kills_zero_mode_of_probability_product() {
    // divergence factor 2πiξ_k vanishes on ξ_k = 0
    let rho = SpectralField::uniform_density(1, 2).unwrap();
    let prod = tensor_product(&rho, &rho).unwrap();
    let out = apply_h(&KernelSpec::kuramoto(), &prod, 0, 1).unwrap();
    assert_eq!(out.get(&fv(1, &[0])), c(0.0, 0.0));
}

#[test]
fn apply_h_matches_weak_form_quadrature() {
    // Independent oracle: for ψ = e^{2πiax},
    //   ∫ ψ (H h) dx = −2πi a ∬ ψ(x) K(x,y) h(x,y) dy dx
    // with every factor evaluated pointwise on a grid (no spectral
    // machinery on the right-hand side).
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for trial in 0..10 {
        let h = random_field(2, 1, 3, 6, &mut rng);
        let kernel = random_kernel(1, 2, 2, &mut rng);
        let out = apply_h(&kernel, &h, 0, 1).unwrap();
        let a = (trial % 4) as i64 - 2;
        let g = 32;
        let lhs = grid_avg(1, g, |p| {
            Complex64::cis(2.0 * PI * a as f64 * p[0]) * out.eval(p).unwrap()
        });
        let rhs = grid_avg(2, g, |p| {
            let kv = kernel.eval(&p[..1], &p[1..]);
            Complex64::cis(2.0 * PI * a as f64 * p[0]) * kv[0] * h.eval(p).unwrap()
        }) * c(0.0, -2.0 * PI * a as f64);
        assert!(
            (lhs - rhs).norm() < 1e-10,
            "trial {trial}: lhs {lhs} rhs {rhs}"
        );
    }
}

#[test]
fn apply_s_zero_kernel_gives_zero_field() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let h = random_field(2, 1, 3, 5, &mut rng);
    let out = apply_s(&KernelSpec::zero(1), &h, 0, 1).unwrap();
    assert_eq!(out.num_nonzero(), 0);
}

#[test]
fn apply_s_diagonal_single_mode() {
    // k = l: shift by λ + η. With K̂(1,−1) = c the shift is zero, so both
    // conjugate modes land on the same output frequency and the coefficient
    // at ξ = a is 2πia·(c + conj(c)).
    let cc = c(0.25, 0.4);
    let kernel = KernelSpec::from_half_modes(
        1,
        vec![KernelMode {
            lambda: vec![1],
            eta: vec![-1],
            coeff: vec![cc],
        }],
    )
    .unwrap();
    let a = 2i64;
    let mut h = SpectralField::zeros(1, 1, 4).unwrap();
    h.set(&fv(1, &[a]), c(1.0, 0.0)).unwrap();
    let out = apply_s(&kernel, &h, 0, 0).unwrap();
    let expected = c(0.0, 2.0 * PI * a as f64) * (cc + cc.conj());
    assert!((out.get(&fv(1, &[a])) - expected).norm() < 1e-13);
}

#[test]
fn apply_s_off_diagonal_shifts_both_variables() {
    let cc = c(-0.6, 0.1);
    let kernel = KernelSpec::from_half_modes(
        1,
        vec![KernelMode {
            lambda: vec![1],
            eta: vec![2],
            coeff: vec![cc],
        }],
    )
    .unwrap();
    let (a, b) = (2i64, -2i64);
    let mut h = SpectralField::zeros(2, 1, 4).unwrap();
    h.set(&fv(1, &[a, b]), c(1.0, 0.0)).unwrap();
    let out = apply_s(&kernel, &h, 0, 1).unwrap();
    // mode (1,2) sends (a,b) to (a+1, b+2); mode (−1,−2) to (a−1, b−2)
    let expected = c(0.0, 2.0 * PI * (a + 1) as f64) * cc;
    assert!((out.get(&fv(1, &[a + 1, b + 2])) - expected).norm() < 1e-13);
    let expected_conj = c(0.0, 2.0 * PI * (a - 1) as f64) * cc.conj();
    assert!((out.get(&fv(1, &[a - 1, b - 2])) - expected_conj).norm() < 1e-13);
    assert_eq!(out.num_nonzero(), 2);
}

#[test]
fn apply_s_matches_weak_form_quadrature() {
    //   ∬ ψ (S_{0,1} h) = −2πi a ∬ ψ(x,y) K(x,y) h(x,y)
    // for ψ = e^{2πi(ax+by)}.
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for trial in 0..10 {
        let h = random_field(2, 1, 3, 6, &mut rng);
        let kernel = random_kernel(1, 2, 2, &mut rng);
        let out = apply_s(&kernel, &h, 0, 1).unwrap();
        let (a, b) = ((trial % 3) as i64 - 1, (trial % 5) as i64 - 2);
        let g = 32;
        let psi = |p: &[f64]| Complex64::cis(2.0 * PI * (a as f64 * p[0] + b as f64 * p[1]));
        let lhs = grid_avg(2, g, |p| psi(p) * out.eval(p).unwrap());
        let rhs = grid_avg(2, g, |p| {
            let kv = kernel.eval(&p[..1], &p[1..]);
            psi(p) * kv[0] * h.eval(p).unwrap()
        }) * c(0.0, -2.0 * PI * a as f64);
        assert!(
            (lhs - rhs).norm() < 1e-10,
            "trial {trial}: lhs {lhs} rhs {rhs}"
        );
    }
}

#[test]
fn apply_s_and_h_annihilate_zero_plane() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    for _ in 0..20 {
        let h = random_field(2, 1, 3, 8, &mut rng);
        let kernel = random_kernel(1, 2, 2, &mut rng);
        let s = apply_s(&kernel, &h, 0, 1).unwrap();
        for (freq, coeff) in s.iter_nonzero() {
            if freq.var(0).iter().all(|&x| x == 0) {
                assert_eq!(coeff, c(0.0, 0.0));
            }
        }
        let hh = apply_h(&kernel, &h, 0, 1).unwrap();
        for (freq, coeff) in hh.iter_nonzero() {
            if freq.var(0).iter().all(|&x| x == 0) {
                assert_eq!(coeff, c(0.0, 0.0));
            }
        }
    }
}

#[test]
fn apply_h_index_errors() {
    let h = SpectralField::constant(2, 1, 1, c(1.0, 0.0)).unwrap();
    assert!(apply_h(&KernelSpec::zero(1), &h, 2, 1).is_err());
    assert!(apply_h(&KernelSpec::zero(1), &h, 0, 0).is_err());
    assert!(apply_s(&KernelSpec::zero(1), &h, 0, 3).is_err());
}

#[test]
fn inv_grad_zero_plane_and_scaling() {
    let mut h = SpectralField::zeros(1, 1, 3).unwrap();
    h.set(&fv(1, &[0]), c(5.0, 0.0)).unwrap();
    h.set(&fv(1, &[2]), c(4.0 * PI, 0.0)).unwrap();
    let out = apply_inv_grad(&h, 0).unwrap();
    assert_eq!(out.get(&fv(1, &[0])), c(0.0, 0.0));
    assert!((out.get(&fv(1, &[2])) - c(1.0, 0.0)).norm() < 1e-14);
}

#[test]
fn inv_grad_h_composition_is_l1_bounded() {
    // Small-sample version of the operator audit: the full 1000-trial run
    // lives in the audit module.
    let mut rng = ChaCha8Rng::seed_from_u64(45);
    for _ in 0..50 {
        let h = random_field(2, 1, 4, 10, &mut rng);
        let kernel = random_kernel(1, 2, 3, &mut rng);
        let out = apply_inv_grad(&apply_h(&kernel, &h, 0, 1).unwrap(), 0).unwrap();
        let bound = kernel.l1_mass() * h.norms().l2;
        assert!(out.norms().l2 <= bound + 1e-12 * (1.0 + bound));
    }
}

#[test]
fn heat_zero_time_is_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let h = random_field(2, 1, 3, 6, &mut rng);
    let out = h.heat_propagate(1.3, 0.0).unwrap();
    for (freq, coeff) in h.iter_nonzero() {
        assert_eq!(out.get(&freq), coeff);
    }
}

#[test]
fn heat_single_mode_decay() {
    let mut h = SpectralField::zeros(1, 1, 2).unwrap();
    h.set(&fv(1, &[1]), c(1.0, 0.0)).unwrap();
    let out = h.heat_propagate(1.0, 1.0).unwrap();
    let expected = (-4.0 * PI * PI).exp();
    assert!((out.get(&fv(1, &[1])).re - expected).abs() < 1e-16);
}

#[test]
fn heat_semigroup_property() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let h = random_field(2, 1, 3, 8, &mut rng);
    let (dt1, dt2) = (0.013, 0.021);
    let composed = h
        .heat_propagate(0.7, dt1)
        .unwrap()
        .heat_propagate(0.7, dt2)
        .unwrap();
    let direct = h.heat_propagate(0.7, dt1 + dt2).unwrap();
    for (freq, coeff) in direct.iter_nonzero() {
        assert!((composed.get(&freq) - coeff).norm() < 1e-14);
    }
}

#[test]
fn heat_rejects_negative_time() {
    let h = SpectralField::constant(1, 1, 1, c(1.0, 0.0)).unwrap();
    assert!(matches!(
        h.heat_propagate(1.0, -0.1),
        Err(FourierError::NegativeTime(_))
    ));
}

#[test]
fn tensor_with_unit_copies_field() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let f = random_field(1, 1, 3, 5, &mut rng);
    let one = SpectralField::constant(1, 1, 3, c(1.0, 0.0)).unwrap();
    let prod = tensor_product(&f, &one).unwrap();
    for (freq, coeff) in f.iter_nonzero() {
        let joint = freq.concat(&fv(1, &[0]));
        assert_eq!(prod.get(&joint), coeff);
    }
    assert_eq!(prod.num_nonzero(), f.num_nonzero());
}

#[test]
fn tensor_of_probability_fields_is_probability() {
    let mut rho = SpectralField::uniform_density(1, 2).unwrap();
    rho.set(&fv(1, &[1]), c(0.25, 0.0)).unwrap();
    rho.set(&fv(1, &[-1]), c(0.25, 0.0)).unwrap();
    let prod = tensor_product(&rho, &rho).unwrap();
    assert_eq!(prod.get(&fv(1, &[0, 0])), c(1.0, 0.0));
}

#[test]
fn tensor_eval_is_product_of_evals() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let f = random_field(1, 1, 3, 5, &mut rng);
    let g = random_field(2, 1, 3, 5, &mut rng);
    let prod = tensor_product(&f, &g).unwrap();
    for _ in 0..100 {
        let p: Vec<f64> = (0..3).map(|_| rng.random::<f64>()).collect();
        let lhs = prod.eval(&p).unwrap();
        let rhs = f.eval(&p[..1]).unwrap() * g.eval(&p[1..]).unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
    }
}

#[test]
fn norms_single_and_zero() {
    let f = SpectralField::constant(1, 1, 2, c(3.0, -4.0)).unwrap();
    let n = f.norms();
    assert!((n.l2 - 5.0).abs() < 1e-15);
    assert!((n.linf - 5.0).abs() < 1e-15);
    let z = SpectralField::zeros(2, 1, 2).unwrap();
    assert_eq!(z.norms().l2, 0.0);
    assert_eq!(z.norms().linf, 0.0);
}

#[test]
fn l2_matches_grid_quadrature() {
    // Plancherel: Σ|c|² = ∫|h|², the latter by equal-weight quadrature of
    // pointwise evaluations on a grid past the Nyquist limit.
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let h = random_field(1, 1, 8, 12, &mut rng);
    let quad = grid_avg(1, 64, |p| {
        let v = h.eval(p).unwrap();
        c(v.norm_sqr(), 0.0)
    });
    assert!((h.norms().l2.powi(2) - quad.re).abs() < 1e-10);

    let h2 = random_field(2, 1, 4, 10, &mut rng);
    let quad2 = grid_avg(2, 24, |p| {
        let v = h2.eval(p).unwrap();
        c(v.norm_sqr(), 0.0)
    });
    assert!((h2.norms().l2.powi(2) - quad2.re).abs() < 1e-10);
}

#[test]
fn operators_preserve_conjugate_symmetry() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        // build a real-tagged field by symmetrizing a random draw
        let raw = random_field(2, 1, 3, 6, &mut rng);
        let mut sym = SpectralField::zeros(2, 1, 3).unwrap();
        for (freq, coeff) in raw.iter_nonzero() {
            sym.accumulate_truncating(freq.components(), coeff * 0.5);
            sym.accumulate_truncating(&freq.negated().components().to_vec(), coeff.conj() * 0.5);
        }
        sym.set_real_tag(true);
        assert!(sym.conjugate_symmetry_defect() < 1e-14);
        let kernel = random_kernel(1, 2, 2, &mut rng);

        assert!(apply_h(&kernel, &sym, 0, 1).unwrap().conjugate_symmetry_defect() < 1e-12);
        assert!(apply_s(&kernel, &sym, 0, 1).unwrap().conjugate_symmetry_defect() < 1e-12);
        assert!(apply_s(&kernel, &sym, 1, 1).unwrap().conjugate_symmetry_defect() < 1e-12);
        assert!(sym.heat_propagate(0.5, 0.1).unwrap().conjugate_symmetry_defect() < 1e-14);
        assert!(tensor_product(&sym, &sym).unwrap().conjugate_symmetry_defect() < 1e-12);
    }
}

#[test]
fn permute_vars_relabels_evaluation_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let f = random_field(3, 1, 2, 8, &mut rng);
    let perm = [2usize, 0, 1];
    let g = permute_vars(&f, &perm).unwrap();
    for _ in 0..50 {
        let p: Vec<f64> = (0..3).map(|_| rng.random::<f64>()).collect();
        // g(x0,x1,x2) = f(x_{perm map}) : output var j carries input var perm[j]
        let fp = [p[1], p[2], p[0]];
        let lhs = g.eval(&p).unwrap();
        let rhs = f.eval(&fp).unwrap();
        assert!((lhs - rhs).norm() < 1e-12, "{lhs} vs {rhs}");
    }
}

#[test]
fn convolve_is_pointwise_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let f = random_field(1, 1, 2, 4, &mut rng);
    let g = random_field(1, 1, 3, 5, &mut rng);
    let prod = convolve(&f, &g).unwrap();
    assert_eq!(prod.cutoff(), 5);
    for _ in 0..50 {
        let p = [rng.random::<f64>()];
        let lhs = prod.eval(&p).unwrap();
        let rhs = f.eval(&p).unwrap() * g.eval(&p).unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
    }
}

#[test]
fn integral_of_product_matches_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let f = random_field(1, 1, 4, 6, &mut rng);
    let g = random_field(1, 1, 4, 6, &mut rng);
    let lhs = integral_of_product(&f, &g);
    let rhs = grid_avg(1, 32, |p| f.eval(p).unwrap() * g.eval(p).unwrap());
    assert!((lhs - rhs).norm() < 1e-12);
}

#[test]
fn kernel_requires_conjugate_symmetry() {
    let lone = KernelMode {
        lambda: vec![1],
        eta: vec![0],
        coeff: vec![c(0.0, 1.0)],
    };
    assert!(matches!(
        KernelSpec::new(1, vec![lone]),
        Err(FourierError::KernelNotConjugateSymmetric(_))
    ));
}

#[test]
fn kuramoto_kernel_values() {
    let k = KernelSpec::kuramoto();
    assert!((k.l1_mass() - 1.0).abs() < 1e-15);
    // K(x,y) = −sin(2π(x−y))
    for (x, y) in [(0.0, 0.25), (0.1, 0.7), (0.9, 0.4)] {
        let v = k.eval(&[x], &[y]);
        let expected = -(2.0 * PI * (x - y)).sin();
        assert!((v[0] - expected).abs() < 1e-12);
    }
}

#[test]
fn field_json_roundtrip() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let f = random_field(2, 1, 3, 6, &mut rng);
    let text = serde_json::to_string(&f).unwrap();
    let back: SpectralField = serde_json::from_str(&text).unwrap();
    assert_eq!(back.num_vars(), f.num_vars());
    assert_eq!(back.cutoff(), f.cutoff());
    for (freq, coeff) in f.iter_nonzero() {
        assert_eq!(back.get(&freq), coeff);
    }
}

#[test]
fn field_json_rejects_out_of_box_and_unknown_keys() {
    let bad_box = r#"{"m":1,"d":1,"M":2,"real_tag":false,"coeffs":[[[5],1.0,0.0]]}"#;
    assert!(serde_json::from_str::<SpectralField>(bad_box).is_err());
    let unknown = r#"{"m":1,"d":1,"M":2,"real_tag":false,"coeffs":[],"extra":1}"#;
    assert!(serde_json::from_str::<SpectralField>(unknown).is_err());
    let bad_sym = r#"{"m":1,"d":1,"M":2,"real_tag":true,"coeffs":[[[1],1.0,1.0]]}"#;
    assert!(serde_json::from_str::<SpectralField>(bad_sym).is_err());
}

#[test]
fn kernel_json_roundtrip() {
    let k = KernelSpec::kuramoto();
    let text = serde_json::to_string(&k).unwrap();
    let back: KernelSpec = serde_json::from_str(&text).unwrap();
    assert_eq!(back, k);
    let zero = KernelSpec::zero(2);
    let text = serde_json::to_string(&zero).unwrap();
    let back: KernelSpec = serde_json::from_str(&text).unwrap();
    assert!(back.is_zero());
    assert_eq!(back.dim(), 2);
}

#[test]
fn dense_and_sparse_agree() {
    // m = 3 at this cutoff exceeds the dense ceiling and lands in sparse
    // storage; operations must not care.
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let f3 = random_field(3, 2, 5, 10, &mut rng);
    assert!(!f3.is_dense());
    let f1 = random_field(1, 2, 5, 5, &mut rng);
    assert!(f1.is_dense());
    let prod = tensor_product(&f1, &f3).unwrap();
    for (freq, coeff) in prod.iter_nonzero() {
        let head = freq.select_vars(&[0]);
        let tail = freq.select_vars(&[1, 2, 3]);
        let expect = f1.get(&head) * f3.get(&tail);
        assert!((coeff - expect).norm() < 1e-15);
    }
}
