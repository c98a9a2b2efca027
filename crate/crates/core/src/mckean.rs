//! Spectral exponential-integrator solvers for the mean-field density ρ_t
//! and the pair correction b_t (the limit of N·g₂).
//!
//! Time stepping is integrating-factor Euler: the stiff diffusion is applied
//! through the exact heat semigroup, the bounded transport nonlinearity
//! explicitly. Mode 0 of ρ is pinned to 1 every step.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fourier::{
    apply_h, apply_s, permute_vars, tensor_product, FourierError, FreqVec, KernelSpec,
    SpectralField,
};

#[derive(Debug, Error)]
pub enum PdeError {
    #[error("config invalid: {0}")]
    InvalidConfig(String),
    #[error("blow-up guard tripped at step {step} (t = {time:.6}): ‖ρ̂‖_linf = {linf:.3e} > 1e6")]
    BlowUp { step: usize, time: f64, linf: f64 },
    #[error("rho trajectory has {got} steps, expected {expected} for this grid")]
    GridMismatch { got: usize, expected: usize },
    #[error(transparent)]
    Fourier(#[from] FourierError),
}

/// Sign of the second transport term in the b equation. `Minus` is the
/// formal N·g₂ limit of the pair-correlation equation (both transport terms
/// negative, the symmetric form); `Plus` reproduces the sign printed in the
/// b display itself.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransportSign {
    #[default]
    Minus,
    Plus,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PdeRunConfig {
    pub sigma: f64,
    pub dt: f64,
    pub t_end: f64,
    pub obs_times: Vec<f64>,
    pub cutoff: i64,
    pub kernel: KernelSpec,
    pub rho0: SpectralField,
    #[serde(default)]
    pub b_transport_sign: TransportSign,
}

impl PdeRunConfig {
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.dt > 0.0) {
            out.push(format!("dt > 0 required, got {}", self.dt));
        }
        if !(self.t_end >= 0.0) {
            out.push(format!("t_end ≥ 0 required, got {}", self.t_end));
        }
        if self.sigma < 0.0 {
            out.push(format!("sigma ≥ 0 required, got {}", self.sigma));
        }
        for &t in &self.obs_times {
            if !(0.0..=self.t_end + 0.5 * self.dt).contains(&t) {
                out.push(format!("obs_time {t} outside [0, t_end]"));
            }
        }
        if self.cutoff < self.kernel.max_mode_abs() {
            out.push(format!(
                "cutoff M = {} silently truncates the kernel (max mode index {})",
                self.cutoff,
                self.kernel.max_mode_abs()
            ));
        }
        if self.kernel.dim() != self.rho0.dim() {
            out.push(format!(
                "kernel dimension {} ≠ rho0 dimension {}",
                self.kernel.dim(),
                self.rho0.dim()
            ));
        }
        if self.rho0.num_vars() != 1 {
            out.push("rho0 must be a one-variable field".into());
        }
        if !self.rho0.real_tag() {
            out.push("rho0 must be tagged real".into());
        }
        if self.rho0.num_vars() == 1 {
            let zero = FreqVec::zero(1, self.rho0.dim());
            if self.rho0.get(&zero) != Complex64::new(1.0, 0.0) {
                out.push("rho0 mode-0 coefficient must be exactly 1".into());
            }
            if self.rho0.cutoff() > self.cutoff {
                let lost = self
                    .rho0
                    .iter_nonzero()
                    .any(|(f, _)| f.max_abs() > self.cutoff);
                if lost {
                    out.push("rho0 has support beyond the solver cutoff".into());
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<(), PdeError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(PdeError::InvalidConfig(v.join("; ")))
        }
    }

    pub fn num_steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    pub fn obs_step(&self, t: f64) -> usize {
        ((t / self.dt).round() as usize).min(self.num_steps())
    }
}

/// Nonlinear transport term of the mean-field equation (diffusion excluded):
/// `−H₁(ρ⊗ρ)` with the second slot as the star variable, i.e.
/// `−div(ρ ∫K(·,x_*)ρ(x_*)dx_*)` in Fourier variables.
pub fn mv_rhs(rho: &SpectralField, kernel: &KernelSpec) -> Result<SpectralField, PdeError> {
    let pair = tensor_product(rho, rho)?;
    let transported = apply_h(kernel, &pair, 0, 1)?;
    Ok(transported.scaled(Complex64::new(-1.0, 0.0)))
}

/// ρ trajectory on the full dt grid (step 0 = initial data).
#[derive(Clone, Debug)]
pub struct RhoTrajectory {
    pub dt: f64,
    pub sigma: f64,
    pub fields: Vec<SpectralField>,
}

fn pin_mode_zero(rho: &mut SpectralField) {
    let zero = FreqVec::zero(rho.num_vars(), rho.dim());
    rho.set(&zero, Complex64::new(1.0, 0.0))
        .expect("zero mode is inside every box");
}

const BLOW_UP_LINF: f64 = 1e6;

/// Integrate ρ on the full grid:
/// `ρ̂ⁿ⁺¹ = heat(ρ̂ⁿ + dt·rhs(ρ̂ⁿ))`, mode 0 pinned to 1.
pub fn solve_rho_trajectory(config: &PdeRunConfig) -> Result<RhoTrajectory, PdeError> {
    config.validate()?;
    let mut rho = config.rho0.with_cutoff(config.cutoff)?;
    rho.set_real_tag(true);
    let n_steps = config.num_steps();
    let mut fields = Vec::with_capacity(n_steps + 1);
    fields.push(rho.clone());
    for step in 1..=n_steps {
        let rhs = mv_rhs(&rho, &config.kernel)?;
        let advanced = rho
            .add_scaled(&rhs, Complex64::new(config.dt, 0.0))?
            .heat_propagate(config.sigma, config.dt)?;
        rho = advanced;
        pin_mode_zero(&mut rho);
        let linf = rho.norms().linf;
        if linf > BLOW_UP_LINF {
            return Err(PdeError::BlowUp {
                step,
                time: step as f64 * config.dt,
                linf,
            });
        }
        fields.push(rho.clone());
    }
    Ok(RhoTrajectory {
        dt: config.dt,
        sigma: config.sigma,
        fields,
    })
}

/// Snapshots of ρ at the observation times.
pub fn solve_rho(config: &PdeRunConfig) -> Result<Vec<(f64, SpectralField)>, PdeError> {
    let traj = solve_rho_trajectory(config)?;
    Ok(config
        .obs_times
        .iter()
        .map(|&t| {
            let s = config.obs_step(t);
            (s as f64 * config.dt, traj.fields[s].clone())
        })
        .collect())
}

/// Right-hand side of the b equation (diffusion excluded), assembled from
/// the transport of b against ρ in each variable plus the ρ-only sources:
///
/// `−div_x(∫K(x,z)ρ(x)b(y,z)dz) ∓ div_y(∫K(y,z)ρ(y)b(x,z)dz)
///  −div_x(b(x,y)∫K(x,z)ρ(z)dz) − div_y(b(x,y)∫K(y,z)ρ(z)dz)
///  −div_x(∫K(x,z)ρ⊗³dz) − div_y(∫K(y,z)ρ⊗³dz)
///  −div_x(K(x,y)ρ⊗²)    − div_y(K(y,x)ρ⊗²)`
///
/// The second line (advection of b by the mean-field velocity) belongs to
/// the N·g₂ limit of the pair-correlation hierarchy even though the b
/// display drops it; it vanishes whenever `∫K(·,z)ρ(z)dz = 0`.
///
/// `sign` controls the b-transport div_y term; `Minus` (the symmetric form)
/// keeps b̂(ξ,η) = b̂(η,ξ) exactly.
pub fn b_rhs(
    b: &SpectralField,
    rho: &SpectralField,
    kernel: &KernelSpec,
    sign: TransportSign,
) -> Result<SpectralField, PdeError> {
    let minus = Complex64::new(-1.0, 0.0);

    // ρ(x) b(y,z) on slots (x,y,z); star z, transport x
    let rho_b = tensor_product(rho, b)?;
    let ax = apply_h(kernel, &rho_b, 0, 2)?;

    // ρ(y) b(x,z): permute tensor slots (ρ, b₁, b₂) = (y, x, z) → (x, y, z)
    let rho_b_swapped = permute_vars(&rho_b, &[1, 0, 2])?;
    let ay = apply_h(kernel, &rho_b_swapped, 1, 2)?;

    // mean-field advection of b: b(x,y)ρ(z) on slots (x,y,z)
    let b_rho = tensor_product(b, rho)?;
    let dx = apply_h(kernel, &b_rho, 0, 2)?;
    let dy = apply_h(kernel, &b_rho, 1, 2)?;

    // ρ⊗³ sources with star z
    let rho3 = tensor_product(&tensor_product(rho, rho)?, rho)?;
    let bx = apply_h(kernel, &rho3, 0, 2)?;
    let by = apply_h(kernel, &rho3, 1, 2)?;

    // contact terms div_x(K(x,y)ρ⊗²), div_y(K(y,x)ρ⊗²)
    let rho2 = tensor_product(rho, rho)?;
    let cx = apply_s(kernel, &rho2, 0, 1)?;
    let cy = apply_s(kernel, &rho2, 1, 0)?;

    let ay_weight = match sign {
        TransportSign::Minus => minus,
        TransportSign::Plus => Complex64::new(1.0, 0.0),
    };
    let mut rhs = ax.scaled(minus);
    rhs = rhs.add_scaled(&ay, ay_weight)?;
    for term in [&dx, &dy, &bx, &by, &cx, &cy] {
        rhs = rhs.add_scaled(term, minus)?;
    }
    Ok(rhs)
}

/// Integrate b against a precomputed ρ trajectory on the same grid, with
/// b₀ = 0, recording snapshots at the observation times.
pub fn solve_b(
    rho_traj: &RhoTrajectory,
    config: &PdeRunConfig,
) -> Result<Vec<(f64, SpectralField)>, PdeError> {
    config.validate()?;
    let n_steps = config.num_steps();
    if rho_traj.fields.len() != n_steps + 1 {
        return Err(PdeError::GridMismatch {
            got: rho_traj.fields.len(),
            expected: n_steps + 1,
        });
    }
    let mut b = SpectralField::zeros(2, config.rho0.dim(), config.cutoff)?;
    b.set_real_tag(true);
    let obs_steps: Vec<usize> = config.obs_times.iter().map(|&t| config.obs_step(t)).collect();
    let mut out = Vec::with_capacity(obs_steps.len());
    let record = |out: &mut Vec<(f64, SpectralField)>, step: usize, b: &SpectralField| {
        for (&t, &s) in config.obs_times.iter().zip(&obs_steps) {
            if s == step {
                out.push((t, b.clone()));
            }
        }
    };
    record(&mut out, 0, &b);
    for step in 1..=n_steps {
        let rho_n = &rho_traj.fields[step - 1];
        let rhs = b_rhs(&b, rho_n, &config.kernel, config.b_transport_sign)?;
        b = b
            .add_scaled(&rhs, Complex64::new(config.dt, 0.0))?
            .heat_propagate(config.sigma, config.dt)?;
        let linf = b.norms().linf;
        if linf > BLOW_UP_LINF {
            return Err(PdeError::BlowUp {
                step,
                time: step as f64 * config.dt,
                linf,
            });
        }
        record(&mut out, step, &b);
    }
    Ok(out)
}
