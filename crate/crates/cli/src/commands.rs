//! Command dispatch: runs the owning module's pipeline for each config and
//! assembles the report payload.

use std::collections::BTreeMap;

use anyhow::{anyhow, Context, Result};

use chaos_core::clt::{
    cumulant_bound_audit, empirical_cumulants, ks_distance, linear_statistic, variance_limit,
    TestFunction,
};
use chaos_core::estimator::{chaos_norms, estimate_correlations, scaling_slope, FreqProbe,
    ScalingPoint};
use chaos_core::mckean::{solve_b, solve_rho_trajectory};
use chaos_core::sim::{mix_seed, run, SimConfig, Snapshot};

use crate::config::{CommandKind, ExperimentConfig};
use crate::report::{
    ChaosCsvRow, CltCellSummary, CltCsvRow, NormSummary, Payload, SlopeSummary, SnapshotDump,
    TrajectoryRecord,
};

/// Dispatch the validated config. The numeric payload depends only on
/// (config, seed); thread counts change nothing because all parallel
/// reductions run in fixed order.
pub fn execute(config: &ExperimentConfig, seed_override: Option<u64>) -> Result<Payload> {
    match config.command {
        CommandKind::Simulate => simulate(config, seed_override),
        CommandKind::Chaos => chaos(config, seed_override),
        CommandKind::MvSolve => mv_solve(config),
        CommandKind::Clt => clt(config, seed_override),
        CommandKind::PartitionAudit => partition_audit(config),
        CommandKind::OperatorAudit => operator_audit(config, seed_override),
    }
}

fn sim_with_seed(config: &ExperimentConfig, seed_override: Option<u64>) -> SimConfig {
    let mut sim = config.sim.clone().expect("validated");
    sim.seed = config.effective_seed(seed_override);
    sim
}

fn xi_label(freq: &chaos_core::FreqVec) -> String {
    freq.components()
        .iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(":")
}

fn simulate(config: &ExperimentConfig, seed_override: Option<u64>) -> Result<Payload> {
    let sim = sim_with_seed(config, seed_override);
    let snapshots = run(&sim).context("simulate")?;
    let times: Vec<f64> = snapshots.iter().map(|s| s.time).collect();
    let dumps = snapshots
        .into_iter()
        .map(|s| SnapshotDump {
            time: s.time,
            step_index: s.step_index,
            positions: s.positions,
            d: sim.d,
        })
        .collect();
    Ok(Payload::Simulate {
        snapshots: dumps,
        times,
        replicas: sim.replicas,
        rng_streams: format!("chacha8(seed={}, stream=replica index)", sim.seed),
    })
}

fn chaos(config: &ExperimentConfig, seed_override: Option<u64>) -> Result<Payload> {
    let base = sim_with_seed(config, seed_override);
    let probe_cfg = config.probe.as_ref().expect("validated");
    let probe = FreqProbe::box_probe(
        probe_cfg.m,
        base.d,
        probe_cfg.radius,
        probe_cfg.include_zero_planes,
    )?;
    let n_list = config.n_list.clone().unwrap_or_else(|| vec![base.n]);

    let mut rows = Vec::new();
    let mut norms = Vec::new();
    // per (time index) scaling points across N
    let mut points_by_time: BTreeMap<usize, Vec<ScalingPoint>> = BTreeMap::new();
    let mut times: Vec<f64> = Vec::new();
    for &n in &n_list {
        let mut sim = base.clone();
        sim.n = n;
        sim.seed = mix_seed(base.seed, n as u64);
        let snapshots: Vec<Snapshot> = run(&sim).with_context(|| format!("chaos run N={n}"))?;
        for (t_idx, snap) in snapshots.iter().enumerate() {
            if times.len() <= t_idx {
                times.push(snap.time);
            }
            let estimate = estimate_correlations(&snap.positions, sim.d, snap.time, &probe)?;
            for entry in &estimate.entries {
                rows.push(ChaosCsvRow {
                    n,
                    m: estimate.m,
                    t: snap.time,
                    xi: xi_label(&entry.freq),
                    re: entry.mean.re,
                    im: entry.mean.im,
                    se_re: entry.se_re,
                    se_im: entry.se_im,
                });
            }
            let norm = chaos_norms(&estimate)?;
            norms.push(NormSummary {
                n,
                m: estimate.m,
                t: snap.time,
                linf: norm.linf,
                linf_se: norm.linf_se,
                l2_truncated: norm.l2_truncated,
            });
            points_by_time.entry(t_idx).or_default().push(ScalingPoint {
                n,
                value: norm.linf,
                se: norm.linf_se,
            });
        }
    }
    let mut slopes = Vec::new();
    if n_list.len() >= 3 {
        for (t_idx, points) in &points_by_time {
            let fit = scaling_slope(points)?;
            slopes.push(SlopeSummary {
                m: probe_cfg.m,
                t: times[*t_idx],
                slope: fit.slope,
                slope_se: fit.slope_se,
                intercept: fit.intercept,
            });
        }
    }
    Ok(Payload::Chaos {
        rows,
        norms,
        slopes,
    })
}

fn mv_solve(config: &ExperimentConfig) -> Result<Payload> {
    let pde = config.pde.clone().expect("validated");
    let traj = solve_rho_trajectory(&pde).context("mv-solve rho")?;
    let rho_records: Vec<TrajectoryRecord> = pde
        .obs_times
        .iter()
        .map(|&t| {
            let s = pde.obs_step(t);
            TrajectoryRecord {
                time: s as f64 * pde.dt,
                field: traj.fields[s].clone(),
            }
        })
        .collect();
    let solved_b = config.solve_b.unwrap_or(false);
    let b_records = if solved_b {
        solve_b(&traj, &pde)
            .context("mv-solve b")?
            .into_iter()
            .map(|(time, field)| TrajectoryRecord { time, field })
            .collect()
    } else {
        Vec::new()
    };
    let times = rho_records.iter().map(|r| r.time).collect();
    Ok(Payload::MvSolve {
        rho_records,
        b_records,
        times,
        solved_b,
    })
}

fn clt(config: &ExperimentConfig, seed_override: Option<u64>) -> Result<Payload> {
    let base = sim_with_seed(config, seed_override);
    let phi = TestFunction::new(config.phi.clone().expect("validated"))
        .map_err(|e| anyhow!("phi: {e}"))?;
    let max_order = config.max_order.unwrap_or(3);
    let n_list = config.n_list.clone().unwrap_or_else(|| vec![base.n]);

    // spectral limit per obs time when a pde section is present
    let limits: Option<BTreeMap<usize, f64>> = match &config.pde {
        None => None,
        Some(pde) => {
            let traj = solve_rho_trajectory(pde).context("clt limit rho")?;
            let bs = solve_b(&traj, pde).context("clt limit b")?;
            let mut map = BTreeMap::new();
            for (idx, (t, b)) in bs.iter().enumerate() {
                let s = pde.obs_step(*t);
                let rho = &traj.fields[s];
                let v = variance_limit(&phi, rho, b).map_err(|e| anyhow!("variance_limit: {e}"))?;
                map.insert(idx, v);
            }
            Some(map)
        }
    };

    let mut rows = Vec::new();
    let mut cells = Vec::new();
    for &n in &n_list {
        let mut sim = base.clone();
        sim.n = n;
        sim.seed = mix_seed(base.seed, n as u64);
        let snapshots = run(&sim).with_context(|| format!("clt run N={n}"))?;
        for (t_idx, snap) in snapshots.iter().enumerate() {
            let samples: Vec<f64> = snap
                .positions
                .iter()
                .map(|p| linear_statistic(p, sim.d, &phi))
                .collect::<Result<_, _>>()
                .map_err(|e| anyhow!("linear statistic: {e}"))?;
            let r = samples.len() as f64;
            let mean = samples.iter().sum::<f64>() / r;
            let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (r - 1.0);
            // jackknife SE of the sample variance
            let mut jack_var = Vec::with_capacity(samples.len());
            let sum: f64 = samples.iter().sum();
            let sum_sq: f64 = samples.iter().map(|s| s * s).sum();
            for &s in &samples {
                let rm = (sum - s) / (r - 1.0);
                let v = ((sum_sq - s * s) - (r - 1.0) * rm * rm) / (r - 2.0);
                jack_var.push(v);
            }
            let jack_mean = jack_var.iter().sum::<f64>() / r;
            let var_se = ((r - 1.0) / r
                * jack_var
                    .iter()
                    .map(|v| (v - jack_mean).powi(2))
                    .sum::<f64>())
            .sqrt();
            let cums = empirical_cumulants(&samples, max_order)
                .map_err(|e| anyhow!("cumulants: {e}"))?;
            for c in &cums {
                rows.push(CltCsvRow {
                    n,
                    t: snap.time,
                    kappa_order: c.order,
                    value: c.value,
                    se: c.se,
                });
            }
            let ks = ks_distance(&samples).map_err(|e| anyhow!("ks: {e}"))?;
            let audit = cumulant_bound_audit(&phi, &cums, n);
            let limit = limits.as_ref().and_then(|m| m.get(&t_idx)).copied();
            let n_variance = n as f64 * var;
            cells.push(CltCellSummary {
                n,
                t: snap.time,
                sample_mean: mean,
                n_variance,
                n_variance_se: n as f64 * var_se,
                ks,
                variance_limit: limit,
                variance_gap: limit.map(|l| (n_variance - l).abs()),
                bound_audit_pass: audit.iter().all(|c| c.pass),
            });
        }
    }
    Ok(Payload::Clt { rows, cells })
}

fn partition_audit(config: &ExperimentConfig) -> Result<Payload> {
    let m_max = config.m_max.unwrap_or(8);
    let n_values = config
        .n_values
        .clone()
        .unwrap_or_else(chaos_core::audit::default_n_values);
    let report = chaos_core::audit::partition_audit(m_max, &n_values)?;
    Ok(Payload::PartitionAudit {
        all_pass: report.all_pass,
        cells: report.rows.len(),
        report,
    })
}

fn operator_audit(config: &ExperimentConfig, seed_override: Option<u64>) -> Result<Payload> {
    let trials = config.trials.unwrap_or(1000);
    let seed = config.effective_seed(seed_override);
    let report = chaos_core::audit::operator_audit(trials, seed)?;
    Ok(Payload::OperatorAudit {
        all_pass: report.all_pass,
        min_slack: report.min_slack,
        trials,
        report,
    })
}
