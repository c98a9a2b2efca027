//! Experiment configuration: strict JSON (unknown keys are errors at every
//! level) plus invariant validation that reports every violation at once.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use chaos_core::mckean::PdeRunConfig;
use chaos_core::sim::SimConfig;
use chaos_core::SpectralField;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("config invalid:\n{}", .0.join("\n"))]
    Invalid(Vec<String>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Simulate,
    Chaos,
    MvSolve,
    Clt,
    PartitionAudit,
    OperatorAudit,
}

impl CommandKind {
    pub fn name(&self) -> &'static str {
        match self {
            CommandKind::Simulate => "simulate",
            CommandKind::Chaos => "chaos",
            CommandKind::MvSolve => "mv-solve",
            CommandKind::Clt => "clt",
            CommandKind::PartitionAudit => "partition-audit",
            CommandKind::OperatorAudit => "operator-audit",
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    pub m: usize,
    /// box radius: all tuples with |component| ≤ radius
    pub radius: i64,
    #[serde(default)]
    pub include_zero_planes: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: CommandKind,
    /// overrides the embedded sim seed when present (the CLI flag overrides
    /// both)
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sim: Option<SimConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pde: Option<PdeRunConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe: Option<ProbeConfig>,
    /// particle counts for scaling sweeps (chaos, clt); defaults to the
    /// embedded sim N
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<SpectralField>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solve_b: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_values: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
}

impl ExperimentConfig {
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let need_sim = matches!(
            self.command,
            CommandKind::Simulate | CommandKind::Chaos | CommandKind::Clt
        );
        if need_sim {
            match &self.sim {
                None => out.push(format!(
                    "command {} requires a \"sim\" section",
                    self.command.name()
                )),
                Some(sim) => {
                    for v in sim.violations() {
                        out.push(format!("sim: {v}"));
                    }
                }
            }
        }
        if self.command == CommandKind::MvSolve && self.pde.is_none() {
            out.push("command mv-solve requires a \"pde\" section".into());
        }
        if let Some(pde) = &self.pde {
            for v in pde.violations() {
                out.push(format!("pde: {v}"));
            }
        }
        match self.command {
            CommandKind::Chaos => {
                match &self.probe {
                    None => out.push("command chaos requires a \"probe\" section".into()),
                    Some(p) => {
                        if p.m == 0 || p.m > chaos_core::estimator::MAX_CORRELATION_ORDER {
                            out.push(format!(
                                "probe.m must lie in 1..={}, got {}",
                                chaos_core::estimator::MAX_CORRELATION_ORDER,
                                p.m
                            ));
                        }
                        if p.radius < 0 {
                            out.push("probe.radius must be ≥ 0".into());
                        }
                    }
                }
                if let Some(list) = &self.n_list {
                    if list.is_empty() {
                        out.push("n_list must not be empty".into());
                    }
                    if list.iter().any(|&n| n < 2) {
                        out.push("every n_list entry must be ≥ 2".into());
                    }
                }
            }
            CommandKind::Clt => {
                match &self.phi {
                    None => out.push("command clt requires a \"phi\" test function".into()),
                    Some(f) => {
                        if f.num_vars() != 1 || !f.real_tag() {
                            out.push("phi must be a real-tagged one-variable field".into());
                        }
                    }
                }
                let order = self.max_order.unwrap_or(3);
                if order == 0 || order > 3 {
                    out.push(format!("max_order must lie in 1..=3, got {order}"));
                }
            }
            CommandKind::PartitionAudit => {
                let m_max = self.m_max.unwrap_or(8);
                if m_max == 0 || m_max > 10 {
                    out.push(format!("m_max must lie in 1..=10, got {m_max}"));
                }
                if let Some(nv) = &self.n_values {
                    if nv.is_empty() {
                        out.push("n_values must not be empty".into());
                    }
                    if nv.iter().any(|&n| n == 0) {
                        out.push("every n_values entry must be ≥ 1".into());
                    }
                }
            }
            CommandKind::OperatorAudit => {
                if self.trials == Some(0) {
                    out.push("trials must be ≥ 1".into());
                }
            }
            _ => {}
        }
        out
    }

    /// Effective base seed: CLI override > top-level seed > sim seed > 0.
    pub fn effective_seed(&self, cli_override: Option<u64>) -> u64 {
        cli_override
            .or(self.seed)
            .or_else(|| self.sim.as_ref().map(|s| s.seed))
            .unwrap_or(0)
    }
}

/// Strict parse (serde rejects unknown keys) followed by invariant
/// validation that collects every violation.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let config: ExperimentConfig =
        serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    let violations = config.violations();
    if violations.is_empty() {
        Ok(config)
    } else {
        Err(ConfigError::Invalid(violations))
    }
}
