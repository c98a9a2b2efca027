//! Report assembly and file output. Every run writes
//! `<hash>_summary.json` plus per-command CSV / JSON-lines payloads, with
//! the 12-hex config hash embedded in each file name so re-runs of the same
//! config overwrite exactly their own files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use chaos_core::audit::{OperatorAuditReport, PartitionAuditReport};
use chaos_core::SpectralField;

use crate::config::{CommandKind, ExperimentConfig};

/// Hex SHA-256 of the canonical (serde) config JSON.
pub fn config_hash(config: &ExperimentConfig) -> String {
    let canonical = serde_json::to_string(config).expect("config serializes");
    let digest = Sha256::digest(canonical.as_bytes());
    let mut out = String::with_capacity(64);
    for byte in digest {
        write!(out, "{byte:02x}").unwrap();
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct SnapshotDump {
    pub time: f64,
    pub step_index: usize,
    #[serde(skip)]
    pub positions: Vec<Vec<f64>>,
    pub d: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChaosCsvRow {
    pub n: usize,
    pub m: usize,
    pub t: f64,
    pub xi: String,
    pub re: f64,
    pub im: f64,
    pub se_re: f64,
    pub se_im: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct NormSummary {
    pub n: usize,
    pub m: usize,
    pub t: f64,
    pub linf: f64,
    pub linf_se: f64,
    pub l2_truncated: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SlopeSummary {
    pub m: usize,
    pub t: f64,
    pub slope: f64,
    pub slope_se: f64,
    pub intercept: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CltCsvRow {
    pub n: usize,
    pub t: f64,
    pub kappa_order: usize,
    pub value: f64,
    pub se: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CltCellSummary {
    pub n: usize,
    pub t: f64,
    pub sample_mean: f64,
    pub n_variance: f64,
    pub n_variance_se: f64,
    pub ks: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variance_limit: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variance_gap: Option<f64>,
    pub bound_audit_pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrajectoryRecord {
    pub time: f64,
    pub field: SpectralField,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Payload {
    Simulate {
        #[serde(skip)]
        snapshots: Vec<SnapshotDump>,
        times: Vec<f64>,
        replicas: usize,
        rng_streams: String,
    },
    Chaos {
        #[serde(skip)]
        rows: Vec<ChaosCsvRow>,
        norms: Vec<NormSummary>,
        slopes: Vec<SlopeSummary>,
    },
    MvSolve {
        #[serde(skip)]
        rho_records: Vec<TrajectoryRecord>,
        #[serde(skip)]
        b_records: Vec<TrajectoryRecord>,
        times: Vec<f64>,
        solved_b: bool,
    },
    Clt {
        #[serde(skip)]
        rows: Vec<CltCsvRow>,
        cells: Vec<CltCellSummary>,
    },
    PartitionAudit {
        #[serde(skip)]
        report: PartitionAuditReport,
        all_pass: bool,
        cells: usize,
    },
    OperatorAudit {
        #[serde(skip)]
        report: OperatorAuditReport,
        all_pass: bool,
        min_slack: f64,
        trials: usize,
    },
}

impl Payload {
    pub fn audit_passed(&self) -> Option<bool> {
        match self {
            Payload::PartitionAudit { all_pass, .. } => Some(*all_pass),
            Payload::OperatorAudit { all_pass, .. } => Some(*all_pass),
            _ => None,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ExperimentReport {
    pub tool_version: String,
    pub command: CommandKind,
    pub config_hash: String,
    pub config: Value,
    pub wall_clock_seconds: f64,
    pub payload: Payload,
}

impl ExperimentReport {
    pub fn new(config: &ExperimentConfig, wall_clock_seconds: f64, payload: Payload) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: config.command,
            config_hash: config_hash(config),
            config: serde_json::to_value(config).expect("config serializes"),
            wall_clock_seconds,
            payload,
        }
    }
}

fn write_text(path: &Path, text: &str) -> std::io::Result<()> {
    fs::write(path, text)
}

fn fmt_f64(x: f64) -> String {
    // shortest round-trip representation, deterministic across runs
    format!("{x}")
}

/// Write the summary JSON and all bulk payload files; returns the paths
/// written. IO failures are surfaced verbatim.
pub fn write_report(report: &ExperimentReport, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let prefix = &report.config_hash[..12];
    let mut written = Vec::new();

    match &report.payload {
        Payload::Simulate { snapshots, .. } => {
            for snap in snapshots {
                let path = dir.join(format!("{prefix}_snapshot_s{:06}.csv", snap.step_index));
                let mut text = String::from("replica,particle");
                for c in 0..snap.d {
                    write!(text, ",x{c}").unwrap();
                }
                text.push('\n');
                for (r, positions) in snap.positions.iter().enumerate() {
                    let n = positions.len() / snap.d;
                    for i in 0..n {
                        write!(text, "{r},{i}").unwrap();
                        for c in 0..snap.d {
                            write!(text, ",{}", fmt_f64(positions[i * snap.d + c])).unwrap();
                        }
                        text.push('\n');
                    }
                }
                write_text(&path, &text)?;
                written.push(path);
            }
        }
        Payload::Chaos { rows, .. } => {
            let path = dir.join(format!("{prefix}_chaos.csv"));
            let mut text = String::from("n,m,t,xi,re,im,se_re,se_im\n");
            for row in rows {
                writeln!(
                    text,
                    "{},{},{},{},{},{},{},{}",
                    row.n,
                    row.m,
                    fmt_f64(row.t),
                    row.xi,
                    fmt_f64(row.re),
                    fmt_f64(row.im),
                    fmt_f64(row.se_re),
                    fmt_f64(row.se_im)
                )
                .unwrap();
            }
            write_text(&path, &text)?;
            written.push(path);
        }
        Payload::MvSolve {
            rho_records,
            b_records,
            solved_b,
            ..
        } => {
            let path = dir.join(format!("{prefix}_rho.jsonl"));
            let mut text = String::new();
            for rec in rho_records {
                writeln!(text, "{}", serde_json::to_string(rec).unwrap()).unwrap();
            }
            write_text(&path, &text)?;
            written.push(path);
            if *solved_b {
                let path = dir.join(format!("{prefix}_b.jsonl"));
                let mut text = String::new();
                for rec in b_records {
                    writeln!(text, "{}", serde_json::to_string(rec).unwrap()).unwrap();
                }
                write_text(&path, &text)?;
                written.push(path);
            }
        }
        Payload::Clt { rows, .. } => {
            let path = dir.join(format!("{prefix}_clt.csv"));
            let mut text = String::from("n,t,kappa_order,value,se\n");
            for row in rows {
                writeln!(
                    text,
                    "{},{},{},{},{}",
                    row.n,
                    fmt_f64(row.t),
                    row.kappa_order,
                    fmt_f64(row.value),
                    fmt_f64(row.se)
                )
                .unwrap();
            }
            write_text(&path, &text)?;
            written.push(path);
        }
        Payload::PartitionAudit { report: audit, .. } => {
            let path = dir.join(format!("{prefix}_partition_audit.csv"));
            let mut text = String::from(
                "m,n,partitions,max_ratio,bound_pass,low_coeffs_vanish,coeff_sum_pass\n",
            );
            for row in &audit.rows {
                writeln!(
                    text,
                    "{},{},{},{},{},{},{}",
                    row.m,
                    row.n,
                    row.partitions,
                    fmt_f64(row.max_ratio),
                    row.bound_pass,
                    row.low_coeffs_vanish,
                    row.coeff_sum_pass
                )
                .unwrap();
            }
            write_text(&path, &text)?;
            written.push(path);
        }
        Payload::OperatorAudit { report: audit, .. } => {
            let path = dir.join(format!("{prefix}_operator_audit.csv"));
            let mut text = String::from("trial,op,norm,bound,value,slack,pass\n");
            for row in &audit.rows {
                writeln!(
                    text,
                    "{},{},{},{},{},{},{}",
                    row.trial,
                    serde_json::to_value(row.op).unwrap().as_str().unwrap(),
                    serde_json::to_value(row.norm).unwrap().as_str().unwrap(),
                    fmt_f64(row.bound),
                    fmt_f64(row.value),
                    fmt_f64(row.slack),
                    row.pass
                )
                .unwrap();
            }
            write_text(&path, &text)?;
            written.push(path);
        }
    }

    let summary_path = dir.join(format!("{prefix}_summary.json"));
    let text = serde_json::to_string_pretty(report).expect("report serializes");
    write_text(&summary_path, &text)?;
    written.push(summary_path);
    Ok(written)
}
