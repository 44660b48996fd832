//! File outputs: per-cycle CSV, summary JSON, the resolved config, and
//! optional wireless snapshots.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::metrics::{mean_std, moving_average, relative_performance, top_k_concentration};
use super::{EnvKind, ExperimentConfig, ExperimentResult};
use crate::error::{Error, Result};

pub const TOP_K: usize = 100;

#[derive(Debug, Serialize)]
struct Summary {
    env: String,
    method: String,
    cycles: u64,
    trials: usize,
    /// Mean over trials of the per-trial average total reward.
    mean_reward: f64,
    /// Standard deviation over trials of the same.
    std_reward: f64,
    /// Mean relative performance over all cycles (synthetic only).
    #[serde(skip_serializing_if = "Option::is_none")]
    mean_relative_performance: Option<f64>,
    /// Trial-averaged cumulative share of the top 100 actions.
    top_k_curve: Vec<f64>,
    /// Fraction of cycles whose solver output needed one-hot repair.
    violation_rate: f64,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Write `cycles.csv`, `summary.json`, and `config.toml` (plus
/// `snapshots.jsonl` when collected) into `out_dir`.
pub fn emit_outputs(
    result: &ExperimentResult,
    cfg: &ExperimentConfig,
    out_dir: impl AsRef<Path>,
) -> Result<()> {
    let dir = out_dir.as_ref();
    fs::create_dir_all(dir).map_err(io_err(dir))?;

    // Per-cycle CSV. The env-specific column is relative performance for
    // the synthetic benchmark and a 100-cycle moving average of total
    // throughput for the wireless one.
    let csv_path = dir.join("cycles.csv");
    {
        let mut w = csv::Writer::from_path(&csv_path).map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(source) => Error::Io {
                path: csv_path.clone(),
                source,
            },
            other => Error::InvalidArgument(format!("csv error: {other:?}")),
        })?;
        let env_column = match cfg.env {
            EnvKind::Synthetic => "relative_performance",
            EnvKind::Wireless => "throughput_ma100",
        };
        w.write_record([
            "t",
            "trial",
            "total_reward",
            env_column,
            "mean_counter",
            "c_exploration",
        ])
        .map_err(|e| Error::InvalidArgument(format!("csv write: {e}")))?;

        for (trial_idx, trial) in result.trials.iter().enumerate() {
            let env_values: Vec<f64> = match cfg.env {
                EnvKind::Synthetic => {
                    let wb = result
                        .whitebox
                        .as_ref()
                        .expect("synthetic runs carry a whitebox trace");
                    trial
                        .iter()
                        .map(|r| {
                            let w = wb[r.t as usize];
                            if w == 0.0 {
                                f64::NAN
                            } else {
                                r.total / w
                            }
                        })
                        .collect()
                }
                EnvKind::Wireless => {
                    let totals: Vec<f64> = trial.iter().map(|r| r.total).collect();
                    moving_average(&totals, 100)
                }
            };
            for (rec, env_value) in trial.iter().zip(env_values) {
                w.write_record([
                    rec.t.to_string(),
                    trial_idx.to_string(),
                    format!("{:.9}", rec.total),
                    format!("{env_value:.9}"),
                    format!("{:.6}", rec.mean_counter),
                    format!("{:.9e}", rec.c_exploration),
                ])
                .map_err(|e| Error::InvalidArgument(format!("csv write: {e}")))?;
            }
        }
        w.flush().map_err(io_err(&csv_path))?;
    }

    // Summary JSON.
    let per_trial_means: Vec<f64> = result
        .trials
        .iter()
        .map(|t| {
            if t.is_empty() {
                0.0
            } else {
                t.iter().map(|r| r.total).sum::<f64>() / t.len() as f64
            }
        })
        .collect();
    let (mean_reward, std_reward) = mean_std(&per_trial_means);

    let mean_relative_performance = result.whitebox.as_ref().map(|wb| {
        let rel = relative_performance(&result.trials, wb);
        let valid: Vec<f64> = rel.into_iter().filter(|v| !v.is_nan()).collect();
        if valid.is_empty() {
            f64::NAN
        } else {
            valid.iter().sum::<f64>() / valid.len() as f64
        }
    });

    let mut top_k_curve = vec![0.0; TOP_K];
    if !result.trials.is_empty() {
        for trial in &result.trials {
            let curve = top_k_concentration(trial, TOP_K);
            for (acc, v) in top_k_curve.iter_mut().zip(curve) {
                *acc += v;
            }
        }
        for v in &mut top_k_curve {
            *v /= result.trials.len() as f64;
        }
    }

    let total_cycles: usize = result.trials.iter().map(|t| t.len()).sum();
    let violations: usize = result
        .trials
        .iter()
        .flat_map(|t| t.iter())
        .filter(|r| r.violated)
        .count();
    let summary = Summary {
        env: cfg.env.to_string(),
        method: cfg.method.to_string(),
        cycles: cfg.cycles,
        trials: result.trials.len(),
        mean_reward,
        std_reward,
        mean_relative_performance,
        top_k_curve,
        violation_rate: if total_cycles == 0 {
            0.0
        } else {
            violations as f64 / total_cycles as f64
        },
    };
    let summary_path = dir.join("summary.json");
    let json = serde_json::to_string_pretty(&summary)
        .map_err(|e| Error::InvalidArgument(format!("summary serialization: {e}")))?;
    fs::write(&summary_path, json).map_err(io_err(&summary_path))?;

    // The exact configuration this run used.
    let cfg_path = dir.join("config.toml");
    fs::write(&cfg_path, cfg.to_toml()).map_err(io_err(&cfg_path))?;

    if let Some(snaps) = &result.snapshots {
        let snap_path = dir.join("snapshots.jsonl");
        let mut f = fs::File::create(&snap_path).map_err(io_err(&snap_path))?;
        for s in snaps {
            let line = serde_json::to_string(s)
                .map_err(|e| Error::InvalidArgument(format!("snapshot serialization: {e}")))?;
            writeln!(f, "{line}").map_err(io_err(&snap_path))?;
        }
    }

    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runner::{run_experiment, Method};

    #[test]
    fn outputs_are_written_and_reproducible() {
        let mut cfg = ExperimentConfig::quick_test(EnvKind::Synthetic, Method::RtbboSr);
        cfg.cycles = 10;
        cfg.trials = 2;
        let result = run_experiment(&cfg).unwrap();

        let dir = std::env::temp_dir().join(format!("rtbbo-emit-{}", std::process::id()));
        let _ = fs::remove_dir_all(&dir);
        emit_outputs(&result, &cfg, &dir).unwrap();

        let csv = fs::read_to_string(dir.join("cycles.csv")).unwrap();
        assert_eq!(csv.lines().count(), 1 + 20, "header plus 2 trials x 10 cycles");
        assert!(csv.starts_with("t,trial,total_reward,relative_performance"));

        let again = run_experiment(&cfg).unwrap();
        let dir2 = dir.join("again");
        emit_outputs(&again, &cfg, &dir2).unwrap();
        let csv2 = fs::read_to_string(dir2.join("cycles.csv")).unwrap();
        assert_eq!(csv, csv2, "re-running the same config must be byte-identical");

        let summary: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap())
                .unwrap();
        assert_eq!(summary["trials"], 2);
        assert!(summary["mean_relative_performance"].is_number());

        let cfg_text = fs::read_to_string(dir.join("config.toml")).unwrap();
        let parsed = ExperimentConfig::from_toml(&cfg_text).unwrap();
        assert_eq!(parsed.method, cfg.method);

        let _ = fs::remove_dir_all(&dir);
    }

    #[test]
    fn empty_trial_list_writes_an_empty_summary() {
        let mut cfg = ExperimentConfig::quick_test(EnvKind::Wireless, Method::Random);
        cfg.trials = 0;
        cfg.cycles = 5;
        let result = run_experiment(&cfg).unwrap();
        assert!(result.trials.is_empty());

        let dir = std::env::temp_dir().join(format!("rtbbo-empty-{}", std::process::id()));
        let _ = fs::remove_dir_all(&dir);
        emit_outputs(&result, &cfg, &dir).unwrap();
        let csv = fs::read_to_string(dir.join("cycles.csv")).unwrap();
        assert_eq!(csv.lines().count(), 1, "header only");
        let summary: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap())
                .unwrap();
        assert_eq!(summary["trials"], 0);
        let _ = fs::remove_dir_all(&dir);
    }

    #[test]
    fn wireless_csv_uses_the_moving_average_column() {
        let mut cfg = ExperimentConfig::quick_test(EnvKind::Wireless, Method::Greedy);
        cfg.cycles = 6;
        cfg.trials = 1;
        cfg.snapshots = true;
        let result = run_experiment(&cfg).unwrap();
        let dir = std::env::temp_dir().join(format!("rtbbo-wl-{}", std::process::id()));
        let _ = fs::remove_dir_all(&dir);
        emit_outputs(&result, &cfg, &dir).unwrap();
        let csv = fs::read_to_string(dir.join("cycles.csv")).unwrap();
        assert!(csv.starts_with("t,trial,total_reward,throughput_ma100"));
        let snaps = fs::read_to_string(dir.join("snapshots.jsonl")).unwrap();
        assert_eq!(snaps.lines().count(), 6);
        let _ = fs::remove_dir_all(&dir);
    }
}
