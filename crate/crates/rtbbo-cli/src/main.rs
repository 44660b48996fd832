//! Experiment CLI: run a single method, sweep the method ladder, or report
//! previously written results.

use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use rtbbo::envs::SyntheticDynamicEnv;
use rtbbo::runner::{
    emit_outputs, run_experiment_with_whitebox, structure_seed, EnvKind, ExperimentConfig,
    Method,
};

#[derive(Parser)]
#[command(
    name = "rtbbo",
    about = "Online black-box optimization experiments",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one environment/method combination and write its outputs.
    Run(RunArgs),
    /// Run the full method ladder for an environment.
    Sweep(SweepArgs),
    /// Summarize the summary.json files under an output directory.
    Report {
        /// Directory that `run` or `sweep` wrote into.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Environment: synthetic | wireless.
    #[arg(long)]
    env: Option<String>,
    /// Sampling cycles per trial.
    #[arg(long)]
    cycles: Option<u64>,
    /// Independent trials.
    #[arg(long)]
    trials: Option<usize>,
    /// Master seed; every stream derives from it.
    #[arg(long)]
    seed: Option<u64>,
    /// TOML config file; CLI flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Paper-scale preset: 19 cells, 36000 cycles, 50 trials (wireless) or
    /// 6000 cycles, 50 trials (synthetic). Explicit flags still win.
    #[arg(long)]
    full_scale: bool,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Method: random | greedy | fmsb_baseline | fmsb_s | fmsb_sw |
    /// rtbbo_sr | rtbbo_mr.
    #[arg(long)]
    method: Option<String>,
    /// Record per-tick wireless snapshots of trial 0 (positions, channel
    /// magnitudes, beams) to snapshots.jsonl.
    #[arg(long)]
    snapshots: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated methods; defaults to the full ladder for the env.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<String>>,
}

fn build_config(common: &CommonArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::from_path(path)
            .with_context(|| format!("loading config {}", path.display()))?,
        None => ExperimentConfig::default(),
    };
    if let Some(env) = &common.env {
        cfg.env = env.parse()?;
    }
    if common.full_scale {
        cfg.trials = 50;
        match cfg.env {
            EnvKind::Wireless => {
                cfg.wireless.n_cells = 19;
                cfg.cycles = 36_000;
            }
            EnvKind::Synthetic => cfg.cycles = 6_000,
        }
    }
    if let Some(cycles) = common.cycles {
        cfg.cycles = cycles;
    }
    if let Some(trials) = common.trials {
        cfg.trials = trials;
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn run_one(cfg: &ExperimentConfig, whitebox: Option<Vec<f64>>, out: &PathBuf) -> Result<()> {
    cfg.validate()?;
    let started = Instant::now();
    let result = run_experiment_with_whitebox(cfg, whitebox)
        .with_context(|| format!("running {} on {}", cfg.method, cfg.env))?;
    emit_outputs(&result, cfg, out)?;

    let totals: Vec<f64> = result
        .trials
        .iter()
        .filter(|t| !t.is_empty())
        .map(|t| t.iter().map(|r| r.total).sum::<f64>() / t.len() as f64)
        .collect();
    let mean = if totals.is_empty() {
        0.0
    } else {
        totals.iter().sum::<f64>() / totals.len() as f64
    };
    println!(
        "{:>14} env={} trials={} cycles={} mean_reward={:.4} ({:.1}s) -> {}",
        cfg.method.to_string(),
        cfg.env,
        cfg.trials,
        cfg.cycles,
        mean,
        started.elapsed().as_secs_f64(),
        out.display()
    );
    Ok(())
}

fn ladder(env: EnvKind) -> Vec<Method> {
    Method::ALL
        .into_iter()
        .filter(|m| *m != Method::Greedy || env == EnvKind::Wireless)
        .collect()
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run(args) => {
            let mut cfg = build_config(&args.common)?;
            if let Some(method) = &args.method {
                cfg.method = method.parse()?;
            }
            cfg.snapshots = args.snapshots || cfg.snapshots;
            run_one(&cfg, None, &args.common.out)
        }
        Command::Sweep(args) => {
            let base = build_config(&args.common)?;
            let methods: Vec<Method> = match &args.methods {
                Some(names) => names
                    .iter()
                    .map(|n| n.parse())
                    .collect::<rtbbo::Result<_>>()?,
                None => ladder(base.env),
            };
            if methods.is_empty() {
                bail!("no methods to sweep");
            }

            // The white-box trace depends only on the env and the seed;
            // compute it once and share it across methods.
            let whitebox = match base.env {
                EnvKind::Synthetic => {
                    let env = SyntheticDynamicEnv::generate(
                        base.synthetic.clone(),
                        structure_seed(&base),
                    )?;
                    Some(env.whitebox_trace(base.cycles, &base.sb))
                }
                EnvKind::Wireless => None,
            };

            for method in methods {
                let mut cfg = base.clone();
                cfg.method = method;
                let out = args.common.out.join(method.to_string());
                run_one(&cfg, whitebox.clone(), &out)?;
            }
            Ok(())
        }
        Command::Report { out } => {
            let mut rows = Vec::new();
            collect_summaries(&out, &mut rows)?;
            if rows.is_empty() {
                bail!("no summary.json files under {}", out.display());
            }
            rows.sort_by(|a, b| b.0.total_cmp(&a.0));
            println!(
                "{:<14} {:>10} {:>8} {:>14} {:>12} {:>10} {:>10}",
                "method", "env", "trials", "mean_reward", "std_reward", "rel_perf", "top100"
            );
            for (_, line) in rows {
                println!("{line}");
            }
            Ok(())
        }
    }
}

fn collect_summaries(dir: &PathBuf, rows: &mut Vec<(f64, String)>) -> Result<()> {
    for entry in std::fs::read_dir(dir).with_context(|| format!("reading {}", dir.display()))? {
        let path = entry?.path();
        if path.is_dir() {
            collect_summaries(&path, rows)?;
        } else if path.file_name().is_some_and(|n| n == "summary.json") {
            let text = std::fs::read_to_string(&path)?;
            let v: serde_json::Value = serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", path.display()))?;
            let mean = v["mean_reward"].as_f64().unwrap_or(f64::NAN);
            let rel = v["mean_relative_performance"]
                .as_f64()
                .map(|x| format!("{x:>10.4}"))
                .unwrap_or_else(|| format!("{:>10}", "-"));
            let top100 = v["top_k_curve"]
                .as_array()
                .and_then(|c| c.last())
                .and_then(|x| x.as_f64())
                .map(|x| format!("{x:>10.4}"))
                .unwrap_or_else(|| format!("{:>10}", "-"));
            rows.push((
                mean,
                format!(
                    "{:<14} {:>10} {:>8} {:>14.4} {:>12.4} {} {}",
                    v["method"].as_str().unwrap_or("?"),
                    v["env"].as_str().unwrap_or("?"),
                    v["trials"],
                    mean,
                    v["std_reward"].as_f64().unwrap_or(f64::NAN),
                    rel,
                    top100
                ),
            ));
        }
    }
    Ok(())
}
