//! Command-line driver: parses a campaign config, dispatches the requested
//! campaign, and writes CSV/JSON outputs plus a run manifest.
//!
//! Exit codes: 0 success, 2 configuration or validation failure, 3
//! numerical or runtime domain error.

mod output;

use chrono::Utc;
use clap::{Parser, Subcommand};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use etherbell::analysis::required_n_per_arm;
use etherbell::protocol::{
    run_bell_campaign, run_rotation_campaign, run_sidereal_sweep, CampaignConfig,
};

use output::{rotation_csv, sweep_csv, BellReport, RunManifest};

#[derive(Parser)]
#[command(
    name = "etherbell",
    version,
    about = "Event-level simulator for a rotating two-photon interferometry experiment"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Campaign configuration JSON.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override the master seed from the config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Override the events per campaign point from the config.
    #[arg(long, global = true)]
    events: Option<u64>,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Cap the number of worker threads. Never affects the results, only
    /// how fast they arrive.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the rotation protocol and report the model verdict.
    Rotate,
    /// Sample coincidence rates over the sidereal/stage grid.
    Sweep,
    /// Run the four-setting Bell-test campaign.
    Bell,
    /// Print the per-arm sample size needed to separate two proportions.
    Power {
        #[arg(long)]
        p1: f64,
        #[arg(long)]
        p2: f64,
        /// Separation threshold in sigmas.
        #[arg(long, default_value_t = 5.0)]
        sigma: f64,
    },
}

enum CliError {
    /// Bad configuration or arguments; exit 2.
    Config(String),
    /// Numerical or I/O failure at run time; exit 3.
    Runtime(String),
}

impl From<etherbell::Error> for CliError {
    fn from(err: etherbell::Error) -> Self {
        if err.is_config_error() {
            CliError::Config(err.to_string())
        } else {
            CliError::Runtime(err.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Runtime(err.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Runtime(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Power { p1, p2, sigma } => {
            let n = required_n_per_arm(p1, p2, sigma).map_err(|e| CliError::Config(e.to_string()))?;
            println!("{n}");
            Ok(())
        }
        Command::Rotate => with_config(&cli, "rotate", |cfg, out| {
            let report = run_rotation_campaign(cfg)?;
            let outputs = vec![
                write_file(out, "verdict.json", &to_json(&report)?)?,
                write_file(
                    out,
                    "rotation_points.csv",
                    &rotation_csv(&report.points, &report.model),
                )?,
            ];
            println!(
                "verdict: {:?} (z = {:.3}, p_before = {:.5}, p_after = {:.5}, effective_dphi_rad = {:.5} +- {:.5})",
                report.decision,
                report.shift.z,
                report.shift.p_before.p_hat,
                report.shift.p_after.p_hat,
                report.effective_phase_shift_rad,
                report.effective_phase_shift_se_rad,
            );
            Ok(outputs)
        }),
        Command::Sweep => with_config(&cli, "sweep", |cfg, out| {
            let points = run_sidereal_sweep(cfg)?;
            let outputs = vec![write_file(out, "sweep.csv", &sweep_csv(&points, cfg.model.label()))?];
            let max_split = sweep_max_split(&points);
            match max_split {
                Some((t, split)) => println!(
                    "sweep: {} points written; largest stage split {:.5} at t_sidereal = {} h",
                    points.len(),
                    split,
                    t
                ),
                None => println!("sweep: {} points written", points.len()),
            }
            Ok(outputs)
        }),
        Command::Bell => with_config(&cli, "bell", |cfg, out| {
            let result = run_bell_campaign(cfg)?;
            let settings = cfg.chsh.as_ref().expect("validated by run_bell_campaign");
            let report = BellReport {
                settings,
                events_per_setting: cfg.events_per_point,
                result: &result,
            };
            let outputs = vec![write_file(out, "bell.json", &to_json(&report)?)?];
            println!(
                "bell: s_value = {:.5} +- {:.5} (E11 = {:.4}, E12 = {:.4}, E21 = {:.4}, E22 = {:.4}, subtracted {:?})",
                result.s_value,
                result.s_standard_error,
                result.e11,
                result.e12,
                result.e21,
                result.e22,
                result.subtracted,
            );
            Ok(outputs)
        }),
    }
}

/// Largest |p(stage a) - p(stage b)| between the first two stages of the
/// schedule, per sidereal time.
fn sweep_max_split(points: &[etherbell::protocol::SweepPoint]) -> Option<(f64, f64)> {
    let mut best: Option<(f64, f64)> = None;
    for p in points {
        for q in points {
            if p.t_sidereal_h == q.t_sidereal_h && p.stage_deg < q.stage_deg {
                let split = (p.estimate.p_hat - q.estimate.p_hat).abs();
                if best.is_none_or(|(_, s)| split > s) {
                    best = Some((p.t_sidereal_h, split));
                }
            }
        }
    }
    best
}

fn with_config(
    cli: &Cli,
    command: &str,
    body: impl FnOnce(&CampaignConfig, &Path) -> Result<Vec<String>, CliError>,
) -> Result<(), CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config(format!("--config is required for `{command}`")))?;
    let raw = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    let mut cfg: CampaignConfig =
        serde_json::from_str(&raw).map_err(|e| CliError::Config(format!("config: {e}")))?;
    if let Some(seed) = cli.seed {
        cfg.rng.master_seed = seed;
    }
    if let Some(events) = cli.events {
        cfg.events_per_point = events;
    }
    cfg.validate()?;

    let started_at = Utc::now().to_rfc3339();
    fs::create_dir_all(&cli.out)?;
    let outputs = body(&cfg, &cli.out)?;

    let manifest = RunManifest {
        schema_version: 1,
        tool_version: env!("CARGO_PKG_VERSION"),
        command,
        master_seed: cfg.rng.master_seed,
        config: &cfg,
        outputs,
        started_at,
        finished_at: Utc::now().to_rfc3339(),
    };
    write_file(&cli.out, "manifest.json", &to_json(&manifest)?)?;
    Ok(())
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, CliError> {
    let mut json = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Runtime(format!("serialization: {e}")))?;
    json.push('\n');
    Ok(json)
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<String, CliError> {
    fs::write(dir.join(name), contents)?;
    Ok(name.to_string())
}
