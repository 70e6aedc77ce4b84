//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 for configuration or input parse problems,
//! 3 when an event log fails replay verification. Errors go to stderr as
//! single-line JSON so scripts can consume them.

use crate::config::ScenarioConfig;
use crate::events::{read_jsonl, verify_log, ReplayError};
use crate::harness::{
    read_heatmap_csv, write_heatmap_csv, write_runs_csv, write_summary_csv, ExperimentSpec,
    HarnessError,
};
use crate::pipeline::run_whole_body;
use crate::svg::render_heatmap_svg;
use crate::world::{FailureProfile, WorldState};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

#[derive(Parser, Debug)]
#[command(
    name = "blindsweep",
    version,
    about = "Vision-free tabletop search and retrieval simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Execute one scenario and write its event log plus a run summary.
    Run {
        /// Scenario JSON file; omitted means the built-in default scene.
        scenario: Option<PathBuf>,
        /// Override the scenario's master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the failure profile.
        #[arg(long, value_enum)]
        profile: Option<ProfileArg>,
        /// Override the probe noise standard deviation, in millimeters.
        #[arg(long, value_name = "MM")]
        noise: Option<f64>,
        /// Output directory for events.jsonl, run.json, and the resolved
        /// scenario.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run one of the batch studies and write CSV tables.
    Experiment {
        #[arg(value_enum)]
        which: ExperimentArg,
        /// Scenario JSON supplying the catalog and robot parameters.
        #[arg(long)]
        scenario: Option<PathBuf>,
        /// Override the scenario's master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Thread count; omitted uses all cores.
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Check a JSONL event log against the motion, timing, and accounting
    /// rules.
    Replay { event_log: PathBuf },
    /// Render a heatmap CSV (ix,iy,x,y,success_rate) as SVG.
    RenderHeatmap {
        csv: PathBuf,
        /// Output path; defaults to the CSV path with an .svg extension.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ProfileArg {
    Sim,
    Real,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExperimentArg {
    Grid,
    Rotation,
    Clutter2,
    Clutter3,
    Baseline,
}

impl ExperimentArg {
    fn spec(self) -> ExperimentSpec {
        match self {
            ExperimentArg::Grid => ExperimentSpec::grid(),
            ExperimentArg::Rotation => ExperimentSpec::rotation(),
            ExperimentArg::Clutter2 => ExperimentSpec::clutter2(),
            ExperimentArg::Clutter3 => ExperimentSpec::clutter3(),
            ExperimentArg::Baseline => ExperimentSpec::baseline_compare(),
        }
    }
}

#[derive(Debug)]
struct CliError {
    kind: &'static str,
    message: String,
    code: i32,
}

impl CliError {
    fn config(message: impl Into<String>) -> Self {
        CliError { kind: "config", message: message.into(), code: 2 }
    }

    fn replay(message: impl Into<String>) -> Self {
        CliError { kind: "replay", message: message.into(), code: 3 }
    }
}

impl From<crate::config::ConfigError> for CliError {
    fn from(e: crate::config::ConfigError) -> Self {
        CliError::config(e.to_string())
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        CliError::config(e.to_string())
    }
}

impl From<crate::world::WorldError> for CliError {
    fn from(e: crate::world::WorldError) -> Self {
        CliError::config(e.to_string())
    }
}

/// Parse argv and execute; returns the process exit code.
pub fn run_cli() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            #[derive(Serialize)]
            struct Wire<'a> {
                error: &'a str,
                message: &'a str,
            }
            let wire = Wire { error: e.kind, message: &e.message };
            eprintln!("{}", serde_json::to_string(&wire).expect("error serialization"));
            e.code
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run { scenario, seed, profile, noise, out } => {
            cmd_run(scenario.as_deref(), seed, profile, noise, &out)
        }
        Command::Experiment { which, scenario, seed, workers, out } => {
            cmd_experiment(which, scenario.as_deref(), seed, workers, &out)
        }
        Command::Replay { event_log } => cmd_replay(&event_log),
        Command::RenderHeatmap { csv, out } => cmd_render(&csv, out.as_deref()),
    }
}

fn load_scenario(
    path: Option<&Path>,
    seed: Option<u64>,
    profile: Option<ProfileArg>,
    noise_mm: Option<f64>,
) -> Result<ScenarioConfig, CliError> {
    let mut config = match path {
        Some(p) => ScenarioConfig::load(p)?,
        None => ScenarioConfig::default(),
    };
    if let Some(seed) = seed {
        config.master_seed = seed;
    }
    if let Some(profile) = profile {
        config.profile = match profile {
            ProfileArg::Sim => FailureProfile::Sim,
            ProfileArg::Real => FailureProfile::Real,
        };
    }
    if let Some(mm) = noise_mm {
        if !(mm.is_finite() && mm >= 0.0) {
            return Err(CliError::config(format!(
                "--noise must be a finite mm value >= 0, got {mm}"
            )));
        }
        config.noise.sigma = mm / 1000.0;
    }
    config.validate()?;
    Ok(config)
}

fn ensure_out(out: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out)
        .map_err(|e| CliError::config(format!("cannot create {}: {e}", out.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text)
        .map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display())))
}

fn cmd_run(
    scenario: Option<&Path>,
    seed: Option<u64>,
    profile: Option<ProfileArg>,
    noise: Option<f64>,
    out: &Path,
) -> Result<(), CliError> {
    let config = load_scenario(scenario, seed, profile, noise)?;
    ensure_out(out)?;
    write_text(&out.join("scenario.resolved.json"), &config.to_json())?;

    let world = WorldState::new(
        config.world_params(),
        config.pad_layout()?,
        config.placed_objects()?,
        config.master_seed,
    )?;
    let result = run_whole_body(world, &config.sweep_plan(), &config.refinement_params()?);

    let mut buf = Vec::new();
    result
        .log
        .write_jsonl(&mut buf)
        .map_err(|e| CliError::config(format!("cannot serialize event log: {e}")))?;
    let log_path = out.join("events.jsonl");
    fs::write(&log_path, &buf)
        .map_err(|e| CliError::config(format!("cannot write {}: {e}", log_path.display())))?;

    #[derive(Serialize)]
    struct RunReport<'a> {
        seed: u64,
        mode: &'a str,
        objects: usize,
        binned: &'a [String],
        success: bool,
        grasp_attempts: usize,
        duration_s: f64,
        timed_out: bool,
    }
    let report = RunReport {
        seed: result.seed,
        mode: result.mode,
        objects: result.total_objects,
        binned: &result.binned,
        success: result.success(),
        grasp_attempts: result.grasp_attempts,
        duration_s: result.duration_s,
        timed_out: result.timed_out,
    };
    write_text(
        &out.join("run.json"),
        &serde_json::to_string_pretty(&report).expect("report serialization"),
    )?;
    println!(
        "binned {}/{} objects in {:.1} s with {} grasp attempts ({})",
        result.binned.len(),
        result.total_objects,
        result.duration_s,
        result.grasp_attempts,
        out.join("events.jsonl").display()
    );
    Ok(())
}

fn cmd_experiment(
    which: ExperimentArg,
    scenario: Option<&Path>,
    seed: Option<u64>,
    workers: Option<usize>,
    out: &Path,
) -> Result<(), CliError> {
    let config = load_scenario(scenario, seed, None, None)?;
    ensure_out(out)?;
    write_text(&out.join("scenario.resolved.json"), &config.to_json())?;

    let spec = which.spec();
    let id = spec.id();
    let output = spec.run(&config, workers)?;
    write_runs_csv(&out.join(format!("{id}_runs.csv")), &output.records)?;
    write_summary_csv(&out.join(format!("{id}_summary.csv")), &output.summary)?;
    let summary_json = serde_json::to_string_pretty(&output.summary)
        .map_err(|e| CliError::config(format!("summary serialization: {e}")))?;
    write_text(&out.join(format!("{id}_summary.json")), &summary_json)?;
    if let Some(heatmap) = &output.heatmap {
        write_heatmap_csv(&out.join(format!("{id}_heatmap.csv")), heatmap)?;
        write_text(&out.join(format!("{id}_heatmap.svg")), &render_heatmap_svg(heatmap))?;
    }

    for row in &output.summary {
        let time = row.mean_time_s.map(|t| format!("{t:.1} s")).unwrap_or_else(|| "-".to_string());
        let note =
            if row.reference.is_empty() { String::new() } else { format!("  [{}]", row.reference) };
        println!(
            "{:24} runs {:4}  success {:5.1}%  mean time {}{}",
            row.setting,
            row.runs,
            100.0 * row.success_rate,
            time,
            note
        );
    }
    println!("wrote {}", out.join(format!("{id}_runs.csv")).display());
    Ok(())
}

fn cmd_replay(event_log: &Path) -> Result<(), CliError> {
    let file = fs::File::open(event_log)
        .map_err(|e| CliError::config(format!("cannot open {}: {e}", event_log.display())))?;
    let records = read_jsonl(BufReader::new(file)).map_err(|e| match e {
        ReplayError::Io(_) | ReplayError::Malformed { .. } => CliError::config(e.to_string()),
        other => CliError::replay(other.to_string()),
    })?;
    let summary = verify_log(&records).map_err(|e| CliError::replay(e.to_string()))?;
    println!(
        "verified {} records: clock {:.3} s, binned [{}]",
        summary.records,
        summary.final_clock,
        summary.binned.join(", ")
    );
    Ok(())
}

fn cmd_render(csv: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let heatmap = read_heatmap_csv(csv)?;
    let svg = render_heatmap_svg(&heatmap);
    let target = out.map(Path::to_path_buf).unwrap_or_else(|| csv.with_extension("svg"));
    write_text(&target, &svg)?;
    println!("wrote {}", target.display());
    Ok(())
}
