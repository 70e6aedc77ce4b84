//! Batch experiment runner: builds run matrices for the four standard
//! studies, executes them on a thread pool, and aggregates results into
//! deterministic CSV tables.
//!
//! Determinism contract: every run's RNG seed is derived from
//! (master_seed, experiment id, run index) alone, so results do not depend
//! on scheduling; records are sorted by run index before aggregation and
//! writing, making output files byte-identical across reruns and worker
//! counts.

use crate::config::{ConfigError, NoiseProfile, ScenarioConfig};
use crate::geometry::Pose2;
use crate::pipeline::{run_baseline, run_whole_body, RunResult};
use crate::world::{FailureProfile, ObjectInstance, WorldState};
use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;
use std::io::Write;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("no runs to aggregate")]
    NoRuns,
    #[error("scenario error: {0}")]
    Config(#[from] ConfigError),
    #[error("world construction failed: {0}")]
    World(#[from] crate::world::WorldError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// SplitMix64 step; a solid 64-bit mixer for seed derivation.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// FNV-1a over bytes, used to fold experiment names into the seed chain.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

/// Per-run seed: mixes the master seed with the experiment id, then with
/// the run index, through two SplitMix64 rounds.
pub fn derive_run_seed(master_seed: u64, experiment_id: &str, run_index: u64) -> u64 {
    splitmix64(splitmix64(master_seed ^ fnv1a64(experiment_id.as_bytes())) ^ run_index)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    WholeBody,
    Baseline,
}

/// Everything needed to execute one run, independent of the others.
struct RunSpec {
    setting: String,
    run_index: u64,
    objects: Vec<ObjectInstance>,
    mode: Mode,
    timeout_s: f64,
    noise_sigma: Option<f64>,
    profile: Option<FailureProfile>,
}

/// One CSV row per run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub experiment: String,
    pub setting: String,
    pub run_index: u64,
    pub seed: u64,
    pub objects: usize,
    pub binned: usize,
    pub success: bool,
    pub attempts: usize,
    pub duration_s: f64,
    pub timed_out: bool,
}

/// Per-setting aggregate, plus one trailing `overall` row per experiment.
///
/// Success is fractional: objects binned over objects present, across all
/// runs of the setting (for empty scenes it degrades to the fraction of
/// runs that finished in time). Time statistics cover fully successful
/// runs only, since partial retrievals have no completion time; attempt
/// counts cover every run. Spreads are population standard deviations.
/// `reference` carries the published measurement for that row when the
/// original system reported one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub experiment: String,
    pub setting: String,
    pub runs: usize,
    pub success_rate: f64,
    pub mean_time_s: Option<f64>,
    pub std_time_s: Option<f64>,
    pub mean_attempts: f64,
    pub std_attempts: f64,
    pub reference: &'static str,
}

/// Success fraction per cell of a position grid, row-major from
/// (x_min, y_min), y varying slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct Heatmap {
    pub nx: usize,
    pub ny: usize,
    pub x_min: f64,
    pub y_min: f64,
    pub step: f64,
    pub values: Vec<f64>,
}

#[derive(Debug)]
pub struct ExperimentOutput {
    pub records: Vec<RunRecord>,
    pub summary: Vec<SummaryRow>,
    pub heatmap: Option<Heatmap>,
}

/// The four standard studies, with their parameters in the open so scaled
///-down variants can be built in tests.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ExperimentSpec {
    /// One object swept over a position grid; success per cell becomes a
    /// heatmap. Uses the rough noise profile to stress localization.
    PositionGrid {
        object: String,
        nx: usize,
        ny: usize,
        x_min: f64,
        y_min: f64,
        step: f64,
        reps: usize,
        timeout_s: f64,
    },
    /// Every catalog object at a fixed position under a set of yaws,
    /// on the hardware-like failure profile.
    ShapeRotation { x: f64, y: f64, rotations_deg: Vec<f64>, reps: usize, timeout_s: f64 },
    /// All ordered k-arrangements of the catalog on the standard
    /// placement spots.
    Clutter { k: usize, timeout_s: f64 },
    /// Whole-body sweep versus probe-only strip scanning, on an empty
    /// table and with a single object.
    BaselineCompare { reps: usize, timeout_s: f64 },
}

impl ExperimentSpec {
    pub fn grid() -> Self {
        ExperimentSpec::PositionGrid {
            object: "can".into(),
            nx: 16,
            ny: 16,
            x_min: -0.30,
            y_min: 0.30,
            step: 0.04,
            reps: 5,
            timeout_s: 600.0,
        }
    }

    pub fn rotation() -> Self {
        ExperimentSpec::ShapeRotation {
            x: 0.0,
            y: 0.60,
            rotations_deg: vec![90.0, 45.0, 0.0, -45.0, -90.0],
            reps: 10,
            timeout_s: 600.0,
        }
    }

    pub fn clutter2() -> Self {
        ExperimentSpec::Clutter { k: 2, timeout_s: 600.0 }
    }

    pub fn clutter3() -> Self {
        ExperimentSpec::Clutter { k: 3, timeout_s: 600.0 }
    }

    pub fn baseline_compare() -> Self {
        ExperimentSpec::BaselineCompare { reps: 5, timeout_s: 1800.0 }
    }

    pub fn id(&self) -> &'static str {
        match self {
            ExperimentSpec::PositionGrid { .. } => "position_grid",
            ExperimentSpec::ShapeRotation { .. } => "shape_rotation",
            ExperimentSpec::Clutter { k: 2, .. } => "clutter2",
            ExperimentSpec::Clutter { .. } => "clutter3",
            ExperimentSpec::BaselineCompare { .. } => "baseline_compare",
        }
    }

    pub fn run(
        &self,
        config: &ScenarioConfig,
        workers: Option<usize>,
    ) -> Result<ExperimentOutput, HarnessError> {
        let specs = self.build_runs(config)?;
        let records = execute(config, self.id(), specs, workers)?;
        let summary = aggregate(&records)?;
        let heatmap = match self {
            ExperimentSpec::PositionGrid { nx, ny, x_min, y_min, step, .. } => {
                Some(build_heatmap(&records, *nx, *ny, *x_min, *y_min, *step))
            }
            _ => None,
        };
        Ok(ExperimentOutput { records, summary, heatmap })
    }

    fn build_runs(&self, config: &ScenarioConfig) -> Result<Vec<RunSpec>, HarnessError> {
        match self {
            ExperimentSpec::PositionGrid {
                object,
                nx,
                ny,
                x_min,
                y_min,
                step,
                reps,
                timeout_s,
            } => {
                let mut out = Vec::with_capacity(nx * ny * reps);
                let mut run_index = 0u64;
                for iy in 0..*ny {
                    for ix in 0..*nx {
                        let x = x_min + ix as f64 * step;
                        let y = y_min + iy as f64 * step;
                        for _ in 0..*reps {
                            out.push(RunSpec {
                                setting: format!("cell_{ix}_{iy}"),
                                run_index,
                                objects: vec![config.instantiate(object, Pose2::new(x, y, 0.0))?],
                                mode: Mode::WholeBody,
                                timeout_s: *timeout_s,
                                noise_sigma: Some(NoiseProfile::Rough.sigma()),
                                profile: None,
                            });
                            run_index += 1;
                        }
                    }
                }
                Ok(out)
            }
            ExperimentSpec::ShapeRotation { x, y, rotations_deg, reps, timeout_s } => {
                let mut settings: Vec<(String, f64)> = vec![("can".into(), 0.0)];
                for name in ["block", "bottle", "box", "mustard"] {
                    for &rot in rotations_deg {
                        settings.push((name.into(), rot));
                    }
                }
                let mut out = Vec::with_capacity(settings.len() * reps);
                let mut run_index = 0u64;
                for (name, rot) in &settings {
                    let label = format!("{name}_{}{rot:.0}", if *rot > 0.0 { "+" } else { "" });
                    for _ in 0..*reps {
                        out.push(RunSpec {
                            setting: label.clone(),
                            run_index,
                            objects: vec![
                                config.instantiate(name, Pose2::new(*x, *y, rot.to_radians()))?
                            ],
                            mode: Mode::WholeBody,
                            timeout_s: *timeout_s,
                            noise_sigma: None,
                            profile: Some(FailureProfile::Real),
                        });
                        run_index += 1;
                    }
                }
                Ok(out)
            }
            ExperimentSpec::Clutter { k, timeout_s } => {
                let names = ["can", "block", "bottle", "box", "mustard"];
                // Two-object scenes use the outer pair of standard spots;
                // the middle spot joins for three objects.
                let spots = [(0.25, 0.75), (-0.20, 0.55), (0.0, 0.60)];
                assert!(*k <= spots.len(), "clutter supports at most {} objects", spots.len());
                let mut out = Vec::new();
                for (run_index, combo) in names.iter().permutations(*k).enumerate() {
                    let objects = combo
                        .iter()
                        .zip(spots)
                        .map(|(name, (x, y))| config.instantiate(name, Pose2::new(x, y, 0.0)))
                        .collect::<Result<Vec<_>, _>>()?;
                    out.push(RunSpec {
                        setting: combo.iter().join("+"),
                        run_index: run_index as u64,
                        objects,
                        mode: Mode::WholeBody,
                        timeout_s: *timeout_s,
                        noise_sigma: Some(NoiseProfile::Rough.sigma()),
                        profile: None,
                    });
                }
                Ok(out)
            }
            ExperimentSpec::BaselineCompare { reps, timeout_s } => {
                let one = vec![config.instantiate("can", Pose2::new(0.0, 0.60, 0.0))?];
                let cases: [(&str, Mode, Vec<ObjectInstance>); 4] = [
                    ("whole_body_empty", Mode::WholeBody, vec![]),
                    ("whole_body_one", Mode::WholeBody, one.clone()),
                    ("baseline_empty", Mode::Baseline, vec![]),
                    ("baseline_one", Mode::Baseline, one),
                ];
                let mut out = Vec::with_capacity(cases.len() * reps);
                let mut run_index = 0u64;
                for (label, mode, objects) in cases {
                    for _ in 0..*reps {
                        out.push(RunSpec {
                            setting: label.to_string(),
                            run_index,
                            objects: objects.clone(),
                            mode,
                            timeout_s: *timeout_s,
                            noise_sigma: None,
                            profile: None,
                        });
                        run_index += 1;
                    }
                }
                Ok(out)
            }
        }
    }
}

/// Run a closure on a dedicated pool of `workers` threads, or inline on
/// the global pool.
pub fn with_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match workers {
        None => f(),
        Some(n) => {
            rayon::ThreadPoolBuilder::new().num_threads(n).build().expect("thread pool").install(f)
        }
    }
}

fn execute(
    config: &ScenarioConfig,
    experiment_id: &str,
    specs: Vec<RunSpec>,
    workers: Option<usize>,
) -> Result<Vec<RunRecord>, HarnessError> {
    let layout = config.pad_layout()?;
    let plan = config.sweep_plan();
    let refinement = config.refinement_params()?;

    let mut records = with_pool(workers, || {
        specs
            .par_iter()
            .map(|spec| -> Result<RunRecord, HarnessError> {
                let seed = derive_run_seed(config.master_seed, experiment_id, spec.run_index);
                let mut params = config.world_params();
                params.timeout_s = spec.timeout_s;
                if let Some(sigma) = spec.noise_sigma {
                    params.noise_sigma = sigma;
                }
                if let Some(profile) = spec.profile {
                    params.profile = profile;
                }
                let world = WorldState::new(params, layout.clone(), spec.objects.clone(), seed)?;
                let result: RunResult = match spec.mode {
                    Mode::WholeBody => run_whole_body(world, &plan, &refinement),
                    Mode::Baseline => run_baseline(world, &refinement),
                };
                Ok(RunRecord {
                    experiment: experiment_id.to_string(),
                    setting: spec.setting.clone(),
                    run_index: spec.run_index,
                    seed,
                    objects: result.total_objects,
                    binned: result.binned.len(),
                    success: result.success(),
                    attempts: result.grasp_attempts,
                    duration_s: result.duration_s,
                    timed_out: result.timed_out,
                })
            })
            .collect::<Result<Vec<_>, _>>()
    })?;
    records.sort_by_key(|r| r.run_index);
    Ok(records)
}

/// Collapse run records into per-setting rows (first-appearance order)
/// followed by one `overall` row spanning the whole experiment.
pub fn aggregate(records: &[RunRecord]) -> Result<Vec<SummaryRow>, HarnessError> {
    if records.is_empty() {
        return Err(HarnessError::NoRuns);
    }
    let mut order: Vec<&str> = Vec::new();
    for r in records {
        if !order.contains(&r.setting.as_str()) {
            order.push(&r.setting);
        }
    }
    let mut rows: Vec<SummaryRow> = order
        .iter()
        .map(|setting| {
            let group: Vec<&RunRecord> = records.iter().filter(|r| r.setting == *setting).collect();
            summarize(&group, setting)
        })
        .collect();
    let all: Vec<&RunRecord> = records.iter().collect();
    rows.push(summarize(&all, "overall"));
    Ok(rows)
}

fn summarize(group: &[&RunRecord], setting: &str) -> SummaryRow {
    let runs = group.len();
    let total_objects: usize = group.iter().map(|r| r.objects).sum();
    let success_rate = if total_objects > 0 {
        group.iter().map(|r| r.binned).sum::<usize>() as f64 / total_objects as f64
    } else {
        group.iter().filter(|r| !r.timed_out).count() as f64 / runs as f64
    };
    let times: Vec<f64> = group.iter().filter(|r| r.success).map(|r| r.duration_s).collect();
    let attempts: Vec<f64> = group.iter().map(|r| r.attempts as f64).collect();
    let (mean_time_s, std_time_s) = mean_std(&times);
    let (mean_attempts, std_attempts) = mean_std(&attempts);
    SummaryRow {
        experiment: group[0].experiment.clone(),
        setting: setting.to_string(),
        runs,
        success_rate,
        mean_time_s,
        std_time_s,
        mean_attempts: mean_attempts.expect("group is non-empty"),
        std_attempts: std_attempts.expect("group is non-empty"),
        reference: reference_note(&group[0].experiment, setting),
    }
}

/// Published measurements from the original skin-covered robot system,
/// attached to matching summary rows for side-by-side reading.
fn reference_note(experiment: &str, setting: &str) -> &'static str {
    match (experiment, setting) {
        ("position_grid", "overall") => "reference sim success 83.1%",
        ("shape_rotation", "overall") => {
            "reference sim success 75.7% (hardware 85.7% at 218 s); 0 deg runs average 262 s vs 311 s at +/-45 deg"
        }
        ("clutter2", "overall") => "reference sim success 85.5% (hardware 89.0%)",
        ("clutter3", "overall") => "reference sim success 81.5% (hardware 88.0%)",
        ("baseline_compare", "whole_body_empty") => "reference 87 s",
        ("baseline_compare", "whole_body_one") => "reference 197 s",
        ("baseline_compare", "baseline_empty") => "reference 1135 s",
        ("baseline_compare", "baseline_one") => "reference 1198 s",
        ("baseline_compare", "overall") => "reference speedup 13.0x empty and 6.1x with one object",
        _ => "",
    }
}

fn mean_std(xs: &[f64]) -> (Option<f64>, Option<f64>) {
    if xs.is_empty() {
        return (None, None);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (Some(mean), Some(var.max(0.0).sqrt()))
}

fn build_heatmap(
    records: &[RunRecord],
    nx: usize,
    ny: usize,
    x_min: f64,
    y_min: f64,
    step: f64,
) -> Heatmap {
    let mut values = vec![0.0; nx * ny];
    for iy in 0..ny {
        for ix in 0..nx {
            let setting = format!("cell_{ix}_{iy}");
            let group: Vec<&RunRecord> = records.iter().filter(|r| r.setting == setting).collect();
            let ok = group.iter().filter(|r| r.success).count();
            values[iy * nx + ix] =
                if group.is_empty() { 0.0 } else { ok as f64 / group.len() as f64 };
        }
    }
    Heatmap { nx, ny, x_min, y_min, step, values }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io { path: path.display().to_string(), source }
}

pub fn write_runs_csv(path: &Path, records: &[RunRecord]) -> Result<(), HarnessError> {
    let mut out = String::from(
        "experiment,setting,run_index,seed,objects,binned,success,attempts,duration_s,timed_out\n",
    );
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{:.6},{}\n",
            r.experiment,
            r.setting,
            r.run_index,
            r.seed,
            r.objects,
            r.binned,
            r.success,
            r.attempts,
            r.duration_s,
            r.timed_out
        ));
    }
    write_atomic(path, &out)
}

pub fn write_summary_csv(path: &Path, rows: &[SummaryRow]) -> Result<(), HarnessError> {
    let opt = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
    let mut out = String::from(
        "experiment,setting,runs,success_rate,mean_time_s,std_time_s,mean_attempts,std_attempts,reference\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{:.6},{},{},{:.6},{:.6},{}\n",
            r.experiment,
            r.setting,
            r.runs,
            r.success_rate,
            opt(r.mean_time_s),
            opt(r.std_time_s),
            r.mean_attempts,
            r.std_attempts,
            r.reference
        ));
    }
    write_atomic(path, &out)
}

pub fn write_heatmap_csv(path: &Path, h: &Heatmap) -> Result<(), HarnessError> {
    let mut out = String::from("ix,iy,x,y,success_rate\n");
    for iy in 0..h.ny {
        for ix in 0..h.nx {
            out.push_str(&format!(
                "{},{},{:.6},{:.6},{:.6}\n",
                ix,
                iy,
                h.x_min + ix as f64 * h.step,
                h.y_min + iy as f64 * h.step,
                h.values[iy * h.nx + ix]
            ));
        }
    }
    write_atomic(path, &out)
}

/// Parse a heatmap written by `write_heatmap_csv`.
pub fn read_heatmap_csv(path: &Path) -> Result<Heatmap, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    let bad = |reason: &str| HarnessError::Io {
        path: path.display().to_string(),
        source: std::io::Error::new(std::io::ErrorKind::InvalidData, reason),
    };
    let mut cells: Vec<(usize, usize, f64, f64, f64)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            if line != "ix,iy,x,y,success_rate" {
                return Err(bad("unexpected heatmap header"));
            }
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 5 {
            return Err(bad("heatmap rows need 5 fields"));
        }
        let parse_u = |s: &str| s.parse::<usize>().map_err(|_| bad("bad index"));
        let parse_f = |s: &str| s.parse::<f64>().map_err(|_| bad("bad number"));
        cells.push((
            parse_u(parts[0])?,
            parse_u(parts[1])?,
            parse_f(parts[2])?,
            parse_f(parts[3])?,
            parse_f(parts[4])?,
        ));
    }
    if cells.is_empty() {
        return Err(bad("heatmap has no cells"));
    }
    let nx = cells.iter().map(|c| c.0).max().unwrap() + 1;
    let ny = cells.iter().map(|c| c.1).max().unwrap() + 1;
    if cells.len() != nx * ny {
        return Err(bad("heatmap grid is not dense"));
    }
    let x_min = cells.iter().find(|c| c.0 == 0).unwrap().2;
    let y_min = cells.iter().find(|c| c.1 == 0).unwrap().3;
    let step =
        if nx > 1 { (cells.iter().find(|c| c.0 == 1).unwrap().2 - x_min) / 1.0 } else { 1.0 };
    let mut values = vec![0.0; nx * ny];
    for (ix, iy, _, _, v) in cells {
        values[iy * nx + ix] = v;
    }
    Ok(Heatmap { nx, ny, x_min, y_min, step, values })
}

fn write_atomic(path: &Path, contents: &str) -> Result<(), HarnessError> {
    let mut f = std::fs::File::create(path).map_err(io_err(path))?;
    f.write_all(contents.as_bytes()).map_err(io_err(path))?;
    Ok(())
}
