//! Structured event log: one JSON record per motion, contact, grasp, or bin
//! event. The log carries enough redundancy (per-event `dt` plus the run
//! parameters) that a finished run can be re-verified offline: clock
//! arithmetic, object conservation, attempt caps, and sweep monotonicity
//! are all re-checked from the records alone.

use crate::geometry::{Point2, Vec2};
use crate::skin::{PadProjection, SKIN_SAMPLE_PERIOD};
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};
use thiserror::Error;

/// Tolerance for re-folded clock arithmetic.
pub const CLOCK_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MotionKind {
    Sweep,
    Descend,
    Ascend,
    Probe,
    Reposition,
    /// Long free-space move at transport speed.
    Transport,
}

/// Position snapshot: table-plane point plus tool height.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Waypoint {
    pub x: f64,
    pub y: f64,
    pub h: f64,
}

impl Waypoint {
    pub fn new(x: f64, y: f64, h: f64) -> Self {
        Self { x, y, h }
    }

    pub fn distance(&self, other: &Waypoint) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dh = self.h - other.h;
        (dx * dx + dy * dy + dh * dh).sqrt()
    }
}

/// Run parameters echoed into the log so the verifier can recompute times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoggedParams {
    pub speed_sweep: f64,
    pub speed_descend: f64,
    pub speed_probe: f64,
    pub speed_transport: f64,
    pub grasp_cycle_s: f64,
    pub ik_reject_s: f64,
    pub bin_drop_s: f64,
    pub bin_position: Point2,
    pub i_max: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    RunStart {
        seed: u64,
        profile: String,
        mode: String,
        objects: Vec<String>,
        params: LoggedParams,
    },
    Motion {
        kind: MotionKind,
        from: Waypoint,
        to: Waypoint,
        contact: bool,
    },
    SkinContact {
        pads: Vec<usize>,
        chosen_pad: usize,
        arm_height: f64,
    },
    PadProjected {
        projection: PadProjection,
    },
    ScanSegment {
        index: usize,
        s: Point2,
        g: Point2,
        orthogonal: bool,
    },
    ProbeContact {
        point: Point2,
        dir: Vec2,
        object: String,
    },
    Localized {
        p1: Point2,
        v1: Vec2,
        p2: Point2,
        v2: Vec2,
    },
    LocalizationAbsent {
        scans: usize,
    },
    GraspAttempt {
        index: usize,
        center: Point2,
        yaw: f64,
        outcome: GraspOutcomeTag,
        object: Option<String>,
        push: Option<Vec2>,
    },
    Toppled {
        object: String,
    },
    Binned {
        object: String,
        from: Point2,
    },
    TimedOut {},
    RunEnd {
        binned: Vec<String>,
        grasp_attempts: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraspOutcomeTag {
    Success,
    Miss,
    WidthFail,
    IkReject,
}

/// One log line: the event, the simulated time it cost, and the clock after
/// applying it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub t: f64,
    pub dt: f64,
    #[serde(flatten)]
    pub event: Event,
}

#[derive(Debug, Clone, Default)]
pub struct EventLog {
    records: Vec<Record>,
}

impl EventLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, t: f64, dt: f64, event: Event) {
        self.records.push(Record { t, dt, event });
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for r in &self.records {
            serde_json::to_writer(&mut out, r)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

pub fn read_jsonl<R: BufRead>(input: R) -> Result<Vec<Record>, ReplayError> {
    let mut records = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|e| ReplayError::Io(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let r: Record = serde_json::from_str(&line)
            .map_err(|e| ReplayError::Malformed { line: i + 1, detail: e.to_string() })?;
        records.push(r);
    }
    Ok(records)
}

#[derive(Debug, Error, PartialEq)]
pub enum ReplayError {
    #[error("io: {0}")]
    Io(String),
    #[error("malformed record at line {line}: {detail}")]
    Malformed { line: usize, detail: String },
    #[error("log is empty")]
    Empty,
    #[error("first record must be run_start")]
    MissingRunStart,
    #[error("violation 'clock monotonicity' at record {index}: t {t} after {prev}")]
    ClockMonotonicity { index: usize, t: f64, prev: f64 },
    #[error("violation 'time fold' at record {index}: t {t} != prev {prev} + dt {dt}")]
    TimeFold { index: usize, t: f64, prev: f64, dt: f64 },
    #[error("violation 'motion timing' at record {index}: dt {dt} vs distance/speed {expected}")]
    MotionTiming { index: usize, dt: f64, expected: f64 },
    #[error("violation 'object conservation': {detail}")]
    Conservation { detail: String },
    #[error(
        "violation 'attempt cap' after localization at record {index}: {count} > i_max {i_max}"
    )]
    AttemptCap { index: usize, count: usize, i_max: usize },
    #[error("violation 'sweep monotone' at record {index}: sweep x increased to {x}")]
    SweepMonotone { index: usize, x: f64 },
    #[error("violation 'scan orthogonality' at record {index}: v1.v2 = {dot}")]
    Orthogonality { index: usize, dot: f64 },
    #[error("violation 'fixed action timing' at record {index}: dt {dt} vs {expected}")]
    FixedTiming { index: usize, dt: f64, expected: f64 },
    #[error("violation 'run end': {detail}")]
    RunEndMismatch { detail: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplaySummary {
    pub records: usize,
    pub final_clock: f64,
    pub binned: Vec<String>,
}

/// Re-verify a finished run from its log alone.
pub fn verify_log(records: &[Record]) -> Result<ReplaySummary, ReplayError> {
    if records.is_empty() {
        return Err(ReplayError::Empty);
    }
    let (params, spawned, mode) = match &records[0].event {
        Event::RunStart { params, objects, mode, .. } => {
            (params.clone(), objects.clone(), mode.clone())
        }
        _ => return Err(ReplayError::MissingRunStart),
    };

    let mut prev_t = records[0].t;
    let mut binned: Vec<String> = Vec::new();
    let mut last_sweep_x: Option<f64> = None;
    let mut attempts_since_loc: usize = 0;
    let mut total_attempts: usize = 0;
    let mut saw_end = false;

    for (index, r) in records.iter().enumerate() {
        if index > 0 {
            if r.t < prev_t - CLOCK_EPS {
                return Err(ReplayError::ClockMonotonicity { index, t: r.t, prev: prev_t });
            }
            if (r.t - (prev_t + r.dt)).abs() > CLOCK_EPS {
                return Err(ReplayError::TimeFold { index, t: r.t, prev: prev_t, dt: r.dt });
            }
        }

        match &r.event {
            Event::Motion { kind, from, to, .. } => {
                let speed = match kind {
                    MotionKind::Sweep => params.speed_sweep,
                    MotionKind::Descend | MotionKind::Ascend => params.speed_descend,
                    MotionKind::Probe | MotionKind::Reposition => params.speed_probe,
                    MotionKind::Transport => params.speed_transport,
                };
                let expected = from.distance(to) / speed;
                // Skin-sampled descends may wait up to one frame after the
                // stop; every other motion must match distance over speed.
                let slack = if matches!(kind, MotionKind::Descend) {
                    SKIN_SAMPLE_PERIOD + CLOCK_EPS
                } else {
                    CLOCK_EPS
                };
                if r.dt < expected - CLOCK_EPS || r.dt > expected + slack {
                    return Err(ReplayError::MotionTiming { index, dt: r.dt, expected });
                }
                if mode == "whole_body" {
                    if let MotionKind::Sweep = kind {
                        if let Some(prev_x) = last_sweep_x {
                            if to.x > prev_x + 1e-12 {
                                return Err(ReplayError::SweepMonotone { index, x: to.x });
                            }
                        }
                        last_sweep_x = Some(to.x);
                    }
                }
            }
            Event::Localized { v1, v2, .. } => {
                let dot = v1.dot(*v2);
                if dot.abs() > 1e-12 {
                    return Err(ReplayError::Orthogonality { index, dot });
                }
                attempts_since_loc = 0;
            }
            Event::GraspAttempt { outcome, .. } => {
                attempts_since_loc += 1;
                total_attempts += 1;
                if attempts_since_loc > params.i_max {
                    return Err(ReplayError::AttemptCap {
                        index,
                        count: attempts_since_loc,
                        i_max: params.i_max,
                    });
                }
                let expected = match outcome {
                    GraspOutcomeTag::IkReject => params.ik_reject_s,
                    _ => params.grasp_cycle_s,
                };
                if (r.dt - expected).abs() > CLOCK_EPS {
                    return Err(ReplayError::FixedTiming { index, dt: r.dt, expected });
                }
            }
            Event::Binned { object, from } => {
                if !spawned.contains(object) {
                    return Err(ReplayError::Conservation {
                        detail: format!("binned unknown object '{object}'"),
                    });
                }
                if binned.contains(object) {
                    return Err(ReplayError::Conservation {
                        detail: format!("object '{object}' binned twice"),
                    });
                }
                let dist = (params.bin_position - *from).norm();
                let expected = 2.0 * dist / params.speed_transport + params.bin_drop_s;
                if (r.dt - expected).abs() > CLOCK_EPS {
                    return Err(ReplayError::FixedTiming { index, dt: r.dt, expected });
                }
                binned.push(object.clone());
            }
            Event::RunEnd { binned: reported, grasp_attempts } => {
                saw_end = true;
                if *reported != binned {
                    return Err(ReplayError::RunEndMismatch {
                        detail: format!("reported bin {reported:?} vs replayed {binned:?}"),
                    });
                }
                if *grasp_attempts != total_attempts {
                    return Err(ReplayError::RunEndMismatch {
                        detail: format!(
                            "reported {grasp_attempts} attempts vs replayed {total_attempts}"
                        ),
                    });
                }
            }
            _ => {}
        }
        prev_t = r.t;
    }

    if !saw_end {
        return Err(ReplayError::RunEndMismatch { detail: "missing run_end".into() });
    }

    Ok(ReplaySummary { records: records.len(), final_clock: prev_t, binned })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> LoggedParams {
        LoggedParams {
            speed_sweep: 0.1,
            speed_descend: 0.1,
            speed_probe: 0.015,
            speed_transport: 0.25,
            grasp_cycle_s: 12.0,
            ik_reject_s: 0.5,
            bin_drop_s: 2.0,
            bin_position: Point2::new(0.65, 0.30),
            i_max: 75,
        }
    }

    fn tiny_log() -> EventLog {
        let mut log = EventLog::new();
        log.push(
            0.0,
            0.0,
            Event::RunStart {
                seed: 7,
                profile: "sim".into(),
                mode: "whole_body".into(),
                objects: vec!["can".into()],
                params: params(),
            },
        );
        log.push(
            4.0,
            4.0,
            Event::Motion {
                kind: MotionKind::Descend,
                from: Waypoint::new(0.05, 1.05, 0.5),
                to: Waypoint::new(0.05, 1.05, 0.1),
                contact: false,
            },
        );
        log.push(4.0, 0.0, Event::RunEnd { binned: vec![], grasp_attempts: 0 });
        log
    }

    #[test]
    fn roundtrip_and_verify() {
        let log = tiny_log();
        let mut buf = Vec::new();
        log.write_jsonl(&mut buf).unwrap();
        let records = read_jsonl(buf.as_slice()).unwrap();
        assert_eq!(records, log.records());
        let summary = verify_log(&records).unwrap();
        assert_eq!(summary.final_clock, 4.0);
        assert!(summary.binned.is_empty());
    }

    #[test]
    fn tampered_clock_is_rejected() {
        let log = tiny_log();
        let mut records = log.records().to_vec();
        records[2].t = 3.0; // decrease the clock
        assert!(matches!(verify_log(&records), Err(ReplayError::ClockMonotonicity { .. })));
    }

    #[test]
    fn motion_slower_than_commanded_is_rejected() {
        let log = tiny_log();
        let mut records = log.records().to_vec();
        records[1].dt = 5.0;
        records[1].t = 5.0;
        records[2].t = 5.0;
        assert!(matches!(verify_log(&records), Err(ReplayError::MotionTiming { .. })));
    }

    #[test]
    fn double_bin_is_a_conservation_violation() {
        let mut log = EventLog::new();
        log.push(
            0.0,
            0.0,
            Event::RunStart {
                seed: 1,
                profile: "sim".into(),
                mode: "whole_body".into(),
                objects: vec!["can".into()],
                params: params(),
            },
        );
        let dist = (Point2::new(0.65, 0.30) - Point2::new(0.0, 0.6)).norm();
        let dt = 2.0 * dist / 0.25 + 2.0;
        log.push(dt, dt, Event::Binned { object: "can".into(), from: Point2::new(0.0, 0.6) });
        log.push(2.0 * dt, dt, Event::Binned { object: "can".into(), from: Point2::new(0.0, 0.6) });
        log.push(
            2.0 * dt,
            0.0,
            Event::RunEnd { binned: vec!["can".into(), "can".into()], grasp_attempts: 0 },
        );
        assert!(matches!(verify_log(log.records()), Err(ReplayError::Conservation { .. })));
    }

    #[test]
    fn sweep_x_must_not_increase() {
        let mut log = EventLog::new();
        log.push(
            0.0,
            0.0,
            Event::RunStart {
                seed: 1,
                profile: "sim".into(),
                mode: "whole_body".into(),
                objects: vec![],
                params: params(),
            },
        );
        for (i, x) in [0.35f64, 0.45].iter().enumerate() {
            let t = (i + 1) as f64;
            log.push(
                t,
                1.0,
                Event::Motion {
                    kind: MotionKind::Sweep,
                    from: Waypoint::new(x + 0.1, 1.05, 0.5),
                    to: Waypoint::new(*x, 1.05, 0.5),
                    contact: false,
                },
            );
        }
        assert!(matches!(verify_log(log.records()), Err(ReplayError::SweepMonotone { .. })));
    }
}
