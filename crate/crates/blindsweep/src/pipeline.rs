//! The search-and-retrieve pipeline built on the world primitives.
//!
//! Whole-body mode sweeps the stretched arm across stations and descends
//! until the skin reports contact, projects the touched pad onto the table,
//! then localizes the object precisely with narrow force-probe strips and
//! grasps it with a local refinement schedule. The baseline skips the skin
//! entirely and strip-scans the whole table with the probe.
//!
//! Only guarded scans sense contact; lifts and lateral repositions are
//! treated as collision-free, which is the price of the 2.5D abstraction.

use crate::events::Event;
use crate::geometry::{
    clip_segment_to_annulus, ray_intersect, GeometryError, Point2, Ray2, Rect2, Vec2,
};
use crate::skin::{project_pad, PadLayout, PadProjection};
use crate::world::{
    GraspCandidate, GraspOutcome, MotionMode, MotionOutcome, MotionTarget, Sensors, WorldState,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Inflation applied to a contacted pad's shadow before strip-scanning it.
pub const SKIN_PROJECTION_MARGIN: f64 = 0.02;

/// Strips begin this far outside the region so the probe starts clear of
/// the object it is about to touch.
pub const APPROACH_CLEARANCE: f64 = 0.08;

/// Lift above the contact height while repositioning between strips.
const STRIP_LIFT: f64 = 0.05;

/// The baseline lifts to a fixed clearing height between strips; it has no
/// contact-height estimate to lift relative to.
const BASELINE_LIFT_HEIGHT: f64 = 0.35;

/// A baseline strip is rescanned after a bin or an orthogonal-scan miss,
/// but at most this many passes total.
const BASELINE_STRIP_PASSES: usize = 4;

#[derive(Debug, Error, PartialEq)]
pub enum PipelineError {
    #[error("invalid refinement schedule: {0}")]
    InvalidRefinement(String),
}

/// Station schedule for the whole-body sweep: the arm visits stations from
/// `start_x` down to `end_x` and descends with the skin armed at each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPlan {
    pub start_x: f64,
    pub end_x: f64,
    pub station_step: f64,
    pub travel_height: f64,
    pub floor: f64,
}

impl SweepPlan {
    pub fn stations(&self) -> Vec<f64> {
        assert!(self.station_step > 0.0, "station step must be positive");
        assert!(self.start_x >= self.end_x, "stations advance toward -x");
        let n = ((self.start_x - self.end_x) / self.station_step + 1e-9).floor() as usize + 1;
        (0..n).map(|i| self.start_x - i as f64 * self.station_step).collect()
    }
}

/// One commanded guarded scan: probe travels from `s` toward `g`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanSegment {
    pub index: usize,
    pub s: Point2,
    pub g: Point2,
    pub orthogonal: bool,
}

/// Two probe contacts with exactly perpendicular scan directions; enough
/// to intersect the contact lines into a grasp center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalizationResult {
    pub p1: Point2,
    pub v1: Vec2,
    pub p2: Point2,
    pub v2: Vec2,
    /// Guarded scans spent obtaining the pair.
    pub scans: usize,
}

/// Local search schedule around the initial grasp: depth backoffs opposite
/// the approach, lateral shifts along the jaw axis, and yaw perturbations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementParams {
    /// Backoff distances opposite the approach, ascending from 0.
    pub behind_offsets: Vec<f64>,
    /// Lateral shifts; zero first, then by magnitude, negative before
    /// positive within a magnitude.
    pub side_offsets: Vec<f64>,
    /// Yaw perturbations in radians, ordered like `side_offsets`.
    pub rot_offsets: Vec<f64>,
    /// Hard cap on attempts (grasp closures plus kinematic rejections) per
    /// localization.
    pub i_max: usize,
}

impl Default for RefinementParams {
    fn default() -> Self {
        let deg = |d: f64| d.to_radians();
        Self {
            behind_offsets: vec![0.0, 0.02, 0.04],
            side_offsets: vec![0.0, -0.02, 0.02, -0.04, 0.04],
            rot_offsets: vec![0.0, deg(-15.0), deg(15.0), deg(-30.0), deg(30.0)],
            i_max: 75,
        }
    }
}

impl RefinementParams {
    pub fn validate(&self) -> Result<(), PipelineError> {
        let err = |m: String| Err(PipelineError::InvalidRefinement(m));
        if self.behind_offsets.is_empty()
            || self.side_offsets.is_empty()
            || self.rot_offsets.is_empty()
        {
            return err("offset lists must be non-empty".into());
        }
        if self.i_max == 0 {
            return err("i_max must be at least 1".into());
        }
        for trio in [&self.behind_offsets, &self.side_offsets, &self.rot_offsets] {
            if trio[0] != 0.0 {
                return err("each offset list must start with 0 so the first candidate is the unrefined grasp".into());
            }
        }
        for &b in &self.behind_offsets {
            if !(0.0..=0.04 + 1e-9).contains(&b) {
                return err(format!("behind offset {b} outside [0, 0.04] m"));
            }
        }
        for &s in &self.side_offsets {
            if s.abs() > 0.04 + 1e-9 {
                return err(format!("side offset {s} outside [-0.04, 0.04] m"));
            }
        }
        for &r in &self.rot_offsets {
            if r.abs() > 30f64.to_radians() + 1e-9 {
                return err(format!("rotation offset {r} rad outside +-30 degrees"));
            }
        }
        Ok(())
    }
}

/// Expand the refinement schedule around a base grasp. Depth is the major
/// axis, lateral shift the middle, yaw the minor, so nearby poses are tried
/// in increasing displacement from the initial estimate and the first
/// candidate is the base grasp itself.
pub fn enumerate_refinements(
    base: &GraspCandidate,
    params: &RefinementParams,
) -> Vec<GraspCandidate> {
    let approach = base.approach();
    let jaw = base.jaw_axis();
    let mut out = Vec::with_capacity(
        params.behind_offsets.len() * params.side_offsets.len() * params.rot_offsets.len(),
    );
    for &behind in &params.behind_offsets {
        for &side in &params.side_offsets {
            for &rot in &params.rot_offsets {
                out.push(GraspCandidate {
                    center: base.center - approach * behind + jaw * side,
                    yaw: base.yaw + rot,
                    grasp_height: base.grasp_height,
                });
            }
        }
    }
    out
}

/// Vertical strips covering a region for the first scan direction (0, -1):
/// strip k sits at `x_min + w/2 + k w`, with enough strips that the last
/// probe band reaches past the region's east edge.
pub fn strip_schedule(region: &Rect2, probe_width: f64, clearance: f64) -> Vec<ScanSegment> {
    let half_x = region.half_extents.0;
    let half_y = region.half_extents.1;
    let x_min = region.center.x - half_x;
    let x_max = region.center.x + half_x;
    let width = 2.0 * half_x;

    let mut k = ((width - probe_width / 2.0) / probe_width).ceil().max(1.0) as usize;
    while x_min + probe_width / 2.0 + (k as f64 - 1.0) * probe_width + probe_width / 2.0
        < x_max - 1e-9
    {
        k += 1;
    }

    (0..k)
        .map(|i| {
            let x = x_min + probe_width / 2.0 + i as f64 * probe_width;
            ScanSegment {
                index: i,
                s: Point2::new(x, region.center.y + half_y + clearance),
                g: Point2::new(x, region.center.y - half_y),
                orthogonal: false,
            }
        })
        .collect()
}

/// Glue for one guarded probe scan: lift above the work height, repose over
/// the start, lower, and scan toward the goal, confined to the reachable
/// annulus. Returns `None` if the whole segment is unreachable or clear.
fn guarded_scan(
    world: &mut WorldState,
    index: usize,
    s: Point2,
    g: Point2,
    orthogonal: bool,
    lift_h: f64,
    scan_h: f64,
) -> Option<(Point2, Vec2)> {
    let (inner, outer) = (world.params.reach_inner, world.params.reach_outer);
    let (cs, cg) = clip_segment_to_annulus(s, g, Point2::new(0.0, 0.0), inner, outer)?;
    world.move_linear(MotionTarget::Height(lift_h), MotionMode::ProbeScan, Sensors::None);
    world.move_linear(MotionTarget::Planar(cs), MotionMode::ProbeScan, Sensors::None);
    world.move_linear(MotionTarget::Height(scan_h), MotionMode::ProbeScan, Sensors::None);
    world.log_event(Event::ScanSegment { index, s: cs, g: cg, orthogonal });
    match world.move_linear(MotionTarget::Planar(cg), MotionMode::ProbeScan, Sensors::Ft) {
        MotionOutcome::ProbeContact { point, dir, .. } => Some((point, dir)),
        _ => None,
    }
}

/// Pin down one object inside a projected skin region with the force probe.
///
/// Vertical strips are scanned north to south; the first contact p1 fixes
/// the object's near boundary under that strip. An orthogonal west-to-east
/// scan slightly south of p1 then fixes the flank, giving p2 with scan
/// directions that are perpendicular by construction. If the orthogonal
/// scan misses, p1 is discarded and the strip retried once before moving
/// on. Returns `None` (and logs the absence) when every strip is exhausted
/// or the scan budget runs out.
pub fn precise_localization(
    world: &mut WorldState,
    projection: &PadProjection,
) -> Option<LocalizationResult> {
    let region = projection.rect;
    let w = world.params.gripper.effective_probe_width;
    let scan_h = world.params.descend_floor;
    let lift_h = projection.min_height + STRIP_LIFT;
    let strips = strip_schedule(&region, w, APPROACH_CLEARANCE);
    let cap = 3 * strips.len() + 4;
    let x_max = region.center.x + region.half_extents.0;

    let mut scans = 0usize;
    let mut index = 0usize;
    for strip in &strips {
        for _pass in 0..2 {
            if world.timed_out() || scans >= cap {
                world.log_event(Event::LocalizationAbsent { scans });
                return None;
            }
            scans += 1;
            let hit = guarded_scan(world, index, strip.s, strip.g, false, lift_h, scan_h);
            index += 1;
            let Some((p1, v1)) = hit else { break };

            let y_o = p1.y - w / 2.0;
            let s_o = Point2::new(strip.s.x - w, y_o);
            let g_o = Point2::new(x_max, y_o);
            scans += 1;
            let hit = guarded_scan(world, index, s_o, g_o, true, lift_h, scan_h);
            index += 1;
            if let Some((p2, v2)) = hit {
                world.log_event(Event::Localized { p1, v1, p2, v2 });
                return Some(LocalizationResult { p1, v1, p2, v2, scans });
            }
            // Orthogonal miss: p1 was a spurious or grazing contact.
        }
    }
    world.log_event(Event::LocalizationAbsent { scans });
    None
}

/// Intersect the two contact lines into a grasp center; the gripper
/// approaches along the second (orthogonal) scan direction, jaws closing
/// across it.
pub fn plan_initial_grasp(
    loc: &LocalizationResult,
    grasp_height: f64,
) -> Result<GraspCandidate, GeometryError> {
    let center = ray_intersect(&Ray2::new(loc.p1, loc.v1), &Ray2::new(loc.p2, loc.v2))?;
    Ok(GraspCandidate::new(center, loc.v2, grasp_height))
}

#[derive(Debug, Clone, PartialEq)]
pub enum SequenceOutcome {
    /// An attempt succeeded and the object was carried to the bin.
    Binned(String),
    /// The schedule (or attempt budget) ran out without a capture.
    Exhausted,
}

/// Work through the refinement schedule until a grasp holds, the budget
/// `i_max` is spent, or the run times out. Kinematically infeasible poses
/// cost planning time and count against the budget without touching the
/// scene.
pub fn grasp_sequence(
    world: &mut WorldState,
    base: &GraspCandidate,
    params: &RefinementParams,
) -> SequenceOutcome {
    for (i, cand) in enumerate_refinements(base, params).iter().take(params.i_max).enumerate() {
        if world.timed_out() {
            return SequenceOutcome::Exhausted;
        }
        if !world.candidate_reachable(cand) {
            world.reject_candidate(i, cand);
            continue;
        }
        if let GraspOutcome::Success { .. } = world.attempt_grasp(i, cand) {
            let name = world.bin_object().expect("successful grasp leaves an object held");
            return SequenceOutcome::Binned(name);
        }
    }
    SequenceOutcome::Exhausted
}

/// Smallest pad wins: a smaller shadow means a tighter search region.
/// Ties break toward the lower pad id.
pub fn choose_pad(layout: &PadLayout, pads: &[usize]) -> usize {
    *pads
        .iter()
        .min_by(|&&a, &&b| {
            let area = |i: usize| {
                let p = layout.pad(i);
                p.length_along_arm * p.width
            };
            area(a).partial_cmp(&area(b)).unwrap().then(a.cmp(&b))
        })
        .expect("contact reports at least one pad")
}

/// Outcome of one full run, with the event log for replay.
#[derive(Debug)]
pub struct RunResult {
    pub seed: u64,
    pub mode: &'static str,
    pub binned: Vec<String>,
    pub total_objects: usize,
    pub grasp_attempts: usize,
    pub duration_s: f64,
    pub timed_out: bool,
    pub log: crate::events::EventLog,
}

impl RunResult {
    pub fn success(&self) -> bool {
        self.binned.len() == self.total_objects
    }
}

fn finish(world: WorldState, mode: &'static str) -> RunResult {
    RunResult {
        seed: world.seed(),
        mode,
        binned: world.bin_contents(),
        total_objects: world.total_objects(),
        grasp_attempts: world.grasp_attempts(),
        duration_s: world.clock(),
        timed_out: world.timed_out(),
        log: world.into_log(),
    }
}

/// Whole-body search: visit stations from +x to -x, descend with the skin
/// armed, and on contact localize and grasp under the touched pad. A
/// station is re-descended only after a successful bin, since removing an
/// object may expose another under the same pad; otherwise the sweep
/// advances.
pub fn run_whole_body(
    mut world: WorldState,
    plan: &SweepPlan,
    refinement: &RefinementParams,
) -> RunResult {
    world.log_run_start("whole_body", refinement.i_max);
    let stations = plan.stations();
    let forward_y = world.params.ee_forward_y;

    let mut idx = 0;
    while idx < stations.len() && !world.timed_out() {
        let target = Point2::new(stations[idx], forward_y);
        if (world.robot.height - plan.travel_height).abs() > 1e-12 {
            world.move_linear(
                MotionTarget::Height(plan.travel_height),
                MotionMode::Descend,
                Sensors::None,
            );
        }
        if world.robot.ee_position.distance(target) > 1e-12 {
            world.move_linear(MotionTarget::Planar(target), MotionMode::Sweep, Sensors::None);
        }

        match world.move_linear(
            MotionTarget::Height(plan.floor),
            MotionMode::Descend,
            Sensors::Skin,
        ) {
            MotionOutcome::SafetyStop => {
                idx += 1;
            }
            MotionOutcome::SkinContact { pads, arm_pose } => {
                let chosen = choose_pad(&world.layout, &pads);
                world.log_event(Event::SkinContact {
                    pads,
                    chosen_pad: chosen,
                    arm_height: arm_pose.height,
                });
                let projection = project_pad(
                    &world.layout,
                    chosen,
                    arm_pose.ee_position,
                    arm_pose.height,
                    SKIN_PROJECTION_MARGIN,
                );
                world.log_event(Event::PadProjected { projection: projection.clone() });

                let mut binned = false;
                if let Some(loc) = precise_localization(&mut world, &projection) {
                    if let Ok(base) = plan_initial_grasp(&loc, plan.floor) {
                        binned = matches!(
                            grasp_sequence(&mut world, &base, refinement),
                            SequenceOutcome::Binned(_)
                        );
                    }
                }

                world.move_linear(
                    MotionTarget::Height(plan.travel_height),
                    MotionMode::Descend,
                    Sensors::None,
                );
                world.move_linear(
                    MotionTarget::Planar(target),
                    MotionMode::Transport,
                    Sensors::None,
                );
                if !binned {
                    idx += 1;
                }
            }
            _ => unreachable!("skin descend yields contact or safety stop"),
        }
    }
    world.log_run_end();
    finish(world, "whole_body")
}

/// Probe-only baseline: no skin, so the whole table is strip-scanned at
/// floor height with the force probe, west to east, each strip confined to
/// the reachable annulus. Contacts are localized and grasped exactly as in
/// whole-body mode; a strip is rescanned after a bin. Runs with doubled
/// contact noise: sensitive contact thresholds are a skin affordance.
pub fn run_baseline(mut world: WorldState, refinement: &RefinementParams) -> RunResult {
    world.set_noise_scale(2.0);
    world.log_run_start("baseline", refinement.i_max);

    let table = world.params.table;
    let w = world.params.gripper.effective_probe_width;
    let floor = world.params.descend_floor;
    let y_top = table.center.y + table.half_extents.1;
    let y_bottom = table.center.y - table.half_extents.1;
    let x_min = table.center.x - table.half_extents.0;
    let x_max = table.center.x + table.half_extents.0;

    let mut index = 0usize;
    let mut x = x_min + w / 2.0;
    'strips: while x - w / 2.0 < x_max - 1e-9 {
        let mut passes = 0;
        'passes: while passes < BASELINE_STRIP_PASSES {
            if world.timed_out() {
                break 'strips;
            }
            passes += 1;
            let s = Point2::new(x, y_top + APPROACH_CLEARANCE);
            let g = Point2::new(x, y_bottom);
            let hit = baseline_scan(&mut world, index, s, g, false);
            index += 1;
            let Some((p1, v1)) = hit else { break 'passes };

            let y_o = p1.y - w / 2.0;
            let hit = baseline_scan(
                &mut world,
                index,
                Point2::new(x - w, y_o),
                Point2::new(x + 2.0 * w, y_o),
                true,
            );
            index += 1;
            let Some((p2, v2)) = hit else { continue 'passes };

            world.log_event(Event::Localized { p1, v1, p2, v2 });
            let Ok(base) =
                plan_initial_grasp(&LocalizationResult { p1, v1, p2, v2, scans: 2 }, floor)
            else {
                continue 'passes;
            };
            match grasp_sequence(&mut world, &base, refinement) {
                SequenceOutcome::Binned(_) => continue 'passes,
                SequenceOutcome::Exhausted => break 'passes,
            }
        }
        x += w;
    }
    world.log_run_end();
    finish(world, "baseline")
}

/// Baseline flavor of a guarded scan: long repositions happen at transport
/// speed and the clearing lift is a fixed height.
fn baseline_scan(
    world: &mut WorldState,
    index: usize,
    s: Point2,
    g: Point2,
    orthogonal: bool,
) -> Option<(Point2, Vec2)> {
    let (inner, outer) = (world.params.reach_inner, world.params.reach_outer);
    let (cs, cg) = clip_segment_to_annulus(s, g, Point2::new(0.0, 0.0), inner, outer)?;
    world.move_linear(
        MotionTarget::Height(BASELINE_LIFT_HEIGHT),
        MotionMode::Descend,
        Sensors::None,
    );
    world.move_linear(MotionTarget::Planar(cs), MotionMode::Transport, Sensors::None);
    world.move_linear(
        MotionTarget::Height(world.params.descend_floor),
        MotionMode::Descend,
        Sensors::None,
    );
    world.log_event(Event::ScanSegment { index, s: cs, g: cg, orthogonal });
    match world.move_linear(MotionTarget::Planar(cg), MotionMode::ProbeScan, Sensors::Ft) {
        MotionOutcome::ProbeContact { point, dir, .. } => Some((point, dir)),
        _ => None,
    }
}
