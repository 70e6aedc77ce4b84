//! Deterministic quasi-static world: scene state, guarded motion primitives
//! that accrue simulated time and stop on contact, the parallel-jaw capture
//! model with push-on-miss displacement, the fall-over model, and the bin.
//!
//! There are no dynamics. Motions are straight lines traversed at a
//! configured speed; pushes are instantaneous translations; the clock is the
//! sum of segment times and fixed action times, and every mutation is
//! logged so a finished run can be re-verified from its event log.

use crate::events::{Event, EventLog, GraspOutcomeTag, LoggedParams, MotionKind, Waypoint};
use crate::geometry::{
    extent_along, rect_polygon_overlap, sweep_first_contact, Footprint, Point2, Pose2, Rect2, Vec2,
};
use crate::skin::{pads_in_contact, PadLayout, SKIN_SAMPLE_PERIOD};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FailureProfile {
    /// Physics-engine-like behavior: missed objects slide, nothing falls
    /// over, deformability is not modeled.
    Sim,
    /// Hardware-like behavior: struck objects fall over with probability
    /// `p_fall` and deformable objects tolerate misaligned jaws.
    Real,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GripperModel {
    pub max_width: f64,
    pub jaw_depth: f64,
    /// Closing below this width means the jaws met nothing.
    pub close_fail_width: f64,
    /// Effective contact width of the gripper side used as the probe.
    pub effective_probe_width: f64,
}

impl GripperModel {
    pub fn validate(&self) -> Result<(), WorldError> {
        if !(self.close_fail_width > 0.0 && self.close_fail_width < self.max_width) {
            return Err(WorldError::InvalidGripper(
                "close_fail_width must lie strictly between 0 and max_width",
            ));
        }
        if self.jaw_depth <= 0.0 || self.effective_probe_width <= 0.0 {
            return Err(WorldError::InvalidGripper("jaw_depth and probe width must be positive"));
        }
        Ok(())
    }
}

/// Everything the simulator needs besides the scene itself. Speeds and
/// fixed action times are calibration knobs, not measured hardware values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldParams {
    pub table: Rect2,
    pub bin_position: Point2,
    pub speed_sweep: f64,
    pub speed_descend: f64,
    pub speed_probe: f64,
    pub speed_transport: f64,
    pub grasp_cycle_s: f64,
    pub ik_reject_s: f64,
    pub bin_drop_s: f64,
    pub gripper: GripperModel,
    /// Max angle between a jaw face and a flat object face for a rigid
    /// grasp to hold, radians.
    pub align_tol: f64,
    /// Fraction of the capture-overlap depth a missed object slides.
    pub push_gain: f64,
    /// Edges shorter than this are treated as curvature, not faces.
    pub alignment_face_min: f64,
    pub p_fall: f64,
    pub reach_inner: f64,
    pub reach_outer: f64,
    pub noise_sigma: f64,
    pub profile: FailureProfile,
    pub descend_floor: f64,
    pub travel_height: f64,
    /// Forward (y) position of the end-effector column while sweeping.
    pub ee_forward_y: f64,
    pub timeout_s: f64,
}

impl WorldParams {
    fn logged(&self, i_max: usize) -> LoggedParams {
        LoggedParams {
            speed_sweep: self.speed_sweep,
            speed_descend: self.speed_descend,
            speed_probe: self.speed_probe,
            speed_transport: self.speed_transport,
            grasp_cycle_s: self.grasp_cycle_s,
            ik_reject_s: self.ik_reject_s,
            bin_drop_s: self.bin_drop_s,
            bin_position: self.bin_position,
            i_max,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectInstance {
    pub name: String,
    pub footprint: Footprint,
    pub height: f64,
    pub pose: Pose2,
    pub deformable: bool,
    pub fallen: bool,
    pub mass_proxy: f64,
}

impl ObjectInstance {
    pub fn world_vertices(&self) -> Vec<Point2> {
        self.footprint.transformed(&self.pose)
    }

    pub fn world_centroid(&self) -> Point2 {
        self.pose.apply(self.footprint.centroid())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArmPose {
    pub sweep_x: f64,
    pub height: f64,
    pub ee_position: Point2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MotionTarget {
    Planar(Point2),
    Height(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MotionMode {
    Sweep,
    Descend,
    ProbeScan,
    Transport,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sensors {
    Skin,
    Ft,
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MotionOutcome {
    Completed,
    SkinContact { pads: Vec<usize>, arm_pose: ArmPose },
    ProbeContact { point: Point2, dir: Vec2, object: String },
    SafetyStop,
}

/// Lateral grasp pose: jaws parallel to the table, closing across the
/// approach direction, palm at `center` facing along `approach()`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraspCandidate {
    pub center: Point2,
    pub yaw: f64,
    pub grasp_height: f64,
}

impl GraspCandidate {
    pub fn new(center: Point2, approach: Vec2, grasp_height: f64) -> Self {
        Self { center, yaw: approach.angle(), grasp_height }
    }

    pub fn approach(&self) -> Vec2 {
        Vec2::new(self.yaw.cos(), self.yaw.sin())
    }

    pub fn jaw_axis(&self) -> Vec2 {
        self.approach().perp()
    }

    /// Region between the open jaws: `max_width` across, `jaw_depth` deep,
    /// extending forward of the palm.
    pub fn capture_rect(&self, gripper: &GripperModel) -> Rect2 {
        Rect2::new(
            self.center + self.approach() * (gripper.jaw_depth / 2.0),
            (gripper.jaw_depth / 2.0, gripper.max_width / 2.0),
            self.yaw,
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GraspOutcome {
    Success { object: String },
    Miss,
    WidthFail,
    Toppled,
}

#[derive(Debug, Error, PartialEq)]
pub enum WorldError {
    #[error("object '{0}' spawns outside the table")]
    SpawnOutsideTable(String),
    #[error("object '{name}' height {height} must exceed the 0.10 m detectability floor")]
    ObjectTooShort { name: String, height: f64 },
    #[error("duplicate object name '{0}'")]
    DuplicateName(String),
    #[error("no object is held")]
    NothingHeld,
    #[error("invalid gripper: {0}")]
    InvalidGripper(&'static str),
}

pub struct WorldState {
    pub params: WorldParams,
    pub layout: PadLayout,
    objects: Vec<ObjectInstance>,
    bin: Vec<ObjectInstance>,
    held: Option<(ObjectInstance, Point2)>,
    pub robot: ArmPose,
    clock: f64,
    seed: u64,
    rng: ChaCha8Rng,
    noise: Normal<f64>,
    log: EventLog,
    timed_out: bool,
    grasp_attempts: usize,
}

impl WorldState {
    pub fn new(
        params: WorldParams,
        layout: PadLayout,
        objects: Vec<ObjectInstance>,
        seed: u64,
    ) -> Result<Self, WorldError> {
        params.gripper.validate()?;
        let mut names: Vec<&str> = Vec::new();
        for o in &objects {
            if o.height <= params.descend_floor {
                return Err(WorldError::ObjectTooShort { name: o.name.clone(), height: o.height });
            }
            if !params.table.contains(o.pose.position()) {
                return Err(WorldError::SpawnOutsideTable(o.name.clone()));
            }
            if names.contains(&o.name.as_str()) {
                return Err(WorldError::DuplicateName(o.name.clone()));
            }
            names.push(&o.name);
        }
        let noise = Normal::new(0.0, params.noise_sigma).expect("sigma must be finite and >= 0");
        let robot = ArmPose {
            sweep_x: 0.0,
            height: params.travel_height,
            ee_position: Point2::new(0.0, params.ee_forward_y),
        };
        Ok(Self {
            params,
            layout,
            objects,
            bin: Vec::new(),
            held: None,
            robot,
            clock: 0.0,
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
            noise,
            log: EventLog::new(),
            timed_out: false,
            grasp_attempts: 0,
        })
    }

    pub fn clock(&self) -> f64 {
        self.clock
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn timed_out(&self) -> bool {
        self.timed_out
    }

    pub fn table_objects(&self) -> &[ObjectInstance] {
        &self.objects
    }

    pub fn bin_contents(&self) -> Vec<String> {
        self.bin.iter().map(|o| o.name.clone()).collect()
    }

    pub fn grasp_attempts(&self) -> usize {
        self.grasp_attempts
    }

    pub fn log(&self) -> &EventLog {
        &self.log
    }

    pub fn into_log(self) -> EventLog {
        self.log
    }

    /// Scale the contact noise, as the relaxed-sensitivity baseline does.
    pub fn set_noise_scale(&mut self, scale: f64) {
        self.noise = Normal::new(0.0, self.params.noise_sigma * scale)
            .expect("scaled sigma must be finite and >= 0");
    }

    pub fn log_run_start(&mut self, mode: &str, i_max: usize) {
        let event = Event::RunStart {
            seed: self.seed,
            profile: match self.params.profile {
                FailureProfile::Sim => "sim".into(),
                FailureProfile::Real => "real".into(),
            },
            mode: mode.into(),
            objects: self.objects.iter().map(|o| o.name.clone()).collect(),
            params: self.params.logged(i_max),
        };
        self.log.push(self.clock, 0.0, event);
    }

    pub fn log_run_end(&mut self) {
        let event =
            Event::RunEnd { binned: self.bin_contents(), grasp_attempts: self.grasp_attempts };
        self.log.push(self.clock, 0.0, event);
    }

    /// Log a pipeline decision that costs no time.
    pub fn log_event(&mut self, event: Event) {
        self.log.push(self.clock, 0.0, event);
    }

    fn advance_and_log(&mut self, dt: f64, event: Event) {
        debug_assert!(dt >= 0.0);
        self.clock += dt;
        self.log.push(self.clock, dt, event);
        if !self.timed_out && self.clock >= self.params.timeout_s {
            self.timed_out = true;
            self.log.push(self.clock, 0.0, Event::TimedOut {});
        }
    }

    fn waypoint(&self) -> Waypoint {
        Waypoint::new(self.robot.ee_position.x, self.robot.ee_position.y, self.robot.height)
    }

    fn contact_polygons(&self, min_height: f64) -> Vec<(usize, Vec<Point2>)> {
        self.objects
            .iter()
            .enumerate()
            .filter(|(_, o)| o.height + 1e-9 >= min_height)
            .map(|(i, o)| (i, o.world_vertices()))
            .collect()
    }

    /// Straight-line motion in the given mode. Guarded variants stop on
    /// contact and report what was sensed; time accrues as distance over
    /// the mode speed, plus skin-frame quantization for descends.
    pub fn move_linear(
        &mut self,
        target: MotionTarget,
        mode: MotionMode,
        sensors: Sensors,
    ) -> MotionOutcome {
        match (target, mode, sensors) {
            (MotionTarget::Height(h), MotionMode::Descend, Sensors::Skin) => {
                self.descend_with_skin(h)
            }
            (MotionTarget::Height(h), MotionMode::Descend, Sensors::None) => {
                let kind =
                    if h < self.robot.height { MotionKind::Descend } else { MotionKind::Ascend };
                self.vertical_move(h, self.params.speed_descend, kind)
            }
            (MotionTarget::Height(h), MotionMode::ProbeScan, Sensors::None) => {
                self.vertical_move(h, self.params.speed_probe, MotionKind::Reposition)
            }
            (MotionTarget::Planar(p), MotionMode::Sweep, Sensors::None) => {
                let from = self.waypoint();
                let dist = self.robot.ee_position.distance(p);
                self.robot.ee_position = p;
                self.robot.sweep_x = p.x;
                let dt = dist / self.params.speed_sweep;
                let to = self.waypoint();
                self.advance_and_log(
                    dt,
                    Event::Motion { kind: MotionKind::Sweep, from, to, contact: false },
                );
                MotionOutcome::Completed
            }
            (MotionTarget::Planar(p), MotionMode::ProbeScan, Sensors::None) => {
                let from = self.waypoint();
                let dist = self.robot.ee_position.distance(p);
                self.robot.ee_position = p;
                let dt = dist / self.params.speed_probe;
                let to = self.waypoint();
                self.advance_and_log(
                    dt,
                    Event::Motion { kind: MotionKind::Reposition, from, to, contact: false },
                );
                MotionOutcome::Completed
            }
            (MotionTarget::Planar(p), MotionMode::Transport, Sensors::None) => {
                let from = self.waypoint();
                let dist = self.robot.ee_position.distance(p);
                self.robot.ee_position = p;
                let dt = dist / self.params.speed_transport;
                let to = self.waypoint();
                self.advance_and_log(
                    dt,
                    Event::Motion { kind: MotionKind::Transport, from, to, contact: false },
                );
                MotionOutcome::Completed
            }
            (MotionTarget::Planar(p), MotionMode::ProbeScan, Sensors::Ft) => self.probe_scan(p),
            _ => unreachable!("unsupported motion/sensor combination"),
        }
    }

    fn vertical_move(&mut self, target_h: f64, speed: f64, kind: MotionKind) -> MotionOutcome {
        let from = self.waypoint();
        let dist = (self.robot.height - target_h).abs();
        self.robot.height = target_h;
        let to = self.waypoint();
        self.advance_and_log(dist / speed, Event::Motion { kind, from, to, contact: false });
        MotionOutcome::Completed
    }

    /// Whole-body descend: the stretched arm sinks until a skin pad meets an
    /// object or the safety floor stops it. Detection is quantized to the
    /// 30 Hz skin frames, so the arm overshoots true contact by up to one
    /// frame of travel.
    fn descend_with_skin(&mut self, floor: f64) -> MotionOutcome {
        let from = self.waypoint();
        let h0 = self.robot.height;
        let v = self.params.speed_descend;
        let ee = self.robot.ee_position;

        // Highest pad/object contact below the current arm height.
        let mut contact_h = f64::NEG_INFINITY;
        for pad in self.layout.pads().to_vec() {
            let rect = crate::skin::pad_rect(&pad, ee);
            for o in &self.objects {
                if rect_polygon_overlap(&rect, &o.world_vertices()) {
                    contact_h = contact_h.max(o.height - pad.min_height_offset);
                }
            }
        }

        if contact_h < floor {
            // Nothing to hit above the safety height.
            self.robot.height = floor;
            let to = self.waypoint();
            self.advance_and_log(
                (h0 - floor) / v,
                Event::Motion { kind: MotionKind::Descend, from, to, contact: false },
            );
            return MotionOutcome::SafetyStop;
        }

        let contact_h = contact_h.min(h0);
        let t_true = self.clock + (h0 - contact_h) / v;
        // First skin frame at or after true contact.
        let frames = (t_true / SKIN_SAMPLE_PERIOD - 1e-9).ceil().max(0.0);
        let t_detect = frames * SKIN_SAMPLE_PERIOD;
        let stop_h = (h0 - (t_detect - self.clock) * v).max(floor);
        let dt = t_detect - self.clock;

        self.robot.height = stop_h;
        let to = self.waypoint();
        self.advance_and_log(
            dt,
            Event::Motion { kind: MotionKind::Descend, from, to, contact: true },
        );

        let polys = self.contact_polygons(0.0);
        let refs: Vec<(&[Point2], f64)> =
            polys.iter().map(|(i, v)| (v.as_slice(), self.objects[*i].height)).collect();
        let pads = pads_in_contact(&self.layout, ee, stop_h, refs);
        debug_assert!(
            !pads.is_empty(),
            "detected contact_h {contact_h} from h0 {h0} but no pad touches at stop {stop_h} (t_true {t_true}, dt {dt})",
        );
        MotionOutcome::SkinContact { pads, arm_pose: self.robot }
    }

    /// Guarded end-effector scan at the current height. The probe is a
    /// segment of the gripper's effective width held perpendicular to the
    /// motion; only objects tall enough to reach the scan plane are felt.
    fn probe_scan(&mut self, goal: Point2) -> MotionOutcome {
        let from = self.waypoint();
        let start = self.robot.ee_position;
        let h = self.robot.height;
        let polys = self.contact_polygons(h);
        let slices: Vec<&[Point2]> = polys.iter().map(|(_, v)| v.as_slice()).collect();
        let half_w = self.params.gripper.effective_probe_width / 2.0;

        let hit = sweep_first_contact(start, goal, half_w, &slices);
        match hit {
            None => {
                self.robot.ee_position = goal;
                let dt = start.distance(goal) / self.params.speed_probe;
                let to = self.waypoint();
                self.advance_and_log(
                    dt,
                    Event::Motion { kind: MotionKind::Probe, from, to, contact: false },
                );
                MotionOutcome::Completed
            }
            Some(hit) => {
                self.robot.ee_position = hit.probe_point;
                let dt = start.distance(hit.probe_point) / self.params.speed_probe;
                let to = self.waypoint();
                self.advance_and_log(
                    dt,
                    Event::Motion { kind: MotionKind::Probe, from, to, contact: true },
                );
                let dir = (goal - start).normalized();
                let noisy = self.perturb(hit.contact_point);
                let object = self.objects[polys[hit.obstacle].0].name.clone();
                self.log_event(Event::ProbeContact { point: noisy, dir, object: object.clone() });
                MotionOutcome::ProbeContact { point: noisy, dir, object }
            }
        }
    }

    fn perturb(&mut self, p: Point2) -> Point2 {
        let dx = self.noise.sample(&mut self.rng);
        let dy = self.noise.sample(&mut self.rng);
        Point2::new(p.x + dx, p.y + dy)
    }

    /// True when the whole jaw span can be reached: palm center and both
    /// jaw tips inside the reachability annulus around the base.
    pub fn candidate_reachable(&self, g: &GraspCandidate) -> bool {
        let half = self.params.gripper.max_width / 2.0;
        let tips = [g.center, g.center + g.jaw_axis() * half, g.center - g.jaw_axis() * half];
        tips.iter().all(|p| {
            let r = (*p - Point2::new(0.0, 0.0)).norm();
            r >= self.params.reach_inner && r <= self.params.reach_outer
        })
    }

    /// Record a kinematically infeasible candidate: costs planning time,
    /// counts as an attempt, touches nothing.
    pub fn reject_candidate(&mut self, index: usize, g: &GraspCandidate) {
        self.grasp_attempts += 1;
        self.advance_and_log(
            self.params.ik_reject_s,
            Event::GraspAttempt {
                index,
                center: g.center,
                yaw: g.yaw,
                outcome: GraspOutcomeTag::IkReject,
                object: None,
                push: None,
            },
        );
    }

    /// Close the jaws at the candidate pose and classify the result.
    ///
    /// The rule, applied to the object nearest the capture region:
    /// width failure if the object cannot fit between the jaws; success if
    /// its centroid lies between the jaws and either a flat face mates with
    /// a jaw within the alignment tolerance, the surface is curved, or the
    /// object deforms (real profile only); otherwise a miss that shoves the
    /// object in proportion to how asymmetrically the jaws struck it.
    pub fn attempt_grasp(&mut self, index: usize, g: &GraspCandidate) -> GraspOutcome {
        self.grasp_attempts += 1;
        let capture = g.capture_rect(&self.params.gripper);
        let jaw_axis = g.jaw_axis();
        let approach = g.approach();

        let target = self
            .objects
            .iter()
            .enumerate()
            .filter(|(_, o)| o.height + 1e-9 >= g.grasp_height)
            .min_by(|(_, a), (_, b)| {
                let da = a.world_centroid().distance(capture.center);
                let db = b.world_centroid().distance(capture.center);
                da.partial_cmp(&db).unwrap()
            })
            .map(|(i, _)| i);

        let Some(oi) = target else {
            self.advance_and_log(
                self.params.grasp_cycle_s,
                Event::GraspAttempt {
                    index,
                    center: g.center,
                    yaw: g.yaw,
                    outcome: GraspOutcomeTag::Miss,
                    object: None,
                    push: None,
                },
            );
            return GraspOutcome::Miss;
        };

        let verts = self.objects[oi].world_vertices();
        let centroid = self.objects[oi].world_centroid();
        let name = self.objects[oi].name.clone();
        let jaw_extent =
            extent_along(&self.objects[oi].footprint, &self.objects[oi].pose, jaw_axis);

        if jaw_extent > self.params.gripper.max_width {
            self.advance_and_log(
                self.params.grasp_cycle_s,
                Event::GraspAttempt {
                    index,
                    center: g.center,
                    yaw: g.yaw,
                    outcome: GraspOutcomeTag::WidthFail,
                    object: Some(name),
                    push: None,
                },
            );
            return GraspOutcome::WidthFail;
        }

        let centroid_captured = capture.contains(centroid);
        let aligned = self.grasp_aligned(oi, approach);
        let graspable =
            !self.objects[oi].fallen && jaw_extent >= self.params.gripper.close_fail_width;

        if centroid_captured && aligned && graspable {
            let object = self.objects.remove(oi);
            let pickup = object.pose.position();
            self.held = Some((object, pickup));
            self.advance_and_log(
                self.params.grasp_cycle_s,
                Event::GraspAttempt {
                    index,
                    center: g.center,
                    yaw: g.yaw,
                    outcome: GraspOutcomeTag::Success,
                    object: Some(name.clone()),
                    push: None,
                },
            );
            return GraspOutcome::Success { object: name };
        }

        // Miss. If the jaws actually overlapped the object, it gets shoved
        // along the closing resultant; a symmetric squeeze cancels out.
        let overlapping = rect_polygon_overlap(&capture, &verts);
        let mut push = None;
        let mut toppled = false;
        if overlapping {
            let pen = rect_overlap_depth(&capture, &verts);
            let off_j = (centroid - capture.center).dot(jaw_axis);
            let half_w = self.params.gripper.max_width / 2.0;
            let asym = (off_j.abs() / half_w).min(1.0);
            let disp = self.params.push_gain * pen * asym;
            if disp > 0.0 {
                let dir = (approach + jaw_axis * (off_j.signum() * asym)).normalized();
                let moved = dir * disp;
                let o = &mut self.objects[oi];
                o.pose.x += moved.x;
                o.pose.y += moved.y;
                clamp_into(&mut o.pose, &self.params.table);
                push = Some(moved);
            }
            let struck = !centroid_captured;
            if struck
                && self.params.profile == FailureProfile::Real
                && !self.objects[oi].fallen
                && self.rng.gen_bool(self.params.p_fall)
            {
                self.objects[oi].fallen = true;
                toppled = true;
            }
        }

        self.advance_and_log(
            self.params.grasp_cycle_s,
            Event::GraspAttempt {
                index,
                center: g.center,
                yaw: g.yaw,
                outcome: GraspOutcomeTag::Miss,
                object: Some(name.clone()),
                push,
            },
        );
        if toppled {
            self.log_event(Event::Toppled { object: name });
            return GraspOutcome::Toppled;
        }
        GraspOutcome::Miss
    }

    /// Alignment rule: deformable objects (real profile) and objects with
    /// no flat face longer than `alignment_face_min` always conform; rigid
    /// flat-faced objects need some face within `align_tol` of the jaw
    /// plane, which is parallel to the approach direction.
    fn grasp_aligned(&self, oi: usize, approach: Vec2) -> bool {
        let o = &self.objects[oi];
        if o.deformable && self.params.profile == FailureProfile::Real {
            return true;
        }
        let verts = o.world_vertices();
        let n = verts.len();
        let mut best = f64::INFINITY;
        let mut any_face = false;
        for i in 0..n {
            let e = verts[(i + 1) % n] - verts[i];
            if e.norm() < self.params.alignment_face_min {
                continue;
            }
            any_face = true;
            best = best.min(line_angle(e, approach));
        }
        if !any_face {
            return true; // effectively curved everywhere
        }
        best <= self.params.align_tol + 1e-12
    }

    /// Carry the held object to the bin, drop it, and return to the pickup
    /// neighborhood to resume scanning.
    pub fn bin_object(&mut self) -> Result<String, WorldError> {
        let (object, pickup) = self.held.take().ok_or(WorldError::NothingHeld)?;
        let name = object.name.clone();
        let dist = (self.params.bin_position - pickup).norm();
        let dt = 2.0 * dist / self.params.speed_transport + self.params.bin_drop_s;
        self.bin.push(object);
        self.advance_and_log(dt, Event::Binned { object: name.clone(), from: pickup });
        Ok(name)
    }

    /// Table + bin + held object count; constant across a run.
    pub fn total_objects(&self) -> usize {
        self.objects.len() + self.bin.len() + usize::from(self.held.is_some())
    }
}

/// Acute angle between a direction and a line (both treated as undirected).
fn line_angle(a: Vec2, b: Vec2) -> f64 {
    let d = (a.angle() - b.angle()).rem_euclid(std::f64::consts::PI);
    d.min(std::f64::consts::PI - d)
}

/// Overlap depth between a rectangle and a polygon: the smaller of the two
/// projection overlaps along the rectangle's axes. Zero when separated on
/// either axis.
fn rect_overlap_depth(rect: &Rect2, verts: &[Point2]) -> f64 {
    let (s, c) = rect.yaw.sin_cos();
    let axes = [Vec2::new(c, s), Vec2::new(-s, c)];
    let mut depth = f64::INFINITY;
    for (axis, half) in axes.iter().zip([rect.half_extents.0, rect.half_extents.1]) {
        let rc = Vec2::new(rect.center.x, rect.center.y).dot(*axis);
        let (mut mn, mut mx) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in verts {
            let p = Vec2::new(v.x, v.y).dot(*axis);
            mn = mn.min(p);
            mx = mx.max(p);
        }
        let overlap = (mx.min(rc + half) - mn.max(rc - half)).max(0.0);
        depth = depth.min(overlap);
    }
    depth
}

fn clamp_into(pose: &mut Pose2, table: &Rect2) {
    let hx = table.half_extents.0;
    let hy = table.half_extents.1;
    pose.x = pose.x.clamp(table.center.x - hx, table.center.x + hx);
    pose.y = pose.y.clamp(table.center.y - hy, table.center.y + hy);
}
