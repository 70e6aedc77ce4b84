//! Deterministic 2.5D tabletop simulator for contact-only object search.
//!
//! A robot arm with pressure-sensitive skin pads sweeps a cluttered table it
//! cannot see, localizes objects first by whole-body contact and then by
//! force-probe scans, and grasps them with a parallel-jaw gripper. The crate
//! provides the geometry kernel, the skin model, the quasi-static world,
//! the search-and-grasp pipeline, and a batch harness that reproduces four
//! benchmark experiments with byte-stable outputs.

pub mod cli;
pub mod config;
pub mod events;
pub mod geometry;
pub mod harness;
pub mod pipeline;
pub mod skin;
pub mod svg;
pub mod world;

pub use config::{NoiseProfile, ScenarioConfig};
pub use geometry::{Footprint, Point2, Pose2, Ray2, Rect2, Vec2};
pub use pipeline::{LocalizationResult, RefinementParams, RunResult, ScanSegment, SweepPlan};
pub use skin::{PadLayout, PadProjection};
pub use world::{
    FailureProfile, GraspCandidate, GraspOutcome, GripperModel, ObjectInstance, WorldParams,
    WorldState,
};
