//! Scenario files: one JSON document describing the table, robot speeds and
//! action times, gripper, skin layout, object catalog, and placements.
//!
//! Angles are degrees in the file and radians in memory. Every struct
//! rejects unknown fields so typos fail loudly, and `validate` names the
//! offending field in its error instead of failing somewhere downstream.

use crate::geometry::{Footprint, Point2, Pose2, Rect2};
use crate::pipeline::{RefinementParams, SweepPlan};
use crate::skin::{PadGeometry, PadLayout};
use crate::world::{FailureProfile, GripperModel, ObjectInstance, WorldParams};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid JSON in {path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("invalid scenario: {field}: {reason}")]
    Invalid { field: String, reason: String },
}

fn invalid(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { field: field.into(), reason: reason.into() }
}

/// Preset contact-noise levels selectable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseProfile {
    /// Well-calibrated force sensing: 5 mm standard deviation.
    Standard,
    /// Coarse contact estimates: 15 mm standard deviation.
    Rough,
}

impl NoiseProfile {
    pub fn sigma(self) -> f64 {
        match self {
            NoiseProfile::Standard => 0.005,
            NoiseProfile::Rough => 0.015,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableSpec {
    pub center: Point2,
    pub half_extents: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    /// Standard deviation of the isotropic noise added to recorded probe
    /// contact points, meters.
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeedSpec {
    pub sweep: f64,
    pub descend: f64,
    pub probe: f64,
    pub transport: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    pub grasp_cycle_s: f64,
    pub ik_reject_s: f64,
    pub bin_drop_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraspSpec {
    pub align_tol_deg: f64,
    pub push_gain: f64,
    pub alignment_face_min: f64,
    pub p_fall: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReachSpec {
    pub inner: f64,
    pub outer: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub start_x: f64,
    pub end_x: f64,
    pub station_step: f64,
    pub travel_height: f64,
    pub floor: f64,
    pub ee_forward_y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RefinementSpec {
    pub behind_offsets: Vec<f64>,
    pub side_offsets: Vec<f64>,
    pub rot_offsets_deg: Vec<f64>,
    pub i_max: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PadSpec {
    pub length_along_arm: f64,
    pub width: f64,
    pub offset_along_arm: f64,
    pub min_height_offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ShapeSpec {
    Rect { half_x: f64, half_y: f64 },
    Ngon { radius: f64, sides: usize },
    ChamferedRect { half_x: f64, half_y: f64, chamfer: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectSpec {
    pub shape: ShapeSpec,
    pub height: f64,
    pub deformable: bool,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlacementSpec {
    pub object: String,
    pub x: f64,
    pub y: f64,
    pub yaw_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub table: TableSpec,
    pub bin_position: Point2,
    pub master_seed: u64,
    pub profile: FailureProfile,
    pub timeout_s: f64,
    pub noise: NoiseSpec,
    pub speeds: SpeedSpec,
    pub times: TimeSpec,
    pub gripper: GripperModel,
    pub grasp: GraspSpec,
    pub reach: ReachSpec,
    pub sweep: SweepSpec,
    pub refinement: RefinementSpec,
    pub pads: Vec<PadSpec>,
    pub objects: BTreeMap<String, ObjectSpec>,
    pub placements: Vec<PlacementSpec>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        let mut objects = BTreeMap::new();
        objects.insert(
            "can".to_string(),
            ObjectSpec {
                shape: ShapeSpec::Ngon { radius: 0.04, sides: 32 },
                height: 0.14,
                deformable: true,
                mass: 0.45,
            },
        );
        objects.insert(
            "block".to_string(),
            ObjectSpec {
                shape: ShapeSpec::Rect { half_x: 0.0425, half_y: 0.0425 },
                height: 0.20,
                deformable: false,
                mass: 1.0,
            },
        );
        objects.insert(
            "bottle".to_string(),
            ObjectSpec {
                shape: ShapeSpec::ChamferedRect { half_x: 0.045, half_y: 0.0225, chamfer: 0.010 },
                height: 0.27,
                deformable: true,
                mass: 0.50,
            },
        );
        objects.insert(
            "box".to_string(),
            ObjectSpec {
                shape: ShapeSpec::Rect { half_x: 0.0725, half_y: 0.0275 },
                height: 0.21,
                deformable: true,
                mass: 0.30,
            },
        );
        objects.insert(
            "mustard".to_string(),
            ObjectSpec {
                shape: ShapeSpec::ChamferedRect { half_x: 0.0475, half_y: 0.029, chamfer: 0.012 },
                height: 0.19,
                deformable: true,
                mass: 0.60,
            },
        );

        let mut pads = Vec::new();
        for i in 0..9 {
            pads.push(PadSpec {
                length_along_arm: 0.12,
                width: match i {
                    0..=2 => 0.12,
                    3..=5 => 0.13,
                    _ => 0.15,
                },
                offset_along_arm: 0.12 * i as f64,
                min_height_offset: 0.0,
            });
        }
        pads.push(PadSpec {
            length_along_arm: 0.40,
            width: 0.15,
            offset_along_arm: 1.08,
            min_height_offset: 0.0,
        });

        Self {
            table: TableSpec { center: Point2::new(0.0, 0.60), half_extents: (0.45, 0.45) },
            bin_position: Point2::new(0.65, 0.30),
            master_seed: 20240915,
            profile: FailureProfile::Sim,
            timeout_s: 600.0,
            noise: NoiseSpec { sigma: NoiseProfile::Standard.sigma() },
            speeds: SpeedSpec { sweep: 0.10, descend: 0.10, probe: 0.015, transport: 0.25 },
            times: TimeSpec { grasp_cycle_s: 12.0, ik_reject_s: 0.5, bin_drop_s: 2.0 },
            gripper: GripperModel {
                max_width: 0.15,
                jaw_depth: 0.04,
                close_fail_width: 0.02,
                effective_probe_width: 0.06,
            },
            grasp: GraspSpec {
                align_tol_deg: 20.0,
                push_gain: 0.5,
                alignment_face_min: 0.02,
                p_fall: 0.6,
            },
            reach: ReachSpec { inner: 0.35, outer: 0.88 },
            sweep: SweepSpec {
                start_x: 0.45,
                end_x: -0.45,
                station_step: 0.10,
                travel_height: 0.50,
                floor: 0.10,
                ee_forward_y: 1.05,
            },
            refinement: RefinementSpec {
                behind_offsets: vec![0.0, 0.02, 0.04],
                side_offsets: vec![0.0, -0.02, 0.02, -0.04, 0.04],
                rot_offsets_deg: vec![0.0, -15.0, 15.0, -30.0, 30.0],
                i_max: 75,
            },
            pads,
            objects,
            placements: vec![
                PlacementSpec { object: "can".into(), x: 0.25, y: 0.75, yaw_deg: 0.0 },
                PlacementSpec { object: "mustard".into(), x: 0.0, y: 0.60, yaw_deg: 0.0 },
                PlacementSpec { object: "bottle".into(), x: -0.20, y: 0.55, yaw_deg: 0.0 },
            ],
        }
    }
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text, &path.display().to_string())
    }

    pub fn from_json(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let config: Self = serde_json::from_str(text)
            .map_err(|source| ConfigError::Parse { path: origin.to_string(), source })?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let (hx, hy) = self.table.half_extents;
        if hx <= 0.0 || hy <= 0.0 {
            return Err(invalid("table.half_extents", "must be positive"));
        }
        if self.timeout_s <= 0.0 {
            return Err(invalid("timeout_s", "must be positive"));
        }
        if self.noise.sigma < 0.0 {
            return Err(invalid("noise.sigma", "must be non-negative"));
        }
        for (name, v) in [
            ("speeds.sweep", self.speeds.sweep),
            ("speeds.descend", self.speeds.descend),
            ("speeds.probe", self.speeds.probe),
            ("speeds.transport", self.speeds.transport),
        ] {
            if v <= 0.0 {
                return Err(invalid(name, "must be positive"));
            }
        }
        for (name, v) in [
            ("times.grasp_cycle_s", self.times.grasp_cycle_s),
            ("times.ik_reject_s", self.times.ik_reject_s),
            ("times.bin_drop_s", self.times.bin_drop_s),
        ] {
            if v < 0.0 {
                return Err(invalid(name, "must be non-negative"));
            }
        }
        self.gripper.validate().map_err(|e| invalid("gripper", e.to_string()))?;
        if !(0.0..=90.0).contains(&self.grasp.align_tol_deg) {
            return Err(invalid("grasp.align_tol_deg", "must lie in [0, 90]"));
        }
        if !(0.0..=1.0).contains(&self.grasp.push_gain) {
            return Err(invalid("grasp.push_gain", "must lie in [0, 1]"));
        }
        if self.grasp.alignment_face_min <= 0.0 {
            return Err(invalid("grasp.alignment_face_min", "must be positive"));
        }
        if !(0.0..=1.0).contains(&self.grasp.p_fall) {
            return Err(invalid("grasp.p_fall", "must be a probability in [0, 1]"));
        }
        if self.reach.inner < 0.0 || self.reach.inner >= self.reach.outer {
            return Err(invalid("reach", "requires 0 <= inner < outer"));
        }
        if self.sweep.station_step <= 0.0 {
            return Err(invalid("sweep.station_step", "must be positive"));
        }
        if self.sweep.start_x < self.sweep.end_x {
            return Err(invalid("sweep", "start_x must be >= end_x (stations advance toward -x)"));
        }
        if !(self.sweep.floor > 0.0 && self.sweep.travel_height > self.sweep.floor) {
            return Err(invalid("sweep", "requires travel_height > floor > 0"));
        }
        self.refinement_params()?;
        self.pad_layout()?;
        for (name, spec) in &self.objects {
            self.check_object(name, spec)?;
        }
        for (i, p) in self.placements.iter().enumerate() {
            if !self.objects.contains_key(&p.object) {
                return Err(invalid(
                    &format!("placements[{i}].object"),
                    format!("'{}' is not in the object catalog", p.object),
                ));
            }
            let dx = (p.x - self.table.center.x).abs();
            let dy = (p.y - self.table.center.y).abs();
            if dx > hx || dy > hy {
                return Err(invalid(
                    &format!("placements[{i}]"),
                    format!("({}, {}) lies outside the table", p.x, p.y),
                ));
            }
        }
        Ok(())
    }

    fn check_object(&self, name: &str, spec: &ObjectSpec) -> Result<(), ConfigError> {
        let field = format!("objects.{name}");
        match spec.shape {
            ShapeSpec::Rect { half_x, half_y } => {
                if half_x <= 0.0 || half_y <= 0.0 {
                    return Err(invalid(&field, "rect half extents must be positive"));
                }
            }
            ShapeSpec::Ngon { radius, sides } => {
                if radius <= 0.0 {
                    return Err(invalid(&field, "ngon radius must be positive"));
                }
                if sides < 3 {
                    return Err(invalid(&field, "ngon needs at least 3 sides"));
                }
            }
            ShapeSpec::ChamferedRect { half_x, half_y, chamfer } => {
                if half_x <= 0.0 || half_y <= 0.0 {
                    return Err(invalid(&field, "rect half extents must be positive"));
                }
                if !(chamfer > 0.0 && chamfer < half_x && chamfer < half_y) {
                    return Err(invalid(
                        &field,
                        "chamfer must be positive and smaller than both half extents",
                    ));
                }
            }
        }
        if spec.height <= self.sweep.floor {
            return Err(invalid(
                &field,
                format!(
                    "height {} must exceed the {} m floor or the skin can never touch it",
                    spec.height, self.sweep.floor
                ),
            ));
        }
        if spec.mass <= 0.0 {
            return Err(invalid(&field, "mass must be positive"));
        }
        Ok(())
    }

    pub fn table_rect(&self) -> Rect2 {
        Rect2::axis_aligned(self.table.center, self.table.half_extents)
    }

    pub fn world_params(&self) -> WorldParams {
        WorldParams {
            table: self.table_rect(),
            bin_position: self.bin_position,
            speed_sweep: self.speeds.sweep,
            speed_descend: self.speeds.descend,
            speed_probe: self.speeds.probe,
            speed_transport: self.speeds.transport,
            grasp_cycle_s: self.times.grasp_cycle_s,
            ik_reject_s: self.times.ik_reject_s,
            bin_drop_s: self.times.bin_drop_s,
            gripper: self.gripper.clone(),
            align_tol: self.grasp.align_tol_deg.to_radians(),
            push_gain: self.grasp.push_gain,
            alignment_face_min: self.grasp.alignment_face_min,
            p_fall: self.grasp.p_fall,
            reach_inner: self.reach.inner,
            reach_outer: self.reach.outer,
            noise_sigma: self.noise.sigma,
            profile: self.profile,
            descend_floor: self.sweep.floor,
            travel_height: self.sweep.travel_height,
            ee_forward_y: self.sweep.ee_forward_y,
            timeout_s: self.timeout_s,
        }
    }

    pub fn sweep_plan(&self) -> SweepPlan {
        SweepPlan {
            start_x: self.sweep.start_x,
            end_x: self.sweep.end_x,
            station_step: self.sweep.station_step,
            travel_height: self.sweep.travel_height,
            floor: self.sweep.floor,
        }
    }

    pub fn refinement_params(&self) -> Result<RefinementParams, ConfigError> {
        let params = RefinementParams {
            behind_offsets: self.refinement.behind_offsets.clone(),
            side_offsets: self.refinement.side_offsets.clone(),
            rot_offsets: self.refinement.rot_offsets_deg.iter().map(|d| d.to_radians()).collect(),
            i_max: self.refinement.i_max,
        };
        params.validate().map_err(|e| invalid("refinement", e.to_string()))?;
        Ok(params)
    }

    pub fn pad_layout(&self) -> Result<PadLayout, ConfigError> {
        let pads = self
            .pads
            .iter()
            .enumerate()
            .map(|(i, p)| PadGeometry {
                pad_id: i,
                length_along_arm: p.length_along_arm,
                width: p.width,
                offset_along_arm: p.offset_along_arm,
                min_height_offset: p.min_height_offset,
            })
            .collect();
        PadLayout::new(pads).map_err(|e| invalid("pads", e.to_string()))
    }

    pub fn footprint(&self, object: &str) -> Result<Footprint, ConfigError> {
        let spec = self
            .objects
            .get(object)
            .ok_or_else(|| invalid("objects", format!("unknown object '{object}'")))?;
        Ok(match spec.shape {
            ShapeSpec::Rect { half_x, half_y } => Footprint::rectangle(half_x, half_y),
            ShapeSpec::Ngon { radius, sides } => Footprint::regular_ngon(radius, sides),
            ShapeSpec::ChamferedRect { half_x, half_y, chamfer } => {
                Footprint::chamfered_rectangle(half_x, half_y, chamfer)
            }
        })
    }

    /// Instantiate one catalog object at a pose given in radians.
    pub fn instantiate(&self, object: &str, pose: Pose2) -> Result<ObjectInstance, ConfigError> {
        let spec = self
            .objects
            .get(object)
            .ok_or_else(|| invalid("objects", format!("unknown object '{object}'")))?;
        Ok(ObjectInstance {
            name: object.to_string(),
            footprint: self.footprint(object)?,
            height: spec.height,
            pose,
            deformable: spec.deformable,
            fallen: false,
            mass_proxy: spec.mass,
        })
    }

    /// The scenario's placement list as world objects.
    pub fn placed_objects(&self) -> Result<Vec<ObjectInstance>, ConfigError> {
        self.placements
            .iter()
            .map(|p| self.instantiate(&p.object, Pose2::new(p.x, p.y, p.yaw_deg.to_radians())))
            .collect()
    }
}
