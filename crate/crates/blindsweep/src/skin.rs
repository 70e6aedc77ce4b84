//! Whole-body skin model: ten pressure pads laid out along the stretched
//! arm, contact queries against posed object footprints, and projection of
//! a contacted pad onto the table plane.
//!
//! The arm is modeled in its single sweeping posture: a straight horizontal
//! chain of pad rectangles extending from the end-effector column back
//! toward the robot base (the -y direction; the base sits at the origin).
//! No joint kinematics are simulated.

use crate::geometry::{inflate_rect, rect_polygon_overlap, Point2, Rect2};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Skin controller sampling rate.
pub const SKIN_SAMPLE_HZ: f64 = 30.0;

/// Seconds between skin frames.
pub const SKIN_SAMPLE_PERIOD: f64 = 1.0 / SKIN_SAMPLE_HZ;

pub const PAD_COUNT: usize = 10;

/// Pad side lengths the hardware ships with, used as validation bounds.
pub const PAD_SIDE_MIN: f64 = 0.12;
pub const PAD_SIDE_MAX: f64 = 0.40;

#[derive(Debug, Error, PartialEq)]
pub enum SkinError {
    #[error("pad layout must have exactly {PAD_COUNT} pads, got {0}")]
    WrongPadCount(usize),
    #[error("pad {pad}: {side} = {value} m outside [{PAD_SIDE_MIN}, {PAD_SIDE_MAX}] m")]
    SideOutOfRange { pad: usize, side: &'static str, value: f64 },
    #[error("pad {0}: negative offset or height offset")]
    NegativeOffset(usize),
    #[error("pads {0} and {1} overlap along the arm")]
    OverlappingPads(usize, usize),
    #[error("pad offsets must increase with pad id (pad {0})")]
    NonIncreasingOffsets(usize),
}

/// One skin pad, described in arm-local coordinates.
///
/// `offset_along_arm` is the distance from the end-effector tip to the pad's
/// near edge; pads are indexed tip-to-shoulder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PadGeometry {
    pub pad_id: usize,
    pub length_along_arm: f64,
    pub width: f64,
    pub offset_along_arm: f64,
    /// Lowest point of the pad above the probe-tip plane; 0 for pads flush
    /// with the arm's underside.
    pub min_height_offset: f64,
}

/// Validated ten-pad arrangement.
#[derive(Debug, Clone, PartialEq)]
pub struct PadLayout {
    pads: Vec<PadGeometry>,
}

impl PadLayout {
    pub fn new(pads: Vec<PadGeometry>) -> Result<Self, SkinError> {
        if pads.len() != PAD_COUNT {
            return Err(SkinError::WrongPadCount(pads.len()));
        }
        for (i, p) in pads.iter().enumerate() {
            for (side, value) in [("length", p.length_along_arm), ("width", p.width)] {
                if !(PAD_SIDE_MIN..=PAD_SIDE_MAX).contains(&value) {
                    return Err(SkinError::SideOutOfRange { pad: i, side, value });
                }
            }
            if p.offset_along_arm < 0.0 || p.min_height_offset < 0.0 {
                return Err(SkinError::NegativeOffset(i));
            }
        }
        for i in 1..pads.len() {
            if pads[i].offset_along_arm <= pads[i - 1].offset_along_arm {
                return Err(SkinError::NonIncreasingOffsets(i));
            }
            let prev_end = pads[i - 1].offset_along_arm + pads[i - 1].length_along_arm;
            if pads[i].offset_along_arm < prev_end - 1e-9 {
                return Err(SkinError::OverlappingPads(i - 1, i));
            }
        }
        Ok(Self { pads })
    }

    /// Stand-in for the unpublished hardware arrangement: nine 0.12 m pads
    /// tile the wrist-to-elbow span starting at the tip, and the large
    /// 0.40 x 0.15 m pad sits at the shoulder end.
    pub fn default_layout() -> Self {
        let mut pads = Vec::with_capacity(PAD_COUNT);
        for i in 0..9 {
            let width = match i {
                0..=2 => 0.12,
                3..=5 => 0.13,
                _ => 0.15,
            };
            pads.push(PadGeometry {
                pad_id: i,
                length_along_arm: 0.12,
                width,
                offset_along_arm: 0.12 * i as f64,
                min_height_offset: 0.0,
            });
        }
        pads.push(PadGeometry {
            pad_id: 9,
            length_along_arm: 0.40,
            width: 0.15,
            offset_along_arm: 1.08,
            min_height_offset: 0.0,
        });
        Self::new(pads).expect("default layout is valid")
    }

    pub fn pads(&self) -> &[PadGeometry] {
        &self.pads
    }

    pub fn pad(&self, pad_id: usize) -> &PadGeometry {
        &self.pads[pad_id]
    }
}

/// Table-plane rectangle a pad occupies when the arm's end-effector column
/// is at `ee`: the chain extends toward the base (-y).
pub fn pad_rect(pad: &PadGeometry, ee: Point2) -> Rect2 {
    let center_y = ee.y - pad.offset_along_arm - pad.length_along_arm / 2.0;
    Rect2::axis_aligned(Point2::new(ee.x, center_y), (pad.width / 2.0, pad.length_along_arm / 2.0))
}

/// A contacted pad's shadow on the table, inflated so it upper-bounds the
/// object position despite pad granularity and sampling overshoot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PadProjection {
    pub pad_id: usize,
    pub rect: Rect2,
    /// Lowest point of the pad at contact time; probing and grasping happen
    /// at this height.
    pub min_height: f64,
}

/// One 30 Hz skin sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkinFrame {
    pub timestamp: f64,
    pub in_contact: Vec<usize>,
}

/// Pads whose table shadow overlaps an object tall enough to reach the
/// arm's current height. Objects are world-frame footprints with heights.
pub fn pads_in_contact<'a, I>(
    layout: &PadLayout,
    ee: Point2,
    arm_height: f64,
    objects: I,
) -> Vec<usize>
where
    I: IntoIterator<Item = (&'a [Point2], f64)> + Clone,
{
    let mut result = Vec::new();
    for pad in layout.pads() {
        let rect = pad_rect(pad, ee);
        let pad_bottom = arm_height + pad.min_height_offset;
        let touching = objects.clone().into_iter().any(|(verts, height)| {
            pad_bottom <= height + 1e-9 && rect_polygon_overlap(&rect, verts)
        });
        if touching {
            result.push(pad.pad_id);
        }
    }
    result
}

pub fn project_pad(
    layout: &PadLayout,
    pad_id: usize,
    ee: Point2,
    arm_height: f64,
    margin: f64,
) -> PadProjection {
    let pad = layout.pad(pad_id);
    PadProjection {
        pad_id,
        rect: inflate_rect(&pad_rect(pad, ee), margin),
        min_height: arm_height + pad.min_height_offset,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Footprint, Pose2};
    use proptest::prelude::*;

    fn tip() -> Point2 {
        // End-effector column over the far table edge, mid sweep.
        Point2::new(0.05, 1.05)
    }

    #[test]
    fn default_layout_is_valid_and_spans_the_table() {
        let layout = PadLayout::default_layout();
        assert_eq!(layout.pads().len(), PAD_COUNT);
        // With the tip at the far table edge, the chain shadows the whole
        // table depth (0.15..1.05 m in front of the base).
        let last_small = pad_rect(layout.pad(8), tip());
        assert!(last_small.center.y - last_small.half_extents.1 < 0.15 - 1e-9 + 0.12);
        let first = pad_rect(layout.pad(0), tip());
        assert!((first.center.y + first.half_extents.1 - 1.05).abs() < 1e-12);
    }

    #[test]
    fn layout_validation_errors() {
        let layout = PadLayout::default_layout();
        let mut nine = layout.pads().to_vec();
        nine.pop();
        assert_eq!(PadLayout::new(nine).unwrap_err(), SkinError::WrongPadCount(9));

        let mut tiny = layout.pads().to_vec();
        tiny[4].width = 0.05;
        assert!(matches!(
            PadLayout::new(tiny).unwrap_err(),
            SkinError::SideOutOfRange { pad: 4, side: "width", .. }
        ));

        let mut overlapping = layout.pads().to_vec();
        overlapping[3].offset_along_arm = 0.30;
        assert_eq!(PadLayout::new(overlapping).unwrap_err(), SkinError::OverlappingPads(2, 3));

        let mut shuffled = layout.pads().to_vec();
        shuffled[5].offset_along_arm = 0.10;
        assert!(matches!(
            PadLayout::new(shuffled).unwrap_err(),
            SkinError::NonIncreasingOffsets(5)
        ));
    }

    #[test]
    fn arm_above_everything_contacts_nothing() {
        let layout = PadLayout::default_layout();
        let obj = Footprint::rectangle(0.05, 0.05);
        let verts = obj.transformed(&Pose2::new(0.05, 0.63, 0.0));
        let contacts = pads_in_contact(&layout, tip(), 0.5, [(verts.as_slice(), 0.3)]);
        assert!(contacts.is_empty());
    }

    #[test]
    fn lowered_arm_contacts_the_pad_over_the_object() {
        let layout = PadLayout::default_layout();
        // Pad 3 shadows y in [0.57, 0.69] when the tip is at y = 1.05.
        let obj = Footprint::rectangle(0.03, 0.03);
        let verts = obj.transformed(&Pose2::new(0.05, 0.63, 0.0));
        let contacts = pads_in_contact(&layout, tip(), 0.25, [(verts.as_slice(), 0.3)]);
        assert_eq!(contacts, vec![3]);
    }

    #[test]
    fn object_on_pad_seam_reports_both_pads() {
        let layout = PadLayout::default_layout();
        // Seam between pads 4 and 5 sits at y = 0.45.
        let obj = Footprint::rectangle(0.03, 0.03);
        let verts = obj.transformed(&Pose2::new(0.05, 0.45, 0.0));
        let contacts = pads_in_contact(&layout, tip(), 0.25, [(verts.as_slice(), 0.3)]);
        assert_eq!(contacts, vec![4, 5]);
    }

    #[test]
    fn contact_requires_object_at_least_as_tall_as_the_pad_bottom() {
        let layout = PadLayout::default_layout();
        let obj = Footprint::rectangle(0.03, 0.03);
        let verts = obj.transformed(&Pose2::new(0.05, 0.63, 0.0));
        assert!(pads_in_contact(&layout, tip(), 0.301, [(verts.as_slice(), 0.3)]).is_empty());
        assert_eq!(pads_in_contact(&layout, tip(), 0.300, [(verts.as_slice(), 0.3)]), vec![3]);
    }

    #[test]
    fn smallest_and_largest_pad_projections_match_hardware_sizes() {
        let layout = PadLayout::default_layout();
        let p0 = project_pad(&layout, 0, tip(), 0.2, 0.0);
        assert!((p0.rect.width() - 0.12).abs() < 1e-12);
        assert!((p0.rect.depth() - 0.12).abs() < 1e-12);
        let p9 = project_pad(&layout, 9, tip(), 0.2, 0.0);
        assert!((p9.rect.width() - 0.15).abs() < 1e-12);
        assert!((p9.rect.depth() - 0.40).abs() < 1e-12);
        assert_eq!(p9.min_height, 0.2);
    }

    #[test]
    fn projection_margin_grows_each_side_by_twice_the_margin() {
        let layout = PadLayout::default_layout();
        let tight = project_pad(&layout, 2, tip(), 0.2, 0.0);
        let wide = project_pad(&layout, 2, tip(), 0.2, 0.02);
        assert!((wide.rect.width() - tight.rect.width() - 0.04).abs() < 1e-12);
        assert!((wide.rect.depth() - tight.rect.depth() - 0.04).abs() < 1e-12);
        assert_eq!(wide.rect.center, tight.rect.center);
    }

    proptest! {
        /// Soundness: a contacted pad's inflated projection always intersects
        /// the triggering object's true footprint.
        #[test]
        fn contacted_pad_projection_contains_part_of_the_object(
            ox in -0.3..0.3f64,
            oy in 0.2..1.0f64,
            yaw in 0.0..std::f64::consts::TAU,
            height in 0.12..0.35f64,
            arm_h in 0.10..0.40f64,
        ) {
            let layout = PadLayout::default_layout();
            let obj = Footprint::rectangle(0.04, 0.025);
            let verts = obj.transformed(&Pose2::new(ox, oy, yaw));
            let contacts = pads_in_contact(&layout, tip(), arm_h, [(verts.as_slice(), height)]);
            for pad_id in contacts {
                let proj = project_pad(&layout, pad_id, tip(), arm_h, 0.02);
                prop_assert!(rect_polygon_overlap(&proj.rect, &verts));
                prop_assert!(proj.min_height >= 0.0);
            }
        }

        /// Contact is monotone in arm height: lowering the arm never loses
        /// a contact (objects are prisms).
        #[test]
        fn contact_is_monotone_in_height(
            ox in -0.3..0.3f64,
            oy in 0.2..1.0f64,
            height in 0.12..0.35f64,
            h_hi in 0.10..0.40f64,
            dh in 0.0..0.25f64,
        ) {
            let layout = PadLayout::default_layout();
            let obj = Footprint::regular_ngon(0.04, 16);
            let verts = obj.transformed(&Pose2::new(ox, oy, 0.0));
            let h_lo = (h_hi - dh).max(0.0);
            let hi = pads_in_contact(&layout, tip(), h_hi, [(verts.as_slice(), height)]);
            let lo = pads_in_contact(&layout, tip(), h_lo, [(verts.as_slice(), height)]);
            for pad in hi {
                prop_assert!(lo.contains(&pad));
            }
        }
    }
}
