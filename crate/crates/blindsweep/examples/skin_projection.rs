//! How arm-skin contact turns into a search region: descend over an
//! object, see which pads fire, and project the chosen pad onto the table.

use blindsweep::geometry::{Point2, Pose2};
use blindsweep::pipeline::{choose_pad, SKIN_PROJECTION_MARGIN};
use blindsweep::skin::{pads_in_contact, project_pad, PadLayout};
use blindsweep::ScenarioConfig;

fn main() {
    let config = ScenarioConfig::default();
    let layout = PadLayout::default_layout();

    println!("arm pad layout (tip at y = 0, arm extends backwards):");
    for pad in layout.pads() {
        println!(
            "  pad {}: {:.2} x {:.2} m, {:.2} m behind the tip",
            pad.pad_id, pad.length_along_arm, pad.width, pad.offset_along_arm
        );
    }

    // A can sitting under the middle of the arm.
    let can = config.instantiate("can", Pose2::new(0.0, 0.60, 0.0)).unwrap();
    let verts = can.world_vertices();
    let ee = Point2::new(0.0, config.world_params().ee_forward_y);
    let arm_height = can.height; // resting right on top of the object

    let pads = pads_in_contact(&layout, ee, arm_height, [(verts.as_slice(), can.height)]);
    println!("\ndescend at EE ({:.1}, {:.1}) stops at {arm_height:.2} m", ee.x, ee.y);
    println!("pads in contact: {pads:?}");

    let chosen = choose_pad(&layout, &pads);
    let projection = project_pad(&layout, chosen, ee, arm_height, SKIN_PROJECTION_MARGIN);
    let (hx, hy) = projection.rect.half_extents;
    println!(
        "pad {chosen} projects to a {:.2} x {:.2} m search rect centered ({:.2}, {:.2})",
        2.0 * hx,
        2.0 * hy,
        projection.rect.center.x,
        projection.rect.center.y
    );
    println!(
        "object footprint spans x in [{:.3}, {:.3}]: inside the rect",
        verts.iter().map(|v| v.x).fold(f64::INFINITY, f64::min),
        verts.iter().map(|v| v.x).fold(f64::NEG_INFINITY, f64::max)
    );
}
