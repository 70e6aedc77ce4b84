//! What happens when the first grasp is wrong: a square block rotated 45
//! degrees defeats the initial jaw alignment, so the refinement grid walks
//! through shifted and rotated candidates (pushing the block a little on
//! each miss) until one captures it.

use blindsweep::events::{Event, GraspOutcomeTag};
use blindsweep::geometry::Pose2;
use blindsweep::pipeline::{enumerate_refinements, run_whole_body};
use blindsweep::world::WorldState;
use blindsweep::ScenarioConfig;

fn main() {
    let config = ScenarioConfig::default();
    let refinement = config.refinement_params().unwrap();

    let base = blindsweep::world::GraspCandidate::new(
        blindsweep::geometry::Point2::new(0.0, 0.6),
        blindsweep::geometry::Vec2::new(1.0, 0.0),
        0.05,
    );
    let candidates = enumerate_refinements(&base, &refinement);
    println!("refinement grid: {} candidates; first five offsets:", candidates.len());
    for (i, c) in candidates.iter().take(5).enumerate() {
        println!(
            "  {i}: center ({:+.3}, {:+.3}), yaw {:+.0} deg",
            c.center.x - 0.0,
            c.center.y - 0.6,
            (c.yaw - base.yaw).to_degrees()
        );
    }

    let block = config.instantiate("block", Pose2::new(0.0, 0.6, 45f64.to_radians())).unwrap();
    let world =
        WorldState::new(config.world_params(), config.pad_layout().unwrap(), vec![block], 11)
            .unwrap();
    let result = run_whole_body(world, &config.sweep_plan(), &refinement);

    println!("\nblock rotated 45 deg:");
    for record in result.log.records() {
        if let Event::GraspAttempt { index, outcome, push, .. } = &record.event {
            let push_txt = push
                .map(|p| format!(", pushed ({:+.1}, {:+.1}) mm", 1000.0 * p.x, 1000.0 * p.y))
                .unwrap_or_default();
            println!("  attempt {index}: {outcome:?}{push_txt}");
            if *outcome == GraspOutcomeTag::Success {
                break;
            }
        }
    }
    println!(
        "result: {} in {:.1} s simulated",
        if result.success() { "retrieved" } else { "left on the table" },
        result.duration_s
    );
}
