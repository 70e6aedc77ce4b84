//! End-to-end run on the default three-object scene: whole-body sweep,
//! pad-guided localization, grasp refinement, and binning, narrated from
//! the event log.
//!
//! ```bash
//! cargo run --example sweep_and_grasp
//! ```

use blindsweep::events::Event;
use blindsweep::pipeline::run_whole_body;
use blindsweep::world::WorldState;
use blindsweep::ScenarioConfig;

fn main() {
    let config = ScenarioConfig::default();
    let world = WorldState::new(
        config.world_params(),
        config.pad_layout().unwrap(),
        config.placed_objects().unwrap(),
        config.master_seed,
    )
    .unwrap();

    let result = run_whole_body(world, &config.sweep_plan(), &config.refinement_params().unwrap());

    println!("scene: {} objects, seed {}", result.total_objects, result.seed);
    for record in result.log.records() {
        let t = record.t;
        match &record.event {
            Event::SkinContact { pads, chosen_pad, arm_height } => {
                println!(
                    "[{t:7.1} s] skin contact on pads {pads:?} at height {arm_height:.3} m, probing pad {chosen_pad}"
                );
            }
            Event::Localized { p1, p2, .. } => {
                println!(
                    "[{t:7.1} s] localized: first contact ({:.3}, {:.3}), orthogonal ({:.3}, {:.3})",
                    p1.x, p1.y, p2.x, p2.y
                );
            }
            Event::GraspAttempt { index, outcome, object, .. } => {
                let target = object.as_deref().unwrap_or("nothing");
                println!("[{t:7.1} s] grasp attempt {index}: {outcome:?} ({target})");
            }
            Event::Binned { object, .. } => {
                println!("[{t:7.1} s] {object} dropped in the bin");
            }
            _ => {}
        }
    }
    println!(
        "done: {}/{} binned in {:.1} s simulated, {} grasp attempts",
        result.binned.len(),
        result.total_objects,
        result.duration_s,
        result.grasp_attempts
    );
}
