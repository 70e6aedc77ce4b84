//! Same scene, two search strategies. The whole-body sweep covers the
//! table with ten coarse arm stations; the baseline drags the force probe
//! along every strip of the table. Simulated clocks tell the story.

use blindsweep::geometry::Pose2;
use blindsweep::pipeline::{run_baseline, run_whole_body};
use blindsweep::world::WorldState;
use blindsweep::ScenarioConfig;

fn world_with_can(config: &ScenarioConfig, seed: u64) -> WorldState {
    let can = config.instantiate("can", Pose2::new(0.0, 0.6, 0.0)).unwrap();
    WorldState::new(config.world_params(), config.pad_layout().unwrap(), vec![can], seed).unwrap()
}

fn empty_world(config: &ScenarioConfig, seed: u64) -> WorldState {
    let mut params = config.world_params();
    params.timeout_s = 1800.0;
    WorldState::new(params, config.pad_layout().unwrap(), vec![], seed).unwrap()
}

fn main() {
    let config = ScenarioConfig::default();
    let refinement = config.refinement_params().unwrap();
    let plan = config.sweep_plan();

    let wb_empty = run_whole_body(empty_world(&config, 3), &plan, &refinement);
    let base_empty = run_baseline(empty_world(&config, 3), &refinement);
    println!("empty table:");
    println!("  whole-body sweep {:8.1} s", wb_empty.duration_s);
    println!("  probe-only scan  {:8.1} s", base_empty.duration_s);
    println!("  speedup          {:8.1}x", base_empty.duration_s / wb_empty.duration_s);

    let mut config_long = config.clone();
    config_long.timeout_s = 1800.0;
    let wb_one = run_whole_body(world_with_can(&config_long, 3), &plan, &refinement);
    let base_one = run_baseline(world_with_can(&config_long, 3), &refinement);
    println!("one can at (0, 0.6):");
    println!("  whole-body sweep {:8.1} s ({} binned)", wb_one.duration_s, wb_one.binned.len());
    println!("  probe-only scan  {:8.1} s ({} binned)", base_one.duration_s, base_one.binned.len());
    println!("  speedup          {:8.1}x", base_one.duration_s / wb_one.duration_s);
}
