//! Event logs are audit trails: every record carries the simulated time
//! it cost, and `verify_log` re-checks motion timing, scan orthogonality,
//! attempt caps, and object accounting from the log alone. Tampering with
//! a single duration is caught immediately.

use blindsweep::events::{read_jsonl, verify_log};
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

    let mut bytes = Vec::new();
    result.log.write_jsonl(&mut bytes).unwrap();
    println!("log: {} records, {} bytes", result.log.records().len(), bytes.len());

    let records = read_jsonl(bytes.as_slice()).unwrap();
    let summary = verify_log(&records).expect("a genuine log verifies");
    println!(
        "verified: clock {:.3} s, binned [{}]",
        summary.final_clock,
        summary.binned.join(", ")
    );

    // Shrink one motion duration and watch verification object.
    let mut doctored = records.clone();
    let idx = doctored.iter().position(|r| r.dt > 1.0).expect("some motion takes over a second");
    doctored[idx].dt -= 0.5;
    match verify_log(&doctored) {
        Err(e) => println!("tampered copy rejected: {e}"),
        Ok(_) => unreachable!("tampering must not verify"),
    }
}
