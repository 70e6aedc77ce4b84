//! Every ordered pair of catalog objects shares the table; the sweep must
//! find and bin both. Prints per-arrangement results and the overall
//! fraction of objects retrieved.

use blindsweep::harness::ExperimentSpec;
use blindsweep::ScenarioConfig;

fn main() {
    let config = ScenarioConfig::default();
    let out = ExperimentSpec::clutter2().run(&config, Some(4)).unwrap();

    for r in &out.records {
        println!(
            "{:16} {} of {} binned in {:6.1} s with {:2} attempts{}",
            r.setting,
            r.binned,
            r.objects,
            r.duration_s,
            r.attempts,
            if r.timed_out { " (timed out)" } else { "" }
        );
    }
    let overall = out.summary.last().unwrap();
    println!(
        "\noverall: {:.1}% of objects retrieved over {} arrangements [{}]",
        100.0 * overall.success_rate,
        out.records.len(),
        overall.reference
    );
}
