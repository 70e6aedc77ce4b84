//! Sweep a can over every cell of a 16x16 position grid (5 repetitions
//! each, coarse probe noise) and render the per-cell success rate as an
//! SVG heatmap. Unreachable cells near the robot base and past the outer
//! reach show up as red bands.

use blindsweep::harness::{write_heatmap_csv, ExperimentSpec};
use blindsweep::svg::render_heatmap_svg;
use blindsweep::ScenarioConfig;

fn main() {
    let config = ScenarioConfig::default();
    let out = ExperimentSpec::grid().run(&config, None).unwrap();
    let h = out.heatmap.expect("grid experiments build a heatmap");

    println!("{} runs finished; per-cell success (rows far to near):", out.records.len());
    for iy in (0..h.ny).rev() {
        let row: String = (0..h.nx)
            .map(|ix| match (h.values[iy * h.nx + ix] * 100.0).round() as u32 {
                100 => '#',
                60..=99 => '+',
                20..=59 => '.',
                _ => ' ',
            })
            .collect();
        println!("  y={:.2} |{row}|", h.y_min + iy as f64 * h.step);
    }
    let overall = h.values.iter().sum::<f64>() / h.values.len() as f64;
    println!("overall success {:.1}%", 100.0 * overall);

    let dir = std::env::temp_dir().join("blindsweep_heatmap");
    std::fs::create_dir_all(&dir).unwrap();
    let csv = dir.join("position_grid.csv");
    let svg = dir.join("position_grid.svg");
    write_heatmap_csv(&csv, &h).unwrap();
    std::fs::write(&svg, render_heatmap_svg(&h)).unwrap();
    println!("wrote {} and {}", csv.display(), svg.display());
}
