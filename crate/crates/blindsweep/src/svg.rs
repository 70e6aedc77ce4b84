//! Dependency-free SVG rendering for success-rate heatmaps.
//!
//! Output is a plain string of static markup, so identical inputs always
//! produce identical bytes.

use crate::harness::Heatmap;

const CELL_PX: f64 = 32.0;
const MARGIN_LEFT: f64 = 64.0;
const MARGIN_TOP: f64 = 24.0;
const MARGIN_BOTTOM: f64 = 48.0;
const LEGEND_W: f64 = 20.0;
const LEGEND_GAP: f64 = 28.0;
const LEGEND_LABEL_W: f64 = 48.0;

/// Red-yellow-green ramp: 0 is failure red, 1 is success green.
fn ramp(v: f64) -> (u8, u8, u8) {
    let v = v.clamp(0.0, 1.0);
    let lerp = |a: (u8, u8, u8), b: (u8, u8, u8), t: f64| {
        let ch = |x: u8, y: u8| (x as f64 + (y as f64 - x as f64) * t).round() as u8;
        (ch(a.0, b.0), ch(a.1, b.1), ch(a.2, b.2))
    };
    let low = (165, 0, 38);
    let mid = (255, 255, 191);
    let high = (0, 104, 55);
    if v < 0.5 {
        lerp(low, mid, v * 2.0)
    } else {
        lerp(mid, high, (v - 0.5) * 2.0)
    }
}

fn fill(v: f64) -> String {
    let (r, g, b) = ramp(v);
    format!("rgb({r},{g},{b})")
}

/// Render a grid of success rates as a standalone SVG document. Cells are
/// laid out in table coordinates: x to the right, y away from the robot,
/// so the row nearest the robot edge ends up at the bottom.
pub fn render_heatmap_svg(h: &Heatmap) -> String {
    let grid_w = h.nx as f64 * CELL_PX;
    let grid_h = h.ny as f64 * CELL_PX;
    let width = MARGIN_LEFT + grid_w + LEGEND_GAP + LEGEND_W + LEGEND_LABEL_W;
    let height = MARGIN_TOP + grid_h + MARGIN_BOTTOM;
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" \
         viewBox=\"0 0 {width:.0} {height:.0}\">\n"
    ));
    out.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{width:.0}\" height=\"{height:.0}\" fill=\"white\"/>\n"
    ));

    for iy in 0..h.ny {
        for ix in 0..h.nx {
            let v = h.values[iy * h.nx + ix];
            let px = MARGIN_LEFT + ix as f64 * CELL_PX;
            let py = MARGIN_TOP + (h.ny - 1 - iy) as f64 * CELL_PX;
            out.push_str(&format!(
                "  <rect x=\"{px:.1}\" y=\"{py:.1}\" width=\"{CELL_PX:.1}\" \
                 height=\"{CELL_PX:.1}\" fill=\"{}\" stroke=\"#ffffff\" \
                 stroke-width=\"0.5\"><title>x={:.2} y={:.2} rate={:.2}</title></rect>\n",
                fill(v),
                h.x_min + ix as f64 * h.step,
                h.y_min + iy as f64 * h.step,
                v
            ));
        }
    }

    // Axis labels every fourth cell keeps 16-wide grids readable.
    let label_stride = if h.nx > 8 { 4 } else { 1 };
    for ix in (0..h.nx).step_by(label_stride) {
        let px = MARGIN_LEFT + (ix as f64 + 0.5) * CELL_PX;
        out.push_str(&format!(
            "  <text x=\"{px:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"10\" \
             text-anchor=\"middle\">{:.2}</text>\n",
            MARGIN_TOP + grid_h + 16.0,
            h.x_min + ix as f64 * h.step
        ));
    }
    for iy in (0..h.ny).step_by(label_stride) {
        let py = MARGIN_TOP + (h.ny - 1 - iy) as f64 * CELL_PX + 0.5 * CELL_PX;
        out.push_str(&format!(
            "  <text x=\"{:.1}\" y=\"{py:.1}\" font-family=\"sans-serif\" font-size=\"10\" \
             text-anchor=\"end\" dominant-baseline=\"middle\">{:.2}</text>\n",
            MARGIN_LEFT - 8.0,
            h.y_min + iy as f64 * h.step
        ));
    }
    out.push_str(&format!(
        "  <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" \
         text-anchor=\"middle\">table x (m)</text>\n",
        MARGIN_LEFT + grid_w / 2.0,
        MARGIN_TOP + grid_h + 36.0
    ));

    // Legend: vertical ramp sampled finely enough to look continuous.
    let lx = MARGIN_LEFT + grid_w + LEGEND_GAP;
    let steps = 40;
    let seg = grid_h / steps as f64;
    for i in 0..steps {
        let v = 1.0 - (i as f64 + 0.5) / steps as f64;
        out.push_str(&format!(
            "  <rect x=\"{lx:.1}\" y=\"{:.2}\" width=\"{LEGEND_W:.1}\" height=\"{:.2}\" \
             fill=\"{}\"/>\n",
            MARGIN_TOP + i as f64 * seg,
            seg + 0.5,
            fill(v)
        ));
    }
    for (frac, label) in [(1.0, "1.0"), (0.5, "0.5"), (0.0, "0.0")] {
        out.push_str(&format!(
            "  <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"10\" \
             dominant-baseline=\"middle\">{label}</text>\n",
            lx + LEGEND_W + 6.0,
            MARGIN_TOP + (1.0 - frac) * grid_h
        ));
    }
    out.push_str("</svg>\n");
    out
}
