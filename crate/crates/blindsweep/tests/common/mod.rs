//! Shared helpers for integration tests: independent geometry oracles and
//! scene generators. The oracles deliberately use different algorithms
//! than the library (Gaussian elimination, dense sampling) so agreement is
//! meaningful.

#![allow(dead_code)]

use blindsweep::geometry::{Footprint, Point2, Pose2, Ray2, Vec2};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Solve the 2x2 system for the intersection of two (infinite) lines given
/// in ray form, by Gaussian elimination with partial pivoting. Returns
/// None when the system is numerically singular.
pub fn elimination_intersect(a: &Ray2, b: &Ray2) -> Option<Point2> {
    // a.origin + t * a.dir = b.origin + u * b.dir
    let mut m = [
        [a.dir.x, -b.dir.x, b.origin.x - a.origin.x],
        [a.dir.y, -b.dir.y, b.origin.y - a.origin.y],
    ];
    if m[1][0].abs() > m[0][0].abs() {
        m.swap(0, 1);
    }
    if m[0][0].abs() < 1e-12 {
        return None;
    }
    let f = m[1][0] / m[0][0];
    let pivot = m[0];
    for (x, p) in m[1].iter_mut().zip(pivot) {
        *x -= f * p;
    }
    if m[1][1].abs() < 1e-12 {
        return None;
    }
    let u = m[1][2] / m[1][1];
    let t = (m[0][2] - m[0][1] * u) / m[0][0];
    let p = Point2::new(a.origin.x + t * a.dir.x, a.origin.y + t * a.dir.y);
    // Consistency: the same point reached along the second line.
    let q = Point2::new(b.origin.x + u * b.dir.x, b.origin.y + u * b.dir.y);
    assert!(p.distance(q) < 1e-6, "elimination self-check");
    Some(p)
}

fn segments_intersect(p1: Point2, p2: Point2, q1: Point2, q2: Point2) -> bool {
    let d1 = Vec2::new(p2.x - p1.x, p2.y - p1.y);
    let d2 = Vec2::new(q2.x - q1.x, q2.y - q1.y);
    let side = |a: Point2, b: Vec2, c: Point2| b.cross(Vec2::new(c.x - a.x, c.y - a.y));
    let s1 = side(p1, d1, q1);
    let s2 = side(p1, d1, q2);
    let s3 = side(q1, d2, p1);
    let s4 = side(q1, d2, p2);
    if ((s1 > 0.0) != (s2 > 0.0) || s1 == 0.0 || s2 == 0.0)
        && ((s3 > 0.0) != (s4 > 0.0) || s3 == 0.0 || s4 == 0.0)
    {
        // Conservative on collinear touching: good enough for a sampling
        // oracle over random scenes.
        return true;
    }
    false
}

pub fn point_in_poly(p: Point2, poly: &[Point2]) -> bool {
    let mut inside = false;
    let n = poly.len();
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x {
                inside = !inside;
            }
        }
    }
    inside
}

/// Does the probe segment (centered at `c`, half-width `hw`, perpendicular
/// to `motion_dir`) touch the polygon?
pub fn probe_touches(c: Point2, motion_dir: Vec2, hw: f64, poly: &[Point2]) -> bool {
    let n = motion_dir.normalized().perp();
    let e1 = Point2::new(c.x - hw * n.x, c.y - hw * n.y);
    let e2 = Point2::new(c.x + hw * n.x, c.y + hw * n.y);
    if point_in_poly(e1, poly) || point_in_poly(e2, poly) || point_in_poly(c, poly) {
        return true;
    }
    let m = poly.len();
    (0..m).any(|i| segments_intersect(e1, e2, poly[i], poly[(i + 1) % m]))
}

/// Dense-sampling first-contact oracle: step the probe along the motion in
/// `samples` uniform increments and report the first sample parameter that
/// touches any polygon.
///
/// Samples are only evaluated inside each polygon's motion-frame extent
/// (the probe segment occupies exactly one motion-axis coordinate, so
/// contact outside that span is impossible); this prunes work without
/// changing which lattice points are tested.
pub fn sampled_first_contact(
    start: Point2,
    end: Point2,
    hw: f64,
    polys: &[Vec<Point2>],
    samples: usize,
) -> Option<f64> {
    let dir = Vec2::new(end.x - start.x, end.y - start.y);
    let len = dir.norm();
    if len < 1e-12 {
        return None;
    }
    let axis = dir.normalized();
    let normal = axis.perp();

    let mut best: Option<usize> = None;
    for poly in polys {
        let along: Vec<f64> =
            poly.iter().map(|p| axis.dot(Vec2::new(p.x - start.x, p.y - start.y))).collect();
        let across: Vec<f64> =
            poly.iter().map(|p| normal.dot(Vec2::new(p.x - start.x, p.y - start.y))).collect();
        let across_lo = across.iter().cloned().fold(f64::INFINITY, f64::min);
        let across_hi = across.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if across_hi < -hw || across_lo > hw {
            continue; // never inside the swept band
        }
        let along_lo = along.iter().cloned().fold(f64::INFINITY, f64::min);
        let along_hi = along.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let k_lo = (((along_lo / len) * samples as f64).floor() as i64 - 1).max(0) as usize;
        let k_hi =
            ((((along_hi / len) * samples as f64).ceil() as i64 + 1).max(0) as usize).min(samples);
        let k_stop = best.unwrap_or(samples);
        for k in k_lo..=k_hi.min(k_stop) {
            let t = k as f64 / samples as f64;
            let c = Point2::new(start.x + t * dir.x, start.y + t * dir.y);
            if probe_touches(c, dir, hw, poly) {
                if best.is_none_or(|b| k < b) {
                    best = Some(k);
                }
                break;
            }
        }
    }
    best.map(|k| k as f64 / samples as f64)
}

/// Distance from a point to the closest edge of a polygon boundary.
pub fn boundary_distance(p: Point2, poly: &[Point2]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| {
            let a = poly[i];
            let b = poly[(i + 1) % n];
            let ab = Vec2::new(b.x - a.x, b.y - a.y);
            let ap = Vec2::new(p.x - a.x, p.y - a.y);
            let t = (ap.dot(ab) / ab.dot(ab)).clamp(0.0, 1.0);
            p.distance(Point2::new(a.x + t * ab.x, a.y + t * ab.y))
        })
        .fold(f64::INFINITY, f64::min)
}

/// A random simple convex-ish footprint from the shapes the catalog uses.
pub fn random_footprint(rng: &mut ChaCha8Rng) -> Footprint {
    match rng.gen_range(0..3) {
        0 => Footprint::rectangle(rng.gen_range(0.02..0.09), rng.gen_range(0.02..0.09)),
        1 => Footprint::regular_ngon(rng.gen_range(0.02..0.08), rng.gen_range(3..12)),
        _ => {
            let hx: f64 = rng.gen_range(0.03..0.09);
            let hy: f64 = rng.gen_range(0.03..0.09);
            let ch = rng.gen_range(0.005..hx.min(hy) * 0.9);
            Footprint::chamfered_rectangle(hx, hy, ch)
        }
    }
}

pub fn random_pose_in(rng: &mut ChaCha8Rng, x: (f64, f64), y: (f64, f64)) -> Pose2 {
    Pose2::new(
        rng.gen_range(x.0..x.1),
        rng.gen_range(y.0..y.1),
        rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
    )
}

/// Path to the compiled command-line binary for subprocess tests.
pub fn bin_path() -> &'static str {
    env!("CARGO_BIN_EXE_blindsweep")
}
