//! Planar geometry used by every other module: points and vectors in the
//! table plane (meters, robot base at the origin), oriented rectangles,
//! rays, polygonal object footprints, and the swept-probe contact query
//! that models a guarded linear scan.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Cross products below this magnitude are treated as parallel directions.
pub const PARALLEL_EPS: f64 = 1e-9;

const GEOM_EPS: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    /// Degenerate two-ray localization; the caller must re-scan.
    #[error("rays are parallel (direction cross product below {PARALLEL_EPS:e})")]
    Parallel,
    #[error("footprint needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("footprint must wind counterclockwise (signed area {0:.6})")]
    NotCounterClockwise(f64),
    #[error("footprint is self-intersecting (edges {0} and {1})")]
    SelfIntersecting(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self - other).norm()
    }
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn normalized(self) -> Vec2 {
        let n = self.norm();
        Vec2::new(self.x / n, self.y / n)
    }

    /// Counterclockwise perpendicular.
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn rotated(self, angle: f64) -> Vec2 {
        let (s, c) = angle.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn is_unit(self) -> bool {
        (self.norm() - 1.0).abs() <= 1e-9
    }
}

impl std::ops::Sub for Point2 {
    type Output = Vec2;
    fn sub(self, rhs: Point2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl std::ops::Add<Vec2> for Point2 {
    type Output = Point2;
    fn add(self, rhs: Vec2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Sub<Vec2> for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Vec2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl std::ops::Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl std::ops::Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x * rhs, self.y * rhs)
    }
}

/// Rigid pose in the table plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose2 {
    pub x: f64,
    pub y: f64,
    pub yaw: f64,
}

impl Pose2 {
    pub const fn new(x: f64, y: f64, yaw: f64) -> Self {
        Self { x, y, yaw }
    }

    pub fn position(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }

    /// Local point to world frame.
    pub fn apply(&self, p: Point2) -> Point2 {
        let (s, c) = self.yaw.sin_cos();
        Point2::new(self.x + c * p.x - s * p.y, self.y + s * p.x + c * p.y)
    }
}

/// Oriented rectangle: center, half extents along its local axes, yaw.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect2 {
    pub center: Point2,
    pub half_extents: (f64, f64),
    pub yaw: f64,
}

impl Rect2 {
    pub fn new(center: Point2, half_extents: (f64, f64), yaw: f64) -> Self {
        assert!(half_extents.0 > 0.0 && half_extents.1 > 0.0, "half extents must be positive");
        Self { center, half_extents, yaw }
    }

    pub fn axis_aligned(center: Point2, half_extents: (f64, f64)) -> Self {
        Self::new(center, half_extents, 0.0)
    }

    pub fn corners(&self) -> [Point2; 4] {
        let pose = Pose2::new(self.center.x, self.center.y, self.yaw);
        let (hx, hy) = self.half_extents;
        [
            pose.apply(Point2::new(hx, hy)),
            pose.apply(Point2::new(-hx, hy)),
            pose.apply(Point2::new(-hx, -hy)),
            pose.apply(Point2::new(hx, -hy)),
        ]
    }

    pub fn contains(&self, p: Point2) -> bool {
        let d = p - self.center;
        let (s, c) = self.yaw.sin_cos();
        let lx = c * d.x + s * d.y;
        let ly = -s * d.x + c * d.y;
        lx.abs() <= self.half_extents.0 + GEOM_EPS && ly.abs() <= self.half_extents.1 + GEOM_EPS
    }

    pub fn area(&self) -> f64 {
        4.0 * self.half_extents.0 * self.half_extents.1
    }

    pub fn width(&self) -> f64 {
        2.0 * self.half_extents.0
    }

    pub fn depth(&self) -> f64 {
        2.0 * self.half_extents.1
    }
}

/// Grow a rectangle by `margin` on every side; center and yaw are unchanged.
pub fn inflate_rect(r: &Rect2, margin: f64) -> Rect2 {
    assert!(margin >= 0.0, "inflation margin must be non-negative");
    Rect2 {
        center: r.center,
        half_extents: (r.half_extents.0 + margin, r.half_extents.1 + margin),
        yaw: r.yaw,
    }
}

/// A contact ray: origin at a measured contact point, direction along the
/// commanded motion at the moment of contact. Directions must be unit-norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ray2 {
    pub origin: Point2,
    pub dir: Vec2,
}

impl Ray2 {
    pub fn new(origin: Point2, dir: Vec2) -> Self {
        debug_assert!(dir.is_unit(), "ray direction must be unit-norm");
        Self { origin, dir }
    }
}

/// Intersect two rays treated as infinite lines, solving
/// `r1.origin + s1*r1.dir = r2.origin + s2*r2.dir` as a 2x2 system.
/// The parameters may be negative: contact can land on either side of the
/// nominal object center, so half-line clipping would discard valid geometry.
pub fn ray_intersect(r1: &Ray2, r2: &Ray2) -> Result<Point2, GeometryError> {
    let denom = r1.dir.cross(r2.dir);
    if denom.abs() < PARALLEL_EPS {
        return Err(GeometryError::Parallel);
    }
    let d = r2.origin - r1.origin;
    let s1 = d.cross(r2.dir) / denom;
    Ok(r1.origin + r1.dir * s1)
}

/// Polygonal object footprint in the object-local frame: counterclockwise,
/// simple, at least three vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Footprint {
    vertices: Vec<Point2>,
}

impl Footprint {
    pub fn new(vertices: Vec<Point2>) -> Result<Self, GeometryError> {
        if vertices.len() < 3 {
            return Err(GeometryError::TooFewVertices(vertices.len()));
        }
        let area = polygon_signed_area(&vertices);
        if area <= 0.0 {
            return Err(GeometryError::NotCounterClockwise(area));
        }
        if let Some((i, j)) = find_self_intersection(&vertices) {
            return Err(GeometryError::SelfIntersecting(i, j));
        }
        Ok(Self { vertices })
    }

    /// Axis-aligned rectangle footprint centered at the local origin.
    pub fn rectangle(half_x: f64, half_y: f64) -> Self {
        Self {
            vertices: vec![
                Point2::new(half_x, half_y),
                Point2::new(-half_x, half_y),
                Point2::new(-half_x, -half_y),
                Point2::new(half_x, -half_y),
            ],
        }
    }

    /// Regular n-gon approximating a circle of the given radius. Curved
    /// objects use 32 sides so every contact query stays on the polygon path.
    pub fn regular_ngon(radius: f64, sides: usize) -> Self {
        assert!(sides >= 3);
        let vertices = (0..sides)
            .map(|i| {
                let a = 2.0 * std::f64::consts::PI * i as f64 / sides as f64;
                Point2::new(radius * a.cos(), radius * a.sin())
            })
            .collect();
        Self { vertices }
    }

    /// Rectangle with 45-degree chamfered corners (a stand-in for rounded
    /// container bases). `chamfer` is trimmed off each corner along both axes.
    pub fn chamfered_rectangle(half_x: f64, half_y: f64, chamfer: f64) -> Self {
        assert!(chamfer > 0.0 && chamfer < half_x && chamfer < half_y);
        Self {
            vertices: vec![
                Point2::new(half_x, half_y - chamfer),
                Point2::new(half_x - chamfer, half_y),
                Point2::new(-half_x + chamfer, half_y),
                Point2::new(-half_x, half_y - chamfer),
                Point2::new(-half_x, -half_y + chamfer),
                Point2::new(-half_x + chamfer, -half_y),
                Point2::new(half_x - chamfer, -half_y),
                Point2::new(half_x, -half_y + chamfer),
            ],
        }
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn signed_area(&self) -> f64 {
        polygon_signed_area(&self.vertices)
    }

    /// Area centroid in the local frame.
    pub fn centroid(&self) -> Point2 {
        polygon_centroid(&self.vertices)
    }

    /// Vertices transformed into the world frame.
    pub fn transformed(&self, pose: &Pose2) -> Vec<Point2> {
        self.vertices.iter().map(|&p| pose.apply(p)).collect()
    }

    /// Radius of the smallest origin-centered circle containing the footprint.
    pub fn bounding_radius(&self) -> f64 {
        self.vertices.iter().map(|p| (*p - Point2::new(0.0, 0.0)).norm()).fold(0.0, f64::max)
    }
}

/// Width of the posed footprint along `dir`: max minus min of the world-frame
/// vertex projections. Used for gripper-width feasibility checks.
pub fn extent_along(footprint: &Footprint, pose: &Pose2, dir: Vec2) -> f64 {
    debug_assert!(dir.is_unit());
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &v in footprint.vertices() {
        let p = pose.apply(v);
        let proj = dir.x * p.x + dir.y * p.y;
        min = min.min(proj);
        max = max.max(proj);
    }
    max - min
}

/// Result of a swept-probe query: first contact along the motion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepHit {
    /// Motion parameter in [0, 1] at first contact.
    pub t: f64,
    /// Probe-center position at `t`.
    pub probe_point: Point2,
    /// Witness point on the obstacle boundary. Falls back to the probe
    /// center when the probe starts inside the obstacle.
    pub contact_point: Point2,
    /// Index into the `obstacles` slice.
    pub obstacle: usize,
}

/// Sweep a probe segment of half-width `probe_half_width` (perpendicular to
/// the motion) from `start` to `end` and report the earliest contact with any
/// obstacle polygon (given as world-frame vertex lists).
///
/// The minimum is computed exactly from the candidate extrema of the linear
/// advance over each polygon clipped to the swept band: polygon vertices
/// inside the band, edge crossings with the band boundary, edge crossings
/// with the start line, and the probe starting inside a polygon. When several
/// boundary points tie for first contact (a face parallel to the probe), the
/// witness is their midpoint, mirroring a distributed-pressure reading.
pub fn sweep_first_contact(
    start: Point2,
    end: Point2,
    probe_half_width: f64,
    obstacles: &[&[Point2]],
) -> Option<SweepHit> {
    assert!(probe_half_width >= 0.0);
    let motion = end - start;
    let length = motion.norm();
    assert!(length > 0.0, "sweep start and end must differ");
    let u = Vec2::new(motion.x / length, motion.y / length);
    let v = u.perp();

    let mut best: Option<(f64, Point2, usize)> = None;
    for (idx, verts) in obstacles.iter().enumerate() {
        if let Some((a, witness)) =
            first_contact_param(start, u, v, length, probe_half_width, verts)
        {
            let better = match best {
                None => true,
                Some((best_a, _, _)) => a < best_a - GEOM_EPS,
            };
            if better {
                best = Some((a, witness, idx));
            }
        }
    }

    best.map(|(a, witness, obstacle)| SweepHit {
        t: a / length,
        probe_point: start + u * a,
        contact_point: witness,
        obstacle,
    })
}

/// First-contact advance for one polygon, in motion-frame coordinates
/// (a along the motion, b across it). Returns (advance, witness point).
fn first_contact_param(
    start: Point2,
    u: Vec2,
    v: Vec2,
    length: f64,
    half_width: f64,
    verts: &[Point2],
) -> Option<(f64, Point2)> {
    let n = verts.len();
    let frame = |p: Point2| {
        let d = p - start;
        (d.dot(u), d.dot(v))
    };

    // (advance, across, is_boundary_witness)
    let mut candidates: Vec<(f64, f64, bool)> = Vec::new();
    let in_band = |b: f64| b.abs() <= half_width + GEOM_EPS;
    let in_run = |a: f64| (-GEOM_EPS..=length + GEOM_EPS).contains(&a);

    for i in 0..n {
        let (a0, b0) = frame(verts[i]);
        let (a1, b1) = frame(verts[(i + 1) % n]);

        if in_band(b0) && in_run(a0) {
            candidates.push((a0.clamp(0.0, length), b0, true));
        }

        let db = b1 - b0;
        if db.abs() > GEOM_EPS {
            for w in [half_width, -half_width] {
                let tau = (w - b0) / db;
                if (0.0..=1.0).contains(&tau) {
                    let a = a0 + tau * (a1 - a0);
                    if in_run(a) {
                        candidates.push((a.clamp(0.0, length), w, true));
                    }
                }
            }
        }

        let da = a1 - a0;
        if da.abs() > GEOM_EPS {
            let tau = -a0 / da;
            if (0.0..=1.0).contains(&tau) {
                let b = b0 + tau * (b1 - b0);
                if in_band(b) {
                    candidates.push((0.0, b, true));
                }
            }
        }
    }

    if point_in_polygon(start, verts) {
        candidates.push((0.0, 0.0, false));
    }

    let a_min = candidates.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
    if !a_min.is_finite() {
        return None;
    }

    // Average the tied boundary witnesses; prefer them over the
    // started-inside pseudo-candidate when both are present. A vertex on
    // the band edge is reported both as an in-band vertex and as a
    // crossing, so coincident points are deduplicated to avoid skewing
    // the average.
    let mut tied: Vec<&(f64, f64, bool)> =
        candidates.iter().filter(|c| c.0 <= a_min + 1e-9 && c.2).collect();
    tied.sort_by(|p, q| p.1.partial_cmp(&q.1).unwrap());
    tied.dedup_by(|p, q| (p.0 - q.0).abs() < 1e-9 && (p.1 - q.1).abs() < 1e-9);
    let witness = if tied.is_empty() {
        start + u * a_min
    } else {
        let asum: f64 = tied.iter().map(|c| c.0).sum();
        let bsum: f64 = tied.iter().map(|c| c.1).sum();
        let k = tied.len() as f64;
        start + u * (asum / k) + v * (bsum / k)
    };
    Some((a_min, witness))
}

/// Boundary-inclusive point-in-polygon test (even-odd rule).
pub fn point_in_polygon(p: Point2, verts: &[Point2]) -> bool {
    let n = verts.len();
    let mut inside = false;
    for i in 0..n {
        let a = verts[i];
        let b = verts[(i + 1) % n];
        if point_segment_distance(p, a, b) <= 1e-12 {
            return true;
        }
        if (a.y > p.y) != (b.y > p.y) {
            let t = (p.y - a.y) / (b.y - a.y);
            let x = a.x + t * (b.x - a.x);
            if p.x < x {
                inside = !inside;
            }
        }
    }
    inside
}

pub fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.distance(a + ab * t)
}

/// Inclusive segment-segment intersection.
pub fn segments_intersect(p1: Point2, p2: Point2, q1: Point2, q2: Point2) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

fn orient(a: Point2, b: Point2, c: Point2) -> f64 {
    (b - a).cross(c - a)
}

fn on_segment(a: Point2, b: Point2, p: Point2) -> bool {
    p.x >= a.x.min(b.x) - GEOM_EPS
        && p.x <= a.x.max(b.x) + GEOM_EPS
        && p.y >= a.y.min(b.y) - GEOM_EPS
        && p.y <= a.y.max(b.y) + GEOM_EPS
}

/// True when the rectangle and the polygon share any point.
pub fn rect_polygon_overlap(rect: &Rect2, verts: &[Point2]) -> bool {
    if verts.iter().any(|&p| rect.contains(p)) {
        return true;
    }
    let corners = rect.corners();
    if corners.iter().any(|&c| point_in_polygon(c, verts)) {
        return true;
    }
    let n = verts.len();
    for i in 0..4 {
        let c1 = corners[i];
        let c2 = corners[(i + 1) % 4];
        for j in 0..n {
            if segments_intersect(c1, c2, verts[j], verts[(j + 1) % n]) {
                return true;
            }
        }
    }
    false
}

pub fn polygon_signed_area(verts: &[Point2]) -> f64 {
    let n = verts.len();
    let mut acc = 0.0;
    for i in 0..n {
        let a = verts[i];
        let b = verts[(i + 1) % n];
        acc += a.x * b.y - b.x * a.y;
    }
    acc / 2.0
}

pub fn polygon_centroid(verts: &[Point2]) -> Point2 {
    let n = verts.len();
    let mut cx = 0.0;
    let mut cy = 0.0;
    let mut area = 0.0;
    for i in 0..n {
        let a = verts[i];
        let b = verts[(i + 1) % n];
        let w = a.x * b.y - b.x * a.y;
        cx += (a.x + b.x) * w;
        cy += (a.y + b.y) * w;
        area += w;
    }
    let area = area / 2.0;
    Point2::new(cx / (6.0 * area), cy / (6.0 * area))
}

fn find_self_intersection(verts: &[Point2]) -> Option<(usize, usize)> {
    let n = verts.len();
    for i in 0..n {
        for j in (i + 1)..n {
            // Skip adjacent edges (they share an endpoint by construction).
            if j == i || (j + 1) % n == i || (i + 1) % n == j {
                continue;
            }
            if segments_intersect(verts[i], verts[(i + 1) % n], verts[j], verts[(j + 1) % n]) {
                return Some((i, j));
            }
        }
    }
    None
}

/// Clip the segment to the annulus `inner <= |p - center| <= outer` and
/// return the first reachable sub-segment (start-biased) with its motion
/// parameters. Used to confine probe scans to the arm's lateral workspace.
pub fn clip_segment_to_annulus(
    start: Point2,
    end: Point2,
    center: Point2,
    inner: f64,
    outer: f64,
) -> Option<(Point2, Point2)> {
    let d = end - start;
    let f = start - center;
    let a = d.dot(d);
    if a == 0.0 {
        let r = f.norm();
        return (r >= inner && r <= outer).then_some((start, end));
    }

    // Parameter interval inside the outer disc.
    let outer_iv = disc_interval(f, d, a, outer)?;
    // Parameter interval inside the open inner disc (to subtract).
    let inner_iv = disc_interval(f, d, a, inner);

    let (lo, hi) = outer_iv;
    let mut first: Option<(f64, f64)> = None;
    if let Some((ilo, ihi)) = inner_iv {
        // The inner disc splits the reachable interval; keep the piece
        // closest to the segment start.
        let left = (lo, ilo.min(hi));
        let right = (ihi.max(lo), hi);
        for (plo, phi) in [left, right] {
            if phi - plo > GEOM_EPS {
                first = Some((plo, phi));
                break;
            }
        }
    } else if hi - lo > GEOM_EPS {
        first = Some((lo, hi));
    }

    first.map(|(t0, t1)| (start + d * t0, start + d * t1))
}

/// Solve |f + t d|^2 <= r^2 for t in [0, 1]; returns the clamped interval.
fn disc_interval(f: Vec2, d: Vec2, a: f64, r: f64) -> Option<(f64, f64)> {
    let b = 2.0 * f.dot(d);
    let c = f.dot(f) - r * r;
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let t0 = ((-b - sq) / (2.0 * a)).max(0.0);
    let t1 = ((-b + sq) / (2.0 * a)).min(1.0);
    (t1 >= t0).then_some((t0, t1))
}
