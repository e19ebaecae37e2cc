//! Planar primitives shared by the sweep, the constraint machinery and the
//! validator.
//!
//! Cell `(col, row)` has its center at the point `(col, row)` and covers
//! `[col - 0.5, col + 0.5] x [row - 0.5, row + 0.5]`.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use crate::grid::CellIndex;

/// Tolerance used by every geometric predicate.
pub const GEOM_EPS: f64 = 1e-9;

/// Agent radius in grid units (a cell is one agent diameter wide).
pub const AGENT_RADIUS: f64 = 0.5;

/// Agent diameter, the minimum legal center-to-center distance.
pub const AGENT_DIAMETER: f64 = 2.0 * AGENT_RADIUS;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point) -> f64 {
        (self - other).norm()
    }

    /// Linear interpolation, `self` at `t = 0` and `other` at `t = 1`.
    pub fn lerp(self, other: Point, t: f64) -> Point {
        self + (other - self) * t
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, rhs: f64) -> Point {
        Point::new(self.x * rhs, self.y * rhs)
    }
}

impl From<CellIndex> for Point {
    fn from(c: CellIndex) -> Self {
        c.center()
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Closed straight segment. `a == b` is allowed and behaves as a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub const fn new(a: Point, b: Point) -> Self {
        Self { a, b }
    }

    pub fn between(from: CellIndex, to: CellIndex) -> Self {
        Self::new(from.center(), to.center())
    }

    pub fn length(&self) -> f64 {
        self.a.distance(self.b)
    }

    pub fn is_degenerate(&self) -> bool {
        (self.b - self.a).norm_sq() <= GEOM_EPS * GEOM_EPS
    }

    pub fn reversed(&self) -> Self {
        Self::new(self.b, self.a)
    }

    /// Parameter in `[0, 1]` of the point of the segment closest to `p`.
    fn clamped_param(&self, p: Point) -> f64 {
        let d = self.b - self.a;
        let len_sq = d.norm_sq();
        if len_sq <= GEOM_EPS * GEOM_EPS {
            return 0.0;
        }
        ((p - self.a).dot(d) / len_sq).clamp(0.0, 1.0)
    }
}

pub fn closest_point_on_segment(p: Point, s: &Segment) -> Point {
    let t = s.clamped_param(p);
    if t <= 0.0 {
        s.a
    } else if t >= 1.0 {
        s.b
    } else {
        s.a.lerp(s.b, t)
    }
}

pub fn dist_point_segment(p: Point, s: &Segment) -> f64 {
    p.distance(closest_point_on_segment(p, s))
}

/// Intersections of the circle boundary with `s`, ordered by their
/// distance from `s.a` and paired with that distance.
///
/// A tangent segment yields a single point. A segment lying strictly inside
/// the circle yields nothing, so callers must test endpoint containment
/// themselves.
pub fn circle_segment_intersections(center: Point, radius: f64, s: &Segment) -> Vec<(Point, f64)> {
    debug_assert!(radius > 0.0);
    let len = s.length();
    if len <= GEOM_EPS {
        return Vec::new();
    }
    let dir = (s.b - s.a) * (1.0 / len);
    // |a + u*dir - c|^2 = r^2  with u the arclength from a.
    let w = s.a - center;
    let half_b = w.dot(dir);
    let c = w.norm_sq() - radius * radius;
    let disc = half_b * half_b - c;
    let on_segment = |u: f64| u >= -GEOM_EPS && u <= len + GEOM_EPS;
    let at = |u: f64| {
        let u = u.clamp(0.0, len);
        (s.a + dir * u, u)
    };

    if disc < -GEOM_EPS {
        return Vec::new();
    }
    // Tangency is decided on the distance from the center to the line,
    // which is much better conditioned than the discriminant itself.
    let line_dist = (w - dir * w.dot(dir)).norm();
    if (line_dist - radius).abs() <= GEOM_EPS || disc <= 0.0 {
        let u = -half_b;
        return if on_segment(u) {
            vec![at(u)]
        } else {
            Vec::new()
        };
    }
    let root = disc.sqrt();
    [-half_b - root, -half_b + root]
        .into_iter()
        .filter(|&u| on_segment(u))
        .map(at)
        .collect()
}

/// Distance from `s` to the square cell `cell` (zero when they meet).
pub fn dist_segment_cell(s: &Segment, cell: CellIndex) -> f64 {
    let (cx, cy) = (cell.col as f64, cell.row as f64);
    let (lo_x, hi_x) = (cx - 0.5, cx + 0.5);
    let (lo_y, hi_y) = (cy - 0.5, cy + 0.5);
    if segment_hits_box(s, lo_x, hi_x, lo_y, hi_y) {
        return 0.0;
    }
    let corners = [
        Point::new(lo_x, lo_y),
        Point::new(hi_x, lo_y),
        Point::new(lo_x, hi_y),
        Point::new(hi_x, hi_y),
    ];
    let to_corners = corners
        .iter()
        .map(|&c| dist_point_segment(c, s))
        .fold(f64::INFINITY, f64::min);
    let to_ends = dist_point_box(s.a, lo_x, hi_x, lo_y, hi_y)
        .min(dist_point_box(s.b, lo_x, hi_x, lo_y, hi_y));
    to_corners.min(to_ends)
}

fn dist_point_box(p: Point, lo_x: f64, hi_x: f64, lo_y: f64, hi_y: f64) -> f64 {
    let dx = (lo_x - p.x).max(0.0).max(p.x - hi_x);
    let dy = (lo_y - p.y).max(0.0).max(p.y - hi_y);
    dx.hypot(dy)
}

/// Liang-Barsky clip of the segment against a closed box.
fn segment_hits_box(s: &Segment, lo_x: f64, hi_x: f64, lo_y: f64, hi_y: f64) -> bool {
    let d = s.b - s.a;
    let mut t0 = 0.0_f64;
    let mut t1 = 1.0_f64;
    for (p, q) in [
        (-d.x, s.a.x - lo_x),
        (d.x, hi_x - s.a.x),
        (-d.y, s.a.y - lo_y),
        (d.y, hi_y - s.a.y),
    ] {
        if p == 0.0 {
            if q < 0.0 {
                return false;
            }
        } else {
            let r = q / p;
            if p < 0.0 {
                t0 = t0.max(r);
            } else {
                t1 = t1.min(r);
            }
            if t0 > t1 {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(ax: f64, ay: f64, bx: f64, by: f64) -> Segment {
        Segment::new(Point::new(ax, ay), Point::new(bx, by))
    }

    #[test]
    fn point_segment_distance() {
        assert_eq!(
            dist_point_segment(Point::new(0.0, 1.0), &seg(-1.0, 0.0, 1.0, 0.0)),
            1.0
        );
        assert_eq!(
            dist_point_segment(Point::new(3.0, 0.0), &seg(0.0, 0.0, 1.0, 0.0)),
            2.0
        );
        assert_eq!(
            dist_point_segment(Point::new(1.0, 1.0), &seg(0.0, 0.0, 2.0, 2.0)),
            0.0
        );
        // degenerate segment is a point
        assert_eq!(
            dist_point_segment(Point::new(3.0, 4.0), &seg(0.0, 0.0, 0.0, 0.0)),
            5.0
        );
    }

    #[test]
    fn closest_point_is_clamped() {
        assert_eq!(
            closest_point_on_segment(Point::new(0.0, 1.0), &seg(-1.0, 0.0, 1.0, 0.0)),
            Point::new(0.0, 0.0)
        );
        assert_eq!(
            closest_point_on_segment(Point::new(5.0, 5.0), &seg(0.0, 0.0, 1.0, 0.0)),
            Point::new(1.0, 0.0)
        );
        let p = Point::new(0.5, 0.5);
        assert_eq!(closest_point_on_segment(p, &seg(0.0, 0.0, 2.0, 2.0)), p);
    }

    #[test]
    fn circle_through_line() {
        let hits =
            circle_segment_intersections(Point::new(0.0, 0.0), 1.0, &seg(-5.0, 0.0, 5.0, 0.0));
        assert_eq!(hits.len(), 2);
        assert!((hits[0].0.x + 1.0).abs() < 1e-12 && hits[0].0.y.abs() < 1e-12);
        assert!((hits[0].1 - 4.0).abs() < 1e-12);
        assert!((hits[1].0.x - 1.0).abs() < 1e-12);
        assert!((hits[1].1 - 6.0).abs() < 1e-12);
    }

    #[test]
    fn circle_misses_and_tangent() {
        assert!(
            circle_segment_intersections(Point::new(0.0, 0.0), 1.0, &seg(2.0, 2.0, 3.0, 3.0))
                .is_empty()
        );
        let hits =
            circle_segment_intersections(Point::new(0.0, 0.0), 1.0, &seg(-5.0, 1.0, 5.0, 1.0));
        assert_eq!(hits.len(), 1);
        assert!((hits[0].0.x).abs() < 1e-12 && (hits[0].0.y - 1.0).abs() < 1e-12);
        assert!((hits[0].1 - 5.0).abs() < 1e-12);
    }

    #[test]
    fn circle_segment_inside_is_empty() {
        assert!(
            circle_segment_intersections(Point::new(0.0, 0.0), 2.0, &seg(-0.5, 0.0, 0.5, 0.0))
                .is_empty()
        );
        // one endpoint inside: a single exit point
        let hits =
            circle_segment_intersections(Point::new(0.0, 0.0), 1.0, &seg(0.0, 0.0, 3.0, 0.0));
        assert_eq!(hits.len(), 1);
        assert!((hits[0].1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn segment_cell_distance() {
        let s = seg(0.0, 0.0, 4.0, 0.0);
        assert_eq!(dist_segment_cell(&s, CellIndex::new(2, 0)), 0.0);
        assert!((dist_segment_cell(&s, CellIndex::new(2, 1)) - 0.5).abs() < 1e-12);
        let diag = seg(0.0, 0.0, 1.0, 1.0);
        assert_eq!(dist_segment_cell(&diag, CellIndex::new(1, 0)), 0.0);
        assert!(
            (dist_segment_cell(&seg(0.0, 0.0, 0.0, 0.0), CellIndex::new(2, 0)) - 1.5).abs() < 1e-12
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn coord() -> impl Strategy<Value = f64> {
            -20.0..20.0f64
        }

        proptest! {
            #[test]
            fn distance_matches_closest_point(px in coord(), py in coord(), ax in coord(), ay in coord(), bx in coord(), by in coord()) {
                let s = seg(ax, ay, bx, by);
                let p = Point::new(px, py);
                let q = closest_point_on_segment(p, &s);
                prop_assert!((dist_point_segment(p, &s) - p.distance(q)).abs() < 1e-12);
                // the minimizer beats both endpoints
                prop_assert!(p.distance(q) <= p.distance(s.a) + 1e-12);
                prop_assert!(p.distance(q) <= p.distance(s.b) + 1e-12);
            }

            #[test]
            fn intersections_lie_on_circle_and_segment(cx in coord(), cy in coord(), r in 0.1..10.0f64, ax in coord(), ay in coord(), bx in coord(), by in coord()) {
                let s = seg(ax, ay, bx, by);
                let c = Point::new(cx, cy);
                let hits = circle_segment_intersections(c, r, &s);
                prop_assert!(hits.len() <= 2);
                for (q, u) in &hits {
                    prop_assert!((q.distance(c) - r).abs() < 1e-9);
                    prop_assert!(dist_point_segment(*q, &s) < 1e-9);
                    prop_assert!((q.distance(s.a) - u).abs() < 1e-9);
                }
                if hits.len() == 2 {
                    prop_assert!(hits[0].1 <= hits[1].1);
                }
            }
        }
    }
}
