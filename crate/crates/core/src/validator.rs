//! Continuous-time conflict checking.
//!
//! Two trajectories are cut at every waypoint arrival and departure. Between
//! cuts both agents move affinely, so their squared center distance is a
//! quadratic in time and its first dip below 2r is found in closed form.
//! Nothing here uses the planner's intervals or constraints.

use crate::geometry::{Point, AGENT_DIAMETER};
use crate::grid::CellIndex;
use crate::interval::TimeInterval;
use crate::prioritized::{Instance, Solution};
use crate::sweep::swept_cells;
use crate::trajectory::Trajectory;

/// Slack under 2r before two centers count as overlapping.
pub const CONFLICT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conflict {
    /// First instant at which the centers come closer than 2r.
    pub time: f64,
    pub agent_a: usize,
    pub agent_b: usize,
    pub position_a: Point,
    pub position_b: Point,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StaticViolation {
    pub agent: usize,
    /// Segment index, or `None` for an endpoint or start/goal mismatch.
    pub segment: Option<usize>,
    pub cell: CellIndex,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub conflicts: Vec<Conflict>,
    pub static_violations: Vec<StaticViolation>,
    pub ok: bool,
}

pub fn first_conflict(a: &Trajectory, b: &Trajectory) -> Option<Conflict> {
    first_conflict_within(a, b, TimeInterval::ALL)
}

/// Like [`first_conflict`] but only looks at times inside `window`.
pub fn first_conflict_within(
    a: &Trajectory,
    b: &Trajectory,
    window: TimeInterval,
) -> Option<Conflict> {
    let mut cuts: Vec<f64> = vec![window.start];
    for w in a.waypoints().iter().chain(b.waypoints()) {
        for t in [w.arrival, w.departure()] {
            if t.is_finite() && t > window.start && t < window.end {
                cuts.push(t);
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let limit = AGENT_DIAMETER - CONFLICT_EPS;
    for (i, &t0) in cuts.iter().enumerate() {
        let t1 = cuts.get(i + 1).copied().unwrap_or(window.end);
        let span = t1 - t0;
        let (pa, pb) = (a.position_at(t0), b.position_at(t0));
        let d0 = pa - pb;
        if d0.norm() < limit {
            return Some(conflict_at(a, b, t0));
        }
        if span <= 0.0 {
            continue;
        }
        // Velocities from positions a unit step (or the whole piece) later.
        let probe = if span.is_finite() { span } else { 1.0 };
        let va = (a.position_at(t0 + probe) - pa) * (1.0 / probe);
        let vb = (b.position_at(t0 + probe) - pb) * (1.0 / probe);
        let dv = va - vb;
        let dv2 = dv.norm_sq();
        if dv2 == 0.0 {
            continue;
        }
        // |d0 + dv*s|^2 = limit^2, earliest root with s in (0, span].
        let half_b = d0.dot(dv);
        let c = d0.norm_sq() - limit * limit;
        let disc = half_b * half_b - dv2 * c;
        if disc <= 0.0 {
            continue;
        }
        let s = (-half_b - disc.sqrt()) / dv2;
        if s > 0.0 && s < span {
            return Some(conflict_at(a, b, t0 + s));
        }
    }
    None
}

fn conflict_at(a: &Trajectory, b: &Trajectory, time: f64) -> Conflict {
    Conflict {
        time,
        agent_a: 0,
        agent_b: 1,
        position_a: a.position_at(time),
        position_b: b.position_at(time),
    }
}

/// Pairwise conflicts plus static clearance and endpoint checks for every
/// successful agent of `sol`.
pub fn validate_solution(inst: &Instance, sol: &Solution) -> ValidationReport {
    let mut report = ValidationReport::default();
    let planned: Vec<(usize, &Trajectory)> = sol
        .trajectories
        .iter()
        .enumerate()
        .filter_map(|(i, t)| t.as_ref().map(|t| (i, t)))
        .collect();

    for &(i, t) in &planned {
        let Some(&(start, goal)) = inst.agents.get(i) else {
            report.static_violations.push(StaticViolation {
                agent: i,
                segment: None,
                cell: t.start(),
            });
            continue;
        };
        if t.start() != start {
            report.static_violations.push(StaticViolation {
                agent: i,
                segment: None,
                cell: t.start(),
            });
        }
        if t.goal() != goal {
            report.static_violations.push(StaticViolation {
                agent: i,
                segment: None,
                cell: t.goal(),
            });
        }
        for w in t.waypoints() {
            if !inst.grid.is_traversable(w.cell) {
                report.static_violations.push(StaticViolation {
                    agent: i,
                    segment: None,
                    cell: w.cell,
                });
            }
        }
        for (k, seg) in t.segments().enumerate() {
            for cell in swept_cells(seg.a, seg.b) {
                if !inst.grid.is_traversable(cell) {
                    report.static_violations.push(StaticViolation {
                        agent: i,
                        segment: Some(k),
                        cell,
                    });
                }
            }
        }
    }

    for (x, &(i, ti)) in planned.iter().enumerate() {
        for &(j, tj) in &planned[x + 1..] {
            if let Some(mut c) = first_conflict(ti, tj) {
                c.agent_a = i;
                c.agent_b = j;
                report.conflicts.push(c);
            }
        }
    }
    report.ok = report.conflicts.is_empty() && report.static_violations.is_empty();
    report
}
