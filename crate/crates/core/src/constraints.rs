//! Turns already planned trajectories into the two things a search needs:
//! safe intervals per cell, which identify search states, and collision
//! intervals per move, which bound arrival times.
//!
//! A constraint `[p, t]` says an obstacle center sits at `p` at time `t`.
//! Every cell the obstacle sweeps gets the obstacle's point closest to the
//! cell center. A move then collects the constraints of the cells it sweeps
//! itself, keeps those within [`RELEVANCE_RADIUS`] of it, and forbids arriving in a
//! 4r-wide window around each, shifted by how far the constraint's
//! projection lies from the move's end.

use std::collections::{HashMap, HashSet};

use crate::geometry::{
    circle_segment_intersections, closest_point_on_segment, dist_point_segment, Point, Segment,
    AGENT_DIAMETER, AGENT_RADIUS, GEOM_EPS,
};
use crate::grid::CellIndex;
use crate::interval::{complement, merge_intervals, TimeInterval, TIME_EPS};
use crate::sweep::swept_cells;
use crate::trajectory::{Piece, Trajectory};

/// Half-width of the forbidden window around a constraint time (4r).
pub const CONSTRAINT_MARGIN: f64 = 2.0 * AGENT_DIAMETER;

/// Constraints farther than this from a move are ignored. Cutting at exactly
/// 2r drops points the obstacle passes just before or after getting within
/// 2r of the move, and arrivals at the edge of a neighbouring window then
/// overlap by a hair, so the cut sits r further out.
pub const RELEVANCE_RADIUS: f64 = AGENT_DIAMETER + AGENT_RADIUS;

/// Spacing of the constraints that stand for a wait (2r).
const WAIT_STEP: f64 = AGENT_DIAMETER;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constraint {
    pub p: Point,
    pub time: f64,
    /// The obstacle stays at `p` from `time` on.
    pub forever: bool,
}

impl Constraint {
    pub fn at(p: Point, time: f64) -> Self {
        Self {
            p,
            time,
            forever: false,
        }
    }

    pub fn forever(p: Point, time: f64) -> Self {
        Self {
            p,
            time,
            forever: true,
        }
    }
}

/// Constraints and obstacle pieces indexed by the cells the obstacles sweep.
///
/// Built once per planned trajectory and read-only during a search.
#[derive(Debug, Clone, Default)]
pub struct ConstraintTable {
    constraints: HashMap<CellIndex, Vec<Constraint>>,
    pieces: HashMap<CellIndex, Vec<Piece>>,
    obstacles: usize,
    /// Cells treated as permanently occupied from time 0.
    guards: HashSet<CellIndex>,
}

impl ConstraintTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn build(obstacles: &[Trajectory]) -> Self {
        let mut table = Self::new();
        for t in obstacles {
            table.add_trajectory(t);
        }
        table
    }

    pub fn obstacle_count(&self) -> usize {
        self.obstacles
    }

    pub fn add_trajectory(&mut self, t: &Trajectory) {
        self.obstacles += 1;
        for piece in t.pieces() {
            match piece {
                Piece::Wait { at, from, to } => {
                    let cell = CellIndex::new(at.x.round() as i32, at.y.round() as i32);
                    let list = self.constraints.entry(cell).or_default();
                    if to == f64::INFINITY {
                        list.push(Constraint::forever(at, from));
                    } else {
                        let mut time = from;
                        loop {
                            list.push(Constraint::at(at, time));
                            if time >= to {
                                break;
                            }
                            time = (time + WAIT_STEP).min(to);
                        }
                    }
                    self.pieces.entry(cell).or_default().push(piece);
                }
                Piece::Move { seg, depart, .. } => {
                    for cell in swept_cells(seg.a, seg.b) {
                        let p = closest_point_on_segment(cell.center(), &seg);
                        self.constraints
                            .entry(cell)
                            .or_default()
                            .push(Constraint::at(p, depart + seg.a.distance(p)));
                        self.pieces.entry(cell).or_default().push(piece);
                    }
                }
            }
        }
    }

    /// Marks `cell` as occupied for all time, as if an agent stood there.
    pub fn guard(&mut self, cell: CellIndex) {
        self.guards.insert(cell);
    }

    pub fn release(&mut self, cell: CellIndex) {
        self.guards.remove(&cell);
    }

    pub fn is_guarded(&self, cell: CellIndex) -> bool {
        self.guards.contains(&cell)
    }

    pub fn constraints_at(&self, cell: CellIndex) -> &[Constraint] {
        self.constraints.get(&cell).map_or(&[], Vec::as_slice)
    }

    /// Cells carrying at least one constraint.
    pub fn cells(&self) -> impl Iterator<Item = CellIndex> + '_ {
        self.constraints.keys().copied()
    }

    /// Times at which some obstacle center is closer than 2r to the center
    /// of `cell`, merged and sorted.
    pub fn collision_intervals_at(&self, cell: CellIndex) -> Vec<TimeInterval> {
        if self.guards.contains(&cell) {
            return vec![TimeInterval::new(0.0, f64::INFINITY)];
        }
        let Some(pieces) = self.pieces.get(&cell) else {
            return Vec::new();
        };
        let c = cell.center();
        let busy = pieces
            .iter()
            .filter_map(|piece| occupancy_window(piece, c))
            .collect();
        merge_intervals(busy)
    }

    /// Maximal windows during which an agent can stand at `cell`.
    pub fn safe_intervals(&self, cell: CellIndex) -> Vec<TimeInterval> {
        complement(&self.collision_intervals_at(cell))
    }

    /// Constraints tied to cells swept by `mv` that lie within
    /// [`RELEVANCE_RADIUS`] of it.
    pub fn relevant_constraints(&self, mv: &Segment) -> Vec<Constraint> {
        let mut out = Vec::new();
        for cell in swept_cells(mv.a, mv.b) {
            if let Some(list) = self.constraints.get(&cell) {
                out.extend(
                    list.iter()
                        .filter(|c| dist_point_segment(c.p, mv) < RELEVANCE_RADIUS)
                        .copied(),
                );
            }
            if self.guards.contains(&cell)
                && dist_point_segment(cell.center(), mv) < AGENT_DIAMETER - GEOM_EPS
            {
                out.push(Constraint::forever(cell.center(), 0.0));
            }
        }
        out
    }
}

/// Open window during which `piece` keeps its center within 2r of `c`.
fn occupancy_window(piece: &Piece, c: Point) -> Option<TimeInterval> {
    let radius = AGENT_DIAMETER;
    let inside = |p: Point| p.distance(c) < radius - GEOM_EPS;
    match *piece {
        Piece::Wait { at, from, to } => inside(at).then(|| TimeInterval::new(from, to)),
        Piece::Move { seg, depart, .. } => {
            let hits = circle_segment_intersections(c, radius, &seg);
            let entry = if inside(seg.a) { 0.0 } else { hits.first()?.1 };
            let exit = if inside(seg.b) {
                seg.length()
            } else {
                hits.last()?.1
            };
            (exit - entry > TIME_EPS).then(|| TimeInterval::new(depart + entry, depart + exit))
        }
    }
}

/// Every cell's safe intervals against `obstacles`.
pub fn safe_intervals(cell: CellIndex, obstacles: &[Trajectory]) -> Vec<TimeInterval> {
    ConstraintTable::build(obstacles).safe_intervals(cell)
}

/// Arrival times at `mv.b` that may collide with the given constraints,
/// merged and sorted.
pub fn collision_intervals_for_move(mv: &Segment, constraints: &[Constraint]) -> Vec<TimeInterval> {
    let windows = constraints
        .iter()
        .map(|c| {
            let offset = mv.b.distance(closest_point_on_segment(c.p, mv));
            let start = c.time - CONSTRAINT_MARGIN + offset;
            let end = if c.forever {
                f64::INFINITY
            } else {
                c.time + CONSTRAINT_MARGIN + offset
            };
            TimeInterval::new(start, end)
        })
        .collect();
    merge_intervals(windows)
}

/// Earliest arrival at the end of a move inside the safe interval `target`.
///
/// `start_t` is the arrival without waiting and `end_t` the latest arrival
/// that still leaves the source within its safe interval. Arrival times are
/// pushed past every collision interval they fall into.
pub fn earliest_arrival(
    cols: &[TimeInterval],
    start_t: f64,
    end_t: f64,
    target: TimeInterval,
) -> Option<f64> {
    let mut t = start_t.max(target.start);
    for col in cols {
        if col.contains_strictly(t) {
            t = col.end;
        } else if col.start > t {
            break;
        }
    }
    (t <= end_t + TIME_EPS
        && t <= target.end + TIME_EPS
        && t >= target.start - TIME_EPS
        && t.is_finite())
    .then_some(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(col: i32, row: i32) -> CellIndex {
        CellIndex::new(col, row)
    }

    fn iv(a: f64, b: f64) -> TimeInterval {
        TimeInterval::new(a, b)
    }

    fn line(from: (i32, i32), to: (i32, i32), wait: f64) -> Trajectory {
        Trajectory::from_path(&[(c(from.0, from.1), wait), (c(to.0, to.1), 0.0)]).unwrap()
    }

    #[test]
    fn moving_obstacle_constraint() {
        let table = ConstraintTable::build(&[line((0, 2), (4, 2), 0.0)]);
        assert!(table
            .constraints_at(c(2, 2))
            .contains(&Constraint::at(Point::new(2.0, 2.0), 2.0)));
    }

    #[test]
    fn wait_is_expanded_at_unit_spacing() {
        let table = ConstraintTable::build(&[line((0, 0), (3, 0), 3.0)]);
        let times: Vec<f64> = table
            .constraints_at(c(0, 0))
            .iter()
            .filter(|k| k.p == Point::new(0.0, 0.0))
            .map(|k| k.time)
            .collect();
        // 0,1,2,3 for the wait, then the departure constraint of the move
        assert_eq!(times, vec![0.0, 1.0, 2.0, 3.0, 3.0]);

        let table = ConstraintTable::build(&[line((0, 0), (3, 0), 2.5)]);
        let times: Vec<f64> = table
            .constraints_at(c(0, 0))
            .iter()
            .map(|k| k.time)
            .collect();
        assert_eq!(times, vec![0.0, 1.0, 2.0, 2.5, 2.5]);
    }

    #[test]
    fn goal_gets_half_infinite_constraint() {
        let table = ConstraintTable::build(&[line((0, 0), (5, 5), 0.0)]);
        let arrival = 50f64.sqrt();
        assert!(table
            .constraints_at(c(5, 5))
            .contains(&Constraint::forever(Point::new(5.0, 5.0), arrival)));
    }

    #[test]
    fn crossing_obstacle_gives_collision_window() {
        let table = ConstraintTable::build(&[line((-5, 0), (5, 0), 0.0)]);
        assert_eq!(table.collision_intervals_at(c(0, 0)), vec![iv(4.0, 6.0)]);
        assert_eq!(
            table.safe_intervals(c(0, 0)),
            vec![iv(0.0, 4.0), iv(6.0, f64::INFINITY)]
        );
        assert_eq!(safe_intervals(c(0, 0), &[]), vec![TimeInterval::ALL]);
    }

    #[test]
    fn followers_merge_into_one_window() {
        let table =
            ConstraintTable::build(&[line((-5, 0), (5, 0), 0.0), line((-5, 0), (5, 0), 2.0)]);
        assert_eq!(
            table.safe_intervals(c(0, 0)),
            vec![iv(0.0, 4.0), iv(8.0, f64::INFINITY)]
        );
    }

    #[test]
    fn parked_obstacle_blocks_forever() {
        let table = ConstraintTable::build(&[Trajectory::stationary(c(3, 3))]);
        assert!(table.safe_intervals(c(3, 3)).is_empty());
        // neighbors sit exactly 2r away and stay free
        assert_eq!(table.safe_intervals(c(4, 3)), vec![TimeInterval::ALL]);
    }

    #[test]
    fn obstacle_waiting_inside_circle_extends_window() {
        // waits 2 at (1,0), which is 2r from (0,0): boundary only, no collision
        let t = Trajectory::from_path(&[(c(3, 0), 0.0), (c(1, 0), 2.0), (c(1, 3), 0.0)]).unwrap();
        let table = ConstraintTable::build(&[t]);
        assert_eq!(table.safe_intervals(c(0, 0)), vec![TimeInterval::ALL]);
        // passing through (0,0) with a wait there
        let t = Trajectory::from_path(&[(c(-3, 0), 0.0), (c(0, 0), 2.0), (c(3, 0), 0.0)]).unwrap();
        let table = ConstraintTable::build(&[t]);
        assert_eq!(
            table.safe_intervals(c(0, 0)),
            vec![iv(0.0, 2.0), iv(6.0, f64::INFINITY)]
        );
    }

    #[test]
    fn crossing_constraint_is_relevant() {
        let table = ConstraintTable::build(&[line((2, 0), (2, 4), 0.0)]);
        let mv = Segment::between(c(0, 2), c(4, 2));
        let rel = table.relevant_constraints(&mv);
        assert!(rel.contains(&Constraint::at(Point::new(2.0, 2.0), 2.0)));
    }

    #[test]
    fn distant_parallel_obstacle_is_irrelevant() {
        let table = ConstraintTable::build(&[line((0, 5), (6, 5), 0.0)]);
        assert!(table
            .relevant_constraints(&Segment::between(c(0, 2), c(6, 2)))
            .is_empty());
    }

    #[test]
    fn far_constraint_in_shared_cell_is_filtered() {
        // The obstacle runs along row 2 and parks there, while the move ends
        // in a cell the obstacle also sweeps. The constraint at (4,2) sits
        // 2.0 from the move and must not survive the filter.
        let mut table = ConstraintTable::new();
        table
            .constraints
            .entry(c(2, 1))
            .or_default()
            .push(Constraint::at(Point::new(4.0, 1.0), 3.0));
        let mv = Segment::between(c(0, 0), c(2, 1));
        assert!(swept_cells(mv.a, mv.b).contains(&c(2, 1)));
        assert!((dist_point_segment(Point::new(4.0, 1.0), &mv) - 2.0).abs() < 1e-12);
        assert!(table.relevant_constraints(&mv).is_empty());
    }

    #[test]
    fn collision_interval_formula() {
        let mv = Segment::between(c(0, 2), c(4, 2));
        let cols = collision_intervals_for_move(&mv, &[Constraint::at(Point::new(2.0, 2.0), 5.0)]);
        assert_eq!(cols, vec![iv(5.0, 9.0)]);

        let mv = Segment::between(c(0, 0), c(2, 0));
        let cols =
            collision_intervals_for_move(&mv, &[Constraint::forever(Point::new(1.0, 0.5), 3.0)]);
        assert_eq!(cols, vec![iv(2.0, f64::INFINITY)]);

        let mv = Segment::between(c(0, 0), c(4, 0));
        let cols = collision_intervals_for_move(
            &mv,
            &[
                Constraint::at(Point::new(4.0, 0.0), 7.0),
                Constraint::at(Point::new(4.0, 0.0), 10.0),
            ],
        );
        assert_eq!(cols, vec![iv(5.0, 12.0)]);
    }

    #[test]
    fn earliest_arrival_rules() {
        assert_eq!(
            earliest_arrival(&[], 7.0, f64::INFINITY, TimeInterval::ALL),
            Some(7.0)
        );
        assert_eq!(
            earliest_arrival(&[iv(5.0, 9.0)], 7.0, f64::INFINITY, TimeInterval::ALL),
            Some(9.0)
        );
        assert_eq!(
            earliest_arrival(
                &[iv(5.0, f64::INFINITY)],
                7.0,
                f64::INFINITY,
                TimeInterval::ALL
            ),
            None
        );
        // windows after the first are skipped once passed
        assert_eq!(
            earliest_arrival(
                &[iv(5.0, 9.0), iv(10.0, 11.0)],
                7.0,
                f64::INFINITY,
                TimeInterval::ALL
            ),
            Some(9.0)
        );
        assert_eq!(
            earliest_arrival(
                &[iv(1.0, 2.0), iv(5.0, 9.0)],
                7.0,
                f64::INFINITY,
                TimeInterval::ALL
            ),
            Some(9.0)
        );
        // pushed past the source's departure bound
        assert_eq!(
            earliest_arrival(&[iv(5.0, 9.0)], 7.0, 8.0, TimeInterval::ALL),
            None
        );
        // pushed past the target's end
        assert_eq!(
            earliest_arrival(&[iv(5.0, 9.0)], 7.0, 20.0, iv(0.0, 8.5)),
            None
        );
        // boundary arrival is allowed
        assert_eq!(
            earliest_arrival(&[iv(5.0, 9.0)], 5.0, 20.0, TimeInterval::ALL),
            Some(5.0)
        );
        // waiting for the target interval to open
        assert_eq!(
            earliest_arrival(&[iv(5.0, 9.0)], 2.0, 20.0, iv(6.0, f64::INFINITY)),
            Some(9.0)
        );
    }
}
