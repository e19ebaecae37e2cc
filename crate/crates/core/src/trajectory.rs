//! Timed trajectories: a path of cell-center segments plus the wait
//! performed at the start of each segment.

use std::fmt;

use thiserror::Error;

use crate::geometry::{Point, Segment};
use crate::grid::CellIndex;

/// Slack allowed when checking the timing invariant of a trajectory.
const TIME_EPS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Waypoint {
    pub cell: CellIndex,
    pub arrival: f64,
    /// Time spent at `cell` before moving on; `f64::INFINITY` on the last
    /// waypoint.
    pub wait: f64,
}

impl Waypoint {
    pub fn departure(&self) -> f64 {
        self.arrival + self.wait
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum TrajectoryError {
    #[error("trajectory has no waypoints")]
    Empty,
    #[error("first waypoint must arrive at time 0, found {0}")]
    StartTime(f64),
    #[error("waypoint {0}: repeated cell, express stops as waits")]
    RepeatedCell(usize),
    #[error("waypoint {0}: wait must be finite and non-negative")]
    BadWait(usize),
    #[error("last waypoint must wait forever")]
    FiniteTail,
    #[error("waypoint {index}: arrival {found} does not match expected {expected}")]
    Timing {
        index: usize,
        expected: f64,
        found: f64,
    },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// One affine piece of motion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Piece {
    /// Standing at `at` over `[from, to]`; `to` may be infinite.
    Wait { at: Point, from: f64, to: f64 },
    /// Moving at unit speed along `seg`, leaving at `depart`.
    Move {
        seg: Segment,
        depart: f64,
        arrive: f64,
    },
}

impl Piece {
    pub fn start(&self) -> f64 {
        match *self {
            Piece::Wait { from, .. } => from,
            Piece::Move { depart, .. } => depart,
        }
    }

    pub fn end(&self) -> f64 {
        match *self {
            Piece::Wait { to, .. } => to,
            Piece::Move { arrive, .. } => arrive,
        }
    }

    /// Position at `t`, clamped to the piece's time span.
    pub fn position(&self, t: f64) -> Point {
        match *self {
            Piece::Wait { at, .. } => at,
            Piece::Move {
                seg,
                depart,
                arrive,
            } => {
                let len = arrive - depart;
                if len <= 0.0 {
                    return seg.b;
                }
                seg.a.lerp(seg.b, ((t - depart) / len).clamp(0.0, 1.0))
            }
        }
    }

    /// Constant velocity over the piece.
    pub fn velocity(&self) -> Point {
        match *self {
            Piece::Wait { .. } => Point::default(),
            Piece::Move {
                seg,
                depart,
                arrive,
            } => {
                let len = arrive - depart;
                if len <= 0.0 {
                    Point::default()
                } else {
                    (seg.b - seg.a) * (1.0 / len)
                }
            }
        }
    }
}

/// Feasible trajectory `<path, wait-list>` moving at unit speed.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    waypoints: Vec<Waypoint>,
}

impl Trajectory {
    /// Agent that never leaves `cell`.
    pub fn stationary(cell: CellIndex) -> Self {
        Self {
            waypoints: vec![Waypoint {
                cell,
                arrival: 0.0,
                wait: f64::INFINITY,
            }],
        }
    }

    /// Builds a trajectory from `(cell, wait)` pairs; arrival times follow
    /// from unit speed. The last wait is forced to infinity.
    pub fn from_path(steps: &[(CellIndex, f64)]) -> Result<Self, TrajectoryError> {
        let mut waypoints = Vec::with_capacity(steps.len());
        let mut clock = 0.0;
        for (i, &(cell, wait)) in steps.iter().enumerate() {
            if let Some(prev) = waypoints.last() {
                let prev: &Waypoint = prev;
                clock = prev.departure() + prev.cell.center().distance(cell.center());
            }
            let wait = if i + 1 == steps.len() {
                f64::INFINITY
            } else {
                wait
            };
            waypoints.push(Waypoint {
                cell,
                arrival: clock,
                wait,
            });
        }
        Self::from_waypoints(waypoints)
    }

    pub fn from_waypoints(waypoints: Vec<Waypoint>) -> Result<Self, TrajectoryError> {
        let first = waypoints.first().ok_or(TrajectoryError::Empty)?;
        if first.arrival.abs() > TIME_EPS {
            return Err(TrajectoryError::StartTime(first.arrival));
        }
        let last = waypoints.len() - 1;
        for (i, w) in waypoints.iter().enumerate() {
            if i == last {
                if w.wait != f64::INFINITY {
                    return Err(TrajectoryError::FiniteTail);
                }
            } else if !(w.wait.is_finite() && w.wait >= 0.0) {
                return Err(TrajectoryError::BadWait(i));
            }
        }
        for (i, pair) in waypoints.windows(2).enumerate() {
            let (prev, next) = (pair[0], pair[1]);
            if prev.cell == next.cell {
                return Err(TrajectoryError::RepeatedCell(i + 1));
            }
            let expected = prev.departure() + prev.cell.center().distance(next.cell.center());
            if (expected - next.arrival).abs() > TIME_EPS * expected.max(1.0) {
                return Err(TrajectoryError::Timing {
                    index: i + 1,
                    expected,
                    found: next.arrival,
                });
            }
        }
        Ok(Self { waypoints })
    }

    pub fn waypoints(&self) -> &[Waypoint] {
        &self.waypoints
    }

    pub fn start(&self) -> CellIndex {
        self.waypoints[0].cell
    }

    pub fn goal(&self) -> CellIndex {
        self.waypoints[self.waypoints.len() - 1].cell
    }

    /// Time at which the agent reaches its goal for good.
    pub fn final_arrival(&self) -> f64 {
        self.waypoints[self.waypoints.len() - 1].arrival
    }

    /// Segment lengths plus finite waits, which is the final arrival time.
    pub fn cost(&self) -> f64 {
        self.final_arrival()
    }

    /// Straight segments of the path, in order.
    pub fn segments(&self) -> impl Iterator<Item = Segment> + '_ {
        self.waypoints
            .windows(2)
            .map(|w| Segment::between(w[0].cell, w[1].cell))
    }

    /// Waits and moves in time order. Zero-length waits are skipped.
    pub fn pieces(&self) -> Vec<Piece> {
        let mut out = Vec::with_capacity(2 * self.waypoints.len());
        for (i, w) in self.waypoints.iter().enumerate() {
            if w.wait > 0.0 {
                out.push(Piece::Wait {
                    at: w.cell.center(),
                    from: w.arrival,
                    to: w.departure(),
                });
            }
            if let Some(next) = self.waypoints.get(i + 1) {
                out.push(Piece::Move {
                    seg: Segment::between(w.cell, next.cell),
                    depart: w.departure(),
                    arrive: next.arrival,
                });
            }
        }
        out
    }

    pub fn position_at(&self, time: f64) -> Point {
        let idx = self.waypoints.partition_point(|w| w.arrival <= time);
        if idx == 0 {
            return self.waypoints[0].cell.center();
        }
        let w = &self.waypoints[idx - 1];
        if time <= w.departure() || idx == self.waypoints.len() {
            return w.cell.center();
        }
        let next = &self.waypoints[idx];
        let (a, b) = (w.cell.center(), next.cell.center());
        let len = next.arrival - w.departure();
        a.lerp(b, ((time - w.departure()) / len).clamp(0.0, 1.0))
    }

    /// Parses the records written by the `Display` impl.
    pub fn parse_records(text: &str) -> Result<Self, TrajectoryError> {
        let mut waypoints = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| TrajectoryError::Parse {
                line: n + 1,
                msg: msg.to_owned(),
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [col, row, arrival, wait] = fields[..] else {
                return Err(err("expected `col row arrival_time wait_duration`"));
            };
            waypoints.push(Waypoint {
                cell: CellIndex::new(
                    col.parse().map_err(|_| err("bad column"))?,
                    row.parse().map_err(|_| err("bad row"))?,
                ),
                arrival: arrival.parse().map_err(|_| err("bad arrival time"))?,
                wait: wait.parse().map_err(|_| err("bad wait duration"))?,
            });
        }
        Self::from_waypoints(waypoints)
    }
}

impl fmt::Display for Trajectory {
    /// One `col row arrival_time wait_duration` record per line, with the
    /// terminal wait written as `inf`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for w in &self.waypoints {
            writeln!(f, "{} {} {} {}", w.cell.col, w.cell.row, w.arrival, w.wait)?;
        }
        Ok(())
    }
}

pub fn solution_cost(trajectories: &[Trajectory]) -> f64 {
    trajectories.iter().map(Trajectory::cost).sum()
}
