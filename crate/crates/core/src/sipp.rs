//! Single-agent search over (cell, safe interval) states.
//!
//! With `any_angle` off this is plain SIPP over grid neighbors. With it on,
//! every neighbor is also tried straight from the parent of the expanded
//! state, which lets paths leave the grid directions.

use std::cmp::Ordering;
use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap};
use std::time::Instant;

use thiserror::Error;

use crate::constraints::{collision_intervals_for_move, earliest_arrival, ConstraintTable};
use crate::geometry::Segment;
use crate::grid::{CellIndex, GridMap};
use crate::interval::{TimeInterval, TIME_EPS};
use crate::trajectory::{Trajectory, Waypoint};

const CARDINAL: [(i32, i32); 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];
const OCTILE: [(i32, i32); 8] = [
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
];

/// Expansions between two deadline checks.
const DEADLINE_STRIDE: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Connectivity {
    Cardinal4,
    Octile8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PlannerMode {
    pub connectivity: Connectivity,
    pub any_angle: bool,
}

impl PlannerMode {
    /// Baseline SIPP restricted to the four cardinal moves.
    pub const CARDINAL: PlannerMode = PlannerMode {
        connectivity: Connectivity::Cardinal4,
        any_angle: false,
    };
    /// AA-SIPP: octile neighbors plus shortcuts from the parent state.
    pub const ANY_ANGLE: PlannerMode = PlannerMode {
        connectivity: Connectivity::Octile8,
        any_angle: true,
    };

    pub fn name(&self) -> &'static str {
        match (self.connectivity, self.any_angle) {
            (Connectivity::Cardinal4, false) => "cardinal",
            (Connectivity::Octile8, true) => "aa",
            (Connectivity::Octile8, false) => "octile",
            (Connectivity::Cardinal4, true) => "cardinal-aa",
        }
    }

    fn neighbors(&self) -> &'static [(i32, i32)] {
        match self.connectivity {
            Connectivity::Cardinal4 => &CARDINAL,
            Connectivity::Octile8 => &OCTILE,
        }
    }
}

pub fn heuristic(cfg: CellIndex, goal: CellIndex, mode: PlannerMode) -> f64 {
    let dx = (cfg.col - goal.col).abs() as f64;
    let dy = (cfg.row - goal.row).abs() as f64;
    match (mode.connectivity, mode.any_angle) {
        (Connectivity::Cardinal4, false) => dx + dy,
        _ => dx.hypot(dy),
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanError {
    #[error("start cell {0} is blocked")]
    StartBlocked(CellIndex),
    #[error("goal cell {0} is blocked")]
    GoalBlocked(CellIndex),
    #[error("start cell {0} is occupied by a higher-priority agent at time 0")]
    StartInCollision(CellIndex),
    #[error("no conflict-free path to {0}")]
    Unreachable(CellIndex),
    #[error("planning timed out")]
    Timeout,
}

#[derive(Debug, Clone, Default)]
pub struct SearchOptions {
    pub deadline: Option<Instant>,
    /// Record one [`TraceEntry`] per expansion.
    pub trace: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    pub cell: CellIndex,
    pub interval: TimeInterval,
    pub g: f64,
    pub time: f64,
    pub f: f64,
}

#[derive(Debug, Clone)]
pub struct Plan {
    pub trajectory: Trajectory,
    pub expansions: usize,
    pub trace: Vec<TraceEntry>,
}

/// Plans from `start` to `goal` around `obstacles`.
pub fn plan(
    grid: &GridMap,
    obstacles: &[Trajectory],
    start: CellIndex,
    goal: CellIndex,
    mode: PlannerMode,
) -> Result<Trajectory, PlanError> {
    let table = ConstraintTable::build(obstacles);
    plan_with_table(grid, &table, start, goal, mode, &SearchOptions::default())
        .map(|p| p.trajectory)
}

pub fn plan_with_table(
    grid: &GridMap,
    table: &ConstraintTable,
    start: CellIndex,
    goal: CellIndex,
    mode: PlannerMode,
    options: &SearchOptions,
) -> Result<Plan, PlanError> {
    if !grid.is_traversable(start) {
        return Err(PlanError::StartBlocked(start));
    }
    if !grid.is_traversable(goal) {
        return Err(PlanError::GoalBlocked(goal));
    }
    Search::new(grid, table, goal, mode, options).run(start)
}

#[derive(Debug, Clone)]
struct Node {
    cell: CellIndex,
    interval_index: usize,
    interval: TimeInterval,
    g: f64,
    time: f64,
    parent: Option<usize>,
    closed: bool,
}

#[derive(Debug, Clone, Copy)]
struct OpenEntry {
    f: f64,
    g: f64,
    cell: CellIndex,
    interval_index: usize,
    node: usize,
}

impl PartialEq for OpenEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for OpenEntry {}

impl PartialOrd for OpenEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OpenEntry {
    /// Max-heap order: smallest f, then largest g, then smallest state key.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .total_cmp(&self.f)
            .then(self.g.total_cmp(&other.g))
            .then_with(|| (other.cell, other.interval_index).cmp(&(self.cell, self.interval_index)))
    }
}

/// A successor candidate before relaxation.
#[derive(Debug, Clone, Copy)]
struct Successor {
    cell: CellIndex,
    interval_index: usize,
    interval: TimeInterval,
    time: f64,
    g: f64,
    parent: usize,
}

struct Search<'a> {
    grid: &'a GridMap,
    table: &'a ConstraintTable,
    goal: CellIndex,
    mode: PlannerMode,
    options: &'a SearchOptions,
    nodes: Vec<Node>,
    index: HashMap<(CellIndex, usize), usize>,
    intervals: HashMap<CellIndex, Vec<TimeInterval>>,
    open: BinaryHeap<OpenEntry>,
    trace: Vec<TraceEntry>,
}

impl<'a> Search<'a> {
    fn new(
        grid: &'a GridMap,
        table: &'a ConstraintTable,
        goal: CellIndex,
        mode: PlannerMode,
        options: &'a SearchOptions,
    ) -> Self {
        Self {
            grid,
            table,
            goal,
            mode,
            options,
            nodes: Vec::new(),
            index: HashMap::new(),
            intervals: HashMap::new(),
            open: BinaryHeap::new(),
            trace: Vec::new(),
        }
    }

    fn safe_intervals(&mut self, cell: CellIndex) -> &[TimeInterval] {
        let table = self.table;
        self.intervals
            .entry(cell)
            .or_insert_with(|| table.safe_intervals(cell))
    }

    fn run(mut self, start: CellIndex) -> Result<Plan, PlanError> {
        let first = match self.safe_intervals(start).first() {
            Some(iv) if iv.start <= TIME_EPS => *iv,
            _ => return Err(PlanError::StartInCollision(start)),
        };
        self.nodes.push(Node {
            cell: start,
            interval_index: 0,
            interval: first,
            g: 0.0,
            time: 0.0,
            parent: None,
            closed: false,
        });
        self.index.insert((start, 0), 0);
        self.push_open(0);

        let mut expansions = 0;
        while let Some(entry) = self.open.pop() {
            let id = entry.node;
            let node = &self.nodes[id];
            if node.closed || entry.g != node.g {
                continue;
            }
            if node.cell == self.goal && node.interval.is_unbounded() {
                let trajectory = self.reconstruct(id);
                return Ok(Plan {
                    trajectory,
                    expansions,
                    trace: self.trace,
                });
            }
            expansions += 1;
            if expansions % DEADLINE_STRIDE == 0 {
                if let Some(deadline) = self.options.deadline {
                    if Instant::now() >= deadline {
                        return Err(PlanError::Timeout);
                    }
                }
            }
            self.nodes[id].closed = true;
            if self.options.trace {
                let n = &self.nodes[id];
                self.trace.push(TraceEntry {
                    cell: n.cell,
                    interval: n.interval,
                    g: n.g,
                    time: n.time,
                    f: entry.f,
                });
            }
            for succ in self.expand(id) {
                self.relax(succ);
            }
        }
        Err(PlanError::Unreachable(self.goal))
    }

    fn push_open(&mut self, id: usize) {
        let n = &self.nodes[id];
        self.open.push(OpenEntry {
            f: n.g + heuristic(n.cell, self.goal, self.mode),
            g: n.g,
            cell: n.cell,
            interval_index: n.interval_index,
            node: id,
        });
    }

    /// Successors of `id` through each grid neighbor, plus the same
    /// neighbors reached straight from the parent in any-angle mode.
    fn expand(&mut self, id: usize) -> Vec<Successor> {
        let cell = self.nodes[id].cell;
        let parent = self.nodes[id].parent;
        let mut out = Vec::new();
        for &(dc, dr) in self.mode.neighbors() {
            let next = cell.offset(dc, dr);
            if !self.grid.move_is_feasible(cell, next) {
                continue;
            }
            // Shortcuts go first so that collinear ties keep the older
            // ancestor and straight lines stay single segments.
            if let Some(p) = parent.filter(|_| self.mode.any_angle) {
                let from = self.nodes[p].cell;
                if from != next && self.grid.move_is_feasible(from, next) {
                    self.get_successors(next, p, &mut out);
                }
            }
            self.get_successors(next, id, &mut out);
        }
        out
    }

    fn get_successors(&mut self, cell: CellIndex, from: usize, out: &mut Vec<Successor>) {
        let src = self.nodes[from].clone();
        let mv = Segment::between(src.cell, cell);
        let move_time = mv.length();
        let start_t = src.time + move_time;
        let end_t = src.interval.end + move_time;
        let table = self.table;
        let mut cols: Option<Vec<TimeInterval>> = None;
        let intervals = self.safe_intervals(cell).to_vec();
        for (i, iv) in intervals.into_iter().enumerate() {
            if iv.start > end_t || iv.end < start_t {
                continue;
            }
            let cols = cols.get_or_insert_with(|| {
                collision_intervals_for_move(&mv, &table.relevant_constraints(&mv))
            });
            if let Some(t) = earliest_arrival(cols, start_t, end_t, iv) {
                out.push(Successor {
                    cell,
                    interval_index: i,
                    interval: iv,
                    time: t,
                    g: src.g + (t - src.time),
                    parent: from,
                });
            }
        }
    }

    fn relax(&mut self, s: Successor) {
        let key = (s.cell, s.interval_index);
        let id = match self.index.entry(key) {
            Entry::Vacant(v) => {
                let id = self.nodes.len();
                v.insert(id);
                self.nodes.push(Node {
                    cell: s.cell,
                    interval_index: s.interval_index,
                    interval: s.interval,
                    g: s.g,
                    time: s.time,
                    parent: Some(s.parent),
                    closed: false,
                });
                id
            }
            Entry::Occupied(o) => {
                let id = *o.get();
                let node = &mut self.nodes[id];
                if s.g >= node.g - TIME_EPS {
                    return;
                }
                node.g = s.g;
                node.time = s.time;
                node.parent = Some(s.parent);
                node.closed = false;
                id
            }
        };
        self.push_open(id);
    }

    fn reconstruct(&self, goal: usize) -> Trajectory {
        let mut chain = vec![goal];
        while let Some(p) = self.nodes[*chain.last().unwrap()].parent {
            chain.push(p);
        }
        chain.reverse();
        let waypoints = chain
            .iter()
            .enumerate()
            .map(|(k, &id)| {
                let n = &self.nodes[id];
                let wait = match chain.get(k + 1) {
                    Some(&next) => {
                        let m = &self.nodes[next];
                        (m.time - n.time - n.cell.center().distance(m.cell.center())).max(0.0)
                    }
                    None => f64::INFINITY,
                };
                Waypoint {
                    cell: n.cell,
                    arrival: n.time,
                    wait,
                }
            })
            .collect();
        Trajectory::from_waypoints(waypoints).expect("search produced a malformed trajectory")
    }
}
