//! Prioritized multi-agent planning: agents are planned one after another
//! in input order, each against the trajectories of the agents before it.
//!
//! By default an agent also keeps clear of the start cells of the agents
//! still waiting to be planned. Without that, a higher-priority agent may run
//! over a start cell before its owner can leave, which can fail even on
//! well-formed instances. [`Priorities::Classic`] turns it off.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::constraints::ConstraintTable;
use crate::geometry::{dist_point_segment, Segment, AGENT_DIAMETER, GEOM_EPS};
use crate::grid::{CellIndex, GridMap};
use crate::sipp::{plan_with_table, PlanError, PlannerMode, SearchOptions, TraceEntry};
use crate::trajectory::{solution_cost, Trajectory};

/// Minimum center distance between any two generated endpoints (4r).
pub const ENDPOINT_SEPARATION: f64 = 2.0 * AGENT_DIAMETER;

/// Sampling attempts per endpoint before giving up.
const SAMPLE_ATTEMPTS: usize = 20_000;

#[derive(Debug, Error, PartialEq)]
pub enum InstanceError {
    #[error("agent {agent}: {which} cell {cell} is not traversable")]
    Blocked {
        agent: usize,
        which: &'static str,
        cell: CellIndex,
    },
    #[error("agents {first} and {second} share the {which} cell {cell}")]
    Duplicate {
        first: usize,
        second: usize,
        which: &'static str,
        cell: CellIndex,
    },
    #[error("could not place {wanted} agents after {attempts} attempts")]
    Exhausted { wanted: usize, attempts: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub grid: GridMap,
    /// `(start, goal)` per agent, highest priority first.
    pub agents: Vec<(CellIndex, CellIndex)>,
}

impl Instance {
    pub fn new(grid: GridMap, agents: Vec<(CellIndex, CellIndex)>) -> Result<Self, InstanceError> {
        let mut starts = HashMap::new();
        let mut goals = HashMap::new();
        for (i, &(s, g)) in agents.iter().enumerate() {
            for (which, cell, seen) in [("start", s, &mut starts), ("goal", g, &mut goals)] {
                if !grid.is_traversable(cell) {
                    return Err(InstanceError::Blocked {
                        agent: i,
                        which,
                        cell,
                    });
                }
                if let Some(&first) = seen.get(&cell) {
                    return Err(InstanceError::Duplicate {
                        first,
                        second: i,
                        which,
                        cell,
                    });
                }
                seen.insert(cell, i);
            }
        }
        Ok(Self { grid, agents })
    }

    /// Keeps only the first `n` agents.
    pub fn truncated(&self, n: usize) -> Self {
        Self {
            grid: self.grid.clone(),
            agents: self.agents[..n.min(self.agents.len())].to_vec(),
        }
    }

    /// Serializes the agents in the `agents N` instance format.
    pub fn agents_file(&self) -> String {
        let mut out = format!("agents {}\n", self.agents.len());
        for (s, g) in &self.agents {
            let _ = writeln!(out, "{} {} {} {}", s.col, s.row, g.col, g.row);
        }
        out
    }
}

/// Reads agents from either the `agents N` format or a `version 1`
/// scenario file. Agents keep their file order.
pub fn parse_instance(text: &str) -> Result<Vec<(CellIndex, CellIndex)>, InstanceError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (n, header) = lines.next().ok_or(InstanceError::Parse {
        line: 1,
        msg: "empty instance".into(),
    })?;
    let err = |line: usize, msg: &str| InstanceError::Parse {
        line,
        msg: msg.to_owned(),
    };
    let int = |line: usize, s: &str| {
        s.parse::<i32>()
            .map_err(|_| err(line, "expected an integer"))
    };

    let mut head = header.split_whitespace();
    match head.next() {
        Some("agents") => {
            let count: usize = head
                .next()
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| err(n, "expected `agents N`"))?;
            let mut agents = Vec::with_capacity(count);
            for (line, l) in lines {
                let f: Vec<&str> = l.split_whitespace().collect();
                let [sc, sr, gc, gr] = f[..] else {
                    return Err(err(
                        line,
                        "expected `start_col start_row goal_col goal_row`",
                    ));
                };
                agents.push((
                    CellIndex::new(int(line, sc)?, int(line, sr)?),
                    CellIndex::new(int(line, gc)?, int(line, gr)?),
                ));
            }
            if agents.len() != count {
                return Err(err(
                    n,
                    &format!("header announces {count} agents, found {}", agents.len()),
                ));
            }
            Ok(agents)
        }
        Some("version") => lines
            .map(|(line, l)| {
                let f: Vec<&str> = l.split_whitespace().collect();
                if f.len() != 9 {
                    return Err(err(line, "expected 9 scenario fields"));
                }
                Ok((
                    CellIndex::new(int(line, f[4])?, int(line, f[5])?),
                    CellIndex::new(int(line, f[6])?, int(line, f[7])?),
                ))
            })
            .collect(),
        _ => Err(err(n, "expected `agents N` or `version 1`")),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AgentStatus {
    Success,
    Failed(PlanError),
    /// Not attempted because an earlier agent failed or time ran out.
    Skipped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    /// One entry per agent in priority order; `None` when not planned.
    pub trajectories: Vec<Option<Trajectory>>,
    pub statuses: Vec<AgentStatus>,
    /// Sum of costs over the planned agents.
    pub total_cost: f64,
    pub wall_time: Duration,
    /// Search expansions per planned agent, filled only when tracing.
    pub traces: Vec<Vec<TraceEntry>>,
}

impl Solution {
    pub fn from_trajectories(trajectories: Vec<Option<Trajectory>>) -> Self {
        let statuses = trajectories
            .iter()
            .map(|t| {
                if t.is_some() {
                    AgentStatus::Success
                } else {
                    AgentStatus::Skipped
                }
            })
            .collect();
        let planned: Vec<Trajectory> = trajectories.iter().flatten().cloned().collect();
        Self {
            total_cost: solution_cost(&planned),
            trajectories,
            statuses,
            wall_time: Duration::ZERO,
            traces: Vec::new(),
        }
    }

    pub fn is_success(&self) -> bool {
        self.statuses.iter().all(|s| *s == AgentStatus::Success)
    }

    pub fn timed_out(&self) -> bool {
        self.statuses
            .contains(&AgentStatus::Failed(PlanError::Timeout))
    }

    /// First failing agent and its error.
    pub fn failure(&self) -> Option<(usize, &PlanError)> {
        self.statuses.iter().enumerate().find_map(|(i, s)| match s {
            AgentStatus::Failed(e) => Some((i, e)),
            _ => None,
        })
    }

    pub fn per_agent_costs(&self) -> Vec<Option<f64>> {
        self.trajectories
            .iter()
            .map(|t| t.as_ref().map(Trajectory::cost))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Priorities {
    /// Each agent avoids earlier trajectories and the start cells of later
    /// agents.
    #[default]
    Revised,
    /// Each agent avoids earlier trajectories only.
    Classic,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlanAllOptions {
    pub timeout: Option<Duration>,
    pub priorities: Priorities,
    /// Keep the expansion trace of every search.
    pub trace: bool,
}

/// Plans every agent in priority order. Planning stops at the first failure
/// or when `timeout` elapses; the remaining agents are marked skipped.
pub fn plan_all(inst: &Instance, mode: PlannerMode, timeout: Option<Duration>) -> Solution {
    plan_all_with(
        inst,
        mode,
        &PlanAllOptions {
            timeout,
            ..PlanAllOptions::default()
        },
    )
}

pub fn plan_all_with(inst: &Instance, mode: PlannerMode, opts: &PlanAllOptions) -> Solution {
    let started = Instant::now();
    let options = SearchOptions {
        deadline: opts.timeout.map(|t| started + t),
        trace: opts.trace,
    };
    let mut traces = Vec::new();
    let n = inst.agents.len();
    let mut table = ConstraintTable::new();
    if opts.priorities == Priorities::Revised {
        for &(start, _) in &inst.agents {
            table.guard(start);
        }
    }
    let mut trajectories = vec![None; n];
    let mut statuses = vec![AgentStatus::Skipped; n];
    for (i, &(start, goal)) in inst.agents.iter().enumerate() {
        if options.deadline.is_some_and(|d| Instant::now() >= d) {
            statuses[i] = AgentStatus::Failed(PlanError::Timeout);
            break;
        }
        table.release(start);
        match plan_with_table(&inst.grid, &table, start, goal, mode, &options) {
            Ok(plan) => {
                if opts.trace {
                    traces.push(plan.trace);
                }
                table.add_trajectory(&plan.trajectory);
                trajectories[i] = Some(plan.trajectory);
                statuses[i] = AgentStatus::Success;
            }
            Err(e) => {
                statuses[i] = AgentStatus::Failed(e);
                break;
            }
        }
    }
    let planned: Vec<Trajectory> = trajectories.iter().flatten().cloned().collect();
    Solution {
        total_cost: solution_cost(&planned),
        trajectories,
        statuses,
        wall_time: started.elapsed(),
        traces,
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct WfiReport {
    pub is_wfi: bool,
    /// Endpoint pairs with no qualifying path. Endpoints are numbered
    /// starts first (`0..n`), then goals (`n..2n`).
    pub failures: Vec<(usize, usize)>,
}

/// Checks the well-formed infrastructure conditions with a cardinal-move
/// witness: every endpoint pair must be linked by feasible moves that keep
/// 2r away from all other endpoints.
pub fn check_wfi(inst: &Instance) -> WfiReport {
    let endpoints: Vec<CellIndex> = inst
        .agents
        .iter()
        .map(|a| a.0)
        .chain(inst.agents.iter().map(|a| a.1))
        .collect();
    let mut by_cell: HashMap<CellIndex, Vec<usize>> = HashMap::new();
    for (i, &e) in endpoints.iter().enumerate() {
        by_cell.entry(e).or_default().push(i);
    }
    let grid = &inst.grid;
    // Other endpoints closer than 2r to the move, looked up around its ends.
    let crowded = |seg: &Segment, from: CellIndex, to: CellIndex, source: usize| -> Vec<usize> {
        let mut near = Vec::new();
        for base in [from, to] {
            for dc in -1..=1 {
                for dr in -1..=1 {
                    if let Some(ids) = by_cell.get(&base.offset(dc, dr)) {
                        for &e in ids {
                            if e != source
                                && !near.contains(&e)
                                && dist_point_segment(endpoints[e].center(), seg)
                                    < AGENT_DIAMETER - GEOM_EPS
                            {
                                near.push(e);
                            }
                        }
                    }
                }
            }
        }
        near
    };

    let mut failures = Vec::new();
    for (src, &origin) in endpoints.iter().enumerate() {
        // A move is usable toward endpoint `e` if the only endpoint it
        // crowds is `e` itself, reached as the final step.
        let mut seen = HashSet::from([origin]);
        let mut reached = HashSet::new();
        let mut queue = VecDeque::from([origin]);
        while let Some(cell) = queue.pop_front() {
            for (dc, dr) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                let next = cell.offset(dc, dr);
                if !grid.move_is_feasible(cell, next) {
                    continue;
                }
                let seg = Segment::between(cell, next);
                let near = crowded(&seg, cell, next, src);
                if near.is_empty() {
                    if seen.insert(next) {
                        queue.push_back(next);
                    }
                } else {
                    // Stepping onto an endpoint cell finishes a path to it.
                    for &e in &near {
                        if endpoints[e] == next && near.iter().all(|&o| endpoints[o] == next) {
                            reached.insert(e);
                        }
                    }
                }
            }
        }
        for (dst, &target) in endpoints.iter().enumerate() {
            if dst != src && target != origin && !reached.contains(&dst) {
                failures.push((src, dst));
            }
        }
    }
    WfiReport {
        is_wfi: failures.is_empty(),
        failures,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Protocol {
    /// All 2n endpoints pairwise at least 4r apart.
    Separated,
    /// Uniform starts, goals by a random walk of the given length.
    RandomWalk(usize),
}

pub fn generate_instance(
    grid: &GridMap,
    n: usize,
    seed: u64,
    protocol: Protocol,
) -> Result<Instance, InstanceError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let free: Vec<CellIndex> = grid.free_cells().collect();
    let exhausted = InstanceError::Exhausted {
        wanted: n,
        attempts: SAMPLE_ATTEMPTS,
    };
    if free.is_empty() || n > free.len() {
        return Err(exhausted);
    }
    let agents = match protocol {
        Protocol::Separated => {
            if 2 * n > free.len() {
                return Err(exhausted);
            }
            let mut picked: Vec<CellIndex> = Vec::with_capacity(2 * n);
            for _ in 0..2 * n {
                let cell = (0..SAMPLE_ATTEMPTS)
                    .map(|_| *free.choose(&mut rng).unwrap())
                    .find(|c| {
                        picked.iter().all(|p| {
                            p.center().distance(c.center()) >= ENDPOINT_SEPARATION - GEOM_EPS
                        })
                    })
                    .ok_or(InstanceError::Exhausted {
                        wanted: n,
                        attempts: SAMPLE_ATTEMPTS,
                    })?;
                picked.push(cell);
            }
            (0..n).map(|i| (picked[i], picked[n + i])).collect()
        }
        Protocol::RandomWalk(steps) => {
            let mut starts: Vec<CellIndex> = free.clone();
            starts.shuffle(&mut rng);
            starts.truncate(n);
            let mut goals: HashSet<CellIndex> = HashSet::new();
            let mut agents = Vec::with_capacity(n);
            for &s in &starts {
                let goal = (0..SAMPLE_ATTEMPTS / 100)
                    .map(|_| random_walk(grid, s, steps, &mut rng))
                    .find(|g| !goals.contains(g))
                    .ok_or(InstanceError::Exhausted {
                        wanted: n,
                        attempts: SAMPLE_ATTEMPTS / 100,
                    })?;
                goals.insert(goal);
                agents.push((s, goal));
            }
            agents
        }
    };
    Instance::new(grid.clone(), agents)
}

fn random_walk(grid: &GridMap, from: CellIndex, steps: usize, rng: &mut impl Rng) -> CellIndex {
    let mut cell = from;
    let mut options = Vec::with_capacity(4);
    for _ in 0..steps {
        options.clear();
        options.extend(
            [(1, 0), (-1, 0), (0, 1), (0, -1)]
                .into_iter()
                .map(|(dc, dr)| cell.offset(dc, dr))
                .filter(|&c| grid.is_traversable(c)),
        );
        match options.choose(rng) {
            Some(&next) => cell = next,
            None => break,
        }
    }
    cell
}
