//! Any-angle Safe Interval Path Planning on square grids.
//!
//! Agents are open disks whose diameter equals the cell side and move at one
//! cell side per time unit between cell centers. [`sipp`] plans a single
//! agent around already planned ones, either with cardinal moves only or
//! with any-angle shortcuts through the parent state; [`prioritized`] chains
//! such plans in FIFO priority order. [`validator`] checks the result in
//! continuous time without sharing any of the planner's interval logic.

pub mod constraints;
pub mod geometry;
pub mod grid;
pub mod interval;
pub mod prioritized;
pub mod sipp;
pub mod sweep;
pub mod trajectory;
pub mod validator;

pub use constraints::{Constraint, ConstraintTable};
pub use geometry::{Point, Segment, AGENT_DIAMETER, AGENT_RADIUS};
pub use grid::{parse_map, CellIndex, GridMap, MapError};
pub use interval::TimeInterval;
pub use prioritized::{
    check_wfi, generate_instance, parse_instance, plan_all, plan_all_with, AgentStatus, Instance,
    InstanceError, PlanAllOptions, Priorities, Protocol, Solution, WfiReport,
};
pub use sipp::{heuristic, plan, Connectivity, PlanError, PlannerMode, SearchOptions, TraceEntry};
pub use sweep::swept_cells;
pub use trajectory::{solution_cost, Trajectory, Waypoint};
pub use validator::{first_conflict, validate_solution, Conflict, ValidationReport};
