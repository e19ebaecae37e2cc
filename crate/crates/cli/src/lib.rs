//! Benchmark harness around the prioritized planners: builds instances from
//! scenario files or a generator, runs each planner mode under a wall-clock
//! limit, validates every solution and reports per-run records plus a
//! summary in CSV and JSON.

pub mod config;
pub mod report;
pub mod run;

pub use config::{
    load_map, load_scenario, parse_protocol, BenchConfig, ConfigError, ModeChoice, Source,
};
pub use report::{read_csv, summarize, write_csv, write_json, ModeSummary, RunRecord, Summary};
pub use run::{build_instances, format_trace, format_trajectories, run_benchmark, Run};
