use std::fmt::Write as _;

use aasipp_core::{
    generate_instance, plan_all_with, validate_solution, Instance, PlanAllOptions, Solution,
};
use rayon::prelude::*;

use crate::config::{BenchConfig, ConfigError, Source};
use crate::report::RunRecord;

/// A finished run together with the solution it produced.
#[derive(Debug, Clone)]
pub struct Run {
    pub record: RunRecord,
    pub solution: Solution,
}

/// Builds the instances of a batch, in instance order, paired with the
/// seed recorded for them.
pub fn build_instances(cfg: &BenchConfig) -> Result<Vec<(Instance, u64)>, ConfigError> {
    cfg.check()?;
    let invalid = |e: aasipp_core::InstanceError| ConfigError::Invalid(e.to_string());
    match &cfg.source {
        Source::Scenarios(files) => files
            .iter()
            .map(|agents| {
                let mut agents = agents.clone();
                if let Some(n) = cfg.agents {
                    if n > agents.len() {
                        return Err(ConfigError::Invalid(format!(
                            "scenario has {} agents, {n} requested",
                            agents.len()
                        )));
                    }
                    agents.truncate(n);
                }
                let inst = Instance::new(cfg.grid.clone(), agents).map_err(invalid)?;
                Ok((inst, cfg.seed))
            })
            .collect(),
        Source::Generate(protocol) => {
            let n = cfg.agents.unwrap_or(0);
            (0..cfg.instances)
                .map(|i| {
                    let seed = cfg.seed + i as u64;
                    let inst = generate_instance(&cfg.grid, n, seed, *protocol).map_err(invalid)?;
                    Ok((inst, seed))
                })
                .collect()
        }
    }
}

fn run_one(cfg: &BenchConfig, index: usize, inst: &Instance, seed: u64) -> Vec<Run> {
    let opts = PlanAllOptions {
        timeout: Some(cfg.timeout),
        priorities: cfg.priorities,
        trace: cfg.trace,
    };
    cfg.modes
        .iter()
        .map(|&mode| {
            let solution = plan_all_with(inst, mode, &opts);
            let planned = solution.is_success();
            let valid = cfg.validate && planned && validate_solution(inst, &solution).ok;
            let success = planned && (valid || !cfg.validate);
            let record = RunRecord {
                instance: index,
                mode: mode.name().to_string(),
                agents: inst.agents.len(),
                success,
                time_s: solution.wall_time.as_secs_f64(),
                cost: success.then_some(solution.total_cost),
                valid,
                seed,
            };
            Run { record, solution }
        })
        .collect()
}

/// Runs every configured mode on every instance. Instances are spread over
/// worker threads; the result is in instance order, then mode order.
pub fn run_benchmark(cfg: &BenchConfig) -> Result<Vec<Run>, ConfigError> {
    let instances = build_instances(cfg)?;
    let work = || -> Vec<Run> {
        instances
            .par_iter()
            .enumerate()
            .map(|(i, (inst, seed))| run_one(cfg, i, inst, *seed))
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .collect()
    };
    match cfg.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| ConfigError::Invalid(e.to_string()))
            .map(|pool| pool.install(work)),
        None => Ok(work()),
    }
}

/// Every planned trajectory of `sol`, each under an `agent K` header.
pub fn format_trajectories(sol: &Solution) -> String {
    let mut out = String::new();
    for (k, t) in sol.trajectories.iter().enumerate() {
        if let Some(t) = t {
            let _ = writeln!(out, "agent {k}");
            out.push_str(&t.to_string());
        }
    }
    out
}

/// The expansion trace of `sol` as CSV.
pub fn format_trace(sol: &Solution) -> String {
    let mut out = String::from("agent,col,row,interval_start,interval_end,g,f\n");
    for (k, entries) in sol.traces.iter().enumerate() {
        for e in entries {
            let _ = writeln!(
                out,
                "{k},{},{},{},{},{},{}",
                e.cell.col, e.cell.row, e.interval.start, e.interval.end, e.g, e.f
            );
        }
    }
    out
}
