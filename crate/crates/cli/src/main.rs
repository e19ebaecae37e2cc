use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use aasipp_cli::{
    format_trace, format_trajectories, load_map, load_scenario, parse_protocol, run_benchmark,
    summarize, write_csv, write_json, BenchConfig, ModeChoice, RunRecord, Source, Summary,
};
use aasipp_core::{Priorities, Protocol};
use anyhow::Context;
use clap::Parser;

/// Plans collision-free trajectories for disk-shaped agents on a grid with
/// prioritized any-angle SIPP and the cardinal SIPP baseline.
#[derive(Debug, Parser)]
#[command(name = "aasipp", version)]
struct Cli {
    /// Map in the octile `type/height/width/map` format.
    #[arg(long)]
    map: PathBuf,
    /// Agents file or `version 1` scenario; repeat for several instances.
    #[arg(
        long,
        conflicts_with = "generate",
        required_unless_present = "generate"
    )]
    scen: Vec<PathBuf>,
    /// Generate instances: `separated` or `walk:STEPS`.
    #[arg(long, value_parser = parse_protocol)]
    generate: Option<Protocol>,
    /// Agents per instance.
    #[arg(long)]
    agents: Option<usize>,
    /// Number of generated instances.
    #[arg(long, default_value_t = 1)]
    instances: usize,
    /// Seed of the first generated instance.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Planner: aa, cardinal or both.
    #[arg(long, default_value = "both")]
    mode: ModeChoice,
    /// Wall-clock limit per run, in seconds.
    #[arg(long, default_value_t = 300.0)]
    timeout: f64,
    /// Output prefix; writes PREFIX.csv and PREFIX.json.
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Write every solution's waypoints under PREFIX_trajectories/.
    #[arg(long)]
    dump_trajectories: bool,
    /// Check every solution with the continuous-time validator.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    validate: bool,
    /// Write the search expansions of every run under PREFIX_traces/.
    #[arg(long)]
    trace: bool,
    /// Ignore the start cells of agents not yet planned.
    #[arg(long)]
    classic: bool,
    /// Worker threads.
    #[arg(long)]
    jobs: Option<usize>,
}

fn config(cli: &Cli) -> anyhow::Result<BenchConfig> {
    let grid = load_map(&cli.map)?;
    let source = match cli.generate {
        Some(p) => Source::Generate(p),
        None => Source::Scenarios(
            cli.scen
                .iter()
                .map(|p| load_scenario(p))
                .collect::<Result<_, _>>()?,
        ),
    };
    if !(cli.timeout > 0.0 && cli.timeout.is_finite()) {
        anyhow::bail!("--timeout must be a positive number of seconds");
    }
    let map_name = cli
        .map
        .file_stem()
        .map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    let mut cfg = BenchConfig::new(map_name, grid, source);
    cfg.agents = cli.agents;
    cfg.instances = cli.instances;
    cfg.seed = cli.seed;
    cfg.modes = cli.mode.modes();
    cfg.timeout = Duration::from_secs_f64(cli.timeout);
    cfg.validate = cli.validate;
    cfg.trace = cli.trace;
    cfg.jobs = cli.jobs;
    if cli.classic {
        cfg.priorities = Priorities::Classic;
    }
    cfg.check()?;
    Ok(cfg)
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn print_summary(summary: &Summary) {
    println!(
        "{:<10} {:>6} {:>9} {:>11} {:>12} {:>12}",
        "mode", "runs", "success", "time_s", "cost_common", "cost_all"
    );
    for m in &summary.modes {
        let cost = |c: Option<f64>| c.map_or_else(|| "-".to_string(), |c| format!("{c:.2}"));
        println!(
            "{:<10} {:>6} {:>8.1}% {:>11.4} {:>12} {:>12}",
            m.mode,
            m.runs,
            100.0 * m.success_rate,
            m.mean_time_s,
            cost(m.mean_cost_common),
            cost(m.mean_cost_all)
        );
    }
    if let Some(r) = summary.aa_cost_reduction {
        println!(
            "aa cost vs cardinal: {:+.2}% over {} instances",
            -100.0 * r,
            summary.common_instances
        );
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match config(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let runs = match run_benchmark(&cfg) {
        Ok(runs) => runs,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match emit(&cli, &runs) {
        Ok(summary) => {
            print_summary(&summary);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn emit(cli: &Cli, runs: &[aasipp_cli::Run]) -> anyhow::Result<Summary> {
    let records: Vec<RunRecord> = runs.iter().map(|r| r.record.clone()).collect();
    let summary = summarize(&records);
    let csv_path = with_suffix(&cli.out, ".csv");
    let file =
        File::create(&csv_path).with_context(|| format!("cannot write {}", csv_path.display()))?;
    write_csv(BufWriter::new(file), &records)?;
    let json_path = with_suffix(&cli.out, ".json");
    let file = File::create(&json_path)
        .with_context(|| format!("cannot write {}", json_path.display()))?;
    write_json(BufWriter::new(file), &records, &summary)?;

    for (flag, suffix, format) in [
        (
            cli.dump_trajectories,
            "_trajectories",
            format_trajectories as fn(&_) -> String,
        ),
        (cli.trace, "_traces", format_trace),
    ] {
        if !flag {
            continue;
        }
        let dir = with_suffix(&cli.out, suffix);
        fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
        let ext = if suffix == "_traces" { "csv" } else { "txt" };
        for run in runs {
            let path = dir.join(format!("{}_{}.{ext}", run.record.instance, run.record.mode));
            fs::write(&path, format(&run.solution))
                .with_context(|| format!("cannot write {}", path.display()))?;
        }
    }
    Ok(summary)
}
