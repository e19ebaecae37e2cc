use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

/// One planner run on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: usize,
    pub mode: String,
    pub agents: usize,
    pub success: bool,
    pub time_s: f64,
    /// Sum of costs; empty unless the run succeeded.
    pub cost: Option<f64>,
    pub valid: bool,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSummary {
    pub mode: String,
    pub runs: usize,
    pub successes: usize,
    pub success_rate: f64,
    /// Mean wall time over all runs of this mode.
    pub mean_time_s: f64,
    /// Mean cost over the instances every mode solved.
    pub mean_cost_common: Option<f64>,
    /// Mean cost over the instances this mode solved.
    pub mean_cost_all: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub modes: Vec<ModeSummary>,
    /// Instances solved by every mode.
    pub common_instances: usize,
    /// `1 - aa / cardinal` over the common instances, when both ran.
    pub aa_cost_reduction: Option<f64>,
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

pub fn summarize(records: &[RunRecord]) -> Summary {
    let mut modes: Vec<String> = Vec::new();
    for r in records {
        if !modes.contains(&r.mode) {
            modes.push(r.mode.clone());
        }
    }
    let mut solved: BTreeMap<usize, usize> = BTreeMap::new();
    for r in records.iter().filter(|r| r.success) {
        *solved.entry(r.instance).or_default() += 1;
    }
    let common: Vec<usize> = solved
        .iter()
        .filter(|&(_, &n)| n == modes.len())
        .map(|(&i, _)| i)
        .collect();

    let per_mode: Vec<ModeSummary> = modes
        .iter()
        .map(|mode| {
            let runs: Vec<&RunRecord> = records.iter().filter(|r| &r.mode == mode).collect();
            let times: Vec<f64> = runs.iter().map(|r| r.time_s).collect();
            let costs_all: Vec<f64> = runs.iter().filter_map(|r| r.cost).collect();
            let costs_common: Vec<f64> = runs
                .iter()
                .filter(|r| common.contains(&r.instance))
                .filter_map(|r| r.cost)
                .collect();
            let successes = runs.iter().filter(|r| r.success).count();
            ModeSummary {
                mode: mode.clone(),
                runs: runs.len(),
                successes,
                success_rate: if runs.is_empty() {
                    0.0
                } else {
                    successes as f64 / runs.len() as f64
                },
                mean_time_s: mean(&times).unwrap_or(0.0),
                mean_cost_common: mean(&costs_common),
                mean_cost_all: mean(&costs_all),
            }
        })
        .collect();

    let cost_of = |name: &str| {
        per_mode
            .iter()
            .find(|m| m.mode == name)
            .and_then(|m| m.mean_cost_common)
    };
    let aa_cost_reduction = match (cost_of("aa"), cost_of("cardinal")) {
        (Some(aa), Some(card)) if card > 0.0 => Some(1.0 - aa / card),
        _ => None,
    };
    Summary {
        modes: per_mode,
        common_instances: common.len(),
        aa_cost_reduction,
    }
}

pub fn write_csv<W: Write>(out: W, records: &[RunRecord]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    if records.is_empty() {
        w.write_record([
            "instance", "mode", "agents", "success", "time_s", "cost", "valid", "seed",
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> csv::Result<Vec<RunRecord>> {
    csv::Reader::from_reader(input).deserialize().collect()
}

#[derive(Serialize)]
struct JsonReport<'a> {
    records: &'a [RunRecord],
    summary: &'a Summary,
}

pub fn write_json<W: Write>(
    out: W,
    records: &[RunRecord],
    summary: &Summary,
) -> serde_json::Result<()> {
    serde_json::to_writer_pretty(out, &JsonReport { records, summary })
}
