use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use aasipp_core::{
    parse_instance, parse_map, CellIndex, GridMap, PlannerMode, Priorities, Protocol,
};
use thiserror::Error;

/// Default per-run wall-clock limit.
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(300);

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {}", path.display())]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("bad map {}", path.display())]
    Map {
        path: PathBuf,
        source: aasipp_core::MapError,
    },
    #[error("bad scenario {}", path.display())]
    Scenario {
        path: PathBuf,
        source: aasipp_core::InstanceError,
    },
    #[error("{0}")]
    Invalid(String),
}

/// Where the agents of each instance come from.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    /// One instance per scenario file, agents in file order.
    Scenarios(Vec<Vec<(CellIndex, CellIndex)>>),
    /// `instances` generated instances seeded `seed`, `seed + 1`, ...
    Generate(Protocol),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeChoice {
    AnyAngle,
    Cardinal,
    Both,
}

impl ModeChoice {
    pub fn modes(self) -> Vec<PlannerMode> {
        match self {
            ModeChoice::AnyAngle => vec![PlannerMode::ANY_ANGLE],
            ModeChoice::Cardinal => vec![PlannerMode::CARDINAL],
            ModeChoice::Both => vec![PlannerMode::CARDINAL, PlannerMode::ANY_ANGLE],
        }
    }
}

impl FromStr for ModeChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "aa" => Ok(ModeChoice::AnyAngle),
            "cardinal" => Ok(ModeChoice::Cardinal),
            "both" => Ok(ModeChoice::Both),
            _ => Err(format!("unknown mode `{s}`, expected aa, cardinal or both")),
        }
    }
}

/// Parses `separated` or `walk:STEPS`.
pub fn parse_protocol(s: &str) -> Result<Protocol, String> {
    match s.split_once(':') {
        None if s == "separated" => Ok(Protocol::Separated),
        Some(("walk", steps)) => steps
            .parse()
            .map(Protocol::RandomWalk)
            .map_err(|_| format!("bad walk length `{steps}`")),
        _ => Err(format!(
            "unknown generator `{s}`, expected separated or walk:STEPS"
        )),
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub map_name: String,
    pub grid: GridMap,
    pub source: Source,
    /// Agents per instance; scenario files are cut to this many.
    pub agents: Option<usize>,
    pub instances: usize,
    pub seed: u64,
    pub modes: Vec<PlannerMode>,
    pub timeout: Duration,
    pub validate: bool,
    pub priorities: Priorities,
    pub trace: bool,
    /// Worker threads; `None` uses rayon's default.
    pub jobs: Option<usize>,
}

impl BenchConfig {
    pub fn new(map_name: impl Into<String>, grid: GridMap, source: Source) -> Self {
        Self {
            map_name: map_name.into(),
            grid,
            source,
            agents: None,
            instances: 1,
            seed: 0,
            modes: ModeChoice::Both.modes(),
            timeout: DEFAULT_TIMEOUT,
            validate: true,
            priorities: Priorities::default(),
            trace: false,
            jobs: None,
        }
    }

    pub fn check(&self) -> Result<(), ConfigError> {
        if self.modes.is_empty() {
            return Err(ConfigError::Invalid("no planner mode selected".into()));
        }
        match &self.source {
            Source::Generate(_) if self.agents.is_none() => {
                Err(ConfigError::Invalid("--generate needs --agents".into()))
            }
            Source::Scenarios(files) if files.is_empty() => {
                Err(ConfigError::Invalid("no scenario given".into()))
            }
            _ => Ok(()),
        }
    }
}

pub fn load_map(path: &Path) -> Result<GridMap, ConfigError> {
    let text = read(path)?;
    parse_map(&text).map_err(|source| ConfigError::Map {
        path: path.to_owned(),
        source,
    })
}

pub fn load_scenario(path: &Path) -> Result<Vec<(CellIndex, CellIndex)>, ConfigError> {
    let text = read(path)?;
    parse_instance(&text).map_err(|source| ConfigError::Scenario {
        path: path.to_owned(),
        source,
    })
}

fn read(path: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.to_owned(),
        source,
    })
}
