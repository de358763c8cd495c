//! Flat TOML experiment configuration and the built-in presets.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use grds::{OptimizerConfig, SyncConfig, Topology};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Config failure, with the 1-based line of the offending key when known.
#[derive(Debug, Error, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl ConfigError {
    fn new(line: Option<usize>, message: impl Into<String>) -> Self {
        Self {
            line,
            message: message.into(),
        }
    }
}

/// Which rows an experiment evaluates. `Eta` and `Rho` each produce a
/// classic-domain and an extended-domain row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeChoice {
    Sigma0,
    Eta,
    Rho,
    Eps,
    QRandom,
    QGreedy,
}

impl SchemeChoice {
    pub const ALL: [SchemeChoice; 6] = [
        SchemeChoice::Sigma0,
        SchemeChoice::Eta,
        SchemeChoice::Rho,
        SchemeChoice::Eps,
        SchemeChoice::QRandom,
        SchemeChoice::QGreedy,
    ];
}

impl FromStr for SchemeChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "sigma0" => Self::Sigma0,
            "eta" => Self::Eta,
            "rho" => Self::Rho,
            "eps" => Self::Eps,
            "q_random" => Self::QRandom,
            "q_greedy" => Self::QGreedy,
            other => {
                return Err(format!(
                    "unknown scheme '{other}' (expected sigma0, eta, rho, eps, q_random, q_greedy)"
                ))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum TopologySource {
    Descriptor(Topology),
    EdgeList(PathBuf),
}

impl std::fmt::Display for TopologySource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Descriptor(t) => write!(f, "{t}"),
            Self::EdgeList(p) => write!(f, "edge_list:{}", p.display()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub name: String,
    pub topology: TopologySource,
    pub noise_sigma: f64,
    /// True states are drawn uniformly from `[-state_scale, state_scale]`.
    pub state_scale: f64,
    pub measurement_seed: u64,
    pub optimizer_seed: u64,
    pub schemes: Vec<SchemeChoice>,
    pub optimizer: OptimizerConfig,
    pub max_rounds: usize,
    pub sim_tol: f64,
    pub stride: usize,
    pub output_dir: Option<PathBuf>,
    /// Decimal places in `report.csv`.
    pub precision: usize,
}

impl ExperimentConfig {
    /// Defaults for everything except topology and seeds.
    pub fn new(name: &str, topology: Topology, measurement_seed: u64, optimizer_seed: u64) -> Self {
        Self {
            name: name.to_string(),
            topology: TopologySource::Descriptor(topology),
            noise_sigma: 0.1,
            state_scale: 10.0,
            measurement_seed,
            optimizer_seed,
            schemes: SchemeChoice::ALL.to_vec(),
            optimizer: OptimizerConfig {
                seed: optimizer_seed,
                ..OptimizerConfig::default()
            },
            max_rounds: 50_000,
            sim_tol: 1e-12,
            stride: 1,
            output_dir: None,
            precision: 6,
        }
    }

    pub fn sync_config(&self) -> SyncConfig {
        SyncConfig {
            max_rounds: self.max_rounds,
            tol: self.sim_tol,
            stride: self.stride,
            ..SyncConfig::default()
        }
    }

    /// Sets both the measurement and optimizer seeds.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.measurement_seed = seed;
        self.optimizer_seed = seed;
        self.optimizer.seed = seed;
        self
    }

    /// Reads a config file; a relative `edge_list` path is resolved against
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new(None, format!("{}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        if let TopologySource::EdgeList(p) = &mut cfg.topology {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    *p = dir.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| {
            let line = e.span().map(|s| line_at(text, s.start));
            ConfigError::new(line, e.message().trim().to_string())
        })?;
        raw.validate(text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.check().map_err(|(_, m)| ConfigError::new(None, m))
    }

    /// Returns the offending key alongside the message.
    fn check(&self) -> Result<(), (String, String)> {
        let err = |k: &str, m: &str| Err((k.to_string(), m.to_string()));
        if !(self.noise_sigma >= 0.0) {
            return err("noise_sigma", "noise_sigma must be >= 0");
        }
        if !(self.state_scale > 0.0) {
            return err("state_scale", "state_scale must be > 0");
        }
        if self.schemes.is_empty() {
            return err("schemes", "schemes must not be empty");
        }
        if self.max_rounds == 0 {
            return err("max_rounds", "max_rounds must be > 0");
        }
        if self.stride == 0 {
            return err("stride", "stride must be > 0");
        }
        if !(self.sim_tol > 0.0) {
            return err("sim_tol", "sim_tol must be > 0");
        }
        self.optimizer.validate().map_err(|e| {
            let msg = e.to_string();
            let field = msg
                .split("optimizer: ")
                .nth(1)
                .and_then(|rest| rest.split_whitespace().next())
                .unwrap_or("iterations");
            (format!("optimizer_{field}"), msg)
        })
    }
}

fn line_at(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Line of the first assignment to `key`, for diagnostics raised after parsing.
fn line_of(text: &str, key: &str) -> Option<usize> {
    text.lines()
        .position(|l| {
            l.trim_start()
                .strip_prefix(key)
                .is_some_and(|rest| rest.trim_start().starts_with('='))
        })
        .map(|i| i + 1)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    name: Option<String>,
    topology: Option<String>,
    edge_list: Option<PathBuf>,
    topology_seed: Option<u64>,
    noise_sigma: Option<f64>,
    state_scale: Option<f64>,
    measurement_seed: Option<u64>,
    optimizer_seed: Option<u64>,
    schemes: Option<Vec<String>>,
    optimizer_iterations: Option<usize>,
    optimizer_sigma0: Option<f64>,
    optimizer_decay: Option<f64>,
    optimizer_margin: Option<f64>,
    optimizer_restarts: Option<usize>,
    max_rounds: Option<usize>,
    sim_tol: Option<f64>,
    stride: Option<usize>,
    output_dir: Option<PathBuf>,
    precision: Option<usize>,
}

impl RawConfig {
    fn validate(self, text: &str) -> Result<ExperimentConfig, ConfigError> {
        let at = |key: &str, msg: String| ConfigError::new(line_of(text, key), msg);
        let topology = match (self.topology, self.edge_list) {
            (Some(_), Some(_)) => {
                return Err(at(
                    "edge_list",
                    "give either topology or edge_list, not both".into(),
                ))
            }
            (None, None) => return Err(ConfigError::new(None, "missing topology or edge_list")),
            (None, Some(p)) => {
                if self.topology_seed.is_some() {
                    return Err(at(
                        "topology_seed",
                        "topology_seed needs a random topology".into(),
                    ));
                }
                TopologySource::EdgeList(p)
            }
            (Some(s), None) => {
                let mut t: Topology = s.parse().map_err(|e| at("topology", format!("{e}")))?;
                if let Some(seed) = self.topology_seed {
                    match &mut t {
                        Topology::RandomRegular { seed: s, .. }
                        | Topology::RamanujanCandidate { seed: s, .. } => *s = seed,
                        _ => {
                            return Err(at(
                                "topology_seed",
                                format!("topology_seed given but '{t}' is not random"),
                            ))
                        }
                    }
                }
                TopologySource::Descriptor(t)
            }
        };
        let measurement_seed = self
            .measurement_seed
            .ok_or_else(|| ConfigError::new(None, "missing measurement_seed"))?;
        let optimizer_seed = self
            .optimizer_seed
            .ok_or_else(|| ConfigError::new(None, "missing optimizer_seed"))?;

        let mut cfg = ExperimentConfig::new(
            "",
            Topology::Complete { n: 2 },
            measurement_seed,
            optimizer_seed,
        );
        cfg.topology = topology;
        cfg.name = self.name.unwrap_or_else(|| "experiment".into());
        if let Some(list) = self.schemes {
            cfg.schemes = list
                .iter()
                .map(|s| s.parse())
                .collect::<Result<_, _>>()
                .map_err(|e| at("schemes", e))?;
        }
        macro_rules! set {
            ($($src:ident => $dst:expr),* $(,)?) => {
                $(if let Some(v) = self.$src { $dst = v; })*
            };
        }
        set! {
            noise_sigma => cfg.noise_sigma,
            state_scale => cfg.state_scale,
            optimizer_iterations => cfg.optimizer.iterations,
            optimizer_sigma0 => cfg.optimizer.sigma0,
            optimizer_decay => cfg.optimizer.decay,
            optimizer_margin => cfg.optimizer.margin,
            optimizer_restarts => cfg.optimizer.restarts,
            max_rounds => cfg.max_rounds,
            sim_tol => cfg.sim_tol,
            stride => cfg.stride,
            precision => cfg.precision,
        }
        cfg.output_dir = self.output_dir;
        cfg.check()
            .map_err(|(key, msg)| ConfigError::new(line_of(text, &key), msg))?;
        Ok(cfg)
    }
}

pub const PRESETS: [&str; 4] = ["smallworld22", "circulant36", "friendship19", "ramanujan16"];

/// Canonical config for one of the four case studies.
pub fn preset(name: &str) -> Result<ExperimentConfig, ConfigError> {
    let topology = match name {
        "smallworld22" => Topology::small_world_default(),
        "circulant36" => Topology::Circulant {
            n: 36,
            offsets: vec![1, 2],
        },
        "friendship19" => Topology::Friendship { k: 9 },
        "ramanujan16" => Topology::RamanujanCandidate {
            n: 16,
            c: 3,
            seed: 0,
        },
        other => {
            return Err(ConfigError::new(
                None,
                format!("unknown preset '{other}' (expected {})", PRESETS.join(", ")),
            ))
        }
    };
    Ok(ExperimentConfig::new(name, topology, 1, 1))
}
