//! Runs one experiment: topology, measurements, every requested scheme,
//! the greedy optimizer and the synchronous simulation of each row.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use grds::estimation::{aggregate, generate_measurements};
use grds::optimizer::{greedy_optimize, OptimizationTrace};
use grds::schemes::{self, DomainClass, IterativeScheme, RegularizationVector, SchemeParameter};
use grds::simulator::{build_rules, empirical_rate, run_sync, SimulationResult};
use grds::spectral::{self, BoundReport, SpectralSummary, Spectrum, CHEEGER_MAX_NODES};
use grds::{Graph, MeasurementSet, SchemeLabel};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::config::{ConfigError, ExperimentConfig, SchemeChoice, TopologySource};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error("topology: {0}")]
    Topology(grds::Error),
    #[error("numerical failure: {0}")]
    Numerical(#[from] grds::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 for bad input, 3 for numerical failures, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Topology(_) => 2,
            Self::Numerical(_) => 3,
            Self::Io(_) => 1,
        }
    }
}

/// Relative tolerance between the fitted rate and the CRI.
pub const RATE_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, Serialize)]
pub struct SchemeRow {
    pub label: String,
    pub scheme: SchemeLabel,
    /// Scalar η, ρ or ε; `None` for Σ₀ and vector-valued rows.
    pub parameter: Option<f64>,
    /// Domain the parameter was selected over.
    pub domain: String,
    pub cri: f64,
    pub spectral_convergent: bool,
    /// Simulation settled with relative-difference error within 1e-6.
    pub converged: bool,
    pub empirical_rate: f64,
    /// Too few rounds for a reliable slope.
    pub rate_flagged: bool,
    pub rounds: usize,
    pub relative_diff_error: f64,
}

impl SchemeRow {
    /// `None` when the rate cannot be compared (flagged or not convergent).
    pub fn rate_matches_cri(&self) -> Option<bool> {
        (self.converged && !self.rate_flagged)
            .then(|| (self.empirical_rate - self.cri).abs() <= RATE_TOLERANCE * self.cri)
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SpectralReport {
    #[serde(flatten)]
    pub summary: SpectralSummary,
    pub mu: f64,
    pub bipartite: bool,
    pub varsigma_lt_1: bool,
}

pub fn spectral_report(g: &Graph) -> grds::Result<SpectralReport> {
    let summary = spectral::summary(g)?;
    Ok(SpectralReport {
        mu: summary.mu(),
        bipartite: g.is_bipartite(),
        varsigma_lt_1: summary.varsigma_nl < 1.0,
        summary,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub name: String,
    pub topology: String,
    pub nodes: usize,
    pub edges: usize,
    pub noise_sigma: f64,
    pub measurement_seed: u64,
    pub optimizer_seed: u64,
    pub spectral: SpectralReport,
    /// Present for graphs with at most 24 nodes.
    pub bounds: Option<BoundReport>,
    pub rows: Vec<SchemeRow>,
    #[serde(skip)]
    pub spectrum: Spectrum,
    #[serde(skip)]
    pub simulations: Vec<SimulationResult>,
    #[serde(skip)]
    pub optimizer_trace: Option<OptimizationTrace>,
    #[serde(skip)]
    precision: usize,
    #[serde(skip)]
    stride: usize,
}

impl ExperimentReport {
    pub fn row(&self, label: &str) -> Option<&SchemeRow> {
        self.rows.iter().find(|r| r.label == label)
    }

    pub fn write_report_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let p = self.precision;
        writeln!(
            w,
            "label,scheme,parameter,domain,cri,spectral_convergent,converged,empirical_rate,rate_flagged,rounds,relative_diff_error"
        )?;
        for r in &self.rows {
            let param = r.parameter.map(|v| format!("{v:.p$}")).unwrap_or_default();
            writeln!(
                w,
                "{},{},{param},{},{:.p$},{},{},{:.p$},{},{},{:.3e}",
                r.label,
                r.scheme,
                r.domain,
                r.cri,
                r.spectral_convergent,
                r.converged,
                r.empirical_rate,
                r.rate_flagged,
                r.rounds,
                r.relative_diff_error
            )?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Writes `report.csv`, `report.json`, `spectrum.csv`, one
    /// `trace_<label>.csv` and `residual_<label>.csv` per row, and the
    /// optimizer traces when the greedy row ran.
    pub fn write_outputs(&self, dir: &Path) -> Result<(), CliError> {
        std::fs::create_dir_all(dir)?;
        let create = |name: &str| File::create(dir.join(name)).map(BufWriter::new);
        self.write_report_csv(create("report.csv")?)?;
        let mut json = create("report.json")?;
        writeln!(json, "{}", self.to_json())?;
        self.spectrum.write_csv(create("spectrum.csv")?)?;
        for (row, sim) in self.rows.iter().zip(&self.simulations) {
            sim.write_trajectory_csv(create(&format!("trace_{}.csv", row.label))?)?;
            sim.write_residual_csv(create(&format!("residual_{}.csv", row.label))?, self.stride)?;
        }
        if let Some(t) = &self.optimizer_trace {
            t.write_csv(create("optimizer_trace.csv")?)?;
            t.write_q_csv(create("optimizer_q.csv")?, self.stride)?;
        }
        Ok(())
    }
}

pub fn load_graph(source: &TopologySource) -> Result<Graph, CliError> {
    let g = match source {
        TopologySource::Descriptor(t) => Graph::generate(t).map_err(CliError::Topology)?,
        TopologySource::EdgeList(p) => {
            let f = File::open(p).map_err(|e| CliError::Topology(e.into()))?;
            Graph::read_edge_list(std::io::BufReader::new(f)).map_err(CliError::Topology)?
        }
    };
    if !g.is_connected() {
        return Err(CliError::Topology(grds::Error::Disconnected));
    }
    Ok(g)
}

/// Uniform true states in `[-scale, scale]` from a stream separate from
/// the measurement noise.
pub fn true_state(n: usize, scale: f64, seed: u64) -> DVector<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    DVector::from_fn(n, |_, _| rng.random_range(-scale..=scale))
}

/// Uniform draw from `(μ + margin, 1 - margin)` per node.
pub fn random_q(g: &Graph, margin: f64, seed: u64) -> grds::Result<Vec<f64>> {
    let dom = schemes::regularization_domain(g)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    Ok((0..g.node_count())
        .map(|_| rng.random_range(dom.lower + margin..dom.upper - margin))
        .collect())
}

struct Runner<'a> {
    g: &'a Graph,
    m: &'a MeasurementSet,
    cfg: &'a ExperimentConfig,
    rows: Vec<SchemeRow>,
    sims: Vec<SimulationResult>,
}

impl Runner<'_> {
    fn push(&mut self, label: &str, domain: &str, scheme: IterativeScheme) -> grds::Result<()> {
        let cri = scheme.cri()?;
        let rules = build_rules(self.g, self.m, scheme.q.as_slice())?;
        let x0 = DVector::zeros(self.g.node_count());
        let sim = run_sync(self.g, &rules, &x0, &self.cfg.sync_config())?;
        let rate = empirical_rate(&sim);
        let parameter = match scheme.parameter {
            SchemeParameter::Eta(v) | SchemeParameter::Rho(v) | SchemeParameter::Eps(v) => Some(v),
            SchemeParameter::None | SchemeParameter::Vector => None,
        };
        self.rows.push(SchemeRow {
            label: label.to_string(),
            scheme: scheme.label,
            parameter,
            domain: domain.to_string(),
            cri,
            spectral_convergent: scheme.converges(),
            converged: sim.converged,
            empirical_rate: rate.rate,
            rate_flagged: rate.flagged,
            rounds: sim.rounds_run,
            relative_diff_error: sim.relative_diff_error,
        });
        self.sims.push(sim);
        Ok(())
    }
}

fn domain_name(d: DomainClass) -> &'static str {
    match d {
        DomainClass::Classic => "classic",
        DomainClass::Extended => "extended",
        DomainClass::Outside => "outside",
        DomainClass::Unconstrained => "unconstrained",
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport, CliError> {
    cfg.validate()?;
    let g = load_graph(&cfg.topology)?;
    let n = g.node_count();
    let x = true_state(n, cfg.state_scale, cfg.measurement_seed);
    let m = generate_measurements(&g, &x, cfg.noise_sigma, cfg.measurement_seed)?;
    let xt = aggregate(&g, &m)?;
    let spectral = spectral_report(&g)?;
    let bounds = if n <= CHEEGER_MAX_NODES {
        Some(spectral::bound_report(&g)?)
    } else {
        None
    };

    let mut run = Runner {
        g: &g,
        m: &m,
        cfg,
        rows: Vec::new(),
        sims: Vec::new(),
    };
    let mut trace = None;
    for choice in &cfg.schemes {
        match choice {
            SchemeChoice::Sigma0 => {
                run.push("sigma0", "unconstrained", schemes::build_sigma0(&g, &xt)?)?
            }
            SchemeChoice::Eta => {
                let eta = schemes::classic_optimal_eta(&g)?;
                run.push(
                    "eta_classic",
                    "classic",
                    schemes::build_unchecked(&g, &xt, SchemeParameter::Eta(eta))?,
                )?;
                let eta = schemes::optimal_eta(&g)?;
                run.push(
                    "eta_extended",
                    "extended",
                    schemes::build_sigma_eta(&g, &xt, eta)?,
                )?;
            }
            SchemeChoice::Rho => {
                let rho = schemes::classic_optimal_rho(&g, 1e-9)?;
                run.push(
                    "rho_classic",
                    "classic",
                    schemes::build_unchecked(&g, &xt, SchemeParameter::Rho(rho))?,
                )?;
                let rho = schemes::optimal_rho(&g, 1e-9)?;
                run.push(
                    "rho_extended",
                    "extended",
                    schemes::build_sigma_rho(&g, &xt, rho)?,
                )?;
            }
            SchemeChoice::Eps => {
                let s = schemes::build_sigma_eps(&g, &xt, schemes::optimal_eps(&g)?)?;
                let domain = domain_name(s.domain);
                run.push("eps", domain, s)?;
            }
            SchemeChoice::QRandom => {
                let q = random_q(&g, cfg.optimizer.margin, cfg.optimizer_seed)?;
                let s = schemes::build_sigma_q(&g, &xt, &RegularizationVector::new(q)?)?;
                run.push("q_random", "extended", s)?;
            }
            SchemeChoice::QGreedy => {
                let opt = grds::OptimizerConfig {
                    seed: cfg.optimizer_seed,
                    ..cfg.optimizer.clone()
                };
                let t = greedy_optimize(&g, &opt)?;
                let q = RegularizationVector::new(t.final_q().to_vec())?;
                run.push("q_greedy", "extended", schemes::build_sigma_q(&g, &xt, &q)?)?;
                trace = Some(t);
            }
        }
    }

    Ok(ExperimentReport {
        name: cfg.name.clone(),
        topology: cfg.topology.to_string(),
        nodes: n,
        edges: g.edge_count(),
        noise_sigma: cfg.noise_sigma,
        measurement_seed: cfg.measurement_seed,
        optimizer_seed: cfg.optimizer_seed,
        spectral,
        bounds,
        rows: run.rows,
        spectrum: spectral::normalized_laplacian_spectrum(&g)?,
        simulations: run.sims,
        optimizer_trace: trace,
        precision: cfg.precision,
        stride: cfg.stride,
    })
}
