use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use grds::spectral;
use grds_cli::{
    load_graph, preset, run_experiment, spectral_report, CliError, ExperimentConfig, TopologySource,
};

#[derive(Parser)]
#[command(
    name = "grds",
    version,
    about = "Regularized distributed estimation experiments"
)]
struct Cli {
    /// Directory for CSV/JSON outputs (overrides output_dir in the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Replaces both the measurement and optimizer seeds.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    max_rounds: Option<usize>,
    /// Record every N-th simulation round.
    #[arg(long, global = true)]
    stride: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run { config: PathBuf },
    /// Run a built-in case study: smallworld22, circulant36, friendship19, ramanujan16.
    Preset { name: String },
    /// Spectral summary of an edge-list graph.
    Spectral { edge_list: PathBuf },
}

fn apply_overrides(cli: &Cli, mut cfg: ExperimentConfig) -> ExperimentConfig {
    if let Some(seed) = cli.seed {
        cfg = cfg.with_seed(seed);
    }
    if let Some(r) = cli.max_rounds {
        cfg.max_rounds = r;
    }
    if let Some(s) = cli.stride {
        cfg.stride = s;
    }
    if cli.out.is_some() {
        cfg.output_dir = cli.out.clone();
    }
    cfg
}

fn experiment(cfg: ExperimentConfig) -> Result<(), CliError> {
    let report = run_experiment(&cfg)?;
    report.write_report_csv(std::io::stdout().lock())?;
    let s = &report.spectral;
    println!(
        "# {} n={} lambda1={:.6} lambda_max={:.6} varsigma={:.6} mu={:.6}",
        report.topology,
        report.nodes,
        s.summary.lambda1_nl,
        s.summary.lambda_max_nl,
        s.summary.varsigma_nl,
        s.mu
    );
    if let Some(dir) = &cfg.output_dir {
        report.write_outputs(dir)?;
        println!("# outputs written to {}", dir.display());
    }
    Ok(())
}

fn spectral_command(path: PathBuf, out: Option<PathBuf>) -> Result<(), CliError> {
    let g = load_graph(&TopologySource::EdgeList(path))?;
    let report = spectral_report(&g)?;
    let bounds = if g.node_count() <= spectral::CHEEGER_MAX_NODES {
        Some(spectral::bound_report(&g)?)
    } else {
        None
    };
    let json = serde_json::json!({
        "nodes": g.node_count(),
        "edges": g.edge_count(),
        "spectral": report,
        "bounds": bounds,
    });
    println!("{}", serde_json::to_string_pretty(&json).expect("json"));
    if let Some(dir) = out {
        std::fs::create_dir_all(&dir)?;
        let nl = spectral::normalized_laplacian_spectrum(&g)?;
        nl.write_csv(std::fs::File::create(dir.join("spectrum.csv"))?)?;
        let l = spectral::laplacian_spectrum(&g)?;
        l.write_csv(std::fs::File::create(dir.join("laplacian_spectrum.csv"))?)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { config } => ExperimentConfig::load(config)
            .map_err(CliError::from)
            .and_then(|cfg| experiment(apply_overrides(&cli, cfg))),
        Command::Preset { name } => preset(name)
            .map_err(CliError::from)
            .and_then(|cfg| experiment(apply_overrides(&cli, cfg))),
        Command::Spectral { edge_list } => spectral_command(edge_list.clone(), cli.out.clone()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
