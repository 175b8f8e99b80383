//! Command-line front end: configuration-driven simulations, named
//! benchmarks and checkpoint resume.
//!
//! Exit codes: 0 = pass, 1 = an acceptance tolerance was exceeded,
//! 2 = error. The worker count honours the `LBM_NUM_THREADS` environment
//! variable.

mod benchmarks;
mod config;
mod manifest;
mod output;

use clap::{Parser, Subcommand};
use cuboid_lbm::solver;
use manifest::RunManifest;
use output::OutputSink;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "cuboid-lbm", version, about = "Central-moment LBM on cuboid D3Q27 grids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation described by a config file.
    Simulate {
        config: PathBuf,
        /// Output directory for snapshots, checkpoints and the manifest.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run a named benchmark preset.
    Benchmark {
        /// duct | pulsatile | cavity | shallow-cavity | stability
        name: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Config overrides, e.g. --set run.corrections=off
        #[arg(long = "set")]
        sets: Vec<String>,
        /// Womersley number of the pulsatile preset.
        #[arg(long, default_value_t = 3.09)]
        wo: f64,
        /// Step budget per stability probe.
        #[arg(long, default_value_t = 20_000)]
        budget: u64,
        /// Comma-separated omega_nu sweep points of the stability preset.
        #[arg(long)]
        points: Option<String>,
    },
    /// Continue a checkpointed run to its configured end.
    Resume {
        checkpoint: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn init_thread_pool() {
    if let Ok(value) = std::env::var("LBM_NUM_THREADS") {
        if let Ok(threads) = value.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build_global();
        } else {
            eprintln!("warning: ignoring unparsable LBM_NUM_THREADS={value}");
        }
    }
}

fn run() -> Result<bool, cuboid_lbm::Error> {
    let cli = Cli::parse();
    init_thread_pool();
    match cli.command {
        Command::Simulate { config, out } => {
            let config = config::parse_config(&config)?;
            let state = solver::initialize(&config)?;
            simulate(state, &config, &out)
        }
        Command::Resume { checkpoint, out } => {
            let (config, state) = output::read_checkpoint(&checkpoint)?;
            println!("resuming at step {}", state.step);
            simulate(state, &config, &out)
        }
        Command::Benchmark {
            name,
            out,
            sets,
            wo,
            budget,
            points,
        } => {
            let mut opts = benchmarks::BenchmarkOptions {
                sets,
                womersley: wo,
                budget,
                ..Default::default()
            };
            if let Some(points) = points {
                opts.omega_points = points
                    .split(',')
                    .map(|p| {
                        p.trim().parse::<f64>().map_err(|_| {
                            cuboid_lbm::Error::InvalidParameter(format!(
                                "cannot parse sweep point `{p}`"
                            ))
                        })
                    })
                    .collect::<Result<_, _>>()?;
            }
            benchmarks::run_benchmark(&name, &out, &opts)
        }
    }
}

fn simulate(
    state: solver::SimulationState,
    config: &solver::SimulationConfig,
    out: &std::path::Path,
) -> Result<bool, cuboid_lbm::Error> {
    std::fs::create_dir_all(out)
        .map_err(|e| cuboid_lbm::Error::io(out.display().to_string(), e))?;
    let sink = OutputSink { dir: out, config };
    let t0 = Instant::now();
    let report = solver::run_state(state, config, |s| sink.emit(s))?;
    sink.emit(&report.state);
    let manifest = RunManifest::new(config, &report, t0.elapsed());
    output::write_atomic(
        &out.join("manifest.txt"),
        manifest.render(report.state.n_nodes()).as_bytes(),
    )?;
    println!(
        "{} after {} steps ({:.2} MLUPS)",
        manifest.outcome,
        report.state.step,
        manifest.mlups(report.state.n_nodes())
    );
    Ok(!report.blew_up())
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
