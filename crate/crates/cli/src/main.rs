mod config;
mod run;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use config::Overrides;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "selfcorr", version, about = "Build, probe and simulate symmetry-protected memory models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dump the model as JSON.
    Build(Common),
    /// Exact logical energy barrier with a replayable witness.
    Barrier(Common),
    /// Metropolis trajectories (JSONL) plus a per-trial summary CSV.
    Sample(Common),
    /// Memory-time estimates (CSV).
    Memory(Common),
    /// Loop census on the periodic cubic lattice (CSV).
    Peierls(Common),
    /// Check the ancilla extension and emergent constraints (JSON).
    GaugeVerify(Common),
}

#[derive(Args, Clone)]
struct Common {
    /// TOML config; flags override its values.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// rbh, rbh-trivial, gcc or color2d.
    #[arg(long)]
    model: Option<String>,
    /// Lattice sizes, comma separated.
    #[arg(long = "L", value_delimiter = ',')]
    l: Option<Vec<i64>>,
    /// box, cylinder, torus-interval or half-space.
    #[arg(long)]
    layout: Option<String>,
    /// Colex sizes for gcc and color2d, comma separated.
    #[arg(long, value_delimiter = ',')]
    size: Option<Vec<i64>>,
    /// Colex exchange file for gcc.
    #[arg(long)]
    colex_file: Option<PathBuf>,
    /// enforced or none.
    #[arg(long)]
    symmetry: Option<String>,
    #[arg(long)]
    move_radius: Option<i64>,
    /// Inverse temperatures, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    beta: Option<Vec<f64>>,
    #[arg(long)]
    trials: Option<i64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Events per sampled trajectory.
    #[arg(long)]
    events: Option<i64>,
    /// Event cap per memory trial.
    #[arg(long)]
    cap: Option<i64>,
    #[arg(long)]
    max_energy: Option<f64>,
    #[arg(long)]
    max_nodes: Option<i64>,
    /// Longest loop counted.
    #[arg(long)]
    k_max: Option<i64>,
    /// primal, dual or both.
    #[arg(long)]
    sublattice: Option<String>,
    /// Prefactor c in the bound c L^3 5^k.
    #[arg(long)]
    bound_c: Option<f64>,
    /// Worker threads.
    #[arg(long, env = "SELFCORR_WORKERS")]
    workers: Option<usize>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            model: self.model.clone(),
            l: self.l.clone(),
            layout: self.layout.clone(),
            size: self.size.clone(),
            colex_file: self.colex_file.clone(),
            symmetry: self.symmetry.clone(),
            move_radius: self.move_radius,
            beta: self.beta.clone(),
            trials: self.trials,
            seed: self.seed,
            output: self.output.clone(),
            events: self.events,
            cap: self.cap,
            max_energy: self.max_energy,
            max_nodes: self.max_nodes,
            k_max: self.k_max,
            sublattice: self.sublattice.clone(),
            bound_c: self.bound_c,
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    let (name, common, f): (&str, &Common, fn(&config::ExperimentConfig) -> Result<run::Artifacts>) = match &cli.command
    {
        Command::Build(c) => ("build", c, run::build_cmd),
        Command::Barrier(c) => ("barrier", c, run::barrier_cmd),
        Command::Sample(c) => ("sample", c, run::sample_cmd),
        Command::Memory(c) => ("memory", c, run::memory_cmd),
        Command::Peierls(c) => ("peierls", c, run::peierls_cmd),
        Command::GaugeVerify(c) => ("gauge-verify", c, run::gauge_verify_cmd),
    };
    if let Some(w) = common.workers {
        if w == 0 {
            anyhow::bail!("--workers must be positive");
        }
        rayon::ThreadPoolBuilder::new().num_threads(w).build_global().context("starting worker pool")?;
    }
    let file = match &common.config {
        Some(p) => {
            let (cfg, text) = config::load_file(p)?;
            Some((cfg, text, p.clone()))
        }
        None => None,
    };
    let cfg = config::resolve(name, file, common.overrides())?;
    let art = f(&cfg)?;
    match &cfg.output {
        Some(path) => {
            std::fs::write(path, &art.primary).with_context(|| format!("writing {}", path.display()))?;
            for (ext, body) in &art.extra {
                let p = path.with_extension(ext);
                std::fs::write(&p, body).with_context(|| format!("writing {}", p.display()))?;
            }
        }
        None => print!("{}", art.primary),
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
