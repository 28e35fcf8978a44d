//! `pwgraph`: constants, inequality checks, sampling bounds and frame
//! reconstruction for weighted graphs, reported as JSON.
//!
//! Exit status: 0 when every check passed, 1 when an inequality check failed
//! (the JSON record is still written), 2 on usage, input or precondition errors.

mod commands;
mod load;
mod render;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use pwgraph::{Decomposition, Exponent, Graph, ReconstructOptions};

use commands::Outcome;

#[derive(Parser, Debug)]
#[command(name = "pwgraph", version, about = "Poincare and Plancherel-Polya constants, sampling sets and frame reconstruction on weighted graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write the report here instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Human-readable table instead of JSON
    #[arg(long, global = true)]
    pretty: bool,
}

#[derive(Args, Debug)]
struct GraphArgs {
    /// Edge list, one `u<TAB>v<TAB>w` per line
    #[arg(long, value_name = "PATH")]
    graph: PathBuf,

    /// Vertex weights, one `v<TAB>nu` per line (default 1)
    #[arg(long, value_name = "PATH")]
    nu: Option<PathBuf>,
}

impl GraphArgs {
    fn load(&self) -> Result<Graph> {
        load::graph(&self.graph, self.nu.as_deref())
    }
}

fn parse_p(s: &str) -> std::result::Result<Exponent<f64>, String> {
    s.parse::<Exponent<f64>>().map_err(|e| e.to_string())
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Shell constants of a partition and/or chain
    Constants {
        #[command(flatten)]
        graph: GraphArgs,
        /// Partition file, one shell per line
        #[arg(long, value_name = "PATH")]
        partition: Option<PathBuf>,
        /// Chain file, one shell per line
        #[arg(long, value_name = "PATH")]
        chain: Option<PathBuf>,
        #[arg(long, value_name = "FLOAT|inf", value_parser = parse_p)]
        p: Exponent<f64>,
    },
    /// Forward and reverse Poincare inequalities on a signal
    Poincare {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, value_name = "PATH")]
        partition: PathBuf,
        /// Defaults to the partition shells
        #[arg(long, value_name = "PATH")]
        chain: Option<PathBuf>,
        #[arg(long, value_name = "PATH")]
        signal: PathBuf,
        #[arg(long, value_name = "FLOAT|inf", value_parser = parse_p)]
        p: Exponent<f64>,
    },
    /// Per-shell estimates along a partition
    Shells {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, value_name = "PATH")]
        partition: PathBuf,
        #[arg(long, value_name = "PATH")]
        signal: PathBuf,
        #[arg(long, value_name = "FLOAT", value_parser = parse_p)]
        p: Exponent<f64>,
    },
    /// Laplacian eigenvalues
    Spectrum {
        #[command(flatten)]
        graph: GraphArgs,
    },
    /// Projection onto PW_omega and the Bernstein inequality
    PwProject {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, value_name = "FLOAT")]
        omega: f64,
        #[arg(long, value_name = "PATH", required_unless_present = "seed", conflicts_with = "seed")]
        signal: Option<PathBuf>,
        /// Project a random signal drawn with this seed
        #[arg(long, value_name = "INT")]
        seed: Option<u64>,
    },
    /// Eigenvalue counts, lambda_k and Dirichlet bounds, zero-set checks
    Geometry {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, value_name = "PATH")]
        partition: PathBuf,
        /// Bandlimited signal vanishing on the initial shell
        #[arg(long, value_name = "PATH", conflicts_with = "omega")]
        signal: Option<PathBuf>,
        /// Search PW_omega for a signal vanishing on the initial shell
        #[arg(long, value_name = "FLOAT")]
        omega: Option<f64>,
    },
    /// Frame bounds of the sampling set
    FrameBounds {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, value_name = "FLOAT")]
        omega: f64,
        /// The first shell is the sampling set
        #[arg(long, value_name = "PATH", required_unless_present = "samples", conflicts_with = "samples")]
        partition: Option<PathBuf>,
        /// The sampled vertices are the sampling set
        #[arg(long, value_name = "PATH")]
        samples: Option<PathBuf>,
    },
    /// Plancherel-Polya inequalities on a bandlimited signal
    PpCheck {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, value_name = "PATH")]
        partition: PathBuf,
        /// Defaults to the partition shells
        #[arg(long, value_name = "PATH")]
        chain: Option<PathBuf>,
        #[arg(long, value_name = "FLOAT")]
        omega: f64,
        #[arg(long, value_name = "PATH", required_unless_present = "seed", conflicts_with = "seed")]
        signal: Option<PathBuf>,
        /// Check a random signal of PW_omega drawn with this seed
        #[arg(long, value_name = "INT")]
        seed: Option<u64>,
    },
    /// Frame algorithm reconstruction from samples
    Reconstruct {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, value_name = "PATH")]
        samples: PathBuf,
        #[arg(long, value_name = "FLOAT")]
        omega: f64,
        /// True signal, to report errors alongside residuals
        #[arg(long, value_name = "PATH")]
        signal: Option<PathBuf>,
        /// Defaults to 2/(A+B)
        #[arg(long, value_name = "FLOAT")]
        relaxation: Option<f64>,
        #[arg(long, value_name = "FLOAT", default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, value_name = "INT", default_value_t = 10_000)]
        max_iter: usize,
    },
    /// Sampling on kZ against the Shannon identity, plus the oversampling report
    Shannon {
        #[arg(long, value_name = "INT")]
        k: usize,
        #[arg(long, value_name = "FLOAT")]
        omega: f64,
        /// Number of periods of the cycle C_{k periods}
        #[arg(long, value_name = "INT")]
        periods: usize,
        #[arg(long, value_name = "INT")]
        seed: u64,
    },
    /// Star, wheel and integer-line examples
    Examples,
}

impl Command {
    fn uses_convergence_table(&self) -> bool {
        matches!(self, Command::Reconstruct { .. })
    }
}

fn decompose(g: &Graph) -> Result<Decomposition> {
    Ok(Decomposition::decompose(g)?)
}

fn dispatch(command: &Command) -> Result<Outcome> {
    match command {
        Command::Constants { graph, partition, chain, p } => {
            let g = graph.load()?;
            let part = partition.as_deref().map(|x| load::partition(&g, x)).transpose()?;
            let chain = chain.as_deref().map(|x| load::chain(&g, x)).transpose()?;
            commands::constants(&g, part.as_ref(), chain.as_ref(), *p)
        }
        Command::Poincare { graph, partition, chain, signal, p } => {
            let g = graph.load()?;
            let part = load::partition(&g, partition)?;
            let chain = chain.as_deref().map(|x| load::chain(&g, x)).transpose()?;
            let f = load::signal(&g, signal)?;
            commands::poincare(&g, &part, chain.as_ref(), &f, *p)
        }
        Command::Shells { graph, partition, signal, p } => {
            let g = graph.load()?;
            let part = load::partition(&g, partition)?;
            let f = load::signal(&g, signal)?;
            commands::shells(&g, &part, &f, *p)
        }
        Command::Spectrum { graph } => commands::spectrum(&decompose(&graph.load()?)?),
        Command::PwProject { graph, omega, signal, seed } => {
            let g = graph.load()?;
            let f = signal.as_deref().map(|x| load::signal(&g, x)).transpose()?;
            commands::pw_project(&g, &decompose(&g)?, *omega, f, *seed)
        }
        Command::Geometry { graph, partition, signal, omega } => {
            let g = graph.load()?;
            let part = load::partition(&g, partition)?;
            let f = signal.as_deref().map(|x| load::signal(&g, x)).transpose()?;
            commands::geometry(&g, &decompose(&g)?, &part, f, *omega)
        }
        Command::FrameBounds { graph, omega, partition, samples } => {
            let g = graph.load()?;
            let s0 = match (partition, samples) {
                (Some(path), _) => load::initial_set(&g, path)?,
                (None, Some(path)) => load::samples(&g, path)?.into_keys().collect(),
                (None, None) => anyhow::bail!("frame-bounds needs --partition or --samples"),
            };
            commands::frame_bounds_cmd(&g, &s0, *omega)
        }
        Command::PpCheck { graph, partition, chain, omega, signal, seed } => {
            let g = graph.load()?;
            let part = load::partition(&g, partition)?;
            let chain = chain.as_deref().map(|x| load::chain(&g, x)).transpose()?;
            let f = signal.as_deref().map(|x| load::signal(&g, x)).transpose()?;
            commands::pp_check(&g, &decompose(&g)?, *omega, &part, chain.as_ref(), f, *seed)
        }
        Command::Reconstruct { graph, samples, omega, signal, relaxation, tol, max_iter } => {
            let g = graph.load()?;
            let samples = load::samples(&g, samples)?;
            let truth = signal.as_deref().map(|x| load::signal(&g, x)).transpose()?;
            let options = ReconstructOptions { relaxation: *relaxation, tol: *tol, max_iter: *max_iter };
            commands::reconstruct(&g, &decompose(&g)?, *omega, &samples, &options, truth.as_ref())
        }
        Command::Shannon { k, omega, periods, seed } => commands::shannon(*k, *omega, *periods, *seed),
        Command::Examples => commands::examples(),
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Parses `argv`, runs the subcommand and returns the exit status.
fn run<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let outcome = match dispatch(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return 2;
        }
    };
    let text = if !cli.pretty {
        render::json(&outcome.json)
    } else if cli.command.uses_convergence_table() {
        render::convergence_table(&outcome.json)
    } else {
        render::table(&outcome.json)
    };
    if let Err(e) = emit(&text, cli.out.as_deref()) {
        eprintln!("error: {e:#}");
        return 2;
    }
    if outcome.passed {
        0
    } else {
        1
    }
}

fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os()))
}
