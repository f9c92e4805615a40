//! `usf-lab`: generators, solvers, samplers, packings and experiments from
//! the command line.

mod commands;
mod config;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// An error in the invocation rather than in the computation.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Debug, Parser)]
#[command(
    name = "usf-lab",
    version,
    about = "Uniform spanning forest laboratory"
)]
pub struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for every random choice.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory receiving the run manifest and default outputs.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// TOML configuration file; flags take precedence over it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a plane network.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Inspect or transform a plane network.
    #[command(subcommand)]
    Graph(GraphCommand),
    /// Electrical quantities.
    #[command(subcommand)]
    Elec(ElecCommand),
    /// Sample spanning trees or forests with Wilson's algorithm.
    Sample(SampleArgs),
    /// Compute a double circle packing.
    Pack(PackArgs),
    /// Draw a packing as SVG.
    Render(RenderArgs),
    /// Run an exponent experiment.
    Exp(ExpArgs),
    /// Check the samplers and solvers against exact enumeration.
    Selftest,
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// Ball in the {p,q} tessellation.
    Tess {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
        #[arg(long)]
        depth: usize,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Tube of square rings with conductance `c` on the ring edges.
    Tube {
        #[arg(long)]
        rings: usize,
        #[arg(long)]
        c: f64,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// `n x n` piece of the square lattice.
    Grid {
        #[arg(long)]
        n: usize,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Layered triangulation with the given band lengths.
    Layered {
        #[arg(long, value_delimiter = ',', required = true)]
        bands: Vec<usize>,
        /// Number of layers (default: enough for the whole schedule plus one
        /// ring).
        #[arg(long)]
        depth: Option<usize>,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum GraphCommand {
    /// Counts, planarity data and local-geometry bounds.
    Info { file: PathBuf },
    /// The dual network.
    Dual {
        file: PathBuf,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Wired truncation keeping the vertices within graph distance
    /// `depth - 1` of `root`.
    Wire {
        file: PathBuf,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 0)]
        root: usize,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Plain,
    Free,
    Wired,
    WiredToBoundary,
}

#[derive(Debug, Subcommand)]
pub enum ElecCommand {
    /// Effective resistance between two vertex sets.
    Reff {
        file: PathBuf,
        #[arg(long = "A", value_delimiter = ',', required = true)]
        a: Vec<usize>,
        #[arg(long = "B", value_delimiter = ',', required = true)]
        b: Vec<usize>,
        #[arg(long, value_enum, default_value_t = ModeArg::Plain)]
        mode: ModeArg,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ForestKind {
    Ust,
    Wusf,
    Fusf,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(value_enum)]
    pub kind: ForestKind,
    pub file: PathBuf,
    /// Number of samples.
    #[arg(long)]
    pub n: Option<usize>,
    /// Root of the tree: a vertex id, or `auto` for the boundary vertex if
    /// there is one and vertex 0 otherwise.
    #[arg(long, default_value = "auto")]
    pub root: String,
    /// Edge-frequency CSV (default: standard output).
    #[arg(short = 'o', long = "output")]
    pub output: Option<PathBuf>,
    /// Also dump the first sample in the forest format.
    #[arg(long)]
    pub forest: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Disc,
    Euclidean,
}

#[derive(Debug, Args)]
pub struct PackArgs {
    /// Network file (default: standard input).
    pub file: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,
    /// Normalize at the edge `x,y`.
    #[arg(long, value_parser = parse_pair)]
    pub normalize: Option<(usize, usize)>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub max_sweeps: Option<usize>,
    #[arg(short = 'o', long = "output")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// Packing file.
    pub file: PathBuf,
    /// Forest dump to overlay; edge ids refer to `--graph`.
    #[arg(long, requires = "graph")]
    pub forest: Option<PathBuf>,
    /// Network the packing and the forest belong to.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Vertices to fill.
    #[arg(long, value_delimiter = ',')]
    pub highlight: Vec<usize>,
    #[arg(long)]
    pub no_dual: bool,
    #[arg(long)]
    pub size: Option<u32>,
    #[arg(short = 'o', long = "output")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Experiment {
    WiredDiam,
    WiredArea,
    FreeLength,
    Parabolic,
}

#[derive(Debug, Args)]
pub struct ExpArgs {
    #[arg(value_enum)]
    pub experiment: Experiment,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub q: Option<usize>,
    #[arg(long)]
    pub depth: Option<usize>,
    /// Number of samples.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub censor_layers: Option<usize>,
    #[arg(long)]
    pub bootstrap: Option<usize>,
    /// Tube length for `parabolic`.
    #[arg(long)]
    pub rings: Option<usize>,
    /// Ring conductances for `parabolic`.
    #[arg(long, value_delimiter = ',')]
    pub c: Option<Vec<f64>>,
    /// Also run at this depth and report whether the slopes agree.
    #[arg(long)]
    pub compare_depth: Option<usize>,
    /// Output directory (default: `--out`, then the current directory).
    #[arg(short = 'o', long = "output")]
    pub output: Option<PathBuf>,
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (x, y) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `x,y`, got `{s}`"))?;
    let id = |t: &str| {
        t.trim()
            .parse()
            .map_err(|_| format!("`{t}` is not a vertex id"))
    };
    Ok((id(x)?, id(y)?))
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match commands::run(cli, argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.downcast_ref::<UsageError>().is_some() => {
            eprintln!("usage error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
