use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "manipsem", version, about = "Spatial relations, atomic actions and descriptions for manipulation traces")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// `key = value` config file.
    #[arg(long, global = true, env = "MANIPSEM_CONFIG")]
    pub config: Option<PathBuf>,
    /// Seed for generated data.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Mapping library file; the built-in library otherwise.
    #[arg(long, global = true)]
    pub library: Option<PathBuf>,
    /// Sentence template file; the built-in templates otherwise.
    #[arg(long, global = true)]
    pub templates: Option<PathBuf>,
    #[arg(long, global = true)]
    pub eps_touch: Option<f64>,
    #[arg(long, global = true)]
    pub eps_bnd: Option<f64>,
    #[arg(long, global = true)]
    pub theta_near: Option<f64>,
    #[arg(long, global = true)]
    pub delta_move: Option<f64>,
    #[arg(long, global = true)]
    pub delta_rel: Option<f64>,
    #[arg(long, global = true)]
    pub window: Option<usize>,
    #[arg(long, global = true)]
    pub debounce: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    /// One JSON record per line.
    Records,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HandArg {
    Left,
    Right,
    Both,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-frame SSR and DSR of every object pair.
    Relations { trace: PathBuf },
    /// Natural-language description of each hand.
    Describe {
        trace: PathBuf,
        /// Granularity level (1 = one sentence per atomic action).
        #[arg(long, conflicts_with = "all_levels")]
        level: Option<usize>,
        /// Every available level.
        #[arg(long)]
        all_levels: bool,
        #[arg(long, value_enum, default_value_t = HandArg::Both)]
        hand: HandArg,
    },
    /// Relation accuracy (and action recovery) over a corpus directory.
    Bench {
        corpus: PathBuf,
        /// Report the AABB baseline next to the hull model.
        #[arg(long)]
        compare: bool,
        /// Directory for `accuracy.tsv` and `accuracy.json`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run on one thread.
        #[arg(long)]
        sequential: bool,
    },
    /// Parse a file of atomic-action tokens with the action grammar.
    Parse { tokens: PathBuf },
    /// Write a synthetic trace, or a corpus manifest with `--corpus`.
    Generate {
        #[arg(required_unless_present = "corpus")]
        scenario: Option<String>,
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        /// Pad the trace to this many frames.
        #[arg(long)]
        frames: Option<usize>,
        /// Trace output file; stdout otherwise.
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Ground-truth output file.
        #[arg(long)]
        truth: Option<PathBuf>,
        /// Corpus directory to write `manifest.txt` into.
        #[arg(long, conflicts_with = "scenario")]
        corpus: Option<PathBuf>,
        #[arg(long, default_value_t = 500)]
        count: usize,
        /// With `--corpus`, also write every trace and its truth file.
        #[arg(long, requires = "corpus")]
        traces: bool,
    },
}
