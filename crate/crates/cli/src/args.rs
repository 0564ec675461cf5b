use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "benford", version, about = "Significant-digit distributions via the mod-1 map")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum SampleFormat {
    #[default]
    Text,
    Csv,
}

/// Density of `X = log10 Y`, by preset name or density-spec JSON file.
#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct DensityArg {
    /// uniform, sine1, geom60 or triangle
    #[arg(long)]
    pub preset: Option<String>,
    /// Density-spec JSON file
    #[arg(long)]
    pub spec: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build an n-digit Benford mod-1 density from a bump family.
    Construct {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=4))]
        n: u32,
        /// uniform, sine or linear-ramp
        #[arg(long, conflicts_with = "bump_spec", required_unless_present = "bump_spec")]
        bump: Option<String>,
        /// Density-spec JSON whose piece shapes are the bumps (one, or one per cell)
        #[arg(long)]
        bump_spec: Option<PathBuf>,
        /// Where to write the density spec (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check whether a density is Benford in its first n digits.
    Verify {
        #[command(flatten)]
        density: DensityArg,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=4))]
        n: u32,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Theoretical vs. sampled leading-digit probabilities.
    Table {
        #[arg(long)]
        preset: String,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=3))]
        n: u32,
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
        count: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Draw seeded samples of Y = 10^X (or of X with --log).
    Sample {
        #[command(flatten)]
        density: DensityArg,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        count: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Emit X instead of Y
        #[arg(long)]
        log: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        format: SampleFormat,
    },
    /// Leading-digit fit of a dataset against Benford's law.
    Analyze {
        file: PathBuf,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=4))]
        n: u32,
        /// Column name or zero-based index
        #[arg(long)]
        column: Option<String>,
        /// Exclude nonpositive and non-numeric rows instead of failing
        #[arg(long)]
        skip_invalid: bool,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        bins: u64,
        #[arg(long, default_value_t = 1.0)]
        hist_lo: f64,
        #[arg(long, default_value_t = 10.0)]
        hist_hi: f64,
        /// Write histogram bin counts as CSV here
        #[arg(long)]
        histogram_out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Digit distributions under rescaling of Y (or translation of its log).
    Invariance {
        #[command(flatten)]
        density: DensityArg,
        /// Comma-separated scale factors (default: 10^(i/100), i = 0..99)
        #[arg(long, value_delimiter = ',', conflicts_with = "shifts")]
        scales: Option<Vec<f64>>,
        /// Comma-separated translations of log10 Y
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        shifts: Option<Vec<f64>>,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=3))]
        n: u32,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Leading-digit distribution in another base.
    Rebase {
        #[command(flatten)]
        density: DensityArg,
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
        base: u32,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
}
