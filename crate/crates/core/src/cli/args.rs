use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "oddaxis",
    version,
    about = "Degree, bundle-section and odd-size eigenvector checks"
)]
pub struct Cli {
    /// Icosphere subdivision level for sphere scans and degree integrals.
    #[arg(long, global = true, default_value_t = 4, value_parser = clap::value_parser!(u32).range(0..=8))]
    pub mesh_level: u32,

    /// Seed for every random choice made by a command.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Override a named tolerance, e.g. `--tol residual=1e-3`.
    #[arg(long = "tol", global = true, value_name = "NAME=VAL", value_parser = parse_tol)]
    pub tol: Vec<(String, f64)>,

    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Also write CSV plot data, to `--emit-csv=PATH` or next to the report.
    #[arg(long, global = true, value_name = "PATH", num_args = 0..=1, require_equals = true)]
    pub emit_csv: Option<Option<PathBuf>>,

    /// Cap on worker threads.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Degree of a builtin or sampled sphere map.
    Degree {
        /// Builtin map, e.g. `identity`, `antipodal`, `suspension:k=3`, `power:k=5`.
        #[arg(long, required_unless_present = "samples", conflicts_with = "samples")]
        map: Option<String>,
        /// JSON samples: `{"level": L, "values": [[x,y,z], ...]}` or `{"m": M, "values": [[x,y], ...]}`.
        #[arg(long, value_name = "FILE")]
        samples: Option<PathBuf>,
        /// Export the mesh used for the integral in OFF format.
        #[arg(long, value_name = "PATH")]
        emit_off: Option<PathBuf>,
    },
    /// Stiefel–Whitney triviality table of kγ over RPⁿ.
    Swtable {
        /// Largest k.
        #[arg(short = 'k', long = "max-k", value_parser = clap::value_parser!(u64).range(1..))]
        max_k: u64,
        /// Largest n.
        #[arg(short = 'n', long = "max-n", value_parser = clap::value_parser!(u64).range(1..=4096))]
        max_n: u64,
    },
    /// Eigenpair certificate for an odd-size complex matrix.
    Eigen {
        #[arg(long, value_name = "FILE")]
        matrix: PathBuf,
    },
    /// Singular combination of three square matrices.
    Span {
        #[arg(long, value_name = "FILE")]
        matrices: PathBuf,
    },
    /// Trivializations and rank-drop demonstrations over RP¹ and RP².
    Bundle {
        #[arg(long, value_enum)]
        case: BundleCase,
    },
    /// Radon–Hurwitz number of n.
    Rh {
        #[arg(value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BundleCase {
    TwoGammaRp1,
    FourGammaRp2,
    GammaEpsRp1,
    TwoGammaEpsRp2,
}

impl BundleCase {
    pub fn tag(self) -> &'static str {
        match self {
            BundleCase::TwoGammaRp1 => "two-gamma-rp1",
            BundleCase::FourGammaRp2 => "four-gamma-rp2",
            BundleCase::GammaEpsRp1 => "gamma-eps-rp1",
            BundleCase::TwoGammaEpsRp2 => "two-gamma-eps-rp2",
        }
    }
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=VAL, got `{s}`"))?;
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|e| format!("tolerance `{name}`: {e}"))?;
    if !(value > 0.0 && value.is_finite()) {
        return Err(format!("tolerance `{name}` must be positive and finite"));
    }
    Ok((name.trim().to_string(), value))
}
