//! `tenstruct` command-line front end.
//!
//! Exit status: 0 on success, 2 for unreadable or invalid input and bad
//! flags, 3 when a grid search exceeds its evaluation cap, 1 otherwise.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "tenstruct", version, about = "Structured tensor analysis")]
struct Cli {
    /// Report format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write the report here instead of stdout
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OpArg {
    #[value(name = "T")]
    T,
    #[value(name = "F")]
    F,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Grid,
    Multistart,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    #[value(name = "H")]
    H,
    #[value(name = "Z")]
    Z,
}

#[derive(Args, Debug, Clone)]
pub struct SearchArgs {
    #[arg(long, value_enum, default_value_t = MethodArg::Grid)]
    method: MethodArg,
    /// Lattice spacing for the grid method
    #[arg(long, default_value_t = 0.05)]
    h: f64,
    #[arg(long, default_value_t = 64)]
    starts: usize,
    #[arg(long, default_value_t = 500)]
    iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run every entry-level structure check
    Classify {
        input: PathBuf,
        /// Comparison tolerance (strict means > eps, weak means >= -eps)
        #[arg(long, default_value_t = 0.0)]
        tol: f64,
    },
    /// Estimate alpha(T_A) or alpha(F_A)
    Alpha {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = OpArg::T)]
        op: OpArg,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Decide P / P0 membership
    Pcheck {
        input: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// H- or Z-eigenpairs with a definiteness verdict
    Eig {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = KindArg::Z)]
        kind: KindArg,
        #[arg(long, default_value_t = 64)]
        starts: usize,
        #[arg(long, default_value_t = 1000)]
        iters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Residual tolerance relative to 1 + t_bound
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Extract a principal sub-tensor
    Subtensor {
        input: PathBuf,
        /// One-based indices, comma separated
        #[arg(long, value_delimiter = ',', required = true)]
        indices: Vec<usize>,
    },
    /// Write seeded random tensors named <class>_<m>_<n>_<seed>.json
    Gen {
        /// B, B0, Z_diag_dominated, symmetric or general
        #[arg(long)]
        class: String,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: u64,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// Directory for the generated files
        #[arg(long, default_value = ".")]
        dir: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli.command, cli.format) {
        Ok(text) => match &cli.output {
            Some(path) => match std::fs::write(path, text) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    ExitCode::from(1)
                }
            },
            None => {
                print!("{text}");
                ExitCode::SUCCESS
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
