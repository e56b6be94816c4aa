//! `setcount`: counts, asymptotic estimates and Boltzmann samples for sets of
//! connected labelled structures.

mod commands;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::Format;

#[derive(Debug, Parser)]
#[command(name = "setcount", version, about = "Count and sample sets of connected labelled structures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Mantissa bits for floating-point series arithmetic.
    #[arg(long, global = true, default_value_t = setcount::powerseries::DEFAULT_PRECISION_BITS)]
    pub precision_bits: u32,

    /// Override the truncation order of size tables (sampling) and series.
    #[arg(long, global = true)]
    pub trunc_order: Option<usize>,

    /// Seed for every random draw.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args, Clone)]
pub struct ClassArgs {
    /// Built-in class (trees, cacti, husimi) or synthetic:B,RHO,ALPHA.
    #[arg(long, conflicts_with = "class_file")]
    pub class: Option<String>,

    /// Class definition file (JSON).
    #[arg(long)]
    pub class_file: Option<std::path::PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Growth and threshold constants, optionally at a given lambda.
    Constants {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long)]
        lambda: Option<f64>,
    },
    /// Number of structures with n vertices and k components.
    Exact {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long)]
        n: usize,
        /// Component count; omit together with --all-k for the full row.
        #[arg(long, required_unless_present = "all_k")]
        k: Option<usize>,
        /// Every k from 1 to n.
        #[arg(long)]
        all_k: bool,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
    },
    /// Asymptotic estimate of the count at n vertices and floor(lambda n) components.
    Estimate {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        lambda: f64,
    },
    /// Estimate against exact (float-mode) counts over several n, or a
    /// sweep of the regime constant over lambda.
    Compare {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long)]
        lambda: Option<f64>,
        /// Comma-separated sizes.
        #[arg(long, value_delimiter = ',')]
        n_list: Vec<u64>,
        /// Emit the regime constant on this many evenly spaced lambdas in (0, 1).
        #[arg(long, conflicts_with_all = ["lambda", "n_list"])]
        lambda_sweep: Option<usize>,
    },
    /// Boltzmann draws: component sizes at --x, or uniform forests with --n and --k.
    Sample {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long)]
        x: Option<f64>,
        #[arg(long, requires = "k")]
        n: Option<usize>,
        #[arg(long, requires = "n")]
        k: Option<usize>,
        #[arg(long, default_value_t = 1)]
        trials: u64,
        #[arg(long, default_value_t = 1_000_000)]
        max_rejects: u64,
    },
    /// Counting sequence of a class; export to or import from a class file.
    Series {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long)]
        terms: Option<usize>,
        /// Write the class with its first --terms coefficients to this file.
        #[arg(long)]
        export: Option<std::path::PathBuf>,
        /// Read a class file instead of --class.
        #[arg(long, conflicts_with_all = ["class", "class_file"])]
        import: Option<std::path::PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut printer = output::Printer::new(stdout.lock(), cli.format);
    match commands::run(&cli, &mut printer) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let rec = output::error_record(commands::name(&cli.command), &e);
            let _ = writeln!(std::io::stderr(), "{rec}");
            ExitCode::from(output::exit_code(&e) as u8)
        }
    }
}
