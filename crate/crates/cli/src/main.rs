use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use sbfix_cli::commands;
use sbfix_cli::points::parse_vector;
use sbfix_cli::{CheckOptions, Overrides, EXIT_USAGE};
use sbfix_core::{NormKind, Vector};

#[derive(Parser)]
#[command(
    name = "sbfix",
    version,
    about = "Certify enriched contraction conditions and run averaged Picard iteration"
)]
struct Cli {
    /// Norm on R^n (overrides the problem file).
    #[arg(long, global = true, value_enum)]
    norm: Option<NormArg>,
    /// Seed for random pair samples.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of random pairs.
    #[arg(long, global = true)]
    pair_count: Option<usize>,
    /// Solver step tolerance (relative to 1 + |u_n|).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Solver iteration cap.
    #[arg(long, global = true)]
    max_iter: Option<usize>,
    /// Print every violation witness instead of the first 10.
    #[arg(long, global = true)]
    all_witnesses: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormArg {
    L1,
    L2,
    Linf,
}

impl From<NormArg> for NormKind {
    fn from(n: NormArg) -> Self {
        match n {
            NormArg::L1 => NormKind::L1,
            NormArg::L2 => NormKind::L2,
            NormArg::Linf => NormKind::LInf,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check the problem's condition on its pair sample.
    Check { problem: PathBuf },
    /// Run averaged Picard iteration.
    Solve {
        problem: PathBuf,
        /// Starting point, e.g. "4,5".
        #[arg(long, value_parser = parse_vector, allow_hyphen_values = true)]
        x0: Option<Vector>,
    },
    /// Hausdorff distance between two point-set files.
    Hausdorff { a: PathBuf, b: PathBuf },
    /// Walk through the built-in two-point example.
    Demo,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut overrides = Overrides {
        norm: cli.norm.map(NormKind::from),
        seed: cli.seed,
        pair_count: cli.pair_count,
        tol: cli.tol,
        max_iter: cli.max_iter,
        x0: None,
    };
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let mut err = io::stderr().lock();
    let status = match cli.command {
        Command::Check { problem } => commands::check(
            &problem,
            &CheckOptions {
                overrides,
                all_witnesses: cli.all_witnesses,
            },
            &mut out,
            &mut err,
        ),
        Command::Solve { problem, x0 } => {
            overrides.x0 = x0;
            commands::solve(&problem, &overrides, &mut out, &mut err)
        }
        Command::Hausdorff { a, b } => {
            commands::hausdorff_files(&a, &b, overrides.norm.unwrap_or_default(), &mut out, &mut err)
        }
        Command::Demo => commands::demo(&mut out, &mut err),
    };
    let status = status.and_then(|s| out.flush().map(|_| s)).unwrap_or_else(|e| {
        let _ = writeln!(err, "error: {e}");
        EXIT_USAGE
    });
    ExitCode::from(status)
}
