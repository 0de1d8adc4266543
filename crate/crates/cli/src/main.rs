//! `realeig`: expected and sampled numbers of real eigenpairs of gaussian
//! tensors.

mod commands;
mod format;
mod manifest;
mod selftest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "realeig",
    version,
    about = "Real eigenpairs of gaussian random tensors"
)]
struct Cli {
    /// Worker threads for sampling (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Significant digits of printed values.
    #[arg(long, global = true)]
    digits: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RouteArg {
    Hypergeom,
    Sum,
    Quadrature,
    Genfun,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    GaussHermite,
    AdaptiveSimpson,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SourceArg {
    Tensor,
    Bw,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Expected number of real eigenpair classes E_{n,d}.
    Expect {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        d: u32,
        #[arg(long, value_enum, default_value = "sum")]
        route: RouteArg,
        /// Quadrature nodes (quadrature route only).
        #[arg(long, default_value_t = 200)]
        nodes: u32,
        #[arg(long, value_enum, default_value = "gauss-hermite")]
        scheme: SchemeArg,
    },
    /// E_{n,d} on a grid by every route, with the largest relative deviation.
    Table {
        #[arg(long, default_value_t = 12)]
        nmax: u32,
        #[arg(long, default_value_t = 8)]
        dmax: u32,
        #[arg(long, value_enum, default_value = "csv")]
        format: TableFormat,
        /// Write to a file (with a run manifest) instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Coefficients of the generating function Σ E_{n,d} zⁿ.
    Genfun {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        order: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// E|det(A + tI)| for n×n gaussian A, optionally with a Monte-Carlo check.
    Detmoment {
        #[arg(long)]
        n: u32,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        #[arg(long)]
        mc_samples: Option<u64>,
        #[arg(long, env = "REALEIG_SEED", default_value_t = 2024)]
        seed: u64,
    },
    /// Sample random systems and histogram their real eigenpair counts.
    McCount {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        samples: u64,
        #[arg(long, env = "REALEIG_SEED", default_value_t = 2024)]
        seed: u64,
        /// Histogram CSV; a JSON summary and a run manifest go next to it.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "tensor")]
        source: SourceArg,
    },
    /// Run the built-in invariant checks.
    Selftest,
}

/// Exit codes: 1 generic failure or failed self-test, 2 usage error (clap),
/// 3 numerical convergence failure, 4 sampling failure rate exceeded.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<realeig::Error>() {
        Some(realeig::Error::Convergence(_)) | Some(realeig::Error::Precision(_)) => 3,
        Some(realeig::Error::FailureRate { .. }) => 4,
        Some(realeig::Error::Domain(_)) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: cannot configure {threads} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let digits = cli.digits;
    let result = match cli.command {
        Command::Expect {
            n,
            d,
            route,
            nodes,
            scheme,
        } => commands::expect(n, d, route, nodes, scheme, digits),
        Command::Table {
            nmax,
            dmax,
            format,
            out,
        } => commands::table(nmax, dmax, format, out.as_deref(), digits),
        Command::Genfun { d, order, out } => commands::genfun(d, order, out.as_deref(), digits),
        Command::Detmoment {
            n,
            t,
            mc_samples,
            seed,
        } => commands::detmoment(n, t, mc_samples, seed, digits),
        Command::McCount {
            n,
            d,
            samples,
            seed,
            out,
            source,
        } => commands::mc_count(n, d, samples, seed, out.as_deref(), source, digits),
        Command::Selftest => selftest::run(),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
