//! `dchain`: pairings, certified norm sandwiches and convergence experiments
//! for pointed chains.
//!
//! Exit status: 0 on success, 1 for malformed input or usage errors, 2 when
//! a certificate fails re-validation.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::CliError;

#[derive(Parser, Debug)]
#[command(name = "dchain", version, about = "Pointed k-chains: pairings, B^r norm sandwiches, Stokes and Cauchy experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Write the CSV table here (atomically) instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Seed for every randomized corpus.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Run every inner loop on the calling thread.
    #[arg(long, global = true)]
    pub sequential: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print ∫_A ω for a (pointed or dipole) chain and a form.
    Pair {
        #[arg(long, value_name = "PATH")]
        chain: PathBuf,
        #[arg(long, value_name = "PATH")]
        form: PathBuf,
    },
    /// Certified sandwich lower ≤ ‖A‖_{B^r} ≤ upper for r = 0..=ORDER.
    ///
    /// CSV columns: r,lower,upper,gap.
    Norm {
        #[arg(long, value_name = "PATH")]
        chain: PathBuf,
        #[arg(short = 'r', long = "order", default_value_t = 1)]
        order: usize,
        /// Also write each certificate (lower-r.form, upper-r.chain) here.
        #[arg(long, value_name = "DIR")]
        certificates: Option<PathBuf>,
    },
    /// Upper-bound plateau of the B^r norms (the natural norm).
    ///
    /// CSV columns: r,lower,upper,gap,relative_change.
    Natural {
        #[arg(long, value_name = "PATH")]
        chain: PathBuf,
        #[arg(long, default_value_t = 4)]
        rmax: usize,
        /// Relative change below which the sequence counts as settled.
        #[arg(long, default_value_t = 0.01)]
        tol: f64,
    },
    /// Grid LP oracle (n ≤ 2, k ≤ 1) at a grid and its refinement.
    ///
    /// CSV columns: spacing,oracle,lower,upper.
    Oracle {
        #[arg(long, value_name = "PATH")]
        chain: PathBuf,
        #[arg(short = 'r', long = "order", default_value_t = 1)]
        order: usize,
        /// ORIGIN:SPACING:COUNT with comma-separated per-axis origin and
        /// counts, e.g. `-0.2:0.025:17` or `-1,-1:0.25:9,9`. Defaults to a
        /// grid of spacing 0.05 around the chain.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
    },
    /// Stokes residuals |∫_{∂A_m} ω − ∫_{A_m} dω| for midpoint chains.
    ///
    /// CSV columns: m,boundary,interior,residual.
    Stokes {
        #[arg(long, value_name = "PATH")]
        cell: PathBuf,
        #[arg(long, value_name = "PATH")]
        form: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "4,8,16,32")]
        m: Vec<usize>,
    },
    /// Upper bounds on ‖A_{2m} − A_m‖_{B^r} for midpoint chains of a cell.
    ///
    /// CSV columns: m,upper.
    Cauchy {
        #[arg(long, value_name = "PATH")]
        cell: PathBuf,
        #[arg(short = 'r', long = "order", default_value_t = 1)]
        order: usize,
        #[arg(long, value_delimiter = ',', default_value = "4,8,16")]
        m: Vec<usize>,
    },
    /// Checks ⟨P_v A, ω⟩ = ⟨A, L_v ω⟩ on seeded random cases in ℝ³.
    ///
    /// CSV columns: case,k,order,lhs,rhs,error.
    DipoleCheck {
        #[arg(long, default_value_t = 100)]
        cases: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let c = &cli.common;
    match cli.command {
        Command::Pair { chain, form } => commands::pair(c, &chain, &form),
        Command::Norm { chain, order, certificates } => commands::norm(c, &chain, order, certificates.as_deref()),
        Command::Natural { chain, rmax, tol } => commands::natural(c, &chain, rmax, tol),
        Command::Oracle { chain, order, grid } => commands::oracle(c, &chain, order, grid.as_deref()),
        Command::Stokes { cell, form, m } => commands::stokes(c, &cell, &form, &m),
        Command::Cauchy { cell, order, m } => commands::cauchy(c, &cell, order, &m),
        Command::DipoleCheck { cases, tol } => commands::dipole_check(c, cases, tol),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
