mod commands;
mod error;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::report::Format;

#[derive(Debug, Parser)]
#[command(
    name = "bsa",
    version,
    about = "Measures of basic real semialgebraic formulas"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Options,
}

#[derive(Debug, Args)]
pub struct Options {
    /// Largest number of variables handed to the cell decomposition.
    #[arg(long, global = true, default_value_t = bsa_core::cad::DEFAULT_CAP)]
    cad_cap: usize,
    /// Projection order for the cell decomposition, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    var_order: Option<Vec<String>>,
    /// Class table with hand-computed virtual Poincaré polynomials.
    #[arg(long, global = true)]
    table: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Class of a formula in the Grothendieck ring, by both eliminations.
    Measure { formula: String },
    /// Virtual Poincaré polynomial of a formula.
    Beta { formula: String },
    /// Euler characteristic with compact supports from a cell decomposition.
    Euler {
        formula: String,
        /// Print the cells.
        #[arg(long)]
        cells: bool,
    },
    /// Zeta function of a resolution file and its series coefficients.
    Zeta {
        resolution: PathBuf,
        #[arg(long, default_value = "naive")]
        eps: String,
        #[arg(long, default_value_t = 4)]
        order: usize,
    },
    /// Motivic Milnor fibre of a resolution file, checked against the set-theoretic fibre.
    Milnor {
        resolution: PathBuf,
        #[arg(long, default_value = "1")]
        eps: String,
    },
    /// Arc space coefficients computed directly from jets.
    ArcCoeff {
        #[arg(long = "f")]
        f: String,
        /// Variables of f, comma separated; defaults to the sorted variables of f.
        #[arg(long, value_delimiter = ',')]
        vars: Option<Vec<String>>,
        /// Largest order n.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "naive")]
        eps: String,
        /// Compare with the series of this resolution.
        #[arg(long)]
        resolution: Option<PathBuf>,
    },
    /// Recomputes the reference values and reports each.
    Selftest,
}

const STACK: usize = 256 << 20;

fn main() -> ExitCode {
    let cli = Cli::parse();
    std::thread::Builder::new()
        .stack_size(STACK)
        .spawn(move || run(cli))
        .expect("spawn worker")
        .join()
        .unwrap_or_else(|_| ExitCode::from(5))
}

fn run(cli: Cli) -> ExitCode {
    let outcome = match &cli.command {
        Command::Measure { formula } => commands::measure(formula),
        Command::Beta { formula } => commands::beta(formula, &cli.opts),
        Command::Euler { formula, cells } => commands::euler(formula, *cells, &cli.opts),
        Command::Zeta {
            resolution,
            eps,
            order,
        } => commands::zeta(resolution, eps, *order, &cli.opts),
        Command::Milnor { resolution, eps } => commands::milnor(resolution, eps, &cli.opts),
        Command::ArcCoeff {
            f,
            vars,
            n,
            eps,
            resolution,
        } => commands::arc_coeff(
            f,
            vars.as_deref(),
            *n,
            eps,
            resolution.as_deref(),
            &cli.opts,
        ),
        Command::Selftest => commands::selftest(&cli.opts),
    };
    match outcome {
        Ok((report, failure)) => {
            print!("{}", report.render(cli.opts.format));
            match failure {
                None => ExitCode::SUCCESS,
                Some(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.code())
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
