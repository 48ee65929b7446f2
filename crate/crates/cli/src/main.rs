use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

use commands::{Output, UsageError};

/// Exact and numerical verification of nearest-neighbour correlations in the
/// supersymmetric XYZ chain.
#[derive(Debug, Parser)]
#[command(name = "xyzcorr", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write output here instead of stdout. Relative paths resolve against `$XYZCORR_OUT_DIR` if set.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Seed for every randomized sampler.
    #[arg(long, global = true, default_value_t = 2024)]
    seed: u64,
    /// Output format; defaults to CSV for plot-data and JSON elsewhere.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Variable {
    #[value(name = "zeta")]
    Zeta,
    #[value(name = "Z")]
    Disc,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Dump the tau-function polynomials over an index range.
    Tau {
        #[arg(long, default_value_t = -5, allow_hyphen_values = true)]
        n_min: i64,
        #[arg(long, default_value_t = 5)]
        n_max: i64,
    },
    /// f_n as an exact rational function.
    Fn {
        #[arg(long)]
        n: i64,
        #[arg(long, value_enum, default_value_t = Variable::Zeta)]
        variable: Variable,
    },
    /// Exact correlation triple at a rational anisotropy.
    Corr {
        #[arg(long)]
        n: i64,
        /// `p/q`, an integer or a terminating decimal.
        #[arg(long, allow_hyphen_values = true)]
        zeta: String,
    },
    /// Exact diagonalization against the exact f_n.
    EdVerify(EdArgs),
    /// Painleve VI chain residuals.
    PviVerify {
        #[arg(long, default_value_t = 5)]
        n_max: usize,
    },
    /// Theta-function identity regression suite.
    ThetaSuite {
        /// Imaginary part of tau.
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        tau_re: f64,
        /// Override the identity tolerance.
        #[arg(long)]
        tol: Option<f64>,
        /// Override the lemma tolerance.
        #[arg(long)]
        lemma_tol: Option<f64>,
    },
    /// Infinite-lattice limit from the energy series against its closed form.
    Finf {
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Solve for the Q-operator eigenvalue and run its checks.
    Qsolve(QArgs),
    /// CSV of f_1..f_5 and f_inf over a zeta range.
    PlotData {
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5")]
        n: Vec<i64>,
        /// `start:stop:steps`.
        #[arg(long, default_value = "-6:6:600", allow_hyphen_values = true)]
        zeta_range: String,
    },
    /// Run every pipeline and report pass/fail per check.
    VerifyAll {
        #[arg(long)]
        quick: bool,
    },
}

#[derive(Debug, Args)]
pub struct EdArgs {
    #[arg(long = "L", value_delimiter = ',', default_value = "3,5,7,9,11")]
    pub lengths: Vec<usize>,
    /// `default`, a comma list of rationals, or `start:stop:points`.
    #[arg(long, default_value = "default", allow_hyphen_values = true)]
    pub zeta_grid: String,
    /// Also check the transfer-matrix eigenvalue for L ≤ 9.
    #[arg(long)]
    pub transfer: bool,
    #[arg(long, default_value_t = 1e-10)]
    pub energy_tol: f64,
    #[arg(long, default_value_t = 1e-7)]
    pub f_tol: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub spread_tol: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub transfer_tol: f64,
}

#[derive(Debug, Args)]
pub struct QArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
    #[arg(long, value_delimiter = ',', default_value = "ddt,qfc,wronskian,fn")]
    pub check: Vec<QCheck>,
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub f_tol: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum QCheck {
    Ddt,
    Qfc,
    Wronskian,
    Fn,
}

fn dispatch(cli: &Cli) -> Result<Output, UsageError> {
    let json_only = |name: &str| {
        if cli.format == Some(Format::Csv) {
            Err(UsageError(format!("{name} has no CSV form")))
        } else {
            Ok(())
        }
    };
    match &cli.command {
        Command::Tau { n_min, n_max } => {
            json_only("tau")?;
            commands::tau(*n_min, *n_max)
        }
        Command::Fn { n, variable } => {
            json_only("fn")?;
            commands::f_n(*n, *variable)
        }
        Command::Corr { n, zeta } => {
            json_only("corr")?;
            commands::corr(*n, zeta)
        }
        Command::EdVerify(args) => commands::ed_verify(args, cli.format.unwrap_or(Format::Json)),
        Command::PviVerify { n_max } => {
            json_only("pvi-verify")?;
            commands::pvi_verify(*n_max)
        }
        Command::ThetaSuite { tau, tau_re, tol, lemma_tol } => {
            json_only("theta-suite")?;
            commands::theta_suite(*tau_re, *tau, cli.seed, *tol, *lemma_tol)
        }
        Command::Finf { tau, tol } => {
            json_only("finf")?;
            commands::finf(*tau, *tol)
        }
        Command::Qsolve(args) => {
            json_only("qsolve")?;
            commands::qsolve(args)
        }
        Command::PlotData { n, zeta_range } => commands::plot_data(n, zeta_range, cli.format.unwrap_or(Format::Csv)),
        Command::VerifyAll { quick } => {
            json_only("verify-all")?;
            commands::verify_all(*quick, cli.seed)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match dispatch(&cli) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {}", e.0);
            return ExitCode::from(2);
        }
    };
    let path = cli.output.as_ref().map(|p| match std::env::var_os("XYZCORR_OUT_DIR") {
        Some(dir) if p.is_relative() => PathBuf::from(dir).join(p),
        _ => p.clone(),
    });
    match path {
        Some(p) => {
            if let Err(e) = std::fs::write(&p, &out.text) {
                eprintln!("error: cannot write {}: {e}", p.display());
                return ExitCode::from(2);
            }
        }
        None => {
            // A closed pipe (e.g. `| head`) is not an error worth reporting.
            let _ = std::io::stdout().lock().write_all(out.text.as_bytes());
        }
    }
    for msg in &out.failures {
        eprintln!("failed: {msg}");
    }
    if out.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
