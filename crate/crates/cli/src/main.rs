//! `eschlab`: classification, certificates and the verification suite from
//! the command line.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::Format;

#[derive(Parser, Debug)]
#[command(name = "eschlab", version, about = "Curvature of Eschenburg spaces under the Eschenburg and Wilking metrics")]
struct Cli {
    /// Master seed (decimal or 0x-hex); `ESCHLAB_SEED` is used when absent.
    #[arg(long, global = true)]
    seed: Option<String>,
    /// Deformation parameter of the left-invariant metric.
    #[arg(long, global = true)]
    t: Option<String>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// File of `key=value` lines (seed, samples, t, format, tol.<name>).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Tolerance override `name=value`; repeatable.
    #[arg(long = "tol", global = true)]
    tol: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Admissibility, the six products, the curvature class and canonical forms.
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        #[arg(long, allow_hyphen_values = true)]
        q: String,
    },
    /// JSON-lines catalog of the isometry classes with entries in `[-max_abs, max_abs]`.
    Enumerate {
        #[arg(long)]
        max_abs: i64,
        /// Keep only this curvature class.
        #[arg(long)]
        filter: Option<String>,
        /// Catalog path; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Samples Haar points and certifies flat planes of the Eschenburg metric.
    ScanEsch {
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Wilking-metric analysis of `((0,0,q1+q2+q3), q)`.
    Wilking {
        #[command(subcommand)]
        mode: WilkingMode,
    },
    /// Runs the acceptance suite.
    VerifyPaper {
        #[arg(value_parser = ["fast", "full"])]
        level: String,
        /// Comma-separated criterion numbers; all when absent.
        #[arg(long)]
        criteria: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum WilkingMode {
    /// Candidate filter and the applicable case.
    Analyze {
        #[arg(long, allow_hyphen_values = true)]
        q: String,
    },
    /// Witness angle and a verified certificate.
    Certify {
        #[arg(long, allow_hyphen_values = true)]
        q: String,
    },
    /// `(theta, h, g, flags)` on a uniform grid, as CSV by default.
    Sweep {
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        theta_min: f64,
        #[arg(long, default_value_t = std::f64::consts::PI, allow_hyphen_values = true)]
        theta_max: f64,
        #[arg(long, default_value_t = 181)]
        steps: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("eschlab: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
