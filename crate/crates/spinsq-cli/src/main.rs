//! Command-line front end: state and model I/O, criterion reports,
//! critical-temperature solving, bound-entanglement scans, polytope export
//! and separable sampling.

use clap::{Parser, Subcommand};
use spinsq_cli::commands::*;
use spinsq_cli::CliError;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "spinsq",
    about = "Multi-qubit entanglement detection from collective spin moments",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct ModelFlags {
    /// Model kind (heisenberg_chain, xy_chain, heisenberg_fc, xy_fc, lmg,
    /// ising_transverse, nanotube, custom) or a path to a model-json file.
    #[arg(long)]
    model: String,
    /// Site count (when --model names a kind).
    #[arg(long)]
    n: Option<usize>,
    /// Transverse field of the Ising chain.
    #[arg(long)]
    b: Option<f64>,
    /// Coupling strength of the collective two-axis model.
    #[arg(long)]
    lambda: Option<f64>,
    /// Anisotropy of the collective two-axis model.
    #[arg(long)]
    gamma: Option<f64>,
    /// Longitudinal field of the collective two-axis model.
    #[arg(long)]
    field: Option<f64>,
}

impl ModelFlags {
    fn args(&self) -> ModelArgs {
        ModelArgs {
            model: self.model.clone(),
            n: self.n,
            b: self.b,
            lambda: self.lambda,
            gamma: self.gamma,
            field: self.field,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Extract collective moments from a state file (qstate-json -> moments-json).
    Moments {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate every criterion on a state or moments file.
    Check {
        input: PathBuf,
        /// Violation threshold.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value = "json")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Critical temperature of one detector on one model.
    Tc {
        #[command(flatten)]
        model: ModelFlags,
        /// Detector: ppt, ccnr, 8a, 8b, 8c, 8d or ssi.
        #[arg(long)]
        detector: String,
        /// Upper end of the temperature scan.
        #[arg(long, default_value_t = 12.0)]
        tmax: f64,
        /// Bisection bracket width.
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        #[arg(long, default_value = "csv")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The full critical-temperature reference grid (5 families, N = 3..9).
    Table2 {
        /// Bisection bracket width.
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        /// Worker threads.
        #[arg(long, default_value_t = default_jobs())]
        jobs: usize,
        #[arg(long, default_value = "csv")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Joint PPT / moment-criterion verdicts over a temperature grid.
    BoundScan {
        #[command(flatten)]
        model: ModelFlags,
        #[arg(long, default_value_t = 0.5)]
        tmin: f64,
        #[arg(long, default_value_t = 8.0)]
        tmax: f64,
        #[arg(long, default_value_t = 16)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Vertices and facets of the separable polytope.
    Polytope {
        /// Space: k (second moments) or eigen (chi eigenvalues).
        #[arg(long, default_value = "k")]
        space: String,
        #[arg(long)]
        n: usize,
        /// Mean spin as "jx,jy,jz".
        #[arg(long, default_value = "0,0,0")]
        j: String,
        /// Also write a Wavefront OBJ mesh of the hull.
        #[arg(long)]
        obj: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Second-moment cloud of random separable states (CSV).
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Largest number of mixture components per sample.
        #[arg(long, default_value_t = 4)]
        mixing: usize,
        /// Twirl each sample so its mean spin vanishes exactly.
        #[arg(long, default_value_t = false)]
        zero_j: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Critical temperatures and the bound-entanglement window of the
    /// nine-site ring model.
    Nanotube {
        /// Bisection bracket width in Kelvin.
        #[arg(long, default_value_t = 0.02)]
        tol: f64,
        #[arg(long, default_value = "human")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn default_jobs() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Moments { input, out } => cmd_moments(input, out),
        Command::Check {
            input,
            tol,
            format,
            out,
        } => cmd_check(input, *tol, format, out),
        Command::Tc {
            model,
            detector,
            tmax,
            tol,
            format,
            out,
        } => cmd_tc(&model.args(), detector, *tmax, *tol, format, out),
        Command::Table2 {
            tol,
            jobs,
            format,
            out,
        } => cmd_table2(*tol, *jobs, format, out),
        Command::BoundScan {
            model,
            tmin,
            tmax,
            points,
            out,
        } => cmd_bound_scan(&model.args(), *tmin, *tmax, *points, out),
        Command::Polytope {
            space,
            n,
            j,
            obj,
            out,
        } => cmd_polytope(space, *n, j, obj, out),
        Command::Sample {
            n,
            count,
            seed,
            mixing,
            zero_j,
            out,
        } => cmd_sample(*n, *count, *seed, *mixing, *zero_j, out),
        Command::Nanotube { tol, format, out } => cmd_nanotube(*tol, format, out),
    }
}

fn main() {
    apply_env_cap();
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
