//! `bsa-lab`: Lewenstein–Sanpera decompositions of two-qubit states from the
//! command line. Every subcommand prints one JSON report on stdout.
//!
//! Exit codes: 0 success, 1 verification failed, 2 invalid input,
//! 3 numerical search did not converge.

mod commands;
mod report;
mod state;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug)]
pub enum CliError {
    Input(String),
    NonConvergence(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) | CliError::Io(_) => 2,
            CliError::NonConvergence(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "invalid input: {m}"),
            CliError::NonConvergence(m) => write!(f, "no convergence: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "bsa-lab", version, about = "Best separable approximations of two-qubit states")]
pub struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed for randomized searches.
    #[arg(long, global = true, env = "BSA_LAB_SEED")]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct StateArgs {
    /// Bell weights p1,p2,p3,p4 (phi+, phi-, psi+, psi-).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    p: Option<Vec<f64>>,

    /// Correlation vector t1,t2,t3.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    t: Option<Vec<f64>>,

    /// JSON file with {"p": ..}, {"t": ..}, {"matrix": ..} or a bare 4x4
    /// array of [re, im] entries.
    #[arg(long)]
    matrix_file: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameChoice {
    Original,
    Canonical,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeometryFormat {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct OpArgs {
    /// Filtration scale of A.
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    /// Filtration strength of A, |a| < 1.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    a: f64,
    /// Filtration axis of A: x, y, z or a comma-separated vector.
    #[arg(long, default_value = "z", allow_hyphen_values = true)]
    axis: String,
    /// Rotation axis of A's unitary.
    #[arg(long, default_value = "z", allow_hyphen_values = true)]
    rot_axis: String,
    /// Rotation angle of A's unitary.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    angle: f64,
    /// Global phase of A's unitary.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    phase: f64,

    #[arg(long, default_value_t = 1.0)]
    mu_b: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    b: f64,
    #[arg(long, default_value = "z", allow_hyphen_values = true)]
    axis_b: String,
    #[arg(long, default_value = "z", allow_hyphen_values = true)]
    rot_axis_b: String,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    angle_b: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    phase_b: f64,

    /// Use A's operator for B as well.
    #[arg(long)]
    same_ab: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Closed-form decomposition of a Bell-diagonal state.
    Decompose {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, value_enum, default_value_t = FrameChoice::Original)]
        frame: FrameChoice,
    },
    /// Check optimality of the closed-form decomposition; exit 1 on failure.
    Verify {
        #[command(flatten)]
        state: StateArgs,
        /// Tolerances ten times tighter.
        #[arg(long)]
        strict: bool,
        /// Add this much weight to one ensemble term before verifying.
        #[arg(long, allow_hyphen_values = true)]
        perturb: Option<f64>,
        /// 1-based ensemble term to perturb.
        #[arg(long, default_value_t = 1)]
        perturb_term: usize,
    },
    /// Apply local filtering A⊗B and transform the decomposition.
    Lqcc {
        #[command(flatten)]
        state: StateArgs,
        /// JSON {"A": {...}, "B": {...}}; overrides the operator flags.
        #[arg(long)]
        pair_file: Option<PathBuf>,
        #[command(flatten)]
        op: OpArgs,
        /// Verify the transformed decomposition even when optimality is not
        /// guaranteed.
        #[arg(long)]
        check: bool,
    },
    /// Closest separable Bell-diagonal state in relative entropy.
    Entropy {
        #[command(flatten)]
        state: StateArgs,
        /// Also run the numerical minimizer on this grid.
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Numerical best-separable-approximation search.
    Oracle {
        #[command(flatten)]
        state: StateArgs,
        /// JSON search configuration; flags below override it.
        #[arg(long)]
        config_file: Option<PathBuf>,
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long)]
        max_iters: Option<usize>,
        #[arg(long)]
        step_shrink: Option<f64>,
        #[arg(long)]
        lambda_tol: Option<f64>,
        /// Also run the relative-entropy minimizer on this grid.
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Tetrahedron and octahedron data, plus a classified point grid.
    Geometry {
        /// Grid intervals per axis; 0 emits vertices and faces only.
        #[arg(default_value_t = 0)]
        resolution: usize,
        #[arg(long, value_enum, default_value_t = GeometryFormat::Json)]
        format: GeometryFormat,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(out) => {
            let written = match &cli.out {
                Some(path) => std::fs::write(path, &out.text).map_err(|e| format!("{}: {e}", path.display())),
                None => {
                    print!("{}", out.text);
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("bsa-lab: i/o error: {e}");
                return ExitCode::from(2);
            }
            if let Some(msg) = &out.failure {
                eprintln!("bsa-lab: {msg}");
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("bsa-lab: {e}");
            ExitCode::from(e.code())
        }
    }
}
