//! `magiclab` command-line front end. Every command prints one JSON envelope
//! on stdout; failures print `{"error": {...}}` and exit with status 1.

mod commands;
mod state_file;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use magiclab::lattice::{Boundary, LatticeKind, Phase};
use magiclab::measures::Tolerances;

#[derive(Debug, Parser)]
#[command(
    name = "magiclab",
    version,
    about = "Stabilizer magic measures and bounds for small systems"
)]
pub struct Cli {
    /// Seed for every random choice made by the command.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Magic measures of a state file.
    Measures {
        #[arg(long)]
        state: PathBuf,
    },
    /// Nonquadraticity of an ANF and the bound it implies.
    Chi {
        /// Monomials joined by '+', e.g. "x1*x2*x3 + x4".
        #[arg(long)]
        anf: String,
        /// Number of variables; defaults to the largest index in the ANF.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Cell-decomposition bound for a lattice hypergraph state.
    Lattice {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(long, value_enum, default_value = "periodic")]
        boundary: BoundaryArg,
        #[arg(long, value_enum, default_value = "ccz-only")]
        phase: PhaseArg,
        /// Also compute the dense measures (n <= 4).
        #[arg(long)]
        measures: bool,
        /// Write the dense state to this file (n <= 12).
        #[arg(long)]
        dump_state: Option<PathBuf>,
    },
    /// Wigner negativity and mana of a qutrit state file.
    Wigner {
        #[arg(long)]
        state: PathBuf,
        /// Write the Wigner function as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Pauli measurement outcome distribution checked against the dmin cap.
    Mbqc {
        #[arg(long)]
        state: PathBuf,
        /// Comma-separated commuting Pauli strings, e.g. "XII,IXI".
        #[arg(long, conflicts_with = "k")]
        layout: Option<String>,
        /// Draw a random layout of this many observables from the seed.
        #[arg(long)]
        k: Option<usize>,
    },
    /// dmin distribution over Haar-random qubit states.
    Haar {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        samples: u64,
        /// Also compute the stabilizer extent.
        #[arg(long)]
        dmax: bool,
        /// Also compute the free robustness.
        #[arg(long)]
        lr: bool,
        /// Write per-sample values as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Build or load the cached stabilizer dictionary.
    Enum {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
    },
    /// Welch cubic function on n variables.
    Welch {
        #[arg(long)]
        n: usize,
    },
    /// Write a named state to a state file.
    State {
        #[arg(long, value_enum)]
        kind: StateKind,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KindArg {
    Triangular,
    UnionJack,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BoundaryArg {
    Periodic,
    Open,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PhaseArg {
    CczOnly,
    LevinGu,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StateKind {
    /// Product of golden single-qubit states.
    Golden,
    /// Haar-random state drawn from the seed.
    Haar,
    /// CCZ applied to |+++>.
    Ccz,
    /// Uniform superposition.
    Plus,
}

impl From<KindArg> for LatticeKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Triangular => LatticeKind::Triangular,
            KindArg::UnionJack => LatticeKind::UnionJack,
        }
    }
}

impl From<BoundaryArg> for Boundary {
    fn from(b: BoundaryArg) -> Self {
        match b {
            BoundaryArg::Periodic => Boundary::Periodic,
            BoundaryArg::Open => Boundary::Open,
        }
    }
}

impl From<PhaseArg> for Phase {
    fn from(p: PhaseArg) -> Self {
        match p {
            PhaseArg::CczOnly => Phase::CczOnly,
            PhaseArg::LevinGu => Phase::LevinGu,
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a> {
    version: &'static str,
    command: &'a str,
    seed: u64,
    tolerances: Tolerances,
    result: Value,
}

#[derive(Serialize)]
struct ErrorBody {
    kind: String,
    message: String,
}

fn error_kind(err: &anyhow::Error) -> String {
    use magiclab::Error as E;
    match err.downcast_ref::<E>() {
        Some(E::DimensionMismatch(_)) => "dimension-mismatch",
        Some(E::Unsupported(_)) => "unsupported",
        Some(E::InvalidInput(_)) => "invalid-input",
        Some(E::InconsistentTableau(_)) => "inconsistent-tableau",
        Some(E::ResourceLimit(_)) => "resource-limit",
        Some(E::Parse(_)) => "parse",
        Some(E::NonConvergence { .. }) => "non-convergence",
        Some(E::Solver(_)) => "solver",
        Some(E::Cache(_)) => "cache",
        None => "io",
    }
    .to_string()
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors.
    let cli = Cli::parse();
    let name = commands::name(&cli.command);
    match commands::run(&cli) {
        Ok(result) => {
            let env = Envelope {
                version: env!("CARGO_PKG_VERSION"),
                command: name,
                seed: cli.seed,
                tolerances: Tolerances::default(),
                result,
            };
            println!(
                "{}",
                serde_json::to_string_pretty(&env).expect("serializable report")
            );
            ExitCode::SUCCESS
        }
        Err(err) => {
            let body = ErrorBody {
                kind: error_kind(&err),
                message: format!("{err:#}"),
            };
            let out = serde_json::json!({
                "version": env!("CARGO_PKG_VERSION"),
                "command": name,
                "error": body,
            });
            println!(
                "{}",
                serde_json::to_string_pretty(&out).expect("serializable error")
            );
            ExitCode::from(1)
        }
    }
}
