//! `asymq` command-line front end.
//!
//! Exit codes: 0 success or passed campaign, 1 campaign violation, 2 usage or
//! input error, 3 state invariant failure.

mod commands;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use asymq::{Error, Tolerances};

#[derive(Debug, Parser)]
#[command(name = "asymq", version, about = "Entanglement asymmetry diagnostics for bipartite states")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Base seed for every randomized search.
    #[arg(long, global = true, env = "ASYMQ_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = TolProfile::Default)]
    pub tol_profile: TolProfile,
    /// Emit JSON on stdout instead of the table.
    #[arg(long, global = true)]
    pub json: bool,
    /// Write the JSON output (or the state file for `example`) here.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads; defaults to the available cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Include wall-clock timings in reports.
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TolProfile {
    Default,
    Strict,
}

impl TolProfile {
    pub fn tolerances(self) -> Tolerances {
        match self {
            TolProfile::Default => Tolerances::default(),
            TolProfile::Strict => Tolerances::strict(),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Full report for a state file.
    Analyze {
        state: PathBuf,
        #[command(flatten)]
        roof: RoofArgs,
    },
    /// Run a verification campaign.
    Verify {
        /// lemma1, lemma2, g_identity, monotonicity or theorem2.
        campaign: String,
        /// Defaults to 1000, or 200 for theorem2.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 3)]
        branches: usize,
    },
    /// Write a named example state.
    Example {
        /// mix01-bell, mix-2x4, bell or product.
        name: String,
        /// Mixing weight for mix01-bell.
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        /// Local dimension for bell.
        #[arg(long, default_value_t = 2)]
        dim: usize,
    },
    /// LU and LOCC swapability verdicts for a state file.
    Swapcheck {
        state: PathBuf,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        /// Also bound the asymmetry over this class (identity, pum:k,
        /// one_way_ab[:m], one_way_ba[:m]).
        #[arg(long)]
        ansatz: Option<String>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct RoofArgs {
    #[arg(long, default_value_t = 16)]
    pub restarts: usize,
    #[arg(long, default_value_t = 2)]
    pub ensemble_factor: usize,
    #[arg(long, default_value_t = 2000)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
}

/// Result of a command: machine output, table, and exit status.
pub struct Output {
    pub json: serde_json::Value,
    pub table: String,
    pub code: u8,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Invariant { .. } | Error::Inconsistent(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let out = match commands::run(&cli) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    if let Err(e) = emit(&cli.global, &out) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(out.code)
}

fn emit(g: &Global, out: &Output) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(&out.json).expect("report serialization is infallible") + "\n";
    if let Some(path) = &g.out {
        std::fs::write(path, &text)?;
    }
    let mut stdout = std::io::stdout().lock();
    if g.json {
        stdout.write_all(text.as_bytes())
    } else if g.out.is_none() || !out.table.is_empty() {
        stdout.write_all(out.table.as_bytes())
    } else {
        Ok(())
    }
}
