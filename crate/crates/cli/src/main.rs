//! `kontact`: parse input documents, dispatch symbolic and numeric
//! operations, and emit deterministic text or JSON reports.
//!
//! Exit codes: 0 = all checks pass, 1 = a check failed (report emitted),
//! 2 = input or usage error (single-line diagnostic on stderr).

mod commands;
mod report;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "kontact", version, about = "k-contact geometry workbench for Lie systems")]
pub struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// RNG seed for sampling-based decision procedures.
    #[arg(long, global = true, env = "KONTACT_SEED")]
    pub seed: Option<String>,
    /// Override the default numeric tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Verify the defining conditions of the document's k-contact form.
    CheckKcontact { file: String },
    /// Close the generator fields under the Lie bracket.
    Closure {
        file: String,
        /// Comma-separated field names (defaults to the document's generators).
        #[arg(long)]
        generators: Option<String>,
        #[arg(long, default_value_t = 16)]
        max_dim: usize,
        #[arg(long, default_value_t = 16)]
        max_depth: usize,
    },
    /// Hamiltonian test of named fields against the document's form.
    Hamiltonians {
        file: String,
        /// Comma-separated field names (defaults to the generators).
        #[arg(long)]
        fields: Option<String>,
    },
    /// Closure, Hamiltonians, and the full k-function bracket table.
    BracketTable { file: String },
    /// Build a k-contact form from a distribution plus commuting symmetries.
    BuildEta {
        file: String,
        /// Comma-separated field names spanning the distribution.
        #[arg(long)]
        distribution: String,
        /// Comma-separated commuting symmetry field names.
        #[arg(long)]
        symmetries: String,
    },
    /// Diagonally prolong the document's fields and form.
    Prolong {
        file: String,
        /// Number of extra copies (so `copies = 1` doubles the chart).
        #[arg(long, default_value_t = 1)]
        copies: usize,
    },
    /// Companion system of coefficient ODEs for constants of motion.
    Companion {
        file: String,
        /// Comma-separated rational covector components, e.g. `1,0`.
        #[arg(long)]
        theta: String,
    },
    /// Integrate the document's time-dependent system with fixed-step RK4.
    Integrate {
        file: String,
        #[arg(long)]
        b1: Option<String>,
        #[arg(long)]
        b2: Option<String>,
        #[arg(long)]
        b3: Option<String>,
        #[arg(long)]
        b4: Option<String>,
        #[arg(long)]
        b5: Option<String>,
        #[arg(long)]
        b6: Option<String>,
        #[arg(long)]
        b7: Option<String>,
        #[arg(long)]
        b8: Option<String>,
        /// Comma-separated initial state (defaults to the origin).
        #[arg(long)]
        x0: Option<String>,
        /// Final time.
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        /// Check the conservation task declared in the document.
        #[arg(long)]
        check_constant: bool,
    },
    /// Run the bundled golden examples.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
    /// Finite-difference validation of a field's coefficient derivatives.
    FdCheck {
        file: String,
        #[arg(long)]
        field: String,
        /// Comma-separated variables to differentiate along (default: all).
        #[arg(long)]
        vars: Option<String>,
    },
}

#[derive(Subcommand)]
pub enum CorpusAction {
    /// Run one example, or all of them.
    Run {
        name: Option<String>,
        #[arg(long)]
        all: bool,
    },
    /// List registered example names.
    List,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap help/version requests are not errors.
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let msg = e.to_string();
            eprintln!("kontact: {}", msg.lines().next().unwrap_or("bad usage"));
            return ExitCode::from(2);
        }
    };
    match commands::dispatch(&cli) {
        Ok(all_pass) => {
            if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("kontact: {e}");
            ExitCode::from(2)
        }
    }
}
