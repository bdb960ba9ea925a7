//! `surfhom`: command-line front end for the surface factorization homology
//! toolkit.

mod commands;
mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::output::Failure;

#[derive(Parser, Debug)]
#[command(name = "surfhom", version, about = "Factorization homology of surfaces over unitary braided fusion categories")]
pub struct Cli {
    #[command(flatten)]
    pub source: Source,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,

    /// Replaces every check threshold.
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    /// Cap on `rank^(2n)` channel terms when enumerating handle algebras.
    #[arg(long, global = true, default_value_t = surfhom_core::gluing::DEFAULT_CAP)]
    pub cap: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
pub struct Source {
    /// Category file (JSON).
    #[arg(long, global = true)]
    pub category: Option<String>,

    /// Embedded category: trivial, fib, ising, or pointed:<orders>:<bichar>.
    #[arg(long, global = true)]
    pub builtin: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Coherence battery for the category data.
    Verify,
    /// Reflection equation algebra, counit battery, norms and MCG battery.
    Refl {
        /// Dehn-twist candidate.
        #[arg(long, default_value = "component-twist")]
        candidate: String,
    },
    /// Classification, topology and the handle algebra of a gluing pattern.
    Surface {
        /// Pattern text such as "1 2 1' 2'", or a file holding it.
        #[arg(long)]
        pattern: String,
    },
    /// Closed-surface reduction `a_P ⊗_F 1`.
    Reduce {
        /// Pattern with one boundary circle, or the annulus.
        #[arg(long)]
        pattern: String,
        /// Right F-module structure on a_P (JSON), when none is shipped.
        #[arg(long)]
        module: Option<String>,
    },
    /// States, GNS and the finite realization of the inclusion.
    Gns {
        /// Use the handle algebra of this pattern instead of F.
        #[arg(long)]
        pattern: Option<String>,
        /// counit | trace | delta | a JSON array of values on the ground basis.
        #[arg(long, default_value = "counit")]
        state: String,
        /// Realization datum: auto | none | trivial | regular.
        #[arg(long, default_value = "auto")]
        realization: String,
    },
}

fn threads_from_env() -> Result<(), Failure> {
    match std::env::var("SURFHOM_THREADS") {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| Failure::usage(format!("SURFHOM_THREADS must be a positive integer, got `{v}`")))?;
            surfhom_core::parallel::set_max_threads(n);
            Ok(())
        }
        Err(_) => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = threads_from_env().and_then(|_| commands::run(&cli));
    match result {
        Ok((text, pass)) => {
            print!("{text}");
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
