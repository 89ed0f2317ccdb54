//! Experiment harness around the `fracdiff` crate: pointwise error tables,
//! convergence sweeps with slope fits, method comparisons and quadrature
//! rule dumps, written as CSV with gnuplot scripts and JSON sidecars.

pub mod commands;
pub mod config;
pub mod input;
pub mod report;

pub use commands::Outcome;
pub use config::{Cli, Command};

/// Runs one parsed command line.
pub fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    match &cli.command {
        Command::Deriv(args) => commands::deriv(args),
        Command::Convergence(args) => commands::convergence(args),
        Command::Compare(args) => commands::compare(args),
        Command::Nodes(args) => commands::nodes(args),
    }
}
