//! Library half of the `kaon` binary: configuration, initial states and the
//! four commands.

#![forbid(unsafe_code)]

pub mod check;
pub mod config;
pub mod error;
pub mod series;
pub mod states;

use clap::{Parser, Subcommand};

pub use config::{Overrides, RunConfig};
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "kaon",
    version,
    about = "Neutral kaon complementarity and concurrence"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Single-kaon time series: t,P,V,S,M,trace_ss,trace_ff,bohr_residual.
    Single(Overrides),
    /// Kaon-pair time series: t,P_left,V_left,C_closed,C_wootters,trace_ssss,jb_residual.
    Bipartite(Overrides),
    /// Run every invariant suite; exit status 1 if any fails.
    Check(Overrides),
    /// Print the resolved parameters, derived constants included.
    Params(Overrides),
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Single(o) => series::run_single(&RunConfig::resolve(o)?),
        Command::Bipartite(o) => series::run_bipartite(&RunConfig::resolve(o)?),
        Command::Check(o) => check::run_check(&RunConfig::resolve(o)?),
        Command::Params(o) => series::run_params(&RunConfig::resolve(o)?),
    }
}
