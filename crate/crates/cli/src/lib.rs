//! Command-line front end for `affinemetrics`.

pub mod args;
pub mod commands;
pub mod error;
pub mod output;
pub mod schema;

pub use args::{Cli, Command};
pub use error::CliError;

/// Runs one parsed command line.
pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::SurfaceInfo(a) => commands::info::run(&a),
        Command::ArclenCompare(a) => commands::arclen::run(&a),
        Command::CommensurateSolve(a) => commands::solve::run(&a),
        Command::CheckIdentities(a) => commands::identities::run(&a),
    }
}
