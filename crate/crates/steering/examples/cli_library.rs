//! Driving the command-line layer from code: parse arguments, compute the
//! report, render it as CSV and JSON.

use clap::Parser;
use imprecise_steering::cli::{execute, Cli, Format, RunConfig};

fn main() -> imprecise_steering::Result<()> {
    let cli = Cli::parse_from(["steering", "--seed", "3", "lhs", "pauli", "--eps", "0.005"]);
    let cfg = RunConfig::resolve(&cli)?;
    let report = execute(&cli.command, &cfg)?;
    print!("{}", report.render(&cfg)?);
    let json = RunConfig { format: Format::Json, ..cfg };
    print!("{}", report.render(&json)?);
    Ok(())
}
