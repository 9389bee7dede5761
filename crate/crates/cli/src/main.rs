mod args;
mod commands;
mod error;
mod mirror_spec;
mod output;
mod settings;
mod units;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::Quantity;
use error::CliError;

fn run(cli: &Cli) -> Result<(), CliError> {
    let (run, outcome) = match &cli.command {
        Command::Force(a) => commands::thermo(Quantity::Force, a)?,
        Command::Energy(a) => commands::thermo(Quantity::Energy, a)?,
        Command::FreeEnergy(a) => commands::thermo(Quantity::FreeEnergy, a)?,
        Command::Entropy(a) => commands::thermo(Quantity::Entropy, a)?,
        Command::Dos(a) => commands::dos(a)?,
        Command::Modes(a) => commands::modes(a)?,
        Command::SmatrixCheck(a) => commands::smatrix_check(a)?,
    };
    outcome.table.write(run.format, run.out.as_deref())?;
    if !outcome.flags.is_empty() {
        return Err(CliError::Numerical(outcome.flags.join("\n")));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let kind = match e {
                CliError::Config(_) => "configuration error",
                CliError::Numerical(_) => "numerical flag",
            };
            eprintln!("casimir: {kind}: {e}");
            e.exit_code()
        }
    }
}
