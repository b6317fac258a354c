mod args;
mod commands;
mod render;

use std::process::ExitCode;

use clap::Parser;
use infoclone::measurement::Scheme;

use args::{Cli, Command, NoiseArg};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = &cli.output;
    let result = match &cli.command {
        Command::Transfer(a) => commands::transfer(out, a),
        Command::Clone(a) => commands::clone(out, a),
        Command::FockVerify(a) => commands::fock_verify(out, a),
        Command::McInfo(a) => commands::mc(out, a, Scheme::InfoCloning, NoiseArg::Printed),
        Command::McGauss(a) => commands::mc(out, &a.run, Scheme::Gaussian, a.noise),
        Command::Pdf(a) => commands::pdf(out, a),
        Command::Table(a) => commands::table(out, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("infoclone: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
