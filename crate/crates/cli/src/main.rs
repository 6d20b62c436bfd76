mod cli;
mod commands;
mod data;
mod output;

use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;

use cli::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Tw(a) => commands::tw(a),
        Command::Quantile(a) => commands::quantile(a),
        Command::Pvalue(a) => commands::pvalue(a),
        Command::Test(a) => commands::test(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Compare(a) => commands::compare(a),
        Command::GridRegen(a) => commands::grid_regen(a),
    };
    match result {
        Ok(report) => {
            let mut stdout = io::stdout().lock();
            match writeln!(stdout, "{}", report.render(cli.format).trim_end()) {
                Err(e) if e.kind() != io::ErrorKind::BrokenPipe => {
                    eprintln!("error: cannot write output: {e}");
                    ExitCode::from(2)
                }
                _ => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<roytw::Error>().map_or(2, roytw::Error::exit_code);
            ExitCode::from(code)
        }
    }
}
