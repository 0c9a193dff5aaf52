use std::process::ExitCode;

use clap::Parser;

use propsim_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("propsim: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
