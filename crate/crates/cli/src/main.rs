use std::process::ExitCode;

use clap::Parser;

use jmom::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(output) => {
            print!("{}", output.text);
            if output.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(jmom::EXIT_FAIL)
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
