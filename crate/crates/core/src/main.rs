use std::process::ExitCode;

use clap::Parser;
use mincf::cli::{exit_code, run, Cli, EXIT_INTERNAL};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let code = match std::panic::catch_unwind(|| run(&cli)) {
        Ok(Ok(outcome)) => {
            print!("{}", outcome.text);
            0
        }
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
        Err(_) => EXIT_INTERNAL,
    };
    ExitCode::from(code as u8)
}
