use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    if let Err(msg) = dunkl_lab::cli::init_threads_from_env() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    let cli = dunkl_lab::cli::Cli::parse();
    ExitCode::from(dunkl_lab::cli::run(cli))
}
