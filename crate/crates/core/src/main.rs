use std::process::ExitCode;

use clap::error::ErrorKind;
use starcf::cli;

fn main() -> ExitCode {
    let parsed = match cli::parse_args(std::env::args_os()) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match cli::execute(&parsed) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("starcf: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
