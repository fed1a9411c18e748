use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use perivar::cli::{error_detail, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            let _ = std::io::stdout().flush();
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            if let Some(detail) = error_detail(&e) {
                eprintln!("{detail}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
