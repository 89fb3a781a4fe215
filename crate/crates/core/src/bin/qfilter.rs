use std::process::ExitCode;

use clap::Parser;
use qfilter::cli::{exit_code, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            println!("{}", report.summary);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("qfilter: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
