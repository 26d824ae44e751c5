use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use gkstab_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            // a closed pipe is not an error worth reporting
            let _ = stdout.write_all(out.text.as_bytes());
            if out.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("gkstab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
