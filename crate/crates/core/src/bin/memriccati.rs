use std::process::ExitCode;

use memriccati::cli::{self, CliError};

fn main() -> ExitCode {
    let result = cli::parse_config(std::env::args_os()).and_then(|config| cli::run(&config));
    match result {
        Ok(summary) => {
            for line in &summary.lines {
                println!("{line}");
            }
            for path in &summary.files {
                println!("wrote {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(CliError::Help(text)) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            let msg = err.to_string();
            let first = msg.lines().find(|l| !l.trim().is_empty()).unwrap_or("error");
            eprintln!("memriccati: {first}");
            if let CliError::Usage(full) = &err {
                if full.lines().count() > 1 {
                    eprintln!("{}", full.trim_end());
                }
            }
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
