use std::process::ExitCode;

use clap::Parser;
use onebit_cli::{resolve, run, Args, CliError};
use onebit_precoding::eval::default_workers;

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = resolve(&args).and_then(|cfg| run(&cfg, args.workers.unwrap_or_else(default_workers)));
    match result {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            let kind = match e {
                CliError::Usage(_) => "invalid configuration",
                CliError::Runtime(_) => "error",
            };
            eprintln!("onebit: {kind}: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
