use std::process::ExitCode;

use clap::Parser;
use opuclab_cli::{run, thread_cap, Args, CliError, RunConfig};

fn execute(cfg: &RunConfig) -> Result<(), CliError> {
    match thread_cap()? {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| CliError::Config(e.to_string()))?
            .install(|| run(cfg)),
        None => run(cfg),
    }
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cfg = match args.into_config() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{}", e.diagnostic(None));
            return ExitCode::from(e.exit_code());
        }
    };
    match execute(&cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.diagnostic(Some(&cfg)));
            ExitCode::from(e.exit_code())
        }
    }
}
