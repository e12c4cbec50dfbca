use std::io::Write;
use std::process::ExitCode;

use bellscope_cli::{run, threads_from_env, Cli};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = threads_from_env().and_then(|threads| {
        if let Some(n) = threads {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| bellscope_cli::error::CliError::Config(format!("thread pool: {e}")))?;
        }
        let stdout = std::io::stdout();
        let mut lock = stdout.lock();
        let r = run(&cli, &mut lock);
        lock.flush().ok();
        r
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bellscope: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
