use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use sparsegen_cli::{run, thread_count, Cli, CliError, EXIT_ARGUMENT, EXIT_OK};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ARGUMENT as u8 } else { EXIT_OK as u8 });
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sparsegen: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let env = std::env::var("SPARSEGEN_THREADS").ok();
    if let Some(t) = thread_count(cli.threads, env.as_deref())? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Output(format!("thread pool: {e}")))?;
    }
    let text = run(cli)?.render();
    match &cli.out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Output(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| CliError::Output(e.to_string()))
        }
    }
}
