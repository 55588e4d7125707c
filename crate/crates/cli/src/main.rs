use std::process::ExitCode;

use ordstat_cli::{worker_threads, EXIT_NUMERIC, THREADS_VAR};

fn main() -> ExitCode {
    let var = std::env::var(THREADS_VAR).ok();
    let threads = match worker_threads(var.as_deref()) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
    {
        eprintln!("error: could not start worker pool: {e}");
        return ExitCode::from(EXIT_NUMERIC as u8);
    }
    ExitCode::from(ordstat_cli::execute(std::env::args_os()) as u8)
}
