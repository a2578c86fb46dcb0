//! Command implementations behind the `rpod` binary.

pub mod args;
pub mod calibrate;
pub mod constants;
pub mod data;
pub mod detect;
pub mod error;
pub mod simulate;

use args::{Cli, Command, Common};
use error::{CliError, CliResult};
use rpod::Execution;
use serde::Serialize;
use std::path::Path;

/// Sequential for `--threads 1`, parallel otherwise.
pub fn execution(common: &Common) -> Execution {
    match common.threads {
        Some(1) => Execution::Sequential,
        _ if Execution::parallel_available() => Execution::Parallel,
        _ => Execution::Sequential,
    }
}

/// Size the global rayon pool; a no-op without the `parallel` feature.
pub fn init_threads(common: &Common) -> CliResult<()> {
    #[cfg(feature = "parallel")]
    if let Some(t) = common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t as usize)
            .build_global()
            .map_err(|e| CliError::failure(format!("could not start {t} threads: {e}")))?;
    }
    #[cfg(not(feature = "parallel"))]
    let _ = common;
    Ok(())
}

/// Pretty JSON with a trailing newline; parent directories are created.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let err = |e: std::io::Error| CliError::failure(format!("{}: {e}", path.display()));
    if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(err)?;
    }
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::failure(e.to_string()))?;
    std::fs::write(path, text + "\n").map_err(err)
}

pub fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Calibrate(a) => {
            init_threads(&a.common)?;
            calibrate::run(a).map(|_| ())
        }
        Command::Detect(a) => {
            init_threads(&a.common)?;
            detect::run(a).map(|_| ())
        }
        Command::Simulate(a) => {
            init_threads(&a.common)?;
            let out = simulate::run(a)?;
            match out.failed() {
                0 => Ok(()),
                k => Err(CliError::failure(format!("{k} of {} cells failed", out.cells.len()))),
            }
        }
    }
}
