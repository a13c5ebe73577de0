//! Command-line front end of the Loewner lab. The binary is `loewner-lab`.

pub mod args;
mod commands;
pub mod error;
pub mod plot;
pub mod settings;
pub mod spec;

pub use commands::run;
pub use error::{CliError, CliResult};

/// Caps the global rayon pool at `LOEWNER_LAB_THREADS` when set.
pub fn configure_threads() -> CliResult<()> {
    let Ok(value) = std::env::var("LOEWNER_LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::usage(format!("LOEWNER_LAB_THREADS must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::usage(format!("LOEWNER_LAB_THREADS: {e}")))
}
