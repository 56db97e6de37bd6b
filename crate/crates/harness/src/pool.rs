//! Worker pool sized by `PFSA_DELCHAN_THREADS` (unset or 0 = one per core).

use crate::error::{HarnessError, Result};

pub const THREADS_VAR: &str = "PFSA_DELCHAN_THREADS";

pub fn thread_count() -> Result<usize> {
    match std::env::var(THREADS_VAR) {
        Err(_) => Ok(0),
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| HarnessError::Config(format!("{THREADS_VAR} must be a nonnegative integer, got {v:?}"))),
    }
}

/// Runs `f` on a pool with `threads` workers (0 = rayon's default).
pub fn install<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| HarnessError::Config(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}
