//! Simulation harness, Monte Carlo oracle, CSV input and report formats for
//! the growing-dimension homoscedasticity test in [`fcvt_core`].

mod error;
pub mod dataset;
pub mod ks;
pub mod laws;
pub mod montecarlo;
pub mod report;
pub mod seeding;
pub mod sim;
pub mod validation;

pub use error::{Error, Result};
pub use fcvt_core;

/// Worker pool sized by `FCVT_THREADS` (unset or 0 means one per core).
pub fn thread_pool_from_env() -> Result<rayon::ThreadPool> {
    let threads = match std::env::var("FCVT_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::InvalidConfig(format!("FCVT_THREADS=`{v}` is not a count")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))
}
