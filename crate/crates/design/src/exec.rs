use rayon::prelude::*;
use rayon::ThreadPool;
use rvas_core::simulate::ReplicateExecutor;

/// Runs replicates on a rayon pool. `collect` on an indexed parallel
/// iterator keeps index order, so output does not depend on thread count.
pub struct RayonExecutor {
    pool: ThreadPool,
}

impl RayonExecutor {
    /// `threads == 0` lets rayon pick the number of workers.
    pub fn new(threads: usize) -> Result<Self, rayon::ThreadPoolBuildError> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
        Ok(RayonExecutor { pool })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl ReplicateExecutor for RayonExecutor {
    fn run<T, F>(&self, count: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync,
    {
        let job = &job;
        self.pool.install(|| (0..count).into_par_iter().map(job).collect())
    }
}
