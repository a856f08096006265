use mdrate_core::simulate::Executor;
use rayon::prelude::*;

/// Runs replication chunks on a dedicated rayon pool.
///
/// Output order follows chunk index, so results match [`mdrate_core::simulate::Sequential`]
/// bit for bit whatever the worker count.
pub struct RayonExecutor {
    pool: rayon::ThreadPool,
}

impl RayonExecutor {
    /// Pool with `workers` threads; 0 picks the number of available cores.
    pub fn new(workers: usize) -> Result<Self, rayon::ThreadPoolBuildError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()?;
        Ok(RayonExecutor { pool })
    }

    /// Number of threads in the pool.
    pub fn workers(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl Executor for RayonExecutor {
    fn map_chunks<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        self.pool
            .install(|| (0..count).into_par_iter().map(f).collect())
    }
}
