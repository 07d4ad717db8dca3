use rayon::prelude::*;
use rayon::ThreadPool;

use liqarch_core::backtest::WindowMap;

/// Runs windows on a rayon pool. Results come back in window order, so the
/// output does not depend on the number of threads.
#[derive(Clone, Copy)]
pub struct Rayon<'a> {
    pub pool: &'a ThreadPool,
}

impl WindowMap for Rayon<'_> {
    fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        self.pool.install(|| (0..n).into_par_iter().map(f).collect())
    }
}

pub fn pool(threads: Option<usize>) -> Result<ThreadPool, rayon::ThreadPoolBuildError> {
    rayon::ThreadPoolBuilder::new().num_threads(threads.unwrap_or(0)).build()
}
