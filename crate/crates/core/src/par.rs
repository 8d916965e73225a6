//! Data-parallel execution with a sequential fallback.
//!
//! Parallel execution needs the `parallel` feature; without it
//! [`Execution::Parallel`] silently runs sequentially. Every caller derives
//! per-item randomness from the item index, so results never depend on the
//! execution mode or thread count.

/// How independent work items are scheduled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// `(0..n).map(f).collect()`, in index order.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                (0..n).into_par_iter().map(f).collect()
            }
            _ => (0..n).map(f).collect(),
        }
    }

    /// Splits `0..n` into fixed chunks, maps each chunk and folds the results
    /// in chunk order. Chunk boundaries do not depend on the thread count.
    pub fn map_chunks<T, F, R>(self, n: usize, chunk: usize, f: F, reduce: R) -> Option<T>
    where
        T: Send,
        F: Fn(std::ops::Range<usize>) -> T + Sync + Send,
        R: Fn(T, T) -> T,
    {
        let chunk = chunk.max(1);
        let count = n.div_ceil(chunk);
        let parts = self.map(count, |i| f(i * chunk..((i + 1) * chunk).min(n)));
        parts.into_iter().reduce(reduce)
    }
}
