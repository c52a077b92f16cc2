//! Fixed-size worker pools for the propagation kernel and state generation.
//!
//! With the `parallel` feature a pool of `W > 1` workers is a dedicated rayon
//! thread pool; otherwise, or with a single worker, everything runs on the
//! calling thread. Work is always split into the same contiguous chunks and
//! results are returned in chunk order, so output never depends on `W`.

#[cfg(feature = "parallel")]
use std::sync::Arc;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone)]
pub struct WorkerPool {
    workers: usize,
    #[cfg(feature = "parallel")]
    pool: Option<Arc<rayon::ThreadPool>>,
}

impl std::fmt::Debug for WorkerPool {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WorkerPool").field("workers", &self.workers).finish()
    }
}

impl WorkerPool {
    pub fn new(workers: usize) -> Self {
        let workers = workers.max(1);
        WorkerPool {
            workers,
            #[cfg(feature = "parallel")]
            pool: (workers > 1).then(|| {
                Arc::new(
                    rayon::ThreadPoolBuilder::new()
                        .num_threads(workers)
                        .build()
                        .expect("failed to start worker pool"),
                )
            }),
        }
    }

    pub fn sequential() -> Self {
        Self::new(1)
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    /// Whether work actually fans out to other threads.
    pub fn is_parallel(&self) -> bool {
        #[cfg(feature = "parallel")]
        {
            self.pool.is_some()
        }
        #[cfg(not(feature = "parallel"))]
        {
            false
        }
    }

    /// Applies `f` to consecutive chunks of `out` (each paired with the index
    /// of its first element) and folds the per-chunk results with `merge`.
    pub fn for_each_chunk_mut<T, R>(
        &self,
        out: &mut [T],
        min_chunk: usize,
        identity: R,
        f: impl Fn(usize, &mut [T]) -> R + Sync + Send,
        merge: impl Fn(R, R) -> R + Sync + Send,
    ) -> R
    where
        T: Send,
        R: Send + Clone + Sync,
    {
        #[cfg(feature = "parallel")]
        if let Some(pool) = &self.pool {
            let chunk = out.len().div_ceil(self.workers * 4).max(min_chunk).max(1);
            return pool.install(|| {
                out.par_chunks_mut(chunk)
                    .enumerate()
                    .map(|(i, c)| f(i * chunk, c))
                    .reduce(|| identity.clone(), &merge)
            });
        }
        let _ = min_chunk;
        merge(identity, f(0, out))
    }

    /// Maps `f` over `items`, returning results in input order.
    pub fn map_ordered<T, R>(&self, items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R>
    where
        T: Sync,
        R: Send,
    {
        #[cfg(feature = "parallel")]
        if let Some(pool) = &self.pool {
            let chunk = items.len().div_ceil(self.workers).max(1);
            return pool.install(|| items.par_iter().with_min_len(chunk.min(64)).map(&f).collect());
        }
        items.iter().map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn results_do_not_depend_on_worker_count() {
        let items: Vec<u64> = (0..10_000).collect();
        let one = WorkerPool::new(1).map_ordered(&items, |x| x * x % 97);
        let four = WorkerPool::new(4).map_ordered(&items, |x| x * x % 97);
        assert_eq!(one, four);

        for w in [1, 3] {
            let mut out = vec![0u64; 5000];
            let sum = WorkerPool::new(w).for_each_chunk_mut(
                &mut out,
                16,
                0u64,
                |first, c| {
                    for (i, slot) in c.iter_mut().enumerate() {
                        *slot = (first + i) as u64;
                    }
                    c.iter().sum()
                },
                |a, b| a + b,
            );
            assert_eq!(sum, (0..5000).sum::<u64>());
            assert!(out.iter().enumerate().all(|(i, &v)| v == i as u64));
        }
    }
}
