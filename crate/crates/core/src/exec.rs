//! Data-parallel mapping with a sequential fallback.
//!
//! With the `parallel` feature (default) work is spread over a rayon pool
//! of the requested size; without it, or with `parallelism == 1`, the same
//! closures run in index order on the calling thread. Results are always
//! returned in index order so reductions stay deterministic.

/// Default worker count: `BAE_PARALLELISM` if set, else available cores.
pub fn default_parallelism() -> usize {
    std::env::var("BAE_PARALLELISM")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&v| v >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

/// Maps `f` over `0..count` on a dedicated pool of `parallelism` workers.
pub fn map_indexed<R, F>(count: usize, parallelism: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if parallelism > 1 && count > 1 {
            use rayon::prelude::*;
            if let Ok(pool) = rayon::ThreadPoolBuilder::new()
                .num_threads(parallelism)
                .build()
            {
                return pool.install(|| (0..count).into_par_iter().map(f).collect());
            }
        }
    }
    let _ = parallelism;
    (0..count).map(f).collect()
}

/// Maps `f` over `0..count` on whatever rayon pool is current (the global
/// pool, or the enclosing [`map_indexed`] pool when nested).
pub fn map_ambient<R, F>(count: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..count).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..count).map(f).collect()
    }
}
