//! Data-parallel helpers with a sequential fallback.
//!
//! Built with the `parallel` feature (the default) these fan work out to
//! the rayon pool; without it they degrade to plain serial loops. Results
//! are collected in index order either way, so callers observe identical
//! output regardless of feature flags or worker count.

#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Send + Sync,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Send + Sync,
{
    (0..n).map(f).collect()
}

/// Always-serial variant, kept available for benchmarks and for
/// prove-by-comparison determinism tests.
pub fn map_indexed_serial<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}
