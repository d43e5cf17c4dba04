//! Order-preserving parallel map used by the Monte Carlo drivers.

use rayon::prelude::*;

/// Evaluate `f(0..count)` and return the results in index order.
///
/// With `workers <= 1` the map runs on the calling thread. Otherwise a
/// dedicated pool of `workers` threads is used. Because results are
/// collected by index, any reduction done by the caller afterwards is
/// independent of the worker count.
pub fn map_indexed<T, F>(count: usize, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if workers <= 1 || count <= 1 {
        return (0..count).map(f).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(|| (0..count).into_par_iter().map(&f).collect()),
        Err(_) => (0..count).map(f).collect(),
    }
}
