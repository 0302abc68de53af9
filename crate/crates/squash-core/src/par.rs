//! Data-parallel helpers with a sequential fallback.

use crate::config::Execution;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub fn map<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec == Execution::Parallel {
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

pub fn map_range<R, F>(exec: Execution, n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec == Execution::Parallel {
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

/// Chunked parallel fold: `f` maps an index range to a partial, `merge` combines partials.
pub fn fold_range<R, F, M>(exec: Execution, n: usize, chunk: usize, f: F, merge: M, init: R) -> R
where
    R: Send + Clone,
    F: Fn(std::ops::Range<usize>) -> R + Sync + Send,
    M: Fn(R, R) -> R + Sync + Send,
{
    let chunk = chunk.max(1);
    let nchunks = n.div_ceil(chunk);
    let parts = map_range(exec, nchunks, |c| f(c * chunk..((c + 1) * chunk).min(n)));
    parts.into_iter().fold(init, merge)
}
