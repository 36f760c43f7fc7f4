//! Data-parallel map over independent work items.
//!
//! With the `parallel` feature (default) the map runs on the rayon pool;
//! without it the same closure runs sequentially. Results are collected
//! in index order either way, so outputs are identical across modes and
//! thread counts.

use crate::error::Result;

#[cfg(feature = "parallel")]
pub(crate) fn try_map_indices<T, F>(n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn try_map_indices<T, F>(n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    (0..n).map(f).collect()
}
