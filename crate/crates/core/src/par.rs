//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature the maps run on the rayon pool; without it
//! they are plain iterators. Results are always returned in index order and
//! every reduction in the crate folds them sequentially, so the output is
//! bit-identical in both builds and for any thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Block size used by chunked reductions. Fixed so that summation order does
/// not depend on the number of worker threads.
pub const REDUCTION_BLOCK: usize = 64;

#[cfg(feature = "parallel")]
pub fn map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map_slice<S, T, F>(items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_slice<S, T, F>(items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    items.iter().map(f).collect()
}

/// Deterministic blocked reduction: `map` is applied to `0..n`, blocks of
/// [`REDUCTION_BLOCK`] consecutive indices are folded in parallel, and the
/// block partials are folded in order.
pub fn blocked_sum<T, F, A>(n: usize, zero: impl Fn() -> T + Sync + Send, map: F, add: A) -> T
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
    A: Fn(T, T) -> T + Sync + Send,
{
    let blocks = n.div_ceil(REDUCTION_BLOCK);
    let partials = map_range(blocks, |b| {
        let lo = b * REDUCTION_BLOCK;
        let hi = (lo + REDUCTION_BLOCK).min(n);
        (lo..hi).fold(zero(), |acc, i| add(acc, map(i)))
    });
    partials.into_iter().fold(zero(), &add)
}

/// True when the crate was built with rayon.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
