//! Thin dispatch layer so hot loops parallelize under the `parallel`
//! feature and stay sequential without it (single-threaded targets).

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
pub(crate) fn par_any(n: usize, f: impl Fn(usize) -> bool + Sync + Send) -> bool {
    (0..n).into_par_iter().any(f)
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn par_any(n: usize, f: impl Fn(usize) -> bool) -> bool {
    (0..n).any(f)
}

#[cfg(feature = "parallel")]
pub(crate) fn try_par_map_range<U, E, F>(n: u64, f: F) -> Result<Vec<U>, E>
where
    U: Send,
    E: Send,
    F: Fn(u64) -> Result<U, E> + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn try_par_map_range<U, E, F>(n: u64, f: F) -> Result<Vec<U>, E>
where
    F: Fn(u64) -> Result<U, E>,
{
    (0..n).map(f).collect()
}

#[cfg(feature = "parallel")]
pub(crate) fn try_par_map_vec<T, U, E, F>(items: Vec<T>, f: F) -> Result<Vec<U>, E>
where
    T: Send,
    U: Send,
    E: Send,
    F: Fn(T) -> Result<U, E> + Sync + Send,
{
    items.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn try_par_map_vec<T, U, E, F>(items: Vec<T>, f: F) -> Result<Vec<U>, E>
where
    F: Fn(T) -> Result<U, E>,
{
    items.into_iter().map(f).collect()
}
