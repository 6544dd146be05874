//! Index-parallel maps whose output order matches the sequential order.

use alloc::vec::Vec;

#[cfg(feature = "std")]
pub fn map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "std"))]
pub fn map<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// Left-to-right sum; never reassociated, so it does not depend on tiling.
pub fn ordered_sum(v: &[f64]) -> f64 {
    let mut acc = 0.0;
    for x in v {
        acc += *x;
    }
    acc
}
