//! Data-parallel helpers for the sweep and grid-search loops.
//!
//! With the `parallel` feature (default) the work is spread with rayon;
//! without it, or when [`Execution::Sequential`] is requested, everything runs
//! on the calling thread. Results never depend on the choice: reductions are
//! either order-independent (max) or computed from an order-preserving
//! collect.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether work will actually be split across threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Maps every item and collects in input order.
pub fn map_collect<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Maps each index in `0..n` and keeps the result with the largest key.
/// Ties resolve to the smallest index so the answer is reproducible.
pub fn argmax_range<R, F>(exec: Execution, n: usize, f: F) -> Option<(usize, f64, R)>
where
    R: Send,
    F: Fn(usize) -> Option<(f64, R)> + Sync + Send,
{
    let pick = |a: Option<(usize, f64, R)>, b: Option<(usize, f64, R)>| match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => {
            if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
                Some(b)
            } else {
                Some(a)
            }
        }
    };
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return (0..n)
            .into_par_iter()
            .map(|i| f(i).map(|(k, r)| (i, k, r)))
            .reduce(|| None, pick);
    }
    let _ = exec;
    (0..n).map(|i| f(i).map(|(k, r)| (i, k, r))).fold(None, pick)
}
