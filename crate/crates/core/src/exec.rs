//! Data-parallel helpers. With the `parallel` feature the parallel path runs
//! on rayon's global pool; without it every request runs sequentially.
//! Results are returned in input order either way.

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if Self::parallel_available() {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    pub const fn parallel_available() -> bool {
        cfg!(feature = "parallel")
    }
}

pub(crate) fn map_range<R, F>(exec: Execution, range: Range<u64>, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(u64) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => range.into_par_iter().map(f).collect(),
        _ => range.map(f).collect(),
    }
}

pub(crate) fn map_slice<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => items.par_iter().map(f).collect(),
        _ => items.iter().map(f).collect(),
    }
}

/// Folds `items` into an accumulator. `reduce` must be associative and
/// `identity()` its neutral element, since the parallel path splits `items`
/// into arbitrary chunks.
pub(crate) fn fold_slice<T, A, I, F, G>(
    exec: Execution,
    items: &[T],
    identity: I,
    fold: F,
    reduce: G,
) -> A
where
    T: Sync,
    A: Send,
    I: Fn() -> A + Sync + Send,
    F: Fn(A, &T) -> A + Sync + Send,
    G: Fn(A, A) -> A + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => items
            .par_iter()
            .fold(&identity, &fold)
            .reduce(&identity, &reduce),
        _ => {
            let _ = &reduce;
            items.iter().fold(identity(), fold)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_paths_agree_and_keep_order() {
        let squares = |k: u64| k * k;
        let seq = map_range(Execution::Sequential, 0..1000, squares);
        let par = map_range(Execution::Parallel, 0..1000, squares);
        assert_eq!(seq, par);
        assert_eq!(seq[31], 961);

        let items: Vec<u64> = (1..=500).collect();
        let sum = |exec| fold_slice(exec, &items, || 0u64, |a, x| a + x, |a, b| a + b);
        assert_eq!(sum(Execution::Sequential), 125_250);
        assert_eq!(sum(Execution::Parallel), 125_250);
        assert_eq!(map_slice(Execution::Parallel, &items, |x| x + 1)[0], 2);
    }
}
