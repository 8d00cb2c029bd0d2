//! Data-parallel shim.
//!
//! With the `parallel` feature the parallel paths run on rayon; without it
//! every [`Execution`] falls back to the sequential loop. Both paths produce
//! identical results: work is split into index-addressed chunks and merged in
//! index order.

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Maps `f` over `items`, preserving order.
pub fn map_slice<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
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

/// Maps `f` over an index range, preserving order.
pub fn map_range<R, F>(exec: Execution, range: Range<usize>, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return range.into_par_iter().map(f).collect();
    }
    let _ = exec;
    range.map(f).collect()
}

/// Splits `0..len` into contiguous chunks of at most `chunk` elements.
pub fn chunks(len: usize, chunk: usize) -> Vec<Range<usize>> {
    let chunk = chunk.max(1);
    (0..len.div_ceil(chunk))
        .map(|i| i * chunk..((i + 1) * chunk).min(len))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_paths_agree() {
        let items: Vec<u64> = (0..1000).collect();
        let seq = map_slice(Execution::Sequential, &items, |x| x * x);
        let par = map_slice(Execution::Parallel, &items, |x| x * x);
        assert_eq!(seq, par);
        assert_eq!(
            map_range(Execution::Sequential, 0..10, |i| i + 1),
            map_range(Execution::Parallel, 0..10, |i| i + 1)
        );
    }

    #[test]
    fn chunking_covers_range() {
        let c = chunks(10, 3);
        assert_eq!(c, vec![0..3, 3..6, 6..9, 9..10]);
        assert!(chunks(0, 4).is_empty());
    }
}
