//! Order-preserving data parallelism with a sequential fallback.
//!
//! Every helper returns results in input order regardless of scheduling, so
//! switching [`Execution`] never changes an output byte. Without the
//! `parallel` feature, [`Execution::Parallel`] runs sequentially.

use std::ops::Range;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether work will actually be spread over threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

pub fn map<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

pub fn map_range<R, F>(exec: Execution, range: Range<usize>, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return range.into_par_iter().map(f).collect();
    }
    let _ = exec;
    range.map(f).collect()
}

/// First item (by position) for which `f` returns `Some`, with its index.
pub fn find_map_first<T, R, F>(exec: Execution, items: &[T], f: F) -> Option<(usize, R)>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Option<R> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return items
            .par_iter()
            .enumerate()
            .find_map_first(|(i, t)| f(t).map(|r| (i, r)));
    }
    let _ = exec;
    items.iter().enumerate().find_map(|(i, t)| f(t).map(|r| (i, r)))
}

/// Runs `f` on a dedicated pool of `jobs` threads (or inline when sequential).
pub fn with_jobs<R: Send>(exec: Execution, jobs: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    if let (true, Some(n)) = (exec.is_parallel(), jobs) {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            return pool.install(f);
        }
    }
    let _ = (exec, jobs);
    f()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let items: Vec<u64> = (0..1000).collect();
        let a = map(Execution::Sequential, &items, |x| x * x);
        let b = map(Execution::Parallel, &items, |x| x * x);
        assert_eq!(a, b);
        let f = |x: &u64| (x % 97 == 96).then_some(*x);
        assert_eq!(
            find_map_first(Execution::Sequential, &items, f),
            find_map_first(Execution::Parallel, &items, f)
        );
        assert_eq!(find_map_first(Execution::Parallel, &items, f), Some((96, 96)));
        assert_eq!(map_range(Execution::Parallel, 0..5, |i| i), vec![0, 1, 2, 3, 4]);
        assert_eq!(with_jobs(Execution::Parallel, Some(2), || 7), 7);
    }
}
