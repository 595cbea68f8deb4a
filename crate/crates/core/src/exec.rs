//! Execution strategy for the exhaustive scans.
//!
//! Every scan in the crate is written against the handful of combinators in
//! this module. With the `parallel` feature they fan out over rayon's global
//! pool; without it (or with [`Exec::Sequential`]) they run as plain loops.
//! All combinators return schedule-independent results: ordered collects,
//! lowest-index search hits, and folds whose reduction is commutative.

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How a scan distributes its index space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Exec {
    Sequential,
    /// Uses rayon when the `parallel` feature is enabled, falls back to
    /// sequential execution otherwise.
    #[default]
    Parallel,
}

impl Exec {
    /// True when this strategy will actually use worker threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    /// `f` applied to every index, in index order.
    pub fn map_collect<T, F>(self, range: Range<u64>, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return range.into_par_iter().map(f).collect();
        }
        range.map(f).collect()
    }

    /// The hit with the lowest index, if any.
    pub fn find_first<T, F>(self, range: Range<u64>, f: F) -> Option<T>
    where
        T: Send,
        F: Fn(u64) -> Option<T> + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return range.into_par_iter().find_map_first(f);
        }
        range.into_iter().find_map(f)
    }

    /// Like [`Exec::find_first`], with a per-worker scratch value.
    pub fn find_first_init<S, T, I, F>(self, range: Range<u64>, init: I, f: F) -> Option<T>
    where
        T: Send,
        I: Fn() -> S + Sync + Send,
        F: Fn(&mut S, u64) -> Option<T> + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return range
                .into_par_iter()
                .map_init(init, |s, i| f(s, i))
                .find_map_first(|hit| hit);
        }
        let mut scratch = init();
        range.into_iter().find_map(|i| f(&mut scratch, i))
    }

    /// Folds each worker's share of the range, then merges the partial
    /// accumulators. `reduce` must be associative and commutative.
    pub fn fold_reduce<A, ID, F, R>(self, range: Range<u64>, identity: ID, fold: F, reduce: R) -> A
    where
        A: Send,
        ID: Fn() -> A + Sync + Send,
        F: Fn(A, u64) -> A + Sync + Send,
        R: Fn(A, A) -> A + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return range
                .into_par_iter()
                .fold(&identity, &fold)
                .reduce(&identity, &reduce);
        }
        let _ = &reduce;
        range.into_iter().fold(identity(), fold)
    }

    /// Sum of `f` over the range.
    pub fn sum<F>(self, range: Range<u64>, f: F) -> u64
    where
        F: Fn(u64) -> u64 + Sync + Send,
    {
        self.fold_reduce(range, || 0u64, |acc, i| acc + f(i), |a, b| a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree() {
        for exec in [Exec::Sequential, Exec::Parallel] {
            let v = exec.map_collect(0..1000, |i| i * i);
            assert_eq!(v[999], 999 * 999);
            assert_eq!(exec.find_first(0..1000, |i| (i % 97 == 96).then_some(i)), Some(96));
            assert_eq!(exec.find_first(0..10, |_| None::<u64>), None);
            assert_eq!(exec.sum(0..100, |i| i), 4950);
            let hit = exec.find_first_init(0..500, || 0u64, |s, i| {
                *s += 1;
                (i == 321).then_some(i)
            });
            assert_eq!(hit, Some(321));
        }
    }
}
