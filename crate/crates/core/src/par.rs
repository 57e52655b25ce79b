//! Execution strategy for the batch entry points.
//!
//! Every batch operation in this crate is written as a map followed by an
//! associative reduction, so the sequential and parallel paths produce the
//! same output in the same order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How a batch operation distributes its per-item work.
/// The default is the fastest strategy compiled in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Strategy {
    #[cfg_attr(not(feature = "parallel"), default)]
    Sequential,
    #[cfg(feature = "parallel")]
    #[default]
    Parallel,
}

impl Strategy {
    /// All strategies compiled into this build.
    pub fn available() -> &'static [Strategy] {
        #[cfg(feature = "parallel")]
        {
            &[Strategy::Sequential, Strategy::Parallel]
        }
        #[cfg(not(feature = "parallel"))]
        {
            &[Strategy::Sequential]
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Sequential => "sequential",
            #[cfg(feature = "parallel")]
            Strategy::Parallel => "parallel",
        }
    }

    /// Order-preserving map over a slice.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            Strategy::Sequential => items.iter().map(f).collect(),
            #[cfg(feature = "parallel")]
            Strategy::Parallel => items.par_iter().map(f).collect(),
        }
    }

    /// Order-preserving filter-map over a slice.
    pub fn filter_map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> Option<R> + Sync + Send,
    {
        match self {
            Strategy::Sequential => items.iter().filter_map(f).collect(),
            #[cfg(feature = "parallel")]
            Strategy::Parallel => items.par_iter().filter_map(f).collect(),
        }
    }

    /// Fold each item into an accumulator, then merge accumulators.
    ///
    /// `merge` must be associative and `identity` its neutral element.
    pub fn fold<T, A, I, F, M>(self, items: &[T], identity: I, fold: F, merge: M) -> A
    where
        T: Sync,
        A: Send,
        I: Fn() -> A + Sync + Send,
        F: Fn(A, &T) -> A + Sync + Send,
        M: Fn(A, A) -> A + Sync + Send,
    {
        match self {
            Strategy::Sequential => {
                let _ = merge;
                items.iter().fold(identity(), fold)
            }
            #[cfg(feature = "parallel")]
            Strategy::Parallel => items.par_iter().fold(&identity, &fold).reduce(&identity, &merge),
        }
    }
}
