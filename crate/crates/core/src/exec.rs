//! Batch execution helpers.
//!
//! Independent jobs (table rows, curve traces, sampled instances) go through
//! [`map_collect`], which fans out on the rayon pool when the `parallel`
//! feature is enabled and degrades to a plain iterator otherwise. The
//! sequential path stays available unconditionally for benchmarking.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `items`, in parallel when built with the `parallel` feature.
/// Output order always matches input order.
#[cfg(feature = "parallel")]
pub fn map_collect<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_collect<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Sequential reference path, kept for benchmark comparison.
pub fn map_collect_seq<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Caps the rayon worker pool; a no-op without the `parallel` feature or if
/// a pool was already installed.
pub fn configure_threads(jobs: Option<usize>) {
    #[cfg(feature = "parallel")]
    if let Some(jobs) = jobs {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = jobs;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let items: Vec<u64> = (0..100).collect();
        let squares = map_collect(&items, |&x| x * x);
        let reference = map_collect_seq(&items, |&x| x * x);
        assert_eq!(squares, reference);
        assert_eq!(squares[7], 49);
    }
}
