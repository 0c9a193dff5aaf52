//! Replicate-level parallelism with a sequential fallback.
//!
//! With the `parallel` feature (default) the map runs on a dedicated rayon
//! pool sized by `workers`; without it, or with `workers == 1`, the same
//! closure runs on a plain iterator. Results are collected in index order
//! either way, so the output is independent of scheduling.

/// Number of worker threads; `Auto` lets rayon pick.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Workers {
    #[default]
    Auto,
    Fixed(usize),
}

impl Workers {
    pub fn from_count(n: usize) -> Workers {
        if n == 0 {
            Workers::Auto
        } else {
            Workers::Fixed(n)
        }
    }
}

#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(n: usize, workers: Workers, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    match workers {
        Workers::Fixed(1) => (0..n).map(f).collect(),
        Workers::Fixed(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .expect("failed to build worker pool");
            pool.install(|| (0..n).into_par_iter().map(f).collect())
        }
        Workers::Auto => (0..n).into_par_iter().map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(n: usize, _workers: Workers, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Sequential map with the same signature, kept unconditionally for
/// benchmark comparisons against the parallel path.
pub fn map_indexed_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_index_order_for_any_worker_count() {
        let expect: Vec<usize> = (0..100).map(|i| i * i).collect();
        for workers in [Workers::Auto, Workers::Fixed(1), Workers::Fixed(3)] {
            assert_eq!(map_indexed(100, workers, |i| i * i), expect);
        }
        assert_eq!(map_indexed_seq(100, |i| i * i), expect);
    }
}
