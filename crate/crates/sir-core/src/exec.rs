//! Worker-pool plumbing. With the `parallel` feature (default) items are
//! mapped on a rayon pool; without it, or with `workers == 1`, the map is a
//! plain sequential loop. Output order always matches input order, so the
//! two paths are byte-for-byte interchangeable.

#[cfg(feature = "parallel")]
pub(crate) fn map_ordered<T, R, F>(items: &[T], workers: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;

    if workers == 1 || items.len() <= 1 {
        return items.iter().map(f).collect();
    }
    if workers == 0 {
        // Available parallelism: the shared global pool, built once.
        return items.par_iter().map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("failed to build worker pool");
    pool.install(|| items.par_iter().map(f).collect())
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_ordered<T, R, F>(items: &[T], _workers: usize, f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved_for_any_worker_count() {
        let items: Vec<u32> = (0..257).collect();
        let expected: Vec<u64> = items.iter().map(|&x| u64::from(x) * 3 + 1).collect();
        for workers in [0usize, 1, 2, 8] {
            let got = map_ordered(&items, workers, |&x| u64::from(x) * 3 + 1);
            assert_eq!(got, expected);
        }
    }
}
