//! Data-parallel mapping with a sequential fallback.
//!
//! With the `parallel` feature, maps run on the rayon pool unless the calling thread
//! is inside [`with_serial`]. Results are always collected in input order, and every
//! reduction in this crate sums the collected values sequentially, so serial and parallel
//! runs produce bitwise-identical numbers.

use std::cell::Cell;

thread_local! {
    static FORCE_SERIAL: Cell<bool> = const { Cell::new(false) };
}

/// Run `f` with data-parallel maps disabled on the current thread.
pub fn with_serial<R>(f: impl FnOnce() -> R) -> R {
    struct Restore(bool);
    impl Drop for Restore {
        fn drop(&mut self) {
            FORCE_SERIAL.with(|c| c.set(self.0));
        }
    }
    let _restore = Restore(FORCE_SERIAL.with(|c| c.replace(true)));
    f()
}

/// Whether maps issued from this thread would run in parallel.
pub fn is_parallel() -> bool {
    cfg!(feature = "parallel") && !FORCE_SERIAL.with(|c| c.get())
}

/// Order-preserving map over a slice.
pub fn map_collect<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if is_parallel() {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
    }
    items.iter().map(f).collect()
}

/// Order-preserving map over `0..n`.
pub fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if is_parallel() {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(f).collect();
        }
    }
    (0..n).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serial_scope_is_restored() {
        let before = is_parallel();
        with_serial(|| assert!(!is_parallel()));
        assert_eq!(is_parallel(), before);
    }

    #[test]
    fn map_preserves_order() {
        let v: Vec<usize> = (0..1000).collect();
        let out = map_collect(&v, |x| x * 2);
        assert!(out.iter().enumerate().all(|(i, &y)| y == 2 * i));
        assert_eq!(with_serial(|| map_range(5, |i| i)), vec![0, 1, 2, 3, 4]);
    }
}
