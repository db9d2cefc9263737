//! Execution strategy for the data-parallel inner loops.
//!
//! With the `parallel` feature (default) [`Exec::Parallel`] fans work out on
//! the rayon pool; without it every call runs sequentially. Every helper
//! returns results in input order, so output never depends on scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    /// True when work will actually be spread across threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    /// Maps `f` over `items`, preserving order.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    /// Maps `f` over `0..len`, preserving order.
    pub fn map_range<R, F>(self, len: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            return (0..len).into_par_iter().map(f).collect();
        }
        (0..len).map(f).collect()
    }

    /// Fallible ordered map; returns the error of the lowest failing index.
    pub fn try_map_range<R, E, F>(self, len: usize, f: F) -> Result<Vec<R>, E>
    where
        R: Send,
        E: Send,
        F: Fn(usize) -> Result<R, E> + Sync + Send,
    {
        self.map_range(len, f).into_iter().collect()
    }

    /// Integer sum over `0..len` in chunks of `chunk`.
    pub fn sum_u64<F>(self, len: usize, chunk: usize, f: F) -> u64
    where
        F: Fn(usize) -> u64 + Sync + Send,
    {
        let chunk = chunk.max(1);
        let n_chunks = len.div_ceil(chunk);
        let partial = self.map_range(n_chunks, |c| {
            let lo = c * chunk;
            let hi = (lo + chunk).min(len);
            (lo..hi).map(&f).sum::<u64>()
        });
        partial.into_iter().sum()
    }
}

/// Number of worker threads a parallel call will use.
pub fn current_threads() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

/// Runs `f` inside a dedicated pool of `threads` workers.
///
/// Falls back to a plain call when the `parallel` feature is off.
pub fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    {
        match rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build()
        {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        f()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordered_results_match_across_modes() {
        let items: Vec<u64> = (0..1000).collect();
        let a = Exec::Sequential.map(&items, |x| x * x);
        let b = Exec::Parallel.map(&items, |x| x * x);
        assert_eq!(a, b);
        assert_eq!(
            Exec::Sequential.sum_u64(1000, 7, |i| i as u64),
            Exec::Parallel.sum_u64(1000, 7, |i| i as u64)
        );
    }

    #[test]
    fn try_map_reports_first_error() {
        let r: Result<Vec<usize>, usize> =
            Exec::Parallel.try_map_range(10, |i| if i % 4 == 3 { Err(i) } else { Ok(i) });
        assert_eq!(r, Err(3));
    }
}
