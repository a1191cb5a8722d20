//! Execution-mode switch between rayon and plain iterators.
//!
//! With the `parallel` feature disabled every helper runs sequentially and
//! [`Execution::Parallel`] silently degrades to sequential execution. Results are
//! always collected in index order, so output never depends on the mode.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use num_complex::Complex64;

/// Row-level kernels only fan out above this dimension.
#[cfg(feature = "parallel")]
pub(crate) const PAR_MIN_DIM: usize = 96;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
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
    /// Whether work will actually be spread over the rayon pool.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    /// `(0..n).map(f).collect()`, possibly in parallel, always in index order.
    pub fn map_indexed<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Execution::Parallel {
            return (0..n).into_par_iter().map(f).collect();
        }
        (0..n).map(f).collect()
    }
}

/// Applies `f(row_index, row)` to every row of a row-major square buffer.
pub(crate) fn for_each_row_mut<F>(data: &mut [Complex64], dim: usize, f: F)
where
    F: Fn(usize, &mut [Complex64]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if dim >= PAR_MIN_DIM {
        data.par_chunks_mut(dim)
            .enumerate()
            .for_each(|(i, row)| f(i, row));
        return;
    }
    data.chunks_mut(dim).enumerate().for_each(|(i, row)| f(i, row));
}
