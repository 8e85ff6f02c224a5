//! Execution policy for the data-parallel kernels.
//!
//! Every kernel that loops independently over points (distance rows,
//! sparsity, candidate ratios, expansion initialisation, parameter grids)
//! takes an [`ExecPolicy`]. With the `parallel` feature disabled,
//! [`ExecPolicy::Parallel`] silently runs sequentially, so results are
//! identical either way.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExecPolicy {
    Sequential,
    Parallel,
}

impl Default for ExecPolicy {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            ExecPolicy::Parallel
        } else {
            ExecPolicy::Sequential
        }
    }
}

impl ExecPolicy {
    /// Map `f` over `0..n`, preserving index order in the output.
    pub fn map_range<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            ExecPolicy::Parallel => {
                use rayon::prelude::*;
                (0..n).into_par_iter().map(f).collect()
            }
            _ => (0..n).map(f).collect(),
        }
    }

    /// Map `f` over a slice, preserving order.
    pub fn map_slice<S, T, F>(self, items: &[S], f: F) -> Vec<T>
    where
        S: Sync,
        T: Send,
        F: Fn(&S) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            ExecPolicy::Parallel => {
                use rayon::prelude::*;
                items.par_iter().map(f).collect()
            }
            _ => items.iter().map(f).collect(),
        }
    }

    pub(crate) fn sort_f64(self, values: &mut [f64]) {
        match self {
            #[cfg(feature = "parallel")]
            ExecPolicy::Parallel => {
                use rayon::prelude::*;
                values.par_sort_unstable_by(f64::total_cmp)
            }
            _ => values.sort_unstable_by(f64::total_cmp),
        }
    }
}
