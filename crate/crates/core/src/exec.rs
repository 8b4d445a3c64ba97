//! Ordered map over an index range, parallel when the `parallel` feature is on.
//!
//! Results always come back in index order and are reduced sequentially by the
//! caller, so the outcome does not depend on the number of worker threads.

/// How per-path work is scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[cfg_attr(not(feature = "parallel"), default)]
    Sequential,
    #[cfg(feature = "parallel")]
    #[default]
    Parallel,
}

impl Execution {
    /// Evaluate `f(state, i)` for `i in 0..n`; `init` builds scratch state.
    pub(crate) fn map_indexed<S, T, I, F>(self, n: u64, init: I, f: F) -> Vec<T>
    where
        T: Send,
        I: Fn() -> S + Sync + Send,
        F: Fn(&mut S, u64) -> T + Sync + Send,
    {
        match self {
            Self::Sequential => {
                let mut state = init();
                (0..n).map(|i| f(&mut state, i)).collect()
            }
            #[cfg(feature = "parallel")]
            Self::Parallel => {
                use rayon::prelude::*;
                (0..n).into_par_iter().map_init(&init, |s, i| f(s, i)).collect()
            }
        }
    }
}
