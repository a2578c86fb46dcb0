//! Replicate execution: a rayon-backed parallel map with a sequential fallback.
//!
//! Replicate `i` always receives the stream derived from `(seed, i)` and
//! outputs are collected in index order, so both modes return identical
//! vectors. Reductions over the returned vector are done sequentially by the
//! callers, which keeps floating-point sums bit-identical as well.

use crate::rng::{self, SimRng};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether parallel execution is compiled in.
    pub fn parallel_available() -> bool {
        cfg!(feature = "parallel")
    }
}

/// Run `f(index, rng)` for `index in 0..count`, each with its own derived stream.
pub fn map_replicates<T, F>(exec: Execution, seed: u64, count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut SimRng) -> T + Sync + Send,
{
    let run = |i: usize| {
        let mut rng = rng::stream(seed, i as u64);
        f(i, &mut rng)
    };
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..count).into_par_iter().map(run).collect()
        }
        _ => (0..count).map(run).collect(),
    }
}

/// Like [`map_replicates`] but short-circuits on the first error (lowest index wins).
pub fn try_map_replicates<T, E, F>(
    exec: Execution,
    seed: u64,
    count: usize,
    f: F,
) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize, &mut SimRng) -> Result<T, E> + Sync + Send,
{
    map_replicates(exec, seed, count, f).into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn modes_agree() {
        let f = |i: usize, rng: &mut SimRng| (i, rng.random::<f64>());
        let a = map_replicates(Execution::Sequential, 11, 257, f);
        let b = map_replicates(Execution::Parallel, 11, 257, f);
        assert_eq!(a, b);
    }
}
