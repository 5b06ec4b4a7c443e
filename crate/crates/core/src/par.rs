//! Execution policy for the data-parallel loops (Monte Carlo trials, the
//! wavelet quadruple sums, sampling sweeps).
//!
//! Every parallel path produces results in input order and reduces them in a
//! fixed pairwise tree, so output is bit-identical to the sequential path.
//! Without the `parallel` feature, [`Execution::Parallel`] falls back to the
//! sequential implementation.

use crate::stepfn::StepFunction;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether this policy actually runs on the rayon pool in this build.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

pub(crate) fn map_slice<T, U, F>(exec: Execution, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

pub(crate) fn map_range<U, F>(exec: Execution, len: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..len).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..len).map(f).collect()
}

/// Sums step functions with a balanced pairwise tree whose shape depends only
/// on the number of terms.
pub(crate) fn tree_sum(exec: Execution, mut terms: Vec<StepFunction>) -> StepFunction {
    if terms.is_empty() {
        return StepFunction::zero();
    }
    while terms.len() > 1 {
        let pairs: Vec<(StepFunction, Option<StepFunction>)> = {
            let mut it = terms.into_iter();
            let mut out = Vec::new();
            while let Some(a) = it.next() {
                out.push((a, it.next()));
            }
            out
        };
        terms = map_pairs(exec, pairs);
    }
    terms.pop().unwrap()
}

fn map_pairs(
    exec: Execution,
    pairs: Vec<(StepFunction, Option<StepFunction>)>,
) -> Vec<StepFunction> {
    let join = |(a, b): (StepFunction, Option<StepFunction>)| match b {
        Some(b) => a.add(&b),
        None => a,
    };
    #[cfg(feature = "parallel")]
    if exec.is_parallel() && pairs.len() > 1 {
        use rayon::prelude::*;
        return pairs.into_par_iter().map(join).collect();
    }
    let _ = exec;
    pairs.into_iter().map(join).collect()
}
