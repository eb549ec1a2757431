//! Order-independent maps with deterministic reductions.
//!
//! With the `parallel` feature (default) work is spread over the rayon pool;
//! without it, or with [`Execution::Sequential`], plain iterators are used.
//! Both paths return bit-identical results.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
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

// NaN sorts last so a poisoned evaluation never wins a minimum.
fn better(a: (f64, usize), b: (f64, usize)) -> (f64, usize) {
    let key = |p: (f64, usize)| if p.0.is_nan() { f64::INFINITY } else { p.0 };
    match key(a).total_cmp(&key(b)) {
        std::cmp::Ordering::Less => a,
        std::cmp::Ordering::Greater => b,
        std::cmp::Ordering::Equal => {
            if a.1 <= b.1 {
                a
            } else {
                b
            }
        }
    }
}

/// `(index, value)` of the smallest `f(i)` over `0..n`, ties to the lowest
/// index. Returns `None` for `n == 0`.
pub fn argmin<F>(exec: Execution, n: usize, f: F) -> Option<(usize, f64)>
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    if n == 0 {
        return None;
    }
    let best = match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => (0..n)
            .into_par_iter()
            .map(|i| (f(i), i))
            .reduce(|| (f64::INFINITY, usize::MAX), better),
        _ => (0..n).map(|i| (f(i), i)).fold((f64::INFINITY, usize::MAX), better),
    };
    Some((best.1.min(n - 1), best.0))
}

/// `f` applied to every index, results in index order.
pub fn map<R, F>(exec: Execution, n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => (0..n).into_par_iter().map(f).collect(),
        _ => (0..n).map(f).collect(),
    }
}

/// True iff `f(i)` holds for every index.
pub fn all<F>(exec: Execution, n: usize, f: F) -> bool
where
    F: Fn(usize) -> bool + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => (0..n).into_par_iter().all(f),
        _ => (0..n).all(f),
    }
}
