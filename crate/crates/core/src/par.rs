//! Data-parallel loops with a sequential fallback.
//!
//! With the `parallel` feature (default) these run on the rayon pool; without it
//! they are plain iterator loops. Reductions break ties by index so results do
//! not depend on scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub(crate) fn map_indices<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Maximum of `f(i)` over `0..n` together with its payload; lowest index wins ties.
pub(crate) fn max_by_index<T, F>(n: usize, f: F) -> Option<(usize, f64, T)>
where
    T: Send,
    F: Fn(usize) -> (f64, T) + Sync + Send,
{
    let pick = |a: (usize, f64, T), b: (usize, f64, T)| match a.1.total_cmp(&b.1) {
        std::cmp::Ordering::Greater => a,
        std::cmp::Ordering::Less => b,
        std::cmp::Ordering::Equal => {
            if a.0 <= b.0 {
                a
            } else {
                b
            }
        }
    };
    #[cfg(feature = "parallel")]
    {
        (0..n)
            .into_par_iter()
            .map(|i| {
                let (v, t) = f(i);
                (i, v, t)
            })
            .reduce_with(pick)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n)
            .map(|i| {
                let (v, t) = f(i);
                (i, v, t)
            })
            .reduce(pick)
    }
}

/// First index (in order) for which `f` returns `Some`.
pub(crate) fn find_first<T, F>(n: usize, f: F) -> Option<T>
where
    T: Send,
    F: Fn(usize) -> Option<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().find_map_first(f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).find_map(f)
    }
}

/// Unordered pairs `i < j` of `0..n`, listed row by row.
pub(crate) fn pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            out.push((i, j));
        }
    }
    out
}
