//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (the default) the maps run on rayon;
//! without it they run as plain iterator chains with identical semantics.
//! Both paths produce the same `Vec` in index order, and every reduction in
//! the crate folds such vectors in a fixed deterministic order, so results
//! are bit-identical regardless of feature selection or thread count.

use crate::interval::Interval;

#[cfg(feature = "parallel")]
pub fn map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Pairwise (tree) summation in index order; the reduction shape depends
/// only on the slice length.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

/// Pairwise summation of interval terms.
pub fn pairwise_sum_interval(xs: &[Interval]) -> Interval {
    match xs.len() {
        0 => Interval::point(0.0),
        1 => xs[0],
        n => {
            let mid = n / 2;
            pairwise_sum_interval(&xs[..mid]).add(&pairwise_sum_interval(&xs[mid..]))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_range_preserves_order() {
        let v = map_range(100, |i| i * i);
        assert_eq!(v[7], 49);
        assert_eq!(v.len(), 100);
    }

    #[test]
    fn pairwise_matches_naive_on_exact_sums() {
        let xs: Vec<f64> = (0..37).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 666.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    #[test]
    fn pairwise_interval_contains_exact() {
        let xs: Vec<Interval> = (0..9).map(|i| Interval::point(0.1 * i as f64)).collect();
        let s = pairwise_sum_interval(&xs);
        assert!((s.mid() - 3.6).abs() < 1e-12 && s.width() < 1e-13);
    }
}
