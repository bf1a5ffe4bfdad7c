//! Order-fixed summation.
//!
//! Every accumulation that feeds a reported number goes through
//! [`pairwise_sum`], so serial and parallel evaluation paths produce the same
//! bits as long as they hand over the same slice of partial sums.

const LEAF: usize = 8;

/// Pairwise (tree) summation with a fixed split rule.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= LEAF {
        let mut acc = 0.0;
        for v in values {
            acc += v;
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Rows at or above this count are evaluated with rayon.
pub(crate) const PARALLEL_ROWS: usize = 128;

/// Evaluates `row(i)` for every `i < rows`, in parallel for large inputs,
/// always returning the results in index order.
pub(crate) fn map_rows<T, F>(rows: usize, row: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    if rows >= PARALLEL_ROWS {
        (0..rows).into_par_iter().map(row).collect()
    } else {
        (0..rows).map(row).collect()
    }
}
