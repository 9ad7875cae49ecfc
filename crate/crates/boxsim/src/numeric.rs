//! Small numeric helpers shared across modules.

/// Pairwise (cascade) summation.
///
/// Used for every trace/purity/norm reduction so that results are
/// reproducible run to run and rounding error grows as O(log n) instead of
/// O(n).
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BASE: usize = 32;
    if values.len() <= BASE {
        let mut acc = 0.0;
        for &v in values {
            acc += v;
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Pairwise summation over the mapped values of an index range, without
/// materializing the terms. Same bracketing as [`pairwise_sum`].
pub fn pairwise_sum_by<F: Fn(usize) -> f64>(len: usize, f: F) -> f64 {
    fn go<F: Fn(usize) -> f64>(start: usize, len: usize, f: &F) -> f64 {
        const BASE: usize = 32;
        if len <= BASE {
            let mut acc = 0.0;
            for i in start..start + len {
                acc += f(i);
            }
            return acc;
        }
        let half = len / 2;
        go(start, half, f) + go(start + half, len - half, f)
    }
    go(0, len, &f)
}
