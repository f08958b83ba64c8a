//! Summary statistics for Monte Carlo output.

use alloc::vec::Vec;

use crate::math;

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance; zero for fewer than two values.
pub fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Means of `batches` consecutive equal-size blocks of `xs` (a trailing
/// remainder is dropped).
pub fn batch_means(xs: &[f64], batches: usize) -> Vec<f64> {
    let size = xs.len() / batches.max(1);
    if size == 0 {
        return Vec::new();
    }
    xs.chunks_exact(size).take(batches).map(mean).collect()
}

/// Pooled batch-means standard error of the grand mean of several chains.
/// Returns `None` when fewer than two batches are available.
pub fn batch_means_stderr(chains: &[Vec<f64>], batches_per_chain: usize) -> Option<f64> {
    let all: Vec<f64> = chains.iter().flat_map(|c| batch_means(c, batches_per_chain)).collect();
    if all.len() < 2 {
        return None;
    }
    Some(math::sqrt(variance(&all) / all.len() as f64))
}

/// Kolmogorov–Smirnov distance `sup |F_n − F|` between the empirical law of
/// `sorted` (ascending) and the continuous CDF `cdf`.
pub fn ks_distance<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            let f = cdf(x);
            (f - k as f64 / n).max((k + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Least-squares line through `(x, y)` with weights `1/σ²`; returns
/// `(slope, intercept, slope standard error)`.
pub fn weighted_line_fit(x: &[f64], y: &[f64], sigma: &[f64]) -> Option<(f64, f64, f64)> {
    if x.len() < 2 {
        return None;
    }
    let (mut s, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for ((&xi, &yi), &si) in x.iter().zip(y).zip(sigma) {
        let w = 1.0 / (si * si);
        s += w;
        sx += w * xi;
        sy += w * yi;
        sxx += w * xi * xi;
        sxy += w * xi * yi;
    }
    let det = s * sxx - sx * sx;
    if !(det > 0.0) || !det.is_finite() {
        return None;
    }
    let slope = (s * sxy - sx * sy) / det;
    let intercept = (sxx * sy - sx * sxy) / det;
    Some((slope, intercept, math::sqrt(s / det)))
}
