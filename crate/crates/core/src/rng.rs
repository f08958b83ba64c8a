//! Random streams and the few variates the crate needs.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::math;

/// Independent stream `stream` of the master seed `seed`. Streams do not
/// overlap, so per-chain or per-run generators can be created in any order.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform variate in the open interval `(0, 1)`.
#[inline]
pub fn unit_open<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Exponential variate with the given rate, by inversion.
#[inline]
pub fn exponential<R: RngCore + ?Sized>(rng: &mut R, rate: f64) -> f64 {
    -math::ln(unit_open(rng)) / rate
}

/// Index drawn with probability proportional to `weights` (all `≥ 0`, sum
/// `total > 0`).
pub fn categorical<R: RngCore + ?Sized>(rng: &mut R, weights: &[f64], total: f64) -> usize {
    let target = unit_open(rng) * total;
    let mut acc = 0.0;
    for (k, w) in weights.iter().enumerate() {
        acc += w;
        if target < acc {
            return k;
        }
    }
    // rounding left `target` just above the accumulated total
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(weights.len() - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: [u64; 4] = core::array::from_fn(|_| stream_rng(7, 0).next_u64());
        let mut r0 = stream_rng(7, 0);
        let mut r1 = stream_rng(7, 1);
        let x0: [u64; 4] = core::array::from_fn(|_| r0.next_u64());
        let x1: [u64; 4] = core::array::from_fn(|_| r1.next_u64());
        assert_ne!(x0, x1);
        assert_eq!(a[0], x0[0]);
    }

    #[test]
    fn exponential_mean() {
        let mut rng = stream_rng(1, 0);
        let n = 200_000;
        let m: f64 = (0..n).map(|_| exponential(&mut rng, 4.0)).sum::<f64>() / n as f64;
        assert!((m - 0.25).abs() < 0.005);
    }

    #[test]
    fn categorical_frequencies() {
        let mut rng = stream_rng(3, 0);
        let w = [1.0, 0.0, 3.0];
        let mut counts = [0usize; 3];
        for _ in 0..100_000 {
            counts[categorical(&mut rng, &w, 4.0)] += 1;
        }
        assert_eq!(counts[1], 0);
        assert!((counts[0] as f64 / 1e5 - 0.25).abs() < 0.01);
    }
}
