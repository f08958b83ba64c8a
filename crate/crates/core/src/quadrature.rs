//! Tensor-grid quadrature of the mixing measure in at most three free
//! coordinates.
//!
//! The density is analytic in a strip around the real axis and decays
//! doubly exponentially in every direction, so the trapezoidal rule converges
//! geometrically in the step size. Integration starts on `[-L, L]^d`, shrinks
//! to the box where the log-integrand is within [`WINDOW_DROP`] of its maximum
//! (found on a coarse grid), and halves the step until two successive values
//! agree to the requested tolerance.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::{self, FreeIndex};
use crate::graph::{Graph, Vertex};
use crate::linalg::{Cholesky, Matrix};
use crate::math;

pub const MAX_FREE: usize = 3;

/// Log-integrand drop below the maximum that bounds the integration window.
pub const WINDOW_DROP: f64 = 60.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureOptions {
    /// Outer truncation `L` of every free coordinate.
    pub half_width: f64,
    /// Stop halving once successive values differ by less than this.
    pub tolerance: f64,
    pub initial_step: f64,
    pub min_step: f64,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self { half_width: 40.0, tolerance: 1e-10, initial_step: 0.5, min_step: 1.0 / 64.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    /// Step of the final grid.
    pub step: f64,
    /// Difference to the previous (twice coarser) grid.
    pub change: f64,
}

/// Reusable evaluator of `ln` of the density; avoids per-point allocation.
pub struct DensityEvaluator<'g> {
    g: &'g Graph,
    index: FreeIndex,
    log_norm: f64,
    h: Matrix,
}

impl<'g> DensityEvaluator<'g> {
    pub fn new(g: &'g Graph) -> Self {
        let index = FreeIndex::new(g);
        let h = Matrix::zeros(index.len());
        Self { g, log_norm: field::log_normalizer(g), index, h }
    }

    /// `ln` density at the pinned field whose free coordinates are `free`
    /// (in vertex order, root skipped); `-∞` where `exp` would overflow.
    pub fn log_density_free(&mut self, free: &[f64], full: &mut [f64]) -> f64 {
        for (row, &x) in free.iter().enumerate() {
            full[self.index.vertex(row).0] = x;
        }
        self.log_density(full)
    }

    pub fn log_density(&mut self, u: &[f64]) -> f64 {
        let energy = match field::edge_energy(self.g, u) {
            Ok(e) => e,
            Err(_) => return f64::NEG_INFINITY,
        };
        for row in 0..self.index.len() {
            let i = self.index.vertex(row);
            let mut diag = 0.0;
            for nb in self.g.neighbors(i) {
                diag += nb.conductance * math::exp(u[nb.vertex.0] - u[i.0]);
                if let Some(col) = self.index.row(nb.vertex) {
                    self.h[(row, col)] = -nb.conductance;
                }
            }
            self.h[(row, row)] = diag;
        }
        if !energy.is_finite() {
            return f64::NEG_INFINITY;
        }
        match Cholesky::factor(&self.h) {
            Ok(c) => self.log_norm - energy + 0.5 * c.ln_det(),
            Err(_) => f64::NEG_INFINITY,
        }
    }
}

fn free_count(g: &Graph) -> Result<usize> {
    let free = g.n_vertices() - 1;
    if free > MAX_FREE {
        return Err(Error::DimensionTooLarge { free, max: MAX_FREE });
    }
    Ok(free)
}

/// Visits every point of the tensor grid `lo[k] + step·i`, `i ∈ 0..=counts[k]`.
fn for_each_point<F: FnMut(&[f64])>(lo: &[f64], counts: &[usize], step: f64, mut f: F) {
    let d = lo.len();
    let mut idx = vec![0usize; d];
    let mut x: Vec<f64> = lo.to_vec();
    loop {
        for k in 0..d {
            x[k] = lo[k] + step * idx[k] as f64;
        }
        f(&x);
        let mut k = 0;
        loop {
            if k == d {
                return;
            }
            idx[k] += 1;
            if idx[k] <= counts[k] {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// `∫ exp(log_weight(u)) Q(du)` over the free coordinates of `g`.
///
/// `log_weight` receives the full (pinned) field.
pub fn integrate<F>(g: &Graph, mut log_weight: F, opts: &QuadratureOptions) -> Result<QuadratureResult>
where
    F: FnMut(&[f64]) -> f64,
{
    let d = free_count(g)?;
    if !(opts.initial_step > 0.0 && opts.min_step > 0.0 && opts.half_width > 0.0) {
        return Err(Error::InvalidParameter { name: "quadrature", reason: "steps and width must be positive" });
    }
    let mut eval = DensityEvaluator::new(g);
    let mut full = vec![0.0; g.n_vertices()];
    let mut integrand = |free: &[f64]| -> f64 {
        let ld = eval.log_density_free(free, &mut full);
        if ld == f64::NEG_INFINITY {
            return ld;
        }
        ld + log_weight(&full)
    };

    // Locate the window on a coarse grid over [-L, L]^d.
    let coarse = opts.initial_step;
    let n_coarse = (2.0 * opts.half_width / coarse) as usize;
    let lo_outer = vec![-opts.half_width; d];
    let counts_outer = vec![n_coarse; d];
    let mut best = f64::NEG_INFINITY;
    for_each_point(&lo_outer, &counts_outer, coarse, |x| best = best.max(integrand(x)));
    if best == f64::NEG_INFINITY {
        return Err(Error::NonFinite { what: "quadrature integrand" });
    }
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for_each_point(&lo_outer, &counts_outer, coarse, |x| {
        if integrand(x) > best - WINDOW_DROP {
            for k in 0..d {
                lo[k] = lo[k].min(x[k]);
                hi[k] = hi[k].max(x[k]);
            }
        }
    });
    let margin = 4.0 * coarse;
    for k in 0..d {
        lo[k] = (lo[k] - margin).max(-opts.half_width);
        hi[k] = (hi[k] + margin).min(opts.half_width);
    }

    let mut step = coarse;
    let mut previous: Option<f64> = None;
    loop {
        let counts: Vec<usize> = (0..d).map(|k| math::ceil((hi[k] - lo[k]) / step) as usize).collect();
        let mut sum = 0.0;
        for_each_point(&lo, &counts, step, |x| {
            let v = integrand(x);
            if v > f64::NEG_INFINITY {
                sum += math::exp(v);
            }
        });
        let value = sum * math::powi(step, d as i32);
        if let Some(prev) = previous {
            let change = math::abs(value - prev);
            if change < opts.tolerance || step / 2.0 < opts.min_step {
                return Ok(QuadratureResult { value, step, change });
            }
        }
        previous = Some(value);
        step /= 2.0;
    }
}

/// Total mass of `Q^W_{i₀}`.
pub fn normalization(g: &Graph, opts: &QuadratureOptions) -> Result<QuadratureResult> {
    integrate(g, |_| 0.0, opts)
}

/// `E^{Q}[e^{u_{j₀}}]` by quadrature.
pub fn exp_moment_identity_oracle(g: &Graph, j0: Vertex, opts: &QuadratureOptions) -> Result<f64> {
    g.check_vertex(j0)?;
    free_count(g)?;
    if j0 == g.root() {
        // u_{i₀} ≡ 0, so the integrand is the probability density itself.
        return Ok(1.0);
    }
    Ok(integrate(g, |u| u[j0.0], opts)?.value)
}

/// `E^{Q}[e^{s u_y}]` by quadrature.
pub fn exp_moment(g: &Graph, y: Vertex, s: f64, opts: &QuadratureOptions) -> Result<f64> {
    g.check_vertex(y)?;
    Ok(integrate(g, |u| s * u[y.0], opts)?.value)
}

/// Tabulated CDF of a one-dimensional marginal (two-vertex graph).
#[derive(Clone, Debug)]
pub struct TabulatedCdf {
    lo: f64,
    step: f64,
    cdf: Vec<f64>,
}

impl TabulatedCdf {
    /// CDF of the single free coordinate of a two-vertex graph, tabulated on
    /// `[-L, L]` with the given step by cumulative trapezoids and normalized
    /// to end at 1.
    pub fn two_vertex(g: &Graph, half_width: f64, step: f64) -> Result<Self> {
        if g.n_vertices() != 2 {
            return Err(Error::InvalidParameter { name: "graph", reason: "expected two vertices" });
        }
        let mut eval = DensityEvaluator::new(g);
        let mut full = [0.0; 2];
        let n = math::ceil(2.0 * half_width / step) as usize;
        let lo = -half_width;
        let dens: Vec<f64> = (0..=n)
            .map(|k| math::exp(eval.log_density_free(&[lo + step * k as f64], &mut full)))
            .collect();
        let mut cdf = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        cdf.push(0.0);
        for k in 1..=n {
            acc += 0.5 * step * (dens[k - 1] + dens[k]);
            cdf.push(acc);
        }
        for c in cdf.iter_mut() {
            *c /= acc;
        }
        Ok(Self { lo, step, cdf })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let t = (x - self.lo) / self.step;
        if t <= 0.0 {
            return 0.0;
        }
        let k = t as usize;
        if k + 1 >= self.cdf.len() {
            return 1.0;
        }
        let frac = t - k as f64;
        self.cdf[k] * (1.0 - frac) + self.cdf[k + 1] * frac
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_vertex_normalization() {
        for w in [0.2, 1.0, 5.0] {
            let g = Graph::two_vertex(w).unwrap();
            let r = normalization(&g, &QuadratureOptions::default()).unwrap();
            assert!((r.value - 1.0).abs() < 1e-9, "W={w}: {}", r.value);
        }
    }

    #[test]
    fn root_moment_is_one() {
        let g = Graph::two_vertex(1.0).unwrap();
        let one = exp_moment_identity_oracle(&g, Vertex(0), &QuadratureOptions::default()).unwrap();
        assert_eq!(one, 1.0);
    }

    #[test]
    fn too_many_coordinates() {
        let g = Graph::path(5, 1.0).unwrap();
        assert_eq!(
            normalization(&g, &QuadratureOptions::default()).unwrap_err(),
            Error::DimensionTooLarge { free: 4, max: 3 }
        );
    }

    #[test]
    fn cdf_is_monotone() {
        let g = Graph::two_vertex(1.0).unwrap();
        let cdf = TabulatedCdf::two_vertex(&g, 40.0, 0.01).unwrap();
        assert_eq!(cdf.eval(-50.0), 0.0);
        assert_eq!(cdf.eval(50.0), 1.0);
        let mut prev = 0.0;
        for k in -100..100 {
            let c = cdf.eval(k as f64 * 0.1);
            assert!(c >= prev);
            prev = c;
        }
    }
}
