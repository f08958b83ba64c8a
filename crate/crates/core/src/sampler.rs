//! Single-site Metropolis sampling of the mixing measure.
//!
//! Each sweep proposes `u_k → u_k + σ(2U − 1)` at every non-root vertex in
//! index order. The change in `ln D` is obtained from the matrix determinant
//! lemma: moving `u_k` only changes the diagonal of the symmetric tree matrix
//! `H` at `k` and at its non-root neighbours `S`, so
//!
//! ```text
//! D(u') / D(u) = det(I + diag(d) H⁻¹_{SS})
//! ```
//!
//! with `d` the diagonal increments. The chain keeps `H⁻¹` up to date with
//! the matching Woodbury update on acceptance and refactorizes every
//! `refresh` sweeps, failing if the incremental `ln D` drifted.

use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{self, FreeIndex};
use crate::graph::{Graph, Vertex};
use crate::linalg::{Cholesky, Lu, Matrix};
use crate::math;
use crate::rng;
use crate::stats;

/// Largest tolerated gap between incremental and refactorized `ln D`.
pub const DRIFT_TOLERANCE: f64 = 1e-6;

/// Batches per chain for the batch-means standard error.
pub const BATCHES_PER_CHAIN: usize = 25;

const ADAPT_WINDOW: u64 = 20;

#[derive(Clone, Debug, PartialEq)]
pub struct SamplerConfig {
    /// Initial proposal half-width `σ`.
    pub step: f64,
    pub burn_in: u64,
    /// Sweeps between retained samples.
    pub thin: u64,
    pub chains: usize,
    /// Retained samples, summed over chains.
    pub samples: usize,
    pub seed: u64,
    /// Sweeps between full refactorizations.
    pub refresh: u64,
    /// Tune `σ` towards `target_acceptance` during burn-in.
    pub adapt: bool,
    pub target_acceptance: f64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            step: 1.0,
            burn_in: 1_000,
            thin: 1,
            chains: 4,
            samples: 100_000,
            seed: 0,
            refresh: 100,
            adapt: true,
            target_acceptance: 0.3,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason| Err(Error::InvalidParameter { name, reason });
        if !(self.step.is_finite() && self.step > 0.0) {
            return bad("step", "must be positive");
        }
        if self.thin == 0 {
            return bad("thin", "must be at least 1");
        }
        if self.chains == 0 {
            return bad("chains", "must be at least 1");
        }
        if self.samples == 0 {
            return bad("samples", "must be at least 1");
        }
        if self.refresh == 0 {
            return bad("refresh", "must be at least 1");
        }
        if !(self.target_acceptance > 0.0 && self.target_acceptance < 1.0) {
            return bad("target_acceptance", "must lie in (0, 1)");
        }
        Ok(())
    }

    pub fn samples_per_chain(&self) -> usize {
        self.samples.div_ceil(self.chains)
    }
}

/// A proposed single-site move with its log acceptance ratio.
#[derive(Clone, Debug)]
pub struct Move {
    pub site: Vertex,
    pub value: f64,
    /// `ln density(u') − ln density(u)`; `-∞` if `u'` overflows.
    pub log_ratio: f64,
    /// `ln D(u') − ln D(u)`.
    pub ln_d_change: f64,
    rows: Vec<usize>,
    deltas: Vec<f64>,
    update: Option<Lu>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ChainSummary {
    pub sweeps: u64,
    pub proposed: u64,
    pub accepted: u64,
    /// `σ` after burn-in.
    pub step: f64,
    /// Largest `|ln D_incremental − ln D_fresh|` seen at refreshes.
    pub max_drift: f64,
}

impl ChainSummary {
    pub fn acceptance_rate(&self) -> f64 {
        if self.proposed == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposed as f64
        }
    }
}

/// One Markov chain targeting `Q^W_{i₀}`.
pub struct Chain<'g> {
    g: &'g Graph,
    index: FreeIndex,
    cfg: SamplerConfig,
    rng: ChaCha8Rng,
    u: Vec<f64>,
    green: Matrix,
    ln_d: f64,
    step: f64,
    adapting: bool,
    window: (u64, u64),
    summary: ChainSummary,
}

impl<'g> Chain<'g> {
    /// Chain number `chain` of the configuration, started at `u ≡ 0` with its
    /// own random stream.
    pub fn new(g: &'g Graph, cfg: &SamplerConfig, chain: u64) -> Result<Self> {
        cfg.validate()?;
        let index = FreeIndex::new(g);
        let u = vec![0.0; g.n_vertices()];
        let mut c = Self {
            g,
            green: Matrix::zeros(index.len()),
            index,
            cfg: cfg.clone(),
            rng: rng::stream_rng(cfg.seed, chain),
            u,
            ln_d: 0.0,
            step: cfg.step,
            adapting: cfg.adapt,
            window: (0, 0),
            summary: ChainSummary { step: cfg.step, ..ChainSummary::default() },
        };
        c.refactor()?;
        Ok(c)
    }

    pub fn state(&self) -> &[f64] {
        &self.u
    }

    /// Incrementally maintained `ln D(W, u)`.
    pub fn ln_tree_polynomial(&self) -> f64 {
        self.ln_d
    }

    pub fn step_size(&self) -> f64 {
        self.step
    }

    pub fn summary(&self) -> ChainSummary {
        self.summary
    }

    /// Restarts the chain from `u`, which must be pinned.
    pub fn set_state(&mut self, u: &[f64]) -> Result<()> {
        self.g.check_pinned(u)?;
        self.u.copy_from_slice(u);
        self.refactor().map(|_| ())
    }

    fn refactor(&mut self) -> Result<f64> {
        let h = field::tree_matrix(self.g, &self.index, &self.u)?;
        let chol = Cholesky::factor(&h).map_err(|_| Error::NotConnected)?;
        self.green = chol.inverse();
        let fresh = chol.ln_det();
        let drift = math::abs(fresh - self.ln_d);
        self.ln_d = fresh;
        Ok(drift)
    }

    /// Refactorizes and returns `|ln D_incremental − ln D_fresh|`; errors if it
    /// exceeds [`DRIFT_TOLERANCE`].
    pub fn refresh(&mut self) -> Result<f64> {
        let before = self.ln_d;
        let drift = self.refactor()?;
        if drift > DRIFT_TOLERANCE {
            return Err(Error::FactorizationDrift {
                incremental: before,
                fresh: self.ln_d,
                sweep: self.summary.sweeps,
            });
        }
        self.summary.max_drift = self.summary.max_drift.max(drift);
        Ok(drift)
    }

    /// Log acceptance ratio of moving `u_site` to `value`, computed
    /// incrementally.
    pub fn propose(&self, site: Vertex, value: f64) -> Result<Move> {
        let row = self.index.row(site).ok_or(Error::InvalidParameter {
            name: "site",
            reason: "the root is pinned",
        })?;
        if !value.is_finite() {
            return Err(Error::NonFinite { what: "proposal" });
        }
        let old = self.u[site.0];
        let mut energy = 0.0;
        let mut diag = 0.0;
        let mut rows = vec![row];
        let mut deltas = vec![0.0];
        let mut overflow = false;
        for nb in self.g.neighbors(site) {
            let uj = self.u[nb.vertex.0];
            let (d_new, d_old) = (uj - value, uj - old);
            if math::abs(d_new) > 700.0 {
                overflow = true;
                break;
            }
            let w = nb.conductance;
            energy += w * (math::cosh(d_new) - math::cosh(d_old));
            diag += w * (math::exp(d_new) - math::exp(d_old));
            if let Some(r) = self.index.row(nb.vertex) {
                rows.push(r);
                deltas.push(w * (math::exp(-d_new) - math::exp(-d_old)));
            }
        }
        if overflow {
            return Ok(Move {
                site,
                value,
                log_ratio: f64::NEG_INFINITY,
                ln_d_change: f64::NAN,
                rows,
                deltas,
                update: None,
            });
        }
        deltas[0] = diag;

        let m = rows.len();
        let mut k = Matrix::identity(m);
        for a in 0..m {
            for b in 0..m {
                k[(a, b)] += deltas[a] * self.green[(rows[a], rows[b])];
            }
        }
        let lu = Lu::factor(k);
        let (ln_d_change, update) = match lu {
            Ok(lu) => {
                let (ln_abs, sign) = lu.ln_abs_det();
                if sign > 0.0 {
                    (ln_abs, Some(lu))
                } else {
                    (f64::NAN, None)
                }
            }
            Err(_) => (f64::NAN, None),
        };
        Ok(Move {
            site,
            value,
            log_ratio: -energy + 0.5 * ln_d_change,
            ln_d_change,
            rows,
            deltas,
            update,
        })
    }

    /// Applies an accepted move: updates `u`, `ln D` and `H⁻¹`.
    pub fn accept(&mut self, mv: &Move) -> Result<()> {
        let lu = mv.update.as_ref().ok_or(Error::NonFinite { what: "determinant update" })?;
        let n = self.index.len();
        let m = mv.rows.len();
        // Y = H⁻¹ restricted to rows S; X = K⁻¹ diag(d) Y.
        let mut y = vec![0.0; m * n];
        for (a, &r) in mv.rows.iter().enumerate() {
            y[a * n..(a + 1) * n].copy_from_slice(self.green.row(r));
        }
        let mut x = vec![0.0; m * n];
        let mut rhs = vec![0.0; m];
        for col in 0..n {
            for a in 0..m {
                rhs[a] = mv.deltas[a] * y[a * n + col];
            }
            let sol = lu.solve(&rhs);
            for a in 0..m {
                x[a * n + col] = sol[a];
            }
        }
        // H'⁻¹ = H⁻¹ − H⁻¹_{:,S} X, with H⁻¹_{i,S} = Y_{S,i} by symmetry.
        for i in 0..n {
            let row = self.green.row_mut(i);
            for a in 0..m {
                let coef = y[a * n + i];
                if coef != 0.0 {
                    for (g, xv) in row.iter_mut().zip(&x[a * n..(a + 1) * n]) {
                        *g -= coef * xv;
                    }
                }
            }
        }
        // The exact update is symmetric; averaging with the transpose keeps
        // rounding from seeding an unstable antisymmetric part.
        for i in 0..n {
            for j in 0..i {
                let avg = 0.5 * (self.green[(i, j)] + self.green[(j, i)]);
                self.green.row_mut(i)[j] = avg;
                self.green.row_mut(j)[i] = avg;
            }
        }
        self.u[mv.site.0] = mv.value;
        self.ln_d += mv.ln_d_change;
        Ok(())
    }

    /// One Metropolis sweep over all non-root vertices.
    pub fn sweep(&mut self) -> Result<()> {
        for row in 0..self.index.len() {
            let site = self.index.vertex(row);
            let value = self.u[site.0] + self.step * (2.0 * rng::unit_open(&mut self.rng) - 1.0);
            let mv = self.propose(site, value)?;
            if mv.log_ratio.is_nan() {
                let mut state = self.u.clone();
                state[site.0] = value;
                return Err(Error::ChainAborted { sweep: self.summary.sweeps, state });
            }
            let log_u = math::ln(rng::unit_open(&mut self.rng));
            self.summary.proposed += 1;
            self.window.0 += 1;
            if log_u < mv.log_ratio {
                self.accept(&mv)?;
                self.summary.accepted += 1;
                self.window.1 += 1;
            }
        }
        self.summary.sweeps += 1;
        if self.summary.sweeps % self.cfg.refresh == 0 {
            self.refresh()?;
        }
        if self.adapting && self.summary.sweeps % ADAPT_WINDOW == 0 {
            let rate = self.window.1 as f64 / self.window.0 as f64;
            self.step = (self.step * math::exp(rate - self.cfg.target_acceptance)).clamp(1e-4, 1e2);
            self.window = (0, 0);
        }
        Ok(())
    }

    /// Burn-in (adapting `σ` if configured), then freezes `σ`.
    pub fn burn_in(&mut self) -> Result<()> {
        for _ in 0..self.cfg.burn_in {
            self.sweep()?;
        }
        self.adapting = false;
        self.summary.step = self.step;
        Ok(())
    }

    /// Runs burn-in and hands each retained state to `observe`.
    pub fn run<F: FnMut(&[f64])>(&mut self, mut observe: F) -> Result<ChainSummary> {
        self.burn_in()?;
        for _ in 0..self.cfg.samples_per_chain() {
            for _ in 0..self.cfg.thin {
                self.sweep()?;
            }
            observe(&self.u);
        }
        Ok(self.summary)
    }
}

/// Retained samples of several chains, each stored as consecutive
/// vertex-ordered vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    pub n_vertices: usize,
    pub chains: Vec<Vec<f64>>,
}

impl SampleSet {
    pub fn new(n_vertices: usize) -> Self {
        Self { n_vertices, chains: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.chains.iter().map(|c| c.len() / self.n_vertices).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Per-chain series of the coordinate `v`.
    pub fn series(&self, v: Vertex) -> Vec<Vec<f64>> {
        self.chains
            .iter()
            .map(|c| c.chunks_exact(self.n_vertices).map(|u| u[v.0]).collect())
            .collect()
    }

    /// Iterates over all samples, chain by chain.
    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.chains.iter().flat_map(move |c| c.chunks_exact(self.n_vertices))
    }
}

/// Runs one chain and stores every retained state.
pub fn sample_chain(g: &Graph, cfg: &SamplerConfig, chain: u64) -> Result<(Vec<f64>, ChainSummary)> {
    let mut c = Chain::new(g, cfg, chain)?;
    let mut out = Vec::with_capacity(cfg.samples_per_chain() * g.n_vertices());
    let summary = c.run(|u| out.extend_from_slice(u))?;
    Ok((out, summary))
}

/// Runs all configured chains sequentially.
pub fn sample(g: &Graph, cfg: &SamplerConfig) -> Result<(SampleSet, Vec<ChainSummary>)> {
    let mut set = SampleSet::new(g.n_vertices());
    let mut summaries = Vec::new();
    for chain in 0..cfg.chains as u64 {
        let (s, summary) = sample_chain(g, cfg, chain)?;
        set.chains.push(s);
        summaries.push(summary);
    }
    Ok((set, summaries))
}

/// Monte Carlo estimate of `E[e^{s u_y}]`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentEstimate {
    pub y: Vertex,
    pub s: f64,
    pub estimate: f64,
    /// Batch-means standard error; `None` with fewer than two chains.
    pub stderr: Option<f64>,
    pub ess: Option<f64>,
    pub samples: usize,
    pub chain_means: Vec<f64>,
    /// Largest `e^{s u_y}` seen per chain (heavy-tail monitor).
    pub chain_max: Vec<f64>,
}

impl MomentEstimate {
    /// `estimate − bound` in units of the standard error; `None` without one.
    pub fn excess_sigmas(&self, bound: f64) -> Option<f64> {
        self.stderr.map(|se| if se > 0.0 { (self.estimate - bound) / se } else { 0.0 })
    }
}

fn check_exponent(s: f64) -> Result<()> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::InvalidParameter { name: "s", reason: "exponent must lie in (0, 1]" });
    }
    Ok(())
}

/// Estimate of `E[e^{s u_y}]` from per-chain series of `u_y`.
pub fn estimate_from_series(y: Vertex, s: f64, series: &[Vec<f64>]) -> Result<MomentEstimate> {
    check_exponent(s)?;
    let values: Vec<Vec<f64>> =
        series.iter().map(|c| c.iter().map(|&x| math::exp(s * x)).collect()).collect();
    let samples: usize = values.iter().map(Vec::len).sum();
    if samples == 0 {
        return Err(Error::InvalidParameter { name: "samples", reason: "no samples" });
    }
    let chain_means: Vec<f64> = values.iter().filter(|c| !c.is_empty()).map(|c| stats::mean(c)).collect();
    let chain_max: Vec<f64> = values.iter().map(|c| c.iter().copied().fold(0.0, f64::max)).collect();
    let estimate = values.iter().flatten().sum::<f64>() / samples as f64;
    let (stderr, ess) = if values.len() < 2 {
        (None, None)
    } else {
        let se = stats::batch_means_stderr(&values, BATCHES_PER_CHAIN);
        let all: Vec<f64> = values.iter().flatten().copied().collect();
        let var = stats::variance(&all);
        let ess = se.map(|se| if se > 0.0 { var / (se * se) } else { samples as f64 });
        (se, ess)
    };
    if !estimate.is_finite() {
        return Err(Error::NonFinite { what: "moment estimate" });
    }
    Ok(MomentEstimate { y, s, estimate, stderr, ess, samples, chain_means, chain_max })
}

/// `E[e^{s u_y}]` from stored samples. At the root the estimate is exactly 1.
pub fn estimate_exp_moment(set: &SampleSet, g: &Graph, y: Vertex, s: f64) -> Result<MomentEstimate> {
    g.check_vertex(y)?;
    estimate_from_series(y, s, &set.series(y))
}
