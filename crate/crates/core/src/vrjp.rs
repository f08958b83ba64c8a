//! The vertex reinforced jump process and its quenched Markov counterparts.
//!
//! Both are compared through their jump chains (the sequence of visited
//! vertices), which do not depend on how time is parametrized.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use rand_core::RngCore;

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};
use crate::math;
use crate::rng;
use crate::sampler::{SampleSet, BATCHES_PER_CHAIN};
use crate::stats;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jump {
    pub time: f64,
    pub to: Vertex,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub start: Vertex,
    pub jumps: Vec<Jump>,
    /// `L_j = 1 + ` time spent at `j` up to the last jump.
    pub local_times: Vec<f64>,
}

impl Trajectory {
    /// Visited vertices after the start, in order.
    pub fn jump_chain(&self) -> Vec<Vertex> {
        self.jumps.iter().map(|j| j.to).collect()
    }

    /// Local times recomputed from the event list.
    pub fn reconstruct_local_times(&self, n_vertices: usize) -> Vec<f64> {
        let mut l = vec![1.0; n_vertices];
        let mut at = self.start;
        let mut t = 0.0;
        for j in &self.jumps {
            l[at.0] += j.time - t;
            t = j.time;
            at = j.to;
        }
        l
    }

    /// Checks increasing times, adjacency of consecutive vertices and the
    /// local-time bookkeeping (to `1e-12`).
    pub fn validate(&self, g: &Graph) -> Result<()> {
        let mut at = self.start;
        let mut t = 0.0;
        for j in &self.jumps {
            if !(j.time > t) {
                return Err(Error::InvalidParameter { name: "trajectory", reason: "jump times must increase" });
            }
            if g.conductance(at, j.to).is_none() {
                return Err(Error::InvalidParameter { name: "trajectory", reason: "jump between non-neighbours" });
            }
            t = j.time;
            at = j.to;
        }
        let l = self.reconstruct_local_times(g.n_vertices());
        if l.len() != self.local_times.len()
            || l.iter().zip(&self.local_times).any(|(a, b)| math::abs(a - b) > 1e-12 || *b < 1.0)
        {
            return Err(Error::InvalidParameter { name: "trajectory", reason: "local times do not match events" });
        }
        Ok(())
    }
}

/// `k` jumps of the VRJP started at `start`: from `i` it jumps to `j ∼ i` at
/// rate `W_{ij} L_j`. While sitting at `i` every `L_j`, `j ≠ i`, is frozen, so
/// the holding time is exponential with rate `Σ_j W_{ij} L_j`.
pub fn simulate_vrjp<R: RngCore + ?Sized>(g: &Graph, start: Vertex, k: usize, rng: &mut R) -> Result<Trajectory> {
    g.check_vertex(start)?;
    if k == 0 {
        return Err(Error::InvalidParameter { name: "k", reason: "at least one jump" });
    }
    let mut local = vec![1.0; g.n_vertices()];
    let mut jumps = Vec::with_capacity(k);
    let mut at = start;
    let mut t = 0.0;
    let mut weights = Vec::new();
    for _ in 0..k {
        let nbs = g.neighbors(at);
        weights.clear();
        weights.extend(nbs.iter().map(|nb| nb.conductance * local[nb.vertex.0]));
        let total: f64 = weights.iter().sum();
        let hold = rng::exponential(rng, total);
        local[at.0] += hold;
        t += hold;
        let next = nbs[rng::categorical(rng, &weights, total)].vertex;
        jumps.push(Jump { time: t, to: next });
        at = next;
    }
    Ok(Trajectory { start, jumps, local_times: local })
}

/// Jump-chain transition probabilities of the quenched process at `u`:
/// `P(i → j) = W_{ij} e^{u_j} / Σ_{ℓ∼i} W_{iℓ} e^{u_ℓ}`, in the order of
/// [`Graph::neighbors`].
pub fn quenched_jump_probabilities(g: &Graph, u: &[f64], i: Vertex) -> Vec<f64> {
    // Shift by the local maximum so that large fields do not overflow.
    let nbs = g.neighbors(i);
    let top = nbs.iter().map(|nb| u[nb.vertex.0]).fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = nbs.iter().map(|nb| nb.conductance * math::exp(u[nb.vertex.0] - top)).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

/// `k` jumps of the Markov jump process with rates `½ W_{ij} e^{u_j − u_i}`.
pub fn simulate_quenched<R: RngCore + ?Sized>(
    g: &Graph,
    u: &[f64],
    start: Vertex,
    k: usize,
    rng: &mut R,
) -> Result<Trajectory> {
    g.check_function(u)?;
    g.check_vertex(start)?;
    if k == 0 {
        return Err(Error::InvalidParameter { name: "k", reason: "at least one jump" });
    }
    let mut local = vec![1.0; g.n_vertices()];
    let mut jumps = Vec::with_capacity(k);
    let mut at = start;
    let mut t = 0.0;
    let mut rates = Vec::new();
    for _ in 0..k {
        let nbs = g.neighbors(at);
        rates.clear();
        rates.extend(nbs.iter().map(|nb| 0.5 * nb.conductance * math::exp(u[nb.vertex.0] - u[at.0])));
        let total: f64 = rates.iter().sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::Overflow { what: "quenched jump rates" });
        }
        let hold = rng::exponential(rng, total);
        local[at.0] += hold;
        t += hold;
        let next = nbs[rng::categorical(rng, &rates, total)].vertex;
        jumps.push(Jump { time: t, to: next });
        at = next;
    }
    Ok(Trajectory { start, jumps, local_times: local })
}

/// Law of the first `k` visited vertices, as a map from vertex-index
/// sequences to `(probability, standard error)`.
#[derive(Clone, Debug, PartialEq)]
pub struct JumpChainLaw {
    pub start: Vertex,
    pub horizon: usize,
    pub entries: BTreeMap<Vec<usize>, (f64, f64)>,
    /// Number of Monte Carlo draws behind the law; `None` if exact.
    pub samples: Option<u64>,
}

impl JumpChainLaw {
    /// Empirical law from sequence counts, with binomial standard errors.
    pub fn from_counts(start: Vertex, horizon: usize, counts: &BTreeMap<Vec<usize>, u64>) -> Self {
        let n: u64 = counts.values().sum();
        let nf = n as f64;
        let entries = counts
            .iter()
            .map(|(s, &c)| {
                let p = c as f64 / nf;
                (s.clone(), (p, math::sqrt(p * (1.0 - p) / nf)))
            })
            .collect();
        Self { start, horizon, entries, samples: Some(n) }
    }

    pub fn total_mass(&self) -> f64 {
        self.entries.values().map(|e| e.0).sum()
    }

    pub fn probability(&self, seq: &[usize]) -> f64 {
        self.entries.get(seq).map_or(0.0, |e| e.0)
    }
}

/// Counts of the `k`-step VRJP jump chains of `runs` independent runs drawn
/// from the random stream `(seed, stream)`.
pub fn vrjp_jump_counts(
    g: &Graph,
    start: Vertex,
    k: usize,
    runs: u64,
    seed: u64,
    stream: u64,
) -> Result<BTreeMap<Vec<usize>, u64>> {
    let mut rng = rng::stream_rng(seed, stream);
    let mut counts = BTreeMap::new();
    for _ in 0..runs {
        let t = simulate_vrjp(g, start, k, &mut rng)?;
        let seq: Vec<usize> = t.jumps.iter().map(|j| j.to.0).collect();
        *counts.entry(seq).or_insert(0) += 1;
    }
    Ok(counts)
}

/// Runs per random stream in [`vrjp_jump_chain_law`].
pub const RUNS_PER_STREAM: u64 = 10_000;

/// Empirical VRJP jump-chain law from `runs` simulations. Runs are grouped in
/// blocks of [`RUNS_PER_STREAM`], block `b` using stream `b` of `seed`.
pub fn vrjp_jump_chain_law(g: &Graph, start: Vertex, k: usize, runs: u64, seed: u64) -> Result<JumpChainLaw> {
    let mut counts = BTreeMap::new();
    let mut done = 0;
    let mut block = 0;
    while done < runs {
        let n = RUNS_PER_STREAM.min(runs - done);
        for (s, c) in vrjp_jump_counts(g, start, k, n, seed, block)? {
            *counts.entry(s).or_insert(0) += c;
        }
        done += n;
        block += 1;
    }
    Ok(JumpChainLaw::from_counts(start, k, &counts))
}

/// Exact probabilities of all `k`-step jump chains of the quenched process.
pub fn quenched_sequence_probabilities(
    g: &Graph,
    u: &[f64],
    start: Vertex,
    k: usize,
) -> Result<BTreeMap<Vec<usize>, f64>> {
    g.check_function(u)?;
    g.check_vertex(start)?;
    let mut out = BTreeMap::new();
    let mut stack: Vec<(Vec<usize>, Vertex, f64)> = vec![(Vec::new(), start, 1.0)];
    while let Some((seq, at, p)) = stack.pop() {
        if seq.len() == k {
            out.insert(seq, p);
            continue;
        }
        let probs = quenched_jump_probabilities(g, u, at);
        for (nb, q) in g.neighbors(at).iter().zip(probs) {
            let mut next = seq.clone();
            next.push(nb.vertex.0);
            stack.push((next, nb.vertex, p * q));
        }
    }
    Ok(out)
}

/// Largest horizon accepted by the enumerating laws.
pub const MAX_HORIZON: usize = 6;

/// `∫ L^{(u)} Q(du)` restricted to jump chains: the exact quenched sequence
/// probabilities averaged over field samples drawn from `Q^W_{start}`.
/// Standard errors come from batch means across chains.
pub fn quenched_mixture_law(g: &Graph, start: Vertex, k: usize, fields: &SampleSet) -> Result<JumpChainLaw> {
    if start != g.root() {
        return Err(Error::InvalidParameter {
            name: "start",
            reason: "field samples must be rooted at the starting vertex",
        });
    }
    if k == 0 || k > MAX_HORIZON {
        return Err(Error::InvalidParameter { name: "k", reason: "horizon must lie in 1..=6" });
    }
    if fields.is_empty() {
        return Err(Error::InvalidParameter { name: "fields", reason: "no field samples" });
    }
    // per sequence, per chain, the series of exact probabilities
    let mut series: BTreeMap<Vec<usize>, Vec<Vec<f64>>> = BTreeMap::new();
    let n_chains = fields.chains.len();
    for (c, chain) in fields.chains.iter().enumerate() {
        let len = chain.len() / fields.n_vertices;
        for (t, u) in chain.chunks_exact(fields.n_vertices).enumerate() {
            for (seq, p) in quenched_sequence_probabilities(g, u, start, k)? {
                let per_chain = series.entry(seq).or_insert_with(|| vec![vec![0.0; 0]; n_chains]);
                let s = &mut per_chain[c];
                if s.is_empty() {
                    s.resize(len, 0.0);
                }
                s[t] = p;
            }
        }
    }
    let total = fields.len() as f64;
    let entries = series
        .into_iter()
        .map(|(seq, per_chain)| {
            let mean = per_chain.iter().flatten().sum::<f64>() / total;
            let se = stats::batch_means_stderr(&per_chain, BATCHES_PER_CHAIN).unwrap_or(f64::NAN);
            (seq, (mean, se))
        })
        .collect();
    Ok(JumpChainLaw { start, horizon: k, entries, samples: Some(fields.len() as u64) })
}

/// Total-variation distance `½ Σ |p − q|` and its propagated standard error
/// `½ Σ √(σ_p² + σ_q²)` over the union of supports.
pub fn total_variation(a: &JumpChainLaw, b: &JumpChainLaw) -> (f64, f64) {
    let mut keys: Vec<&Vec<usize>> = a.entries.keys().chain(b.entries.keys()).collect();
    keys.sort();
    keys.dedup();
    let mut tv = 0.0;
    let mut err = 0.0;
    for key in keys {
        let (pa, sa) = a.entries.get(key).copied().unwrap_or((0.0, 0.0));
        let (pb, sb) = b.entries.get(key).copied().unwrap_or((0.0, 0.0));
        tv += math::abs(pa - pb);
        err += math::sqrt(sa * sa + sb * sb);
    }
    (0.5 * tv, 0.5 * err)
}
