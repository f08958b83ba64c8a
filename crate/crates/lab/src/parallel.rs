//! Multi-threaded drivers. Work is split by chain or by random stream, and
//! results are merged in index order, so output never depends on scheduling.

use std::collections::BTreeMap;

use rayon::prelude::*;
use vrjp_core::sampler::{sample_chain, ChainSummary, SampleSet, SamplerConfig};
use vrjp_core::vrjp::{vrjp_jump_counts, JumpChainLaw, RUNS_PER_STREAM};
use vrjp_core::{Graph, Result, Vertex};

/// Same output as [`vrjp_core::sampler::sample`], one chain per task.
pub fn sample(g: &Graph, cfg: &SamplerConfig) -> Result<(SampleSet, Vec<ChainSummary>)> {
    cfg.validate()?;
    let runs: Vec<(Vec<f64>, ChainSummary)> =
        (0..cfg.chains as u64).into_par_iter().map(|c| sample_chain(g, cfg, c)).collect::<Result<_>>()?;
    let mut set = SampleSet::new(g.n_vertices());
    let mut summaries = Vec::with_capacity(runs.len());
    for (chain, summary) in runs {
        set.chains.push(chain);
        summaries.push(summary);
    }
    Ok((set, summaries))
}

/// Same output as [`vrjp_core::vrjp::vrjp_jump_chain_law`], one stream block
/// per task.
pub fn vrjp_law(g: &Graph, start: Vertex, k: usize, runs: u64, seed: u64) -> Result<JumpChainLaw> {
    let blocks = runs.div_ceil(RUNS_PER_STREAM);
    let parts: Vec<BTreeMap<Vec<usize>, u64>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let n = RUNS_PER_STREAM.min(runs - b * RUNS_PER_STREAM);
            vrjp_jump_counts(g, start, k, n, seed, b)
        })
        .collect::<Result<_>>()?;
    let mut counts = BTreeMap::new();
    for part in parts {
        for (s, c) in part {
            *counts.entry(s).or_insert(0) += c;
        }
    }
    Ok(JumpChainLaw::from_counts(start, k, &counts))
}

/// Runs `f` on a pool with `threads` workers, or on the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> anyhow::Result<T> {
    match threads {
        Some(n) => Ok(rayon::ThreadPoolBuilder::new().num_threads(n).build()?.install(f)),
        None => Ok(f()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_matches_sequential() {
        let g = Graph::complete(3, 1.0).unwrap();
        let cfg = SamplerConfig { samples: 600, chains: 3, burn_in: 50, seed: 5, ..Default::default() };
        let (a, sa) = sample(&g, &cfg).unwrap();
        let (b, sb) = vrjp_core::sampler::sample(&g, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(sa, sb);

        let p = vrjp_law(&g, Vertex(0), 2, 25_000, 3).unwrap();
        let q = vrjp_core::vrjp::vrjp_jump_chain_law(&g, Vertex(0), 2, 25_000, 3).unwrap();
        assert_eq!(p, q);
    }
}
