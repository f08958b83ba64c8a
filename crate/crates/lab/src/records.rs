//! Binary sample records with a JSON sidecar.
//!
//! The record is a flat sequence of little-endian `f64`: chain by chain,
//! sample by sample, one value per vertex in vertex order. The sidecar names
//! the graph (by hash), the sampler settings and the seed.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use vrjp_core::sampler::SampleSet;

use crate::config::SamplerSection;

pub const FORMAT: &str = "f64-le chain-major vertex-ordered";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub format: String,
    pub graph_hash: String,
    pub n_vertices: usize,
    /// Retained samples of each chain.
    pub chain_lengths: Vec<usize>,
    pub seed: u64,
    pub sampler: SamplerSection,
}

pub fn write(record: &Path, set: &SampleSet, sidecar: &Sidecar) -> Result<()> {
    let mut bytes = Vec::with_capacity(8 * set.chains.iter().map(Vec::len).sum::<usize>());
    for x in set.chains.iter().flatten() {
        bytes.extend_from_slice(&x.to_le_bytes());
    }
    fs::write(record, bytes).with_context(|| format!("writing {}", record.display()))?;
    let json = serde_json::to_string_pretty(sidecar)?;
    fs::write(record.with_extension("json"), json + "\n")?;
    Ok(())
}

pub fn read(record: &Path) -> Result<(SampleSet, Sidecar)> {
    let side_path = record.with_extension("json");
    let sidecar: Sidecar = serde_json::from_str(
        &fs::read_to_string(&side_path).with_context(|| format!("reading {}", side_path.display()))?,
    )?;
    if sidecar.format != FORMAT {
        bail!("unknown record format `{}`", sidecar.format);
    }
    let bytes = fs::read(record).with_context(|| format!("reading {}", record.display()))?;
    let expected: usize = sidecar.chain_lengths.iter().sum::<usize>() * sidecar.n_vertices * 8;
    if bytes.len() != expected {
        bail!("{}: {} bytes, sidecar implies {expected}", record.display(), bytes.len());
    }
    let mut values = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap()));
    let mut set = SampleSet::new(sidecar.n_vertices);
    for &len in &sidecar.chain_lengths {
        set.chains.push(values.by_ref().take(len * sidecar.n_vertices).collect());
    }
    Ok((set, sidecar))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("samples.bin");
        let mut set = SampleSet::new(2);
        set.chains = vec![vec![0.0, 1.5, 0.0, -2.25], vec![0.0, f64::MIN_POSITIVE]];
        let side = Sidecar {
            format: FORMAT.into(),
            graph_hash: "abc".into(),
            n_vertices: 2,
            chain_lengths: vec![2, 1],
            seed: 9,
            sampler: SamplerSection::default(),
        };
        write(&path, &set, &side).unwrap();
        let (back, side_back) = read(&path).unwrap();
        assert_eq!(back, set);
        assert_eq!(side_back, side);
        std::fs::write(&path, [0u8; 8]).unwrap();
        assert!(read(&path).is_err());
    }
}
