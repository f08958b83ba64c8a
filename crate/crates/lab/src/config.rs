//! Run configuration. Every CLI flag has a field here; flags override the
//! file, and the merged result is embedded in each report so a run can be
//! repeated from the report alone.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use vrjp_core::sampler::SamplerConfig;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub run: RunSection,
    pub graph: GraphSection,
    pub sampler: SamplerSection,
    pub vrjp: VrjpSection,
    pub decay: DecaySection,
    pub verify: VerifySection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub seed: u64,
    /// Worker threads; all cores when absent.
    pub threads: Option<usize>,
    pub out_dir: PathBuf,
}

impl Default for RunSection {
    fn default() -> Self {
        Self { seed: 0, threads: None, out_dir: PathBuf::from("out") }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum GraphKind {
    /// Wired box `[-n, n]²`.
    Box,
    TwoVertex,
    Path,
    Cycle,
    Complete,
    /// Edge list read from `file`.
    Edges,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GraphSection {
    pub kind: GraphKind,
    /// Box radius, or vertex count for path, cycle and complete graphs.
    pub n: usize,
    /// Conductance of two-vertex, path, cycle and complete graphs.
    pub w: f64,
    pub wh: f64,
    pub wv: f64,
    pub file: Option<PathBuf>,
    /// Root vertex id of an edge-list graph; the smallest id when absent.
    pub root: Option<u64>,
}

impl Default for GraphSection {
    fn default() -> Self {
        Self { kind: GraphKind::Box, n: 3, w: 1.0, wh: 1.0, wv: 1.0, file: None, root: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerSection {
    pub step: f64,
    pub burn_in: u64,
    pub thin: u64,
    pub chains: usize,
    pub samples: usize,
    pub refresh: u64,
    pub adapt: bool,
    pub target_acceptance: f64,
    /// Exponent `s` of the reported moments `E[e^{s u_y}]`.
    pub s: f64,
    /// Targets: lattice sites `[x, y]` on boxes, vertex indices `[i, 0]`
    /// otherwise. Empty means every vertex.
    pub y: Vec<[i64; 2]>,
    /// Persist the samples as a binary record with a JSON sidecar.
    pub save: bool,
}

impl Default for SamplerSection {
    fn default() -> Self {
        let d = SamplerConfig::default();
        Self {
            step: d.step,
            burn_in: d.burn_in,
            thin: d.thin,
            chains: d.chains,
            samples: d.samples,
            refresh: d.refresh,
            adapt: d.adapt,
            target_acceptance: d.target_acceptance,
            s: 1.0,
            y: Vec::new(),
            save: false,
        }
    }
}

impl SamplerSection {
    pub fn sampler_config(&self, seed: u64) -> SamplerConfig {
        SamplerConfig {
            step: self.step,
            burn_in: self.burn_in,
            thin: self.thin,
            chains: self.chains,
            samples: self.samples,
            seed,
            refresh: self.refresh,
            adapt: self.adapt,
            target_acceptance: self.target_acceptance,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VrjpSection {
    /// Start vertex index; the graph root when absent.
    pub start: Option<usize>,
    /// Jumps per run.
    pub k: usize,
    pub runs: u64,
    /// Also write the first run as a `time,vertex` table.
    pub trajectory: bool,
}

impl Default for VrjpSection {
    fn default() -> Self {
        Self { start: None, k: 3, runs: 100_000, trajectory: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecaySection {
    pub s: f64,
    /// Conductance bound; the largest lattice conductance when absent.
    pub wbar: Option<f64>,
    pub y: Vec<[i64; 2]>,
    /// Estimates with a smaller effective sample size are inconclusive.
    pub ess_min: f64,
}

impl Default for DecaySection {
    fn default() -> Self {
        Self { s: 0.5, wbar: None, y: vec![[1, 0], [2, 0], [3, 0], [2, 2]], ess_min: 400.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Density,
    Moments,
    Tilt,
    Convexity,
    Taylor,
    Mixture,
    Deformation,
    All,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySection {
    pub suite: Suite,
    /// Retained field samples per Monte Carlo instance.
    pub samples: usize,
    pub chains: usize,
    pub burn_in: u64,
    /// VRJP runs for the mixture comparison.
    pub vrjp_runs: u64,
    /// Random instances per property check.
    pub instances: usize,
}

impl Default for VerifySection {
    fn default() -> Self {
        Self { suite: Suite::All, samples: 100_000, chains: 4, burn_in: 2_000, vrjp_runs: 1_000_000, instances: 100 }
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(text).map_err(|e| anyhow::anyhow!("config: {e}"))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the canonical TOML form.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml().as_bytes()))
    }

    /// Field-level validation with the offending key in the message.
    pub fn validate(&self) -> Result<()> {
        let g = &self.graph;
        match g.kind {
            GraphKind::Box if g.n < 1 => bail!("graph.n: box radius must be at least 1"),
            GraphKind::Path | GraphKind::Cycle | GraphKind::Complete if g.n < 2 => {
                bail!("graph.n: need at least 2 vertices")
            }
            GraphKind::Cycle if g.n < 3 => bail!("graph.n: a cycle needs at least 3 vertices"),
            GraphKind::Edges if g.file.is_none() => bail!("graph.file: required for kind = \"edges\""),
            _ => {}
        }
        for (key, w) in [("graph.w", g.w), ("graph.wh", g.wh), ("graph.wv", g.wv)] {
            if !(w.is_finite() && w > 0.0) {
                bail!("{key}: conductance must be finite and positive, got {w}");
            }
        }
        let smp = &self.sampler;
        self.sampler
            .sampler_config(self.run.seed)
            .validate()
            .map_err(|e| anyhow::anyhow!("sampler: {e}"))?;
        if !(smp.s > 0.0 && smp.s <= 1.0) {
            bail!("sampler.s: must lie in (0, 1], got {}", smp.s);
        }
        if self.vrjp.k == 0 {
            bail!("vrjp.k: must be at least 1");
        }
        if self.vrjp.runs == 0 {
            bail!("vrjp.runs: must be at least 1");
        }
        let d = &self.decay;
        if !(d.s > 0.0 && d.s < 1.0) {
            bail!("decay.s: must lie in (0, 1), got {}", d.s);
        }
        if let Some(w) = d.wbar {
            if !(w.is_finite() && w > 0.0) {
                bail!("decay.wbar: must be finite and positive, got {w}");
            }
        }
        if d.y.iter().any(|y| *y == [0, 0]) {
            bail!("decay.y: the origin is the root and cannot be a target");
        }
        let v = &self.verify;
        if v.samples == 0 || v.chains < 2 || v.vrjp_runs == 0 || v.instances == 0 {
            bail!("verify: samples, vrjp_runs and instances must be positive and chains at least 2");
        }
        if self.run.threads == Some(0) {
            bail!("run.threads: must be at least 1");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut cfg = Config::default();
        cfg.run.seed = 42;
        cfg.decay.y = vec![[2, 1]];
        cfg.graph.file = Some(PathBuf::from("g.txt"));
        let back = Config::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.digest(), cfg.digest());
    }

    #[test]
    fn partial_file_keeps_defaults() {
        let cfg = Config::from_toml("[sampler]\nchains = 8\n").unwrap();
        assert_eq!(cfg.sampler.chains, 8);
        assert_eq!(cfg.sampler.samples, 100_000);
        assert_eq!(cfg.graph.kind, GraphKind::Box);
    }

    #[test]
    fn diagnostics_name_the_field() {
        let err = Config::from_toml("[sampler]\nchains = \"four\"\n").unwrap_err().to_string();
        assert!(err.contains("chains"), "{err}");
        assert!(err.contains("line 2"), "{err}");
        let err = Config::from_toml("[graph]\nradius = 3\n").unwrap_err().to_string();
        assert!(err.contains("radius"), "{err}");

        let mut cfg = Config::default();
        cfg.decay.s = 1.0;
        assert!(cfg.validate().unwrap_err().to_string().starts_with("decay.s"));
        cfg = Config::default();
        cfg.sampler.chains = 0;
        assert!(cfg.validate().unwrap_err().to_string().contains("chains"));
    }
}
