//! Command-line definitions. Every flag is optional and, when given,
//! overrides the matching configuration key.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{Config, GraphKind, Suite};

#[derive(Debug, Parser)]
#[command(name = "vrjp-lab", version, about = "Mixing-field experiments for the vertex reinforced jump process")]
pub struct Cli {
    /// Master random seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// TOML configuration file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a graph and write its edge list and vertex table.
    Graph(GraphArgs),
    /// Sample the mixing field and estimate E[e^{s u_y}].
    Sample {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        sampler: SamplerArgs,
        /// Exponent s in (0, 1].
        #[arg(long)]
        s: Option<f64>,
        /// Target `x,y` (box site) or vertex index; repeatable.
        #[arg(long = "y", value_parser = parse_pair)]
        y: Vec<[i64; 2]>,
        /// Keep the samples as a binary record with a JSON sidecar.
        #[arg(long)]
        save: bool,
    },
    /// Simulate the VRJP and tabulate its jump-chain law.
    Vrjp {
        #[command(flatten)]
        graph: GraphArgs,
        /// Jumps per run.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        runs: Option<u64>,
        /// Start vertex index (default: root).
        #[arg(long)]
        start: Option<usize>,
        /// Also write the first run as `time,vertex`.
        #[arg(long)]
        trajectory: bool,
    },
    /// Effective resistance from the root to each target.
    Resistance {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long = "y", value_parser = parse_pair)]
        y: Vec<[i64; 2]>,
    },
    /// Monte Carlo moments on a box against the resistance bound.
    Decay {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        sampler: SamplerArgs,
        #[arg(long)]
        s: Option<f64>,
        /// Conductance bound (default: the largest lattice conductance).
        #[arg(long)]
        wbar: Option<f64>,
        #[arg(long = "y", value_parser = parse_pair)]
        y: Vec<[i64; 2]>,
    },
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        suite: Option<Suite>,
        /// Retained field samples per Monte Carlo instance.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        chains: Option<usize>,
        #[arg(long)]
        vrjp_runs: Option<u64>,
        #[arg(long)]
        instances: Option<usize>,
    },
}

#[derive(Debug, Default, Args)]
pub struct GraphArgs {
    #[arg(long, value_enum)]
    pub kind: Option<GraphKind>,
    /// Box radius, or vertex count of path, cycle and complete graphs.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub w: Option<f64>,
    #[arg(long)]
    pub wh: Option<f64>,
    #[arg(long)]
    pub wv: Option<f64>,
    /// Edge-list file (`i j W` per line); implies `--kind edges`.
    #[arg(long)]
    pub edges: Option<PathBuf>,
    /// Root vertex id of an edge list.
    #[arg(long)]
    pub root: Option<u64>,
}

#[derive(Debug, Default, Args)]
pub struct SamplerArgs {
    /// Retained samples summed over chains.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub chains: Option<usize>,
    #[arg(long)]
    pub burn_in: Option<u64>,
    #[arg(long)]
    pub thin: Option<u64>,
    /// Initial proposal half-width.
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long)]
    pub refresh: Option<u64>,
}

fn parse_pair(s: &str) -> Result<[i64; 2], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<i64>().map_err(|_| format!("`{p}` is not an integer"));
    match parts.as_slice() {
        [i] => Ok([num(i)?, 0]),
        [x, y] => Ok([num(x)?, num(y)?]),
        _ => Err(format!("expected `x,y` or an index, got `{s}`")),
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

impl GraphArgs {
    fn apply(&self, cfg: &mut Config) {
        let g = &mut cfg.graph;
        set(&mut g.kind, self.kind);
        set(&mut g.n, self.n);
        set(&mut g.w, self.w);
        set(&mut g.wh, self.wh);
        set(&mut g.wv, self.wv);
        if let Some(path) = &self.edges {
            g.file = Some(path.clone());
            if self.kind.is_none() {
                g.kind = GraphKind::Edges;
            }
        }
        if self.root.is_some() {
            g.root = self.root;
        }
    }
}

impl SamplerArgs {
    fn apply(&self, cfg: &mut Config) {
        let s = &mut cfg.sampler;
        set(&mut s.samples, self.samples);
        set(&mut s.chains, self.chains);
        set(&mut s.burn_in, self.burn_in);
        set(&mut s.thin, self.thin);
        set(&mut s.step, self.step);
        set(&mut s.refresh, self.refresh);
    }
}

impl Cli {
    /// The configuration file (or defaults) with this command line applied.
    pub fn merged_config(&self) -> anyhow::Result<Config> {
        let mut cfg = match &self.config {
            Some(path) => Config::load(path)?,
            None => Config::default(),
        };
        set(&mut cfg.run.seed, self.seed);
        set(&mut cfg.run.out_dir, self.out_dir.clone());
        if self.threads.is_some() {
            cfg.run.threads = self.threads;
        }
        match &self.command {
            Command::Graph(g) => g.apply(&mut cfg),
            Command::Sample { graph, sampler, s, y, save } => {
                graph.apply(&mut cfg);
                sampler.apply(&mut cfg);
                set(&mut cfg.sampler.s, *s);
                if !y.is_empty() {
                    cfg.sampler.y = y.clone();
                }
                cfg.sampler.save |= save;
            }
            Command::Vrjp { graph, k, runs, start, trajectory } => {
                graph.apply(&mut cfg);
                set(&mut cfg.vrjp.k, *k);
                set(&mut cfg.vrjp.runs, *runs);
                if start.is_some() {
                    cfg.vrjp.start = *start;
                }
                cfg.vrjp.trajectory |= trajectory;
            }
            Command::Resistance { graph, y } => {
                graph.apply(&mut cfg);
                if !y.is_empty() {
                    cfg.decay.y = y.clone();
                }
            }
            Command::Decay { graph, sampler, s, wbar, y } => {
                graph.apply(&mut cfg);
                sampler.apply(&mut cfg);
                set(&mut cfg.decay.s, *s);
                if wbar.is_some() {
                    cfg.decay.wbar = *wbar;
                }
                if !y.is_empty() {
                    cfg.decay.y = y.clone();
                }
            }
            Command::Verify { suite, samples, chains, vrjp_runs, instances } => {
                set(&mut cfg.verify.suite, *suite);
                set(&mut cfg.verify.samples, *samples);
                set(&mut cfg.verify.chains, *chains);
                set(&mut cfg.verify.vrjp_runs, *vrjp_runs);
                set(&mut cfg.verify.instances, *instances);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn command_name(&self) -> &'static str {
        match self.command {
            Command::Graph(_) => "graph",
            Command::Sample { .. } => "sample",
            Command::Vrjp { .. } => "vrjp",
            Command::Resistance { .. } => "resistance",
            Command::Decay { .. } => "decay",
            Command::Verify { .. } => "verify",
        }
    }
}
