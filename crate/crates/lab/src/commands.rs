//! Subcommand implementations. Each writes its tables under the output
//! directory and returns the report, which is also written as `report.json`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use vrjp_core::deformation::{current_flow_bound_check, effective_resistance, nash_williams_sum};
use vrjp_core::quadrature::TabulatedCdf;
use vrjp_core::sampler::estimate_exp_moment;
use vrjp_core::vrjp::{self, JumpChainLaw};
use vrjp_core::{rng, stats, Graph, Vertex};

use crate::config::{Config, GraphKind};
use crate::decay::{self, DecayInput};
use crate::graphs;
use crate::parallel;
use crate::records::{self, Sidecar};
use crate::report::{Check, ExperimentReport, Status};
use crate::suites::{self, SuiteContext};

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)? + "\n").with_context(|| format!("writing {}", path.display()))
}

fn targets(g: &Graph, list: &[[i64; 2]]) -> Result<Vec<([i64; 2], Vertex)>> {
    if list.is_empty() {
        return Ok(g
            .vertices()
            .filter(|&v| v != g.root())
            .map(|v| {
                let (_, x, y) = graphs::target_columns(g, v);
                ([x.unwrap_or(v.0 as i64), y.unwrap_or(0)], v)
            })
            .collect());
    }
    list.iter().map(|&y| Ok((y, graphs::resolve_target(g, y)?))).collect()
}

pub fn execute(command: &str, cfg: &Config) -> Result<ExperimentReport> {
    let out = &cfg.run.out_dir;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let report = parallel::with_threads(cfg.run.threads, || match command {
        "graph" => graph(cfg),
        "sample" => sample(cfg),
        "vrjp" => run_vrjp(cfg),
        "resistance" => resistance(cfg),
        "decay" => run_decay(cfg),
        "verify" => verify(cfg),
        other => anyhow::bail!("unknown command {other}"),
    })??;
    fs::write(out.join("report.json"), report.to_json())?;
    Ok(report)
}

#[derive(Serialize)]
struct VertexRow {
    index: usize,
    label: String,
    degree: usize,
}

fn graph(cfg: &Config) -> Result<ExperimentReport> {
    let g = graphs::build(&cfg.graph)?;
    let out = &cfg.run.out_dir;
    fs::write(out.join("graph.edges"), graphs::write_edge_list(&g))?;
    let rows: Vec<VertexRow> = g
        .vertices()
        .map(|v| VertexRow { index: v.0, label: graphs::label_string(g.label(v)), degree: g.degree(v) })
        .collect();
    write_csv(&out.join("vertices.csv"), &rows)?;
    write_json(
        &out.join("graph.json"),
        &serde_json::json!({
            "hash": graphs::graph_hash(&g),
            "vertices": g.n_vertices(),
            "edges": g.edges().len(),
            "root": g.root().0,
            "conductance_bound": g.conductance_bound(),
        }),
    )?;
    Ok(ExperimentReport::new("graph", cfg))
}

#[derive(Serialize)]
struct EstimateRow {
    #[serde(rename = "N")]
    n: Option<u32>,
    y_x: Option<i64>,
    y_y: Option<i64>,
    s: f64,
    estimate: f64,
    stderr: Option<f64>,
    ess: Option<f64>,
    chains: usize,
}

fn sample(cfg: &Config) -> Result<ExperimentReport> {
    let g = graphs::build(&cfg.graph)?;
    let scfg = cfg.sampler.sampler_config(cfg.run.seed);
    let (set, summaries) = parallel::sample(&g, &scfg)?;
    let s = cfg.sampler.s;
    let mut report = ExperimentReport::new("sample", cfg);
    let mut rows = Vec::new();
    for (y, v) in targets(&g, &cfg.sampler.y)? {
        let est = estimate_exp_moment(&set, &g, v, s)?;
        let (n, x, yy) = graphs::target_columns(&g, v);
        rows.push(EstimateRow { n, y_x: x, y_y: yy, s, estimate: est.estimate, stderr: est.stderr, ess: est.ess, chains: scfg.chains });
        let se = est.stderr.unwrap_or(f64::NAN);
        let inst = format!("y={},{}", y[0], y[1]);
        let mut c = if s == 1.0 {
            Check::new("sample", "E[e^u_y] = 1", inst, est.estimate, 1.0, 3.0 * se, (est.estimate - 1.0).abs() <= 3.0 * se)
        } else {
            Check::new("sample", "E[e^{s u_y}] <= 1 (Jensen)", inst, est.estimate, 1.0, 3.0 * se, est.estimate <= 1.0 + 3.0 * se)
        };
        if est.ess.is_none_or(|e| e < suites::ESS_MIN) {
            c.status = Status::Inconclusive;
        }
        report.push(c);
    }
    let out = &cfg.run.out_dir;
    write_csv(&out.join("estimates.csv"), &rows)?;
    for (c, sm) in summaries.iter().enumerate() {
        let rate = sm.acceptance_rate();
        report.push(Check::new("sample", "acceptance rate in (0.05, 0.95)", format!("chain {c}, step {:.4}", sm.step), rate, 0.95, 0.0, rate > 0.05 && rate < 0.95));
    }
    if cfg.graph.kind == GraphKind::TwoVertex {
        let mut xs: Vec<f64> = set.iter().map(|u| u[1]).collect();
        xs.sort_by(f64::total_cmp);
        let cdf = TabulatedCdf::two_vertex(&g, 40.0, 1e-3)?;
        let ks = stats::ks_distance(&xs, |x| cdf.eval(x));
        report.push(Check::new("sample", "KS distance to quadrature marginal", format!("two_vertex W={}", cfg.graph.w), ks, 0.02, 0.0, ks < 0.02));
    }
    if cfg.sampler.save {
        let side = Sidecar {
            format: records::FORMAT.into(),
            graph_hash: graphs::graph_hash(&g),
            n_vertices: g.n_vertices(),
            chain_lengths: set.chains.iter().map(|c| c.len() / g.n_vertices()).collect(),
            seed: cfg.run.seed,
            sampler: cfg.sampler.clone(),
        };
        records::write(&out.join("samples.bin"), &set, &side)?;
    }
    Ok(report)
}

#[derive(Serialize)]
struct LawEntry {
    prob: f64,
    stderr: f64,
}

/// JSON form of a jump-chain law: sequences as comma-joined vertex indices.
pub fn law_json(law: &JumpChainLaw) -> serde_json::Value {
    let entries: BTreeMap<String, LawEntry> = law
        .entries
        .iter()
        .map(|(seq, &(p, se))| {
            let key = seq.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
            (key, LawEntry { prob: p, stderr: se })
        })
        .collect();
    serde_json::json!({
        "start": law.start.0,
        "horizon": law.horizon,
        "samples": law.samples,
        "law": entries,
    })
}

#[derive(Serialize)]
struct TrajectoryRow {
    time: f64,
    vertex: usize,
}

fn run_vrjp(cfg: &Config) -> Result<ExperimentReport> {
    let g = graphs::build(&cfg.graph)?;
    let start = cfg.vrjp.start.map_or(g.root(), Vertex);
    g.check_vertex(start)?;
    let law = parallel::vrjp_law(&g, start, cfg.vrjp.k, cfg.vrjp.runs, cfg.run.seed)?;
    let out = &cfg.run.out_dir;
    write_json(&out.join("jump_chain_law.json"), &law_json(&law))?;
    let mut report = ExperimentReport::new("vrjp", cfg);
    if cfg.vrjp.trajectory {
        // the first run of stream 0 is the first run counted in the law
        let mut r = rng::stream_rng(cfg.run.seed, 0);
        let t = vrjp::simulate_vrjp(&g, start, cfg.vrjp.k, &mut r)?;
        t.validate(&g)?;
        let mut rows = vec![TrajectoryRow { time: 0.0, vertex: start.0 }];
        rows.extend(t.jumps.iter().map(|j| TrajectoryRow { time: j.time, vertex: j.to.0 }));
        write_csv(&out.join("trajectory.csv"), &rows)?;
    }
    if cfg.vrjp.k == 1 {
        let total: f64 = g.neighbors(start).iter().map(|n| n.conductance).sum();
        let exact = JumpChainLaw {
            start,
            horizon: 1,
            entries: g.neighbors(start).iter().map(|n| (vec![n.vertex.0], (n.conductance / total, 0.0))).collect(),
            samples: None,
        };
        let (tv, err) = vrjp::total_variation(&law, &exact);
        report.push(Check::new("vrjp", "first jump law proportional to W (TV < 3 sigma)", format!("{} runs", cfg.vrjp.runs), tv, 3.0 * err, 0.0, tv < 3.0 * err));
    }
    Ok(report)
}

#[derive(Serialize)]
struct ResistanceRow {
    #[serde(rename = "N")]
    n: Option<u32>,
    y_x: Option<i64>,
    y_y: Option<i64>,
    #[serde(rename = "R")]
    r: f64,
    nash_williams: Option<f64>,
    max_current: f64,
}

fn resistance(cfg: &Config) -> Result<ExperimentReport> {
    let g = graphs::build(&cfg.graph)?;
    let mut report = ExperimentReport::new("resistance", cfg);
    let mut rows = Vec::new();
    for (y, v) in targets(&g, &cfg.decay.y)? {
        if v == g.root() {
            anyhow::bail!("target {},{} is the root", y[0], y[1]);
        }
        let r = effective_resistance(&g, g.root(), v)?;
        let current = current_flow_bound_check(&g, &r);
        let nw = match g.sup_norm(v) {
            Some(m) if m >= 2 => Some(nash_williams_sum(m)?),
            _ => None,
        };
        let (n, x, yy) = graphs::target_columns(&g, v);
        let inst = format!("y={},{}", y[0], y[1]);
        if let Some(nw) = nw {
            report.push(Check::new("resistance", "R(0,y) >= Nash-Williams sum", inst.clone(), r.resistance, nw, 0.0, r.resistance >= nw));
        }
        report.push(Check::new("resistance", "current flow R|grad v| <= 1", inst, current, 1.0, 1e-8, current <= 1.0 + 1e-8));
        rows.push(ResistanceRow { n, y_x: x, y_y: yy, r: r.resistance, nash_williams: nw, max_current: current });
    }
    write_csv(&cfg.run.out_dir.join("resistance.csv"), &rows)?;
    Ok(report)
}

fn run_decay(cfg: &Config) -> Result<ExperimentReport> {
    let g = graphs::build(&cfg.graph)?;
    let input = DecayInput { graph: &g, s: cfg.decay.s, wbar: cfg.decay.wbar, targets: &cfg.decay.y, ess_min: cfg.decay.ess_min };
    let out = decay::run(&input, &cfg.sampler.sampler_config(cfg.run.seed))?;
    let mut report = ExperimentReport::new("decay", cfg);
    write_csv(&cfg.run.out_dir.join("decay.csv"), &out.rows)?;
    for row in out.rows {
        report.push_row(row);
    }
    report.extend(out.checks);
    report.slope = out.slope;
    Ok(report)
}

fn verify(cfg: &Config) -> Result<ExperimentReport> {
    let ctx = SuiteContext { seed: cfg.run.seed, opts: cfg.verify.clone() };
    let mut report = ExperimentReport::new("verify", cfg);
    report.extend(suites::run(cfg.verify.suite, &ctx)?);
    Ok(report)
}
