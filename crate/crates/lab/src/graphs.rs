//! Graph construction from the configuration, the edge-list format and a
//! content hash.
//!
//! Edge lists hold one edge per line, `i j W`, with non-negative integer
//! vertex ids. Blank lines and text after `#` are ignored. Vertices are
//! indexed by increasing id; repeated pairs are parallel edges.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use anyhow::{anyhow, bail, Context, Result};
use sha2::{Digest, Sha256};
use vrjp_core::{Graph, GraphBuilder, Vertex, VertexLabel};

use crate::config::{GraphKind, GraphSection};

pub fn build(section: &GraphSection) -> Result<Graph> {
    let g = match section.kind {
        GraphKind::Box => vrjp_core::graph::build_z2_box(section.n as i64, section.wh, section.wv)?,
        GraphKind::TwoVertex => Graph::two_vertex(section.w)?,
        GraphKind::Path => Graph::path(section.n, section.w)?,
        GraphKind::Cycle => Graph::cycle(section.n, section.w)?,
        GraphKind::Complete => Graph::complete(section.n, section.w)?,
        GraphKind::Edges => {
            let path = section.file.as_ref().ok_or_else(|| anyhow!("graph.file: required for edge lists"))?;
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            parse_edge_list(&text, section.root).with_context(|| format!("in {}", path.display()))?
        }
    };
    Ok(g)
}

pub fn parse_edge_list(text: &str, root: Option<u64>) -> Result<Graph> {
    let mut edges = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            bail!("line {}: expected `i j W`, found {} fields", lineno + 1, fields.len());
        }
        let id = |s: &str| s.parse::<u64>().map_err(|_| anyhow!("line {}: bad vertex id `{s}`", lineno + 1));
        let (a, b) = (id(fields[0])?, id(fields[1])?);
        let w: f64 = fields[2].parse().map_err(|_| anyhow!("line {}: bad conductance `{}`", lineno + 1, fields[2]))?;
        if !(w.is_finite() && w > 0.0) {
            bail!("line {}: conductance must be finite and positive, got {w}", lineno + 1);
        }
        if a == b {
            bail!("line {}: loop at vertex {a}", lineno + 1);
        }
        edges.push((a, b, w));
    }
    if edges.is_empty() {
        bail!("no edges");
    }
    let ids: BTreeMap<u64, usize> = {
        let mut all: Vec<u64> = edges.iter().flat_map(|&(a, b, _)| [a, b]).collect();
        all.sort_unstable();
        all.dedup();
        all.into_iter().enumerate().map(|(i, id)| (id, i)).collect()
    };
    let root_index = match root {
        Some(r) => *ids.get(&r).ok_or_else(|| anyhow!("root id {r} does not occur in the edge list"))?,
        None => 0,
    };
    let labels = ids.keys().map(|&id| VertexLabel::Node(id)).collect();
    let mut builder = GraphBuilder::with_labels(labels).root(root_index);
    for (a, b, w) in edges {
        builder.add_edge(ids[&a], ids[&b], w)?;
    }
    Ok(builder.build()?)
}

/// Edge list of `g` by vertex index, one line per edge, parallel edges
/// written out separately.
pub fn write_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    for e in g.edges() {
        let w = e.conductance / e.multiplicity as f64;
        for _ in 0..e.multiplicity {
            writeln!(out, "{} {} {}", e.a.0, e.b.0, w).unwrap();
        }
    }
    out
}

/// SHA-256 over the labels, root and edges of `g`.
pub fn graph_hash(g: &Graph) -> String {
    let mut h = Sha256::new();
    h.update((g.n_vertices() as u64).to_le_bytes());
    h.update((g.root().0 as u64).to_le_bytes());
    for l in g.labels() {
        let bytes = match *l {
            VertexLabel::Site { x, y } => [0u8].into_iter().chain(x.to_le_bytes()).chain(y.to_le_bytes()).collect(),
            VertexLabel::Boundary => vec![1u8],
            VertexLabel::Node(id) => [2u8].into_iter().chain(id.to_le_bytes()).collect::<Vec<u8>>(),
        };
        h.update(&bytes);
    }
    for e in g.edges() {
        h.update((e.a.0 as u64).to_le_bytes());
        h.update((e.b.0 as u64).to_le_bytes());
        h.update(e.conductance.to_bits().to_le_bytes());
        h.update(e.multiplicity.to_le_bytes());
    }
    hex::encode(h.finalize())
}

pub fn label_string(l: VertexLabel) -> String {
    match l {
        VertexLabel::Site { x, y } => format!("{x},{y}"),
        VertexLabel::Boundary => "boundary".into(),
        VertexLabel::Node(id) => id.to_string(),
    }
}

/// Resolves a target: a lattice site `[x, y]` on boxes, a vertex index
/// `[i, _]` otherwise.
pub fn resolve_target(g: &Graph, y: [i64; 2]) -> Result<Vertex> {
    let v = if g.lattice().is_some() {
        let (x, yy) = (i32::try_from(y[0])?, i32::try_from(y[1])?);
        g.site(x, yy).ok_or_else(|| anyhow!("site ({x},{yy}) lies outside the box"))?
    } else {
        let i = usize::try_from(y[0])?;
        if i >= g.n_vertices() {
            bail!("vertex index {i} out of range (graph has {} vertices)", g.n_vertices());
        }
        Vertex(i)
    };
    Ok(v)
}

/// `(N, y_x, y_y)` columns for a target; lattice coordinates on boxes, the
/// vertex index in `y_x` otherwise.
pub fn target_columns(g: &Graph, v: Vertex) -> (Option<u32>, Option<i64>, Option<i64>) {
    match (g.lattice(), g.label(v)) {
        (Some(lat), VertexLabel::Site { x, y }) => (Some(lat.radius), Some(x as i64), Some(y as i64)),
        (Some(lat), _) => (Some(lat.radius), None, None),
        (None, _) => (None, Some(v.0 as i64), None),
    }
}
