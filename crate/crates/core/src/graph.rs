//! Finite undirected graphs with positive conductances.
//!
//! Vertices carry a dense index ([`Vertex`]) used by all linear algebra, and a
//! [`VertexLabel`] recording where they came from. Every undirected edge is
//! stored once in [`Graph::edges`] and twice (once per orientation) in
//! [`Graph::arcs`], so that sums over directed edges are plain iterations.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Dense vertex index in `0..graph.n_vertices()`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vertex(pub usize);

impl Vertex {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VertexLabel {
    /// Lattice site of a `Z²` box.
    Site { x: i32, y: i32 },
    /// The wired boundary vertex of a box.
    Boundary,
    /// Vertex of a general graph, identified by its id in the input.
    Node(u64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub a: Vertex,
    pub b: Vertex,
    pub conductance: f64,
    /// Number of input edges merged into this one.
    pub multiplicity: u32,
}

/// One orientation of an undirected edge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arc {
    pub from: Vertex,
    pub to: Vertex,
    pub conductance: f64,
    /// Index of the underlying undirected edge.
    pub edge: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Neighbor {
    pub vertex: Vertex,
    pub conductance: f64,
    pub multiplicity: u32,
}

/// Parameters of a wired lattice box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticeBox {
    pub radius: u32,
    pub w_h: f64,
    pub w_v: f64,
    pub boundary: Vertex,
}

impl LatticeBox {
    #[inline]
    pub fn side(&self) -> usize {
        2 * self.radius as usize + 1
    }
}

#[derive(Clone, Debug)]
pub struct Graph {
    labels: Vec<VertexLabel>,
    root: Vertex,
    edges: Vec<Edge>,
    arcs: Vec<Arc>,
    adj_offsets: Vec<usize>,
    adj: Vec<Neighbor>,
    lattice: Option<LatticeBox>,
}

/// Accumulates edges, merging parallel ones by summing conductances and
/// dropping loops.
#[derive(Clone, Debug)]
pub struct GraphBuilder {
    labels: Vec<VertexLabel>,
    root: usize,
    edges: BTreeMap<(usize, usize), (f64, u32)>,
    lattice: Option<(u32, f64, f64)>,
}

impl GraphBuilder {
    /// `n` vertices labelled `Node(0..n)`, root 0.
    pub fn new(n: usize) -> Self {
        Self::with_labels((0..n as u64).map(VertexLabel::Node).collect())
    }

    pub fn with_labels(labels: Vec<VertexLabel>) -> Self {
        Self { labels, root: 0, edges: BTreeMap::new(), lattice: None }
    }

    pub fn root(mut self, root: usize) -> Self {
        self.root = root;
        self
    }

    pub fn n_vertices(&self) -> usize {
        self.labels.len()
    }

    /// Adds conductance `w` between `a` and `b`. Loops are ignored; repeated
    /// pairs accumulate and count as parallel edges. Conductances are validated in [`build`](Self::build).
    pub fn add_edge(&mut self, a: usize, b: usize, w: f64) -> Result<&mut Self> {
        let n = self.labels.len();
        for v in [a, b] {
            if v >= n {
                return Err(Error::UnknownVertex(v));
            }
        }
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::InvalidConductance { a, b, value: w });
        }
        if a != b {
            let e = self.edges.entry((a.min(b), a.max(b))).or_insert((0.0, 0));
            e.0 += w;
            e.1 += 1;
        }
        Ok(self)
    }

    pub fn build(self) -> Result<Graph> {
        let n = self.labels.len();
        if n < 2 || self.edges.is_empty() {
            return Err(Error::EmptyGraph);
        }
        if self.root >= n {
            return Err(Error::UnknownVertex(self.root));
        }

        let edges: Vec<Edge> = self
            .edges
            .into_iter()
            .map(|((a, b), (w, m))| Edge { a: Vertex(a), b: Vertex(b), conductance: w, multiplicity: m })
            .collect();

        let mut arcs = Vec::with_capacity(2 * edges.len());
        let mut degree = vec![0usize; n];
        for (k, e) in edges.iter().enumerate() {
            arcs.push(Arc { from: e.a, to: e.b, conductance: e.conductance, edge: k });
            arcs.push(Arc { from: e.b, to: e.a, conductance: e.conductance, edge: k });
            degree[e.a.0] += 1;
            degree[e.b.0] += 1;
        }

        let mut adj_offsets = Vec::with_capacity(n + 1);
        adj_offsets.push(0);
        for d in &degree {
            adj_offsets.push(adj_offsets.last().unwrap() + d);
        }
        let mut fill = adj_offsets.clone();
        let mut adj = vec![Neighbor { vertex: Vertex(0), conductance: 0.0, multiplicity: 0 }; 2 * edges.len()];
        for e in &edges {
            adj[fill[e.a.0]] = Neighbor { vertex: e.b, conductance: e.conductance, multiplicity: e.multiplicity };
            fill[e.a.0] += 1;
            adj[fill[e.b.0]] = Neighbor { vertex: e.a, conductance: e.conductance, multiplicity: e.multiplicity };
            fill[e.b.0] += 1;
        }

        let lattice = self.lattice.map(|(radius, w_h, w_v)| LatticeBox {
            radius,
            w_h,
            w_v,
            boundary: Vertex(n - 1),
        });
        let graph = Graph {
            labels: self.labels,
            root: Vertex(self.root),
            edges,
            arcs,
            adj_offsets,
            adj,
            lattice,
        };
        if !graph.is_connected() {
            return Err(Error::NotConnected);
        }
        Ok(graph)
    }
}

/// `G_N`: the box `[-N, N]²` of `Z²` with every outside vertex contracted to a
/// single boundary vertex `δ_N`.
///
/// Lattice sites are indexed in row-major order (`y` outer, `x` inner, both
/// increasing from `-N`), `δ_N` comes last and the root is the origin.
/// Horizontal edges carry `w_h`, vertical ones `w_v`; edges leaving the box
/// are redirected to `δ_N` and merged by summing their conductances.
pub fn build_z2_box(radius: i64, w_h: f64, w_v: f64) -> Result<Graph> {
    if radius < 1 {
        return Err(Error::InvalidParameter { name: "N", reason: "box radius must be at least 1" });
    }
    if radius > 4096 {
        return Err(Error::InvalidParameter { name: "N", reason: "box radius too large" });
    }
    for w in [w_h, w_v] {
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::InvalidParameter {
                name: "conductance",
                reason: "lattice conductances must be finite and positive",
            });
        }
    }
    let r = radius as i32;
    let side = (2 * r + 1) as usize;
    let mut labels = Vec::with_capacity(side * side + 1);
    for y in -r..=r {
        for x in -r..=r {
            labels.push(VertexLabel::Site { x, y });
        }
    }
    labels.push(VertexLabel::Boundary);
    let boundary = side * side;
    let index = |x: i32, y: i32| -> Option<usize> {
        if x.abs() <= r && y.abs() <= r {
            Some((y + r) as usize * side + (x + r) as usize)
        } else {
            None
        }
    };

    let origin = index(0, 0).unwrap();
    let mut builder = GraphBuilder::with_labels(labels).root(origin);
    builder.lattice = Some((radius as u32, w_h, w_v));
    for y in -r..=r {
        for x in -r..=r {
            let here = index(x, y).unwrap();
            for (dx, dy, w) in [(1, 0, w_h), (-1, 0, w_h), (0, 1, w_v), (0, -1, w_v)] {
                match index(x + dx, y + dy) {
                    // Interior edges are seen from both ends; keep one.
                    Some(there) if there > here => {
                        builder.add_edge(here, there, w)?;
                    }
                    Some(_) => {}
                    None => {
                        builder.add_edge(here, boundary, w)?;
                    }
                }
            }
        }
    }
    builder.build()
}

impl Graph {
    #[inline]
    pub fn n_vertices(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn root(&self) -> Vertex {
        self.root
    }

    /// Same graph, rooted elsewhere.
    pub fn with_root(&self, root: Vertex) -> Result<Graph> {
        self.check_vertex(root)?;
        let mut g = self.clone();
        g.root = root;
        Ok(g)
    }

    pub fn vertices(&self) -> impl ExactSizeIterator<Item = Vertex> {
        (0..self.n_vertices()).map(Vertex)
    }

    #[inline]
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Directed edges; each undirected edge appears once per orientation.
    #[inline]
    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    #[inline]
    pub fn neighbors(&self, v: Vertex) -> &[Neighbor] {
        &self.adj[self.adj_offsets[v.0]..self.adj_offsets[v.0 + 1]]
    }

    #[inline]
    pub fn degree(&self, v: Vertex) -> usize {
        self.adj_offsets[v.0 + 1] - self.adj_offsets[v.0]
    }

    pub fn label(&self, v: Vertex) -> VertexLabel {
        self.labels[v.0]
    }

    pub fn labels(&self) -> &[VertexLabel] {
        &self.labels
    }

    pub fn find(&self, label: VertexLabel) -> Option<Vertex> {
        match (label, self.lattice) {
            (VertexLabel::Site { x, y }, Some(lat)) => {
                let r = lat.radius as i32;
                (x.abs() <= r && y.abs() <= r)
                    .then(|| Vertex((y + r) as usize * lat.side() + (x + r) as usize))
            }
            (VertexLabel::Boundary, Some(lat)) => Some(lat.boundary),
            _ => self.labels.iter().position(|&l| l == label).map(Vertex),
        }
    }

    /// Lattice site `(x, y)` of a box.
    pub fn site(&self, x: i32, y: i32) -> Option<Vertex> {
        self.lattice?;
        self.find(VertexLabel::Site { x, y })
    }

    pub fn lattice(&self) -> Option<&LatticeBox> {
        self.lattice.as_ref()
    }

    /// Conductance of the edge `{a, b}`, if present.
    pub fn conductance(&self, a: Vertex, b: Vertex) -> Option<f64> {
        self.neighbors(a).iter().find(|nb| nb.vertex == b).map(|nb| nb.conductance)
    }

    /// Same vertices and edges with new conductances, indexed like
    /// [`edges`](Self::edges).
    pub fn with_conductances(&self, w: &[f64]) -> Result<Graph> {
        if w.len() != self.edges.len() {
            return Err(Error::DimensionMismatch { expected: self.edges.len(), found: w.len() });
        }
        let mut g = self.clone();
        for (k, (e, &c)) in g.edges.iter_mut().zip(w).enumerate() {
            if !(c.is_finite() && c > 0.0) {
                return Err(Error::InvalidConductance { a: e.a.0, b: e.b.0, value: c });
            }
            e.conductance = c;
            g.arcs[2 * k].conductance = c;
            g.arcs[2 * k + 1].conductance = c;
        }
        for v in 0..g.n_vertices() {
            for slot in g.adj_offsets[v]..g.adj_offsets[v + 1] {
                let other = g.adj[slot].vertex;
                let k = g
                    .edges
                    .binary_search_by(|e| (e.a.0, e.b.0).cmp(&(v.min(other.0), v.max(other.0))))
                    .expect("adjacency refers to a stored edge");
                g.adj[slot].conductance = g.edges[k].conductance;
            }
        }
        Ok(g)
    }

    pub fn max_conductance(&self) -> f64 {
        self.edges.iter().map(|e| e.conductance).fold(0.0, f64::max)
    }

    /// Largest conductance the bound `W ≤ W̄` has to dominate: the lattice
    /// conductances for a box (before boundary merging), the largest edge
    /// conductance otherwise.
    pub fn conductance_bound(&self) -> f64 {
        match self.lattice {
            Some(lat) => lat.w_h.max(lat.w_v),
            None => self.max_conductance(),
        }
    }

    /// `|y|_∞` of a lattice site; `None` for general graphs and for `δ_N`.
    pub fn sup_norm(&self, v: Vertex) -> Option<u32> {
        match self.labels[v.0] {
            VertexLabel::Site { x, y } if self.lattice.is_some() => {
                Some(x.unsigned_abs().max(y.unsigned_abs()))
            }
            _ => None,
        }
    }

    pub fn check_vertex(&self, v: Vertex) -> Result<()> {
        if v.0 < self.n_vertices() {
            Ok(())
        } else {
            Err(Error::UnknownVertex(v.0))
        }
    }

    /// Validates length and finiteness of a vertex function.
    pub fn check_function(&self, f: &[f64]) -> Result<()> {
        if f.len() != self.n_vertices() {
            return Err(Error::DimensionMismatch { expected: self.n_vertices(), found: f.len() });
        }
        if f.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { what: "vertex function" });
        }
        Ok(())
    }

    /// Validates a field sample: finite, right length, and `u(root) = 0`.
    pub fn check_pinned(&self, u: &[f64]) -> Result<()> {
        self.check_function(u)?;
        let at_root = u[self.root.0];
        if at_root != 0.0 {
            return Err(Error::NotPinned { value: at_root });
        }
        Ok(())
    }

    /// `∇u_{i,j} = u_j − u_i` on the directed edge `(i, j)`.
    pub fn gradient(&self, u: &[f64], i: Vertex, j: Vertex) -> Result<f64> {
        self.check_vertex(i)?;
        self.check_vertex(j)?;
        self.check_function(u)?;
        if self.conductance(i, j).is_none() {
            return Err(Error::InvalidParameter { name: "edge", reason: "vertices are not adjacent" });
        }
        Ok(u[j.0] - u[i.0])
    }

    /// Dirichlet form with unit conductance per parallel edge,
    /// `½ Σ_{i→j} m_{ij} |∇f_{i,j}|²`. For a box every lattice edge counts
    /// once, including the pairs merged at the corners.
    pub fn dirichlet_energy(&self, f: &[f64]) -> Result<f64> {
        self.check_function(f)?;
        Ok(self
            .edges
            .iter()
            .map(|e| {
                let g = f[e.b.0] - f[e.a.0];
                e.multiplicity as f64 * g * g
            })
            .sum::<f64>())
    }

    /// Total multiplicity of the edges at `v`.
    pub fn unit_degree(&self, v: Vertex) -> u32 {
        self.neighbors(v).iter().map(|nb| nb.multiplicity).sum()
    }

    fn is_connected(&self) -> bool {
        let n = self.n_vertices();
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for nb in self.neighbors(Vertex(v)) {
                if !seen[nb.vertex.0] {
                    seen[nb.vertex.0] = true;
                    count += 1;
                    stack.push(nb.vertex.0);
                }
            }
        }
        count == n
    }

    /// Two vertices joined by one edge, rooted at vertex 0.
    pub fn two_vertex(w: f64) -> Result<Graph> {
        let mut b = GraphBuilder::new(2);
        b.add_edge(0, 1, w)?;
        b.build()
    }

    /// Path `0 – 1 – … – (n−1)` with constant conductance.
    pub fn path(n: usize, w: f64) -> Result<Graph> {
        let mut b = GraphBuilder::new(n);
        for i in 1..n {
            b.add_edge(i - 1, i, w)?;
        }
        b.build()
    }

    /// Cycle on `n ≥ 3` vertices with constant conductance.
    pub fn cycle(n: usize, w: f64) -> Result<Graph> {
        if n < 3 {
            return Err(Error::InvalidParameter { name: "n", reason: "a cycle needs 3 vertices" });
        }
        let mut b = GraphBuilder::new(n);
        for i in 0..n {
            b.add_edge(i, (i + 1) % n, w)?;
        }
        b.build()
    }

    /// Complete graph `K_n` with constant conductance; `complete(3, w)` is the
    /// triangle.
    pub fn complete(n: usize, w: f64) -> Result<Graph> {
        let mut b = GraphBuilder::new(n);
        for i in 0..n {
            for j in i + 1..n {
                b.add_edge(i, j, w)?;
            }
        }
        b.build()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent enumeration of the `Z²` edges with exactly one endpoint in
    /// the box, per boundary site.
    fn crossing_weights(r: i32, w_h: f64, w_v: f64) -> BTreeMap<(i32, i32), f64> {
        let mut out = BTreeMap::new();
        let inside = |x: i32, y: i32| x.abs() <= r && y.abs() <= r;
        for x in -r - 1..=r + 1 {
            for y in -r - 1..=r + 1 {
                // Each Z² edge once: to the right and upwards.
                for (dx, dy, w) in [(1, 0, w_h), (0, 1, w_v)] {
                    let (a, b) = ((x, y), (x + dx, y + dy));
                    match (inside(a.0, a.1), inside(b.0, b.1)) {
                        (true, false) => *out.entry(a).or_insert(0.0) += w,
                        (false, true) => *out.entry(b).or_insert(0.0) += w,
                        _ => {}
                    }
                }
            }
        }
        out
    }

    #[test]
    fn box_one_has_ten_vertices() {
        let g = build_z2_box(1, 1.0, 1.0).unwrap();
        assert_eq!(g.n_vertices(), 10);
        assert_eq!(g.label(g.root()), VertexLabel::Site { x: 0, y: 0 });
        assert_eq!(g.label(Vertex(9)), VertexLabel::Boundary);
    }

    #[test]
    fn corner_edge_to_boundary_is_merged() {
        let g = build_z2_box(1, 1.0, 1.0).unwrap();
        let delta = g.lattice().unwrap().boundary;
        let corner = g.site(1, 1).unwrap();
        assert_eq!(g.conductance(corner, delta), Some(2.0));
        let total: f64 = g.neighbors(delta).iter().map(|nb| nb.conductance).sum();
        assert_eq!(total, 12.0);
    }

    #[test]
    fn contraction_matches_enumeration() {
        for r in 1..=5 {
            let (w_h, w_v) = (0.75, 2.5);
            let g = build_z2_box(r as i64, w_h, w_v).unwrap();
            let delta = g.lattice().unwrap().boundary;
            let expected = crossing_weights(r, w_h, w_v);
            assert_eq!(g.degree(delta), expected.len());
            for ((x, y), w) in expected {
                let v = g.site(x, y).unwrap();
                assert_eq!(g.conductance(v, delta), Some(w), "site ({x},{y})");
            }
            // every interior lattice edge carries its own weight
            for e in g.edges() {
                if e.b == delta {
                    continue;
                }
                let (VertexLabel::Site { x: x1, .. }, VertexLabel::Site { x: x2, .. }) =
                    (g.label(e.a), g.label(e.b))
                else {
                    unreachable!()
                };
                let expect = if x1 != x2 { w_h } else { w_v };
                assert_eq!(e.conductance, expect);
            }
        }
    }

    #[test]
    fn box_rejects_nonpositive_radius() {
        assert!(build_z2_box(0, 1.0, 1.0).is_err());
        assert!(build_z2_box(-3, 1.0, 1.0).is_err());
        assert!(build_z2_box(2, 0.0, 1.0).is_err());
    }

    #[test]
    fn builder_merges_and_drops_loops() {
        let mut b = GraphBuilder::new(3);
        b.add_edge(0, 1, 1.0).unwrap();
        b.add_edge(1, 0, 0.5).unwrap();
        b.add_edge(1, 1, 7.0).unwrap();
        b.add_edge(1, 2, 2.0).unwrap();
        let g = b.build().unwrap();
        assert_eq!(g.edges().len(), 2);
        assert_eq!(g.conductance(Vertex(0), Vertex(1)), Some(1.5));
        assert_eq!(g.arcs().len(), 4);
    }

    #[test]
    fn builder_rejects_disconnected_and_bad_weights() {
        let mut b = GraphBuilder::new(4);
        b.add_edge(0, 1, 1.0).unwrap();
        b.add_edge(2, 3, 1.0).unwrap();
        assert_eq!(b.build().unwrap_err(), Error::NotConnected);
        let mut b = GraphBuilder::new(2);
        assert!(b.add_edge(0, 1, -1.0).is_err());
        assert!(b.add_edge(0, 1, f64::NAN).is_err());
        assert!(b.add_edge(0, 5, 1.0).is_err());
    }

    #[test]
    fn arcs_cover_each_edge_twice() {
        let g = build_z2_box(3, 1.0, 2.0).unwrap();
        let mut count = vec![0; g.edges().len()];
        for a in g.arcs() {
            count[a.edge] += 1;
            let e = g.edges()[a.edge];
            assert!((a.from, a.to) == (e.a, e.b) || (a.from, a.to) == (e.b, e.a));
        }
        assert!(count.iter().all(|&c| c == 2));
    }

    #[test]
    fn gradient_is_antisymmetric() {
        let g = Graph::two_vertex(1.0).unwrap();
        let u = [0.0, 3.0];
        assert_eq!(g.gradient(&u, Vertex(0), Vertex(1)).unwrap(), 3.0);
        assert_eq!(g.gradient(&u, Vertex(1), Vertex(0)).unwrap(), -3.0);
        assert_eq!(g.gradient(&[0.0, 0.0], Vertex(0), Vertex(1)).unwrap(), 0.0);
        assert!(g.gradient(&u, Vertex(0), Vertex(2)).is_err());
    }

    #[test]
    fn dirichlet_energy_examples() {
        let path = Graph::path(3, 1.0).unwrap();
        assert_eq!(path.dirichlet_energy(&[0.0, 0.5, 1.0]).unwrap(), 0.5);
        assert_eq!(path.dirichlet_energy(&[2.0, 2.0, 2.0]).unwrap(), 0.0);
        let c4 = Graph::cycle(4, 1.0).unwrap();
        assert_eq!(c4.dirichlet_energy(&[0.0, 0.5, 1.0, 0.5]).unwrap(), 1.0);
    }

    #[test]
    fn sup_norm_and_lookup() {
        let g = build_z2_box(3, 1.0, 1.0).unwrap();
        let y = g.site(-2, 3).unwrap();
        assert_eq!(g.sup_norm(y), Some(3));
        assert_eq!(g.label(y), VertexLabel::Site { x: -2, y: 3 });
        assert_eq!(g.site(4, 0), None);
        assert_eq!(g.sup_norm(g.lattice().unwrap().boundary), None);
        assert_eq!(g.conductance_bound(), 1.0);
        assert_eq!(g.max_conductance(), 2.0);
    }
}
