//! Explicit enumeration of spanning trees oriented towards the root.
//!
//! Exponential in the number of vertices; meant for graphs with a handful of
//! vertices, where it provides the reference value of the tree polynomial and
//! the law `M(W, u)` on arborescences.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};
use crate::math;

/// Upper bound on the number of parent assignments scanned.
pub const MAX_ASSIGNMENTS: u64 = 1 << 22;

/// An arborescence: every non-root vertex points to its parent, and following
/// parents from anywhere reaches the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arborescence {
    parent: Vec<Option<Vertex>>,
}

impl Arborescence {
    pub fn parent(&self, v: Vertex) -> Option<Vertex> {
        self.parent[v.0]
    }

    /// Directed edges `(i, parent(i))`.
    pub fn arcs(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.parent.iter().enumerate().filter_map(|(i, p)| p.map(|p| (Vertex(i), p)))
    }

    /// `ln Π_{(i,j)∈T} W_{i,j} e^{∇u_{i,j}}`.
    pub fn log_weight(&self, g: &Graph, u: &[f64]) -> f64 {
        self.arcs()
            .map(|(i, j)| math::ln(g.conductance(i, j).unwrap()) + u[j.0] - u[i.0])
            .sum()
    }

    /// `Σ_{(i,j)∈T} ∇v_{i,j}`.
    pub fn gradient_sum(&self, v: &[f64]) -> f64 {
        self.arcs().map(|(i, j)| v[j.0] - v[i.0]).sum()
    }
}

/// All arborescences of `g` oriented towards its root.
pub fn enumerate(g: &Graph) -> Result<Vec<Arborescence>> {
    let n = g.n_vertices();
    let root = g.root();
    let free: Vec<Vertex> = g.vertices().filter(|&v| v != root).collect();
    let total = free.iter().try_fold(1u64, |acc, &v| acc.checked_mul(g.degree(v) as u64));
    match total {
        Some(t) if t <= MAX_ASSIGNMENTS => {}
        _ => return Err(Error::DimensionTooLarge { free: free.len(), max: 0 }),
    }

    let mut out = Vec::new();
    let mut choice = vec![0usize; free.len()];
    let mut parent = vec![None; n];
    loop {
        for (k, &v) in free.iter().enumerate() {
            parent[v.0] = Some(g.neighbors(v)[choice[k]].vertex);
        }
        if reaches_root(&parent, root) {
            out.push(Arborescence { parent: parent.clone() });
        }
        // odometer over neighbour choices
        let mut k = 0;
        loop {
            if k == free.len() {
                return Ok(out);
            }
            choice[k] += 1;
            if choice[k] < g.degree(free[k]) {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

fn reaches_root(parent: &[Option<Vertex>], root: Vertex) -> bool {
    let n = parent.len();
    (0..n).all(|start| {
        let mut v = Vertex(start);
        for _ in 0..n {
            if v == root {
                return true;
            }
            v = parent[v.0].unwrap();
        }
        v == root
    })
}

/// `ln D` by summing over enumerated arborescences.
pub fn log_tree_polynomial(g: &Graph, trees: &[Arborescence], u: &[f64]) -> f64 {
    trees
        .iter()
        .map(|t| t.log_weight(g, u))
        .fold(f64::NEG_INFINITY, math::log_add_exp)
}

/// Mean and variance of `Σ_{(i,j)∈T} ∇v_{i,j}` under the law on arborescences
/// with probabilities proportional to their weights at `u`.
pub fn gradient_sum_moments(g: &Graph, trees: &[Arborescence], u: &[f64], v: &[f64]) -> (f64, f64) {
    let log_z = log_tree_polynomial(g, trees, u);
    let mut mean = 0.0;
    let mut second = 0.0;
    for t in trees {
        let p = math::exp(t.log_weight(g, u) - log_z);
        let x = t.gradient_sum(v);
        mean += p * x;
        second += p * x * x;
    }
    (mean, second - mean * mean)
}
