//! The mixing measure `Q^W_{i₀}` of the VRJP.
//!
//! On `{u : u(i₀) = 0}` it has density
//!
//! ```text
//! (2π)^{-(|V|-1)/2} exp(-½ Σ_{i→j} W_{ij}(e^{∇u_{ij}} − 1)) √D(W, u)
//! ```
//!
//! where `D(W, u)` sums `Π W_{ij} e^{∇u_{ij}}` over spanning trees oriented
//! towards `i₀`. By the directed matrix-tree theorem `D` is the determinant of
//! the out-degree Laplacian with arc weights `W_{ij} e^{u_j − u_i}`, minus the
//! root row and column. Conjugating that minor by `diag(e^u)` gives the
//! symmetric matrix
//!
//! ```text
//! H_ii = Σ_{j∼i} W_{ij} e^{u_j − u_i},    H_ij = −W_{ij}  (i ≠ j),
//! ```
//!
//! which is positive definite, so `ln D` is read off a Cholesky factor.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};
use crate::linalg::{Cholesky, Matrix};
use crate::math;

/// Gradients beyond this make `exp` overflow.
const MAX_EXPONENT: f64 = 700.0;

/// Owned field configuration, pinned at the root of the graph it was checked
/// against.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldSample {
    values: Vec<f64>,
}

impl FieldSample {
    pub fn new(g: &Graph, values: Vec<f64>) -> Result<Self> {
        g.check_pinned(&values)?;
        Ok(Self { values })
    }

    pub fn zero(g: &Graph) -> Self {
        Self { values: vec![0.0; g.n_vertices()] }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn at(&self, v: Vertex) -> f64 {
        self.values[v.0]
    }
}

/// Map between graph vertices and the rows of the root-deleted minor.
#[derive(Clone, Debug)]
pub struct FreeIndex {
    to_row: Vec<Option<usize>>,
    to_vertex: Vec<Vertex>,
}

impl FreeIndex {
    pub fn new(g: &Graph) -> Self {
        let root = g.root();
        let mut to_row = vec![None; g.n_vertices()];
        let mut to_vertex = Vec::with_capacity(g.n_vertices() - 1);
        for v in g.vertices().filter(|&v| v != root) {
            to_row[v.0] = Some(to_vertex.len());
            to_vertex.push(v);
        }
        Self { to_row, to_vertex }
    }

    #[inline]
    pub fn row(&self, v: Vertex) -> Option<usize> {
        self.to_row[v.0]
    }

    #[inline]
    pub fn vertex(&self, row: usize) -> Vertex {
        self.to_vertex[row]
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.to_vertex.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.to_vertex.is_empty()
    }
}

#[inline]
fn checked_exp(x: f64, what: &'static str) -> Result<f64> {
    if x > MAX_EXPONENT {
        Err(Error::Overflow { what })
    } else {
        Ok(math::exp(x))
    }
}

/// The symmetric tree matrix `H(W, u)` on the non-root vertices.
pub fn tree_matrix(g: &Graph, index: &FreeIndex, u: &[f64]) -> Result<Matrix> {
    let mut h = Matrix::zeros(index.len());
    for row in 0..index.len() {
        let i = index.vertex(row);
        let mut diag = 0.0;
        for nb in g.neighbors(i) {
            diag += nb.conductance * checked_exp(u[nb.vertex.0] - u[i.0], "tree matrix")?;
            if let Some(col) = index.row(nb.vertex) {
                h[(row, col)] = -nb.conductance;
            }
        }
        h[(row, row)] = diag;
    }
    Ok(h)
}

/// `ln D_{i₀}(W, u)`, the log of the weighted count of arborescences towards
/// the root.
pub fn tree_polynomial(g: &Graph, u: &[f64]) -> Result<f64> {
    g.check_pinned(u)?;
    log_tree_polynomial_unchecked(g, &FreeIndex::new(g), u)
}

/// `ln D` for a finite `u` of the right length; pinning is not required since
/// `D` only depends on gradients.
pub(crate) fn log_tree_polynomial_unchecked(g: &Graph, index: &FreeIndex, u: &[f64]) -> Result<f64> {
    let h = tree_matrix(g, index, u)?;
    match Cholesky::factor(&h) {
        Ok(c) => Ok(c.ln_det()),
        Err(Error::NotPositiveDefinite) => Err(Error::NotConnected),
        Err(e) => Err(e),
    }
}

/// `½ Σ_{i→j} W_{ij}(e^{∇u_{ij}} − 1)`, accumulated per undirected edge as
/// `½ W (expm1(∇) + expm1(−∇))`.
pub fn edge_energy(g: &Graph, u: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for e in g.edges() {
        let d = u[e.b.0] - u[e.a.0];
        if math::abs(d) > MAX_EXPONENT {
            return Err(Error::Overflow { what: "edge energy" });
        }
        total += 0.5 * e.conductance * (math::expm1(d) + math::expm1(-d));
    }
    Ok(total)
}

/// `ln c_V = −(|V| − 1) ln(2π) / 2`.
pub fn log_normalizer(g: &Graph) -> f64 {
    -0.5 * (g.n_vertices() - 1) as f64 * math::LN_2PI
}

/// Log of the density of `Q^W_{i₀}` at `u` with respect to Lebesgue measure
/// on the non-root coordinates, normalizing constant included.
pub fn log_density(g: &Graph, u: &[f64]) -> Result<f64> {
    g.check_pinned(u)?;
    let energy = edge_energy(g, u)?;
    let ln_d = log_tree_polynomial_unchecked(g, &FreeIndex::new(g), u)?;
    Ok(log_normalizer(g) - energy + 0.5 * ln_d)
}

fn check_shift(g: &Graph, v: &[f64]) -> Result<()> {
    g.check_function(v)?;
    if v[g.root().0] != 0.0 {
        return Err(Error::NotPinned { value: v[g.root().0] });
    }
    Ok(())
}

/// `ln dQ/dQ^γ (u)` where `Q^γ` is the law of `u − γv`:
///
/// ```text
/// ½ Σ_{i→j} W_{ij} e^{∇u_{ij}} (e^{γ∇v_{ij}} − 1) + ½ (ln D(W,u) − ln D(W,u+γv)).
/// ```
pub fn rn_ratio(g: &Graph, u: &[f64], v: &[f64], gamma: f64) -> Result<f64> {
    g.check_pinned(u)?;
    check_shift(g, v)?;
    if !gamma.is_finite() {
        return Err(Error::NonFinite { what: "gamma" });
    }
    if gamma == 0.0 {
        return Ok(0.0);
    }
    let mut linear = 0.0;
    for a in g.arcs() {
        let du = u[a.to.0] - u[a.from.0];
        let dv = v[a.to.0] - v[a.from.0];
        let w = checked_exp(du, "tilt ratio")?;
        linear += a.conductance * w * math::expm1(gamma * dv);
    }
    if !linear.is_finite() {
        return Err(Error::Overflow { what: "tilt ratio" });
    }
    let shifted: Vec<f64> = u.iter().zip(v).map(|(a, b)| a + gamma * b).collect();
    let index = FreeIndex::new(g);
    let ln_d = log_tree_polynomial_unchecked(g, &index, u)?;
    let ln_d_shifted = log_tree_polynomial_unchecked(g, &index, &shifted)?;
    Ok(0.5 * linear + 0.5 * (ln_d - ln_d_shifted))
}

/// Conductances `W̃_{ij} = W_{ij}(1 − 2q³γ²|∇v_{ij}|²)` of the tilted
/// measure, indexed like [`Graph::edges`].
#[derive(Clone, Debug, PartialEq)]
pub struct TiltedWeights {
    pub weights: Vec<f64>,
}

impl TiltedWeights {
    pub fn new(g: &Graph, v: &[f64], q: f64, gamma: f64) -> Result<Self> {
        g.check_function(v)?;
        let weights = g
            .edges()
            .iter()
            .map(|e| {
                let dv = v[e.b.0] - v[e.a.0];
                e.conductance * (1.0 - 2.0 * q * q * q * gamma * gamma * dv * dv)
            })
            .collect();
        Ok(Self { weights })
    }

    /// `min_e W̃_e / W_e`; at least ½ when `q²γ|∇v| ≤ ½` on every edge.
    pub fn min_ratio(&self, g: &Graph) -> f64 {
        self.weights
            .iter()
            .zip(g.edges())
            .map(|(w, e)| w / e.conductance)
            .fold(f64::INFINITY, f64::min)
    }

    /// The graph with conductances replaced by `W̃`; fails if any is not
    /// positive.
    pub fn graph(&self, g: &Graph) -> Result<Graph> {
        g.with_conductances(&self.weights)
    }
}
