//! Deformation of the field along a harmonic potential, and the resulting
//! moment bounds.
//!
//! For a target `y`, `v` is the unit-conductance harmonic function with
//! `v(i₀) = 0`, `v(y) = 1`. Its Dirichlet energy is `1/R(i₀, y)`, the current
//! `R ∇v` is bounded by one on every edge, and shifting the field by `γ v`
//! with `γ = γ̃ R` gives
//!
//! ```text
//! E[e^{s u_y}] ≤ exp(−γs + γ²q² Σ_{i→j} (W_{ij}+1)|∇v_{ij}|²)
//!              ≤ exp(−R s² / (8 q² (W̄+1)))
//! ```
//!
//! with `1/q = 1 − s` and `γ̃ = s / (4q²(W̄+1))`.
//!
//! Unit conductance means one unit per parallel edge. On a wired box the two
//! lattice edges joining a corner to `δ_N` stay two units, so `v` is the
//! harmonic function of the contracted lattice itself and the second bound
//! holds with `W̄` the largest lattice conductance.

use alloc::vec;
use alloc::vec::Vec;

use crate::arborescence;
use crate::error::{Error, Result};
use crate::field::{self, FreeIndex};
use crate::graph::{Graph, Vertex};
use crate::linalg::{self, Cholesky, Matrix};
use crate::math;

/// Residual tolerance of the Laplace solves.
pub const SOLVE_TOLERANCE: f64 = 1e-12;
/// Tolerance of the unit-current divergence identity.
pub const DIVERGENCE_TOLERANCE: f64 = 1e-8;
/// Finite-difference step for `∂²_γ ln D`.
pub const FD_STEP: f64 = 1e-3;
/// Largest graph on which arborescences are enumerated for the variance
/// identity.
pub const ENUMERATION_LIMIT: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Solver {
    Cholesky,
    ConjugateGradient,
}

/// Unknowns of the Dirichlet problem: every vertex but the two pinned ones.
struct Interior {
    rows: Vec<Option<usize>>,
    vertices: Vec<Vertex>,
}

impl Interior {
    fn new(g: &Graph, a: Vertex, y: Vertex) -> Self {
        let mut rows = vec![None; g.n_vertices()];
        let mut vertices = Vec::new();
        for v in g.vertices().filter(|&v| v != a && v != y) {
            rows[v.0] = Some(vertices.len());
            vertices.push(v);
        }
        Self { rows, vertices }
    }
}

/// Unit-conductance harmonic function with `v(a) = 0`, `v(y) = 1`, harmonic
/// at every other vertex (including a wired boundary vertex).
pub fn solve_harmonic(g: &Graph, a: Vertex, y: Vertex) -> Result<Vec<f64>> {
    solve_harmonic_with(g, a, y, Solver::Cholesky)
}

pub fn solve_harmonic_with(g: &Graph, a: Vertex, y: Vertex, solver: Solver) -> Result<Vec<f64>> {
    g.check_vertex(a)?;
    g.check_vertex(y)?;
    if a == y {
        return Err(Error::InvalidParameter { name: "y", reason: "endpoints must differ" });
    }
    let interior = Interior::new(g, a, y);
    let m = interior.vertices.len();
    let mut v = vec![0.0; g.n_vertices()];
    v[y.0] = 1.0;
    if m == 0 {
        return Ok(v);
    }
    // L_II x = b with b_z the number of parallel edges z–y.
    let mut b = vec![0.0; m];
    for (row, &z) in interior.vertices.iter().enumerate() {
        b[row] = g.neighbors(z).iter().filter(|nb| nb.vertex == y).map(|nb| nb.multiplicity as f64).sum();
    }
    let x = match solver {
        Solver::Cholesky => {
            let mut l = Matrix::zeros(m);
            for (row, &z) in interior.vertices.iter().enumerate() {
                l[(row, row)] = g.unit_degree(z) as f64;
                for nb in g.neighbors(z) {
                    if let Some(col) = interior.rows[nb.vertex.0] {
                        l[(row, col)] = -(nb.multiplicity as f64);
                    }
                }
            }
            let chol = Cholesky::factor(&l).map_err(|_| Error::NotConnected)?;
            let mut x = b;
            chol.solve_in_place(&mut x);
            x
        }
        Solver::ConjugateGradient => {
            let apply = |p: &[f64], out: &mut [f64]| {
                for (row, &z) in interior.vertices.iter().enumerate() {
                    let mut s = g.unit_degree(z) as f64 * p[row];
                    for nb in g.neighbors(z) {
                        if let Some(col) = interior.rows[nb.vertex.0] {
                            s -= nb.multiplicity as f64 * p[col];
                        }
                    }
                    out[row] = s;
                }
            };
            linalg::conjugate_gradient(apply, &b, SOLVE_TOLERANCE, 20 * m + 100)?
        }
    };
    for (row, &z) in interior.vertices.iter().enumerate() {
        v[z.0] = x[row];
    }
    Ok(v)
}

/// `div(∇f)(z) = Σ_{j∼z} m_{zj} (f_j − f_z)` with unit conductance per
/// parallel edge.
pub fn divergence(g: &Graph, f: &[f64]) -> Vec<f64> {
    g.vertices()
        .map(|z| g.neighbors(z).iter().map(|nb| nb.multiplicity as f64 * (f[nb.vertex.0] - f[z.0])).sum())
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Resistance {
    pub source: Vertex,
    pub target: Vertex,
    pub potential: Vec<f64>,
    /// `E(v, v)`.
    pub energy: f64,
    /// `R = 1 / E(v, v)`.
    pub resistance: f64,
    /// `max |div ∇v|` away from the endpoints.
    pub interior_residual: f64,
    /// `max(|div ∇v(a) − 1/R|, |div ∇v(y) + 1/R|)`.
    pub endpoint_residual: f64,
}

/// Effective resistance between `a` and `y` with unit conductances, checked
/// against the unit-current identity `div(∇v) = (1/R)(1_a − 1_y)`.
pub fn effective_resistance(g: &Graph, a: Vertex, y: Vertex) -> Result<Resistance> {
    let v = solve_harmonic(g, a, y)?;
    let energy = g.dirichlet_energy(&v)?;
    let resistance = 1.0 / energy;
    let div = divergence(g, &v);
    let interior_residual = g
        .vertices()
        .filter(|&z| z != a && z != y)
        .map(|z| math::abs(div[z.0]))
        .fold(0.0, f64::max);
    let endpoint_residual = math::abs(div[a.0] - energy).max(math::abs(div[y.0] + energy));
    if interior_residual > DIVERGENCE_TOLERANCE || endpoint_residual > DIVERGENCE_TOLERANCE {
        return Err(Error::NoConvergence { iterations: 0, residual: interior_residual.max(endpoint_residual) });
    }
    Ok(Resistance { source: a, target: y, potential: v, energy, resistance, interior_residual, endpoint_residual })
}

/// `max_{i∼j} R |∇v_{i,j}|`, at most one for the unit current flow.
pub fn current_flow_bound_check(g: &Graph, r: &Resistance) -> f64 {
    g.edges()
        .iter()
        .map(|e| r.resistance * math::abs(r.potential[e.b.0] - r.potential[e.a.0]))
        .fold(0.0, f64::max)
}

/// Lower bound on `R(0, y)` in `Z²` from the cut-sets between the annuli
/// `|z|_∞ = k` and `k + 1`: `Σ_{k=1}^{m−1} 1/(4(2k+1))` for `m = |y|_∞ ≥ 2`.
pub fn nash_williams_sum(sup_norm: u32) -> Result<f64> {
    if sup_norm < 2 {
        return Err(Error::InvalidParameter { name: "|y|_inf", reason: "must be at least 2" });
    }
    Ok((1..sup_norm).map(|k| 1.0 / (4.0 * (2 * k + 1) as f64)).sum())
}

/// Asymptotic resistance-growth constant.
pub const C0_ASYMPTOTIC: f64 = 0.125;

#[derive(Clone, Debug, PartialEq)]
pub struct DeformationPlan {
    pub target: Vertex,
    pub potential: Vec<f64>,
    pub energy: f64,
    pub resistance: f64,
    pub s: f64,
    /// Hölder exponent, `s + 1/q = 1`.
    pub q: f64,
    pub gamma_tilde: f64,
    pub gamma: f64,
    pub gamma_prime: f64,
    pub w_bar: f64,
    pub sup_norm: Option<u32>,
    /// `c₀ = nash_williams_sum(|y|_∞) / ln|y|_∞`, valid for this instance.
    pub c0_instance: Option<f64>,
    pub eta_instance: Option<f64>,
    pub eta_asymptotic: f64,
    /// `max_{i∼j} q²γ|∇v_{i,j}|`, at most ½.
    pub hypothesis: f64,
}

impl DeformationPlan {
    /// `exp(−R s² / (8q²(W̄+1)))`.
    pub fn bound(&self) -> f64 {
        resistance_bound(self.resistance, self.s, self.w_bar)
    }

    /// `−γs + γ²q² Σ_{i→j} (W_{ij}+1)|∇v_{ij}|²`, the exponent of the bound
    /// before `W_{ij}` is replaced by `W̄`.
    pub fn lemma_exponent(&self, g: &Graph) -> f64 {
        lemma_exponent(g, &self.potential, self.s, self.q, self.gamma)
    }

    /// `|y|^{−η}` with the instance `η`, when defined.
    pub fn power_law_bound(&self) -> Option<f64> {
        let m = self.sup_norm? as f64;
        Some(math::exp(-self.eta_instance? * math::ln(m)))
    }
}

/// `exp(−R s² / (8q²(W̄+1)))` with `q = 1/(1 − s)`.
pub fn resistance_bound(resistance: f64, s: f64, w_bar: f64) -> f64 {
    let q = hoelder_conjugate(s);
    math::exp(-resistance * s * s / (8.0 * q * q * (w_bar + 1.0)))
}

/// `q` with `s + 1/q = 1`.
pub fn hoelder_conjugate(s: f64) -> f64 {
    1.0 / (1.0 - s)
}

fn lemma_exponent(g: &Graph, v: &[f64], s: f64, q: f64, gamma: f64) -> f64 {
    let quad: f64 = g
        .arcs()
        .iter()
        .map(|a| {
            let dv = v[a.to.0] - v[a.from.0];
            (a.conductance + 1.0) * dv * dv
        })
        .sum();
    -gamma * s + gamma * gamma * q * q * quad
}

/// `max_{i∼j} q²|γ||∇v_{i,j}|`.
pub fn hypothesis_value(g: &Graph, v: &[f64], q: f64, gamma: f64) -> (f64, Option<(Vertex, Vertex)>) {
    let mut worst = (0.0, None);
    for e in g.edges() {
        let x = q * q * math::abs(gamma) * math::abs(v[e.b.0] - v[e.a.0]);
        if x > worst.0 {
            worst = (x, Some((e.a, e.b)));
        }
    }
    worst
}

fn check_hypothesis(g: &Graph, v: &[f64], q: f64, gamma: f64) -> Result<f64> {
    let (h, edge) = hypothesis_value(g, v, q, gamma);
    // tiny slack for the rounding in R·|∇v| ≤ 1
    if h > 0.5 * (1.0 + 1e-12) {
        let (a, b) = edge.unwrap();
        return Err(Error::HypothesisViolated { a: a.0, b: b.0, value: h });
    }
    Ok(h)
}

/// The deformation towards `y` for exponent `s ∈ (0,1)` and conductance bound
/// `W̄`, with `γ̃ = s/(4q²(W̄+1))` and `γ = γ̃ R(i₀, y)`.
pub fn build_plan(g: &Graph, y: Vertex, s: f64, w_bar: f64) -> Result<DeformationPlan> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidParameter { name: "s", reason: "must lie in (0, 1)" });
    }
    if !(w_bar.is_finite() && w_bar >= g.conductance_bound()) {
        return Err(Error::InvalidParameter { name: "W_bar", reason: "below the largest conductance" });
    }
    let r = effective_resistance(g, g.root(), y)?;
    let q = hoelder_conjugate(s);
    let gamma_tilde = s / (4.0 * q * q * (w_bar + 1.0));
    debug_assert!(gamma_tilde <= 1.0 / (2.0 * q * q));
    let gamma = gamma_tilde * r.resistance;
    let hypothesis = check_hypothesis(g, &r.potential, q, gamma)?;
    let sup_norm = g.sup_norm(y);
    let c0_instance = match sup_norm {
        Some(m) if m >= 2 => Some(nash_williams_sum(m)? / math::ln(m as f64)),
        _ => None,
    };
    let eta = |c0: f64| c0 * s * s / (8.0 * q * q * (w_bar + 1.0));
    Ok(DeformationPlan {
        target: y,
        energy: r.energy,
        resistance: r.resistance,
        potential: r.potential,
        s,
        q,
        gamma_tilde,
        gamma,
        gamma_prime: -gamma * (q - 1.0),
        w_bar,
        sup_norm,
        c0_instance,
        eta_instance: c0_instance.map(eta),
        eta_asymptotic: eta(C0_ASYMPTOTIC),
        hypothesis,
    })
}

/// `exp(−γs + γ²q² Σ_{i→j}(W_{ij}+1)|∇v_{ij}|²)` for any `v` with
/// `v(i₀) = 0`, `v(y) = 1` satisfying `q²γ|∇v| ≤ ½`; refuses otherwise.
pub fn lemma1_bound(g: &Graph, v: &[f64], y: Vertex, s: f64, gamma: f64) -> Result<f64> {
    g.check_function(v)?;
    g.check_vertex(y)?;
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidParameter { name: "s", reason: "must lie in (0, 1)" });
    }
    if v[g.root().0] != 0.0 || v[y.0] != 1.0 {
        return Err(Error::InvalidParameter { name: "v", reason: "need v(root) = 0 and v(y) = 1" });
    }
    if gamma < 0.0 {
        return Err(Error::InvalidParameter { name: "gamma", reason: "must be non-negative" });
    }
    let q = hoelder_conjugate(s);
    check_hypothesis(g, v, q, gamma)?;
    Ok(math::exp(lemma_exponent(g, v, s, q, gamma)))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TaylorCheck {
    /// `(1−1/q)e^{qx} + 1/q − e^{(q−1)x}` at `x = γt`.
    pub remainder: f64,
    /// `2q²x²`.
    pub quadratic: f64,
    /// First-order coefficient `(1−1/q)q − (q−1)`.
    pub first_order: f64,
    pub holds: bool,
}

/// `(1−1/q)e^{qx} + 1/q − e^{(q−1)x}` summed from its Taylor series
/// `(q−1) Σ_{n≥2} (q^{n−1} − (q−1)^{n−1}) xⁿ/n!`, exact in relative terms for
/// small `x` where the closed form cancels catastrophically. Needs `|qx| ≤ 1`.
pub fn taylor_remainder(q: f64, x: f64) -> f64 {
    let mut sum = 0.0;
    let mut pow_q = q; // q^{n-1}
    let mut pow_p = q - 1.0; // (q-1)^{n-1}
    let mut xn_fact = x * x / 2.0; // x^n / n!
    for n in 2..80 {
        let term = (pow_q - pow_p) * xn_fact;
        sum += term;
        if math::abs(term) <= 1e-18 * math::abs(sum) {
            break;
        }
        pow_q *= q;
        pow_p *= q - 1.0;
        xn_fact *= x / (n + 1) as f64;
    }
    (q - 1.0) * sum
}

/// Checks `|(1−1/q)e^{qγt} + 1/q − e^{(q−1)γt}| ≤ 2q²γ²t² ≤ ½` under the
/// hypothesis `q²|γt| ≤ ½`.
pub fn taylor_remainder_check(q: f64, gamma: f64, t: f64) -> Result<TaylorCheck> {
    if !(q > 1.0 && q.is_finite()) {
        return Err(Error::InvalidParameter { name: "q", reason: "must exceed 1" });
    }
    let x = gamma * t;
    if !x.is_finite() || q * q * math::abs(x) > 0.5 {
        return Err(Error::InvalidParameter { name: "gamma*t", reason: "outside q²|γt| ≤ 1/2" });
    }
    let remainder = taylor_remainder(q, x);
    let quadratic = 2.0 * q * q * x * x;
    Ok(TaylorCheck {
        remainder,
        quadratic,
        first_order: (1.0 - 1.0 / q) * q - (q - 1.0),
        holds: math::abs(remainder) <= quadratic && quadratic <= 0.5,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvexityReport {
    /// `min_k f(γ_{k−1}) − 2f(γ_k) + f(γ_{k+1})` for `f(γ) = ln D(u + γv)`.
    pub min_second_difference: f64,
    /// Largest `|∂²_γ ln D − Var_M(Σ_T ∇v)|` over the grid, for graphs small
    /// enough to enumerate.
    pub variance_mismatch: Option<f64>,
}

fn ln_d_along(g: &Graph, index: &FreeIndex, u: &[f64], v: &[f64], gamma: f64, buf: &mut [f64]) -> Result<f64> {
    for ((b, x), y) in buf.iter_mut().zip(u).zip(v) {
        *b = x + gamma * y;
    }
    field::log_tree_polynomial_unchecked(g, index, buf)
}

/// `∂²_γ ln D(u + γv)` by central differences with step [`FD_STEP`] and one
/// Richardson halving.
pub fn second_derivative(g: &Graph, u: &[f64], v: &[f64], gamma: f64) -> Result<f64> {
    let index = FreeIndex::new(g);
    let mut buf = vec![0.0; g.n_vertices()];
    let mut f = |x: f64| ln_d_along(g, &index, u, v, x, &mut buf);
    let f0 = f(gamma)?;
    let mut d2 = |h: f64| -> Result<f64> { Ok((f(gamma + h)? - 2.0 * f0 + f(gamma - h)?) / (h * h)) };
    let coarse = d2(FD_STEP)?;
    let fine = d2(FD_STEP / 2.0)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Convexity of `γ ↦ ln D(u + γv)` on a uniform grid of `γ` values.
pub fn convexity_check(g: &Graph, u: &[f64], v: &[f64], gammas: &[f64]) -> Result<ConvexityReport> {
    g.check_pinned(u)?;
    g.check_function(v)?;
    if gammas.len() < 3 {
        return Err(Error::InvalidParameter { name: "gamma grid", reason: "need at least 3 points" });
    }
    let spacing = gammas[1] - gammas[0];
    if !(spacing > 0.0)
        || gammas.windows(2).any(|w| math::abs((w[1] - w[0]) - spacing) > 1e-9 * math::abs(spacing).max(1.0))
    {
        return Err(Error::InvalidParameter { name: "gamma grid", reason: "must be uniform and increasing" });
    }
    let index = FreeIndex::new(g);
    let mut buf = vec![0.0; g.n_vertices()];
    let values = gammas
        .iter()
        .map(|&x| ln_d_along(g, &index, u, v, x, &mut buf))
        .collect::<Result<Vec<f64>>>()?;
    let min_second_difference = values
        .windows(3)
        .map(|w| w[0] - 2.0 * w[1] + w[2])
        .fold(f64::INFINITY, f64::min);

    let variance_mismatch = if g.n_vertices() <= ENUMERATION_LIMIT {
        let trees = arborescence::enumerate(g)?;
        let mut worst: f64 = 0.0;
        for &x in gammas {
            let shifted: Vec<f64> = u.iter().zip(v).map(|(a, b)| a + x * b).collect();
            let (_, var) = arborescence::gradient_sum_moments(g, &trees, &shifted, v);
            worst = worst.max(math::abs(second_derivative(g, u, v, x)? - var));
        }
        Some(worst)
    } else {
        None
    };
    Ok(ConvexityReport { min_second_difference, variance_mismatch })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_z2_box;

    #[test]
    fn path_and_cycle() {
        let p = Graph::path(3, 1.0).unwrap();
        let r = effective_resistance(&p, Vertex(0), Vertex(2)).unwrap();
        for (a, b) in r.potential.iter().zip([0.0, 0.5, 1.0]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!((r.resistance - 2.0).abs() < 1e-12);
        assert!((current_flow_bound_check(&p, &r) - 1.0).abs() < 1e-12);

        let c = Graph::cycle(4, 1.0).unwrap();
        let r = effective_resistance(&c, Vertex(0), Vertex(2)).unwrap();
        for (a, b) in r.potential.iter().zip([0.0, 0.5, 1.0, 0.5]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((r.resistance - 1.0).abs() < 1e-12);
        assert!((current_flow_bound_check(&c, &r) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn solvers_agree() {
        let g = build_z2_box(3, 1.0, 1.0).unwrap();
        let y = g.site(2, -1).unwrap();
        let a = solve_harmonic_with(&g, g.root(), y, Solver::Cholesky).unwrap();
        let b = solve_harmonic_with(&g, g.root(), y, Solver::ConjugateGradient).unwrap();
        for (x, z) in a.iter().zip(&b) {
            assert!((x - z).abs() < 1e-10);
        }
    }

    #[test]
    fn conductances_do_not_enter_the_potential() {
        let g = build_z2_box(2, 3.0, 0.2).unwrap();
        let h = build_z2_box(2, 1.0, 1.0).unwrap();
        let y = g.site(1, 1).unwrap();
        assert_eq!(solve_harmonic(&g, g.root(), y).unwrap(), solve_harmonic(&h, h.root(), y).unwrap());
    }

    #[test]
    fn nash_williams_values() {
        assert!((nash_williams_sum(2).unwrap() - 1.0 / 12.0).abs() < 1e-16);
        assert!((nash_williams_sum(3).unwrap() - 2.0 / 15.0).abs() < 1e-16);
        assert!(nash_williams_sum(1).is_err());
    }

    #[test]
    fn plan_arithmetic() {
        let g = build_z2_box(3, 1.0, 1.0).unwrap();
        let y = g.site(2, 0).unwrap();
        let plan = build_plan(&g, y, 0.5, 1.0).unwrap();
        assert_eq!(plan.q, 2.0);
        assert_eq!(plan.gamma_tilde, 1.0 / 64.0);
        assert_eq!(plan.eta_asymptotic, 1.0 / 2048.0);
        assert!((plan.energy * plan.resistance - 1.0).abs() < 1e-10);
        assert!(plan.hypothesis <= 0.5);
        assert_eq!(plan.gamma_prime, -plan.gamma);
        assert!(build_plan(&g, y, 1.0, 1.0).is_err());
        assert!(build_plan(&g, y, 0.5, 0.5).is_err());
    }

    #[test]
    fn lemma_bound_refuses_large_gamma() {
        let g = Graph::path(3, 1.0).unwrap();
        let v = [0.0, 0.5, 1.0];
        assert_eq!(lemma1_bound(&g, &v, Vertex(2), 0.5, 0.0).unwrap(), 1.0);
        // q = 2: q²γ·½ ≤ ½ iff γ ≤ ¼
        assert!(lemma1_bound(&g, &v, Vertex(2), 0.5, 0.25).is_ok());
        assert!(matches!(
            lemma1_bound(&g, &v, Vertex(2), 0.5, 0.3),
            Err(Error::HypothesisViolated { .. })
        ));
    }

    #[test]
    fn taylor_series_matches_closed_form() {
        for q in [1.1f64, 2.0, 5.0] {
            for x in [-0.04f64, -0.01, 0.003, 0.02] {
                let direct = (1.0 - 1.0 / q) * (q * x).exp() + 1.0 / q - ((q - 1.0) * x).exp();
                assert!((taylor_remainder(q, x) - direct).abs() < 1e-15);
            }
        }
        let c = taylor_remainder_check(2.0, 1.0, 0.125).unwrap();
        assert!(c.holds && c.quadratic == 0.125);
        assert_eq!(taylor_remainder_check(2.0, 1.0, 0.0).unwrap().remainder, 0.0);
        assert!(taylor_remainder_check(2.0, 1.0, 0.2).is_err());
    }

    #[test]
    fn constant_shift_has_flat_ln_d() {
        let g = Graph::complete(3, 1.0).unwrap();
        let r = convexity_check(&g, &[0.0, 0.2, -0.5], &[0.0; 3], &[-1.0, 0.0, 1.0]).unwrap();
        assert_eq!(r.min_second_difference, 0.0);
        assert!(r.variance_mismatch.unwrap() < 1e-6);
    }
}
