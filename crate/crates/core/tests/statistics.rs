//! Monte Carlo and quadrature checks of the field and the dynamics.

use vrjp_core::field::{self, log_density};
use vrjp_core::quadrature::{self, integrate, QuadratureOptions};
use vrjp_core::sampler::{estimate_exp_moment, sample, SamplerConfig};
use vrjp_core::vrjp::{self, quenched_sequence_probabilities, vrjp_jump_chain_law};
use vrjp_core::{Graph, GraphBuilder, Vertex};

fn opts() -> QuadratureOptions {
    QuadratureOptions::default()
}

fn weighted_triangle() -> Graph {
    let mut b = GraphBuilder::new(3);
    b.add_edge(0, 1, 0.7).unwrap();
    b.add_edge(1, 2, 1.6).unwrap();
    b.add_edge(0, 2, 1.1).unwrap();
    b.build().unwrap()
}

#[test]
fn three_vertex_normalization() {
    for w in [0.2, 1.0, 5.0] {
        for g in [Graph::path(3, w).unwrap(), Graph::complete(3, w).unwrap()] {
            let r = quadrature::normalization(&g, &opts()).unwrap();
            assert!((r.value - 1.0).abs() < 1e-4, "W={w}: {}", r.value);
        }
    }
    let r = quadrature::normalization(&weighted_triangle(), &opts()).unwrap();
    assert!((r.value - 1.0).abs() < 1e-4);
}

#[test]
fn exponential_moment_is_one() {
    for w in [0.2, 1.0, 5.0] {
        let g = Graph::two_vertex(w).unwrap();
        let m = quadrature::exp_moment_identity_oracle(&g, Vertex(1), &opts()).unwrap();
        assert!((m - 1.0).abs() < 1e-6, "W={w}: {m}");
    }
    let g = weighted_triangle();
    for j in 1..3 {
        let m = quadrature::exp_moment_identity_oracle(&g, Vertex(j), &opts()).unwrap();
        assert!((m - 1.0).abs() < 1e-4, "{m}");
    }
}

#[test]
fn shifted_measure_moment() {
    // E^{Q^γ}[e^{u_y}] = e^{−γ} where Q^γ is the law of u − γv
    let g = Graph::two_vertex(1.3).unwrap();
    let v = [0.0, 1.0];
    for gamma in [-0.8, 0.25, 1.0] {
        let m = integrate(&g, |u| u[1] - field::rn_ratio(&g, u, &v, gamma).unwrap(), &opts()).unwrap();
        assert!((m.value - (-gamma as f64).exp()).abs() < 1e-6, "γ={gamma}: {}", m.value);
    }
}

#[test]
fn fractional_moments_below_one() {
    let g = Graph::complete(3, 1.0).unwrap();
    for s in [0.25, 0.5, 0.75] {
        let m = quadrature::exp_moment(&g, Vertex(1), s, &opts()).unwrap();
        assert!(m < 1.0 && m > 0.0);
    }
}

#[test]
fn first_jump_law_is_proportional_to_conductance() {
    let g = weighted_triangle();
    // VRJP: all local times start at 1
    let law = vrjp_jump_chain_law(&g, Vertex(0), 1, 100_000, 3).unwrap();
    let p1 = 0.7 / 1.8;
    let (p, se) = law.entries[&vec![1]];
    assert!((p - p1).abs() < 4.0 * se, "{p} vs {p1}");
    // mixture of quenched first jumps, by quadrature
    let m = integrate(&g, |u| quenched_sequence_probabilities(&g, u, Vertex(0), 1).unwrap()[&vec![1]].ln(), &opts())
        .unwrap();
    assert!((m.value - p1).abs() < 1e-4, "{}", m.value);
}

/// `E[(1+T)/(2+T)]` for `T ~ Exp(2)` by Simpson's rule.
fn second_jump_back() -> f64 {
    let n = 200_000;
    let hi = 40.0;
    let h = hi / n as f64;
    let f = |t: f64| 2.0 * (-2.0 * t).exp() * (1.0 + t) / (2.0 + t);
    let mut s = f(0.0) + f(hi);
    for k in 1..n {
        s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(k as f64 * h);
    }
    s * h / 3.0
}

#[test]
fn second_jump_on_the_triangle() {
    // From 0 the first jump goes to 1 after T ~ Exp(2); then L_0 = 1 + T and
    // L_2 = 1, so the walk returns to 0 with probability (1+T)/(2+T).
    let g = Graph::complete(3, 1.0).unwrap();
    let law = vrjp_jump_chain_law(&g, Vertex(0), 2, 200_000, 9).unwrap();
    let expect = 0.5 * second_jump_back();
    let (p, se) = law.entries[&vec![1, 0]];
    assert!((p - expect).abs() < 4.0 * se, "{p} vs {expect} ± {se}");
}

#[test]
fn mixture_law_by_quadrature_matches_vrjp() {
    for g in [weighted_triangle(), Graph::path(3, 1.4).unwrap().with_root(Vertex(1)).unwrap()] {
        let start = g.root();
        let k = 3;
        let law = vrjp_jump_chain_law(&g, start, k, 200_000, 21).unwrap();
        for (seq, &(p, se)) in &law.entries {
            let m = integrate(
                &g,
                |u| quenched_sequence_probabilities(&g, u, start, k).unwrap().get(seq).copied().unwrap_or(0.0).ln(),
                &QuadratureOptions { tolerance: 1e-8, ..opts() },
            )
            .unwrap();
            assert!((p - m.value).abs() < 4.0 * se + 1e-6, "{seq:?}: {p} ± {se} vs {}", m.value);
        }
    }
}

#[test]
fn sampler_reproduces_quadrature_moment() {
    let g = weighted_triangle();
    let cfg = SamplerConfig { samples: 80_000, chains: 4, burn_in: 2_000, seed: 17, ..Default::default() };
    let (set, summaries) = sample(&g, &cfg).unwrap();
    for s in &summaries {
        assert!(s.acceptance_rate() > 0.1 && s.acceptance_rate() < 0.6);
    }
    for (y, s) in [(1, 1.0), (2, 0.5)] {
        let est = estimate_exp_moment(&set, &g, Vertex(y), s).unwrap();
        let exact = quadrature::exp_moment(&g, Vertex(y), s, &opts()).unwrap();
        let se = est.stderr.unwrap();
        assert!((est.estimate - exact).abs() < 4.0 * se, "y={y} s={s}: {} ± {se} vs {exact}", est.estimate);
    }
}

#[test]
fn quenched_mixture_from_samples_matches_vrjp() {
    let g = Graph::complete(3, 1.0).unwrap();
    let cfg = SamplerConfig { samples: 40_000, chains: 4, burn_in: 2_000, seed: 4, ..Default::default() };
    let (set, _) = sample(&g, &cfg).unwrap();
    let mixture = vrjp::quenched_mixture_law(&g, g.root(), 2, &set).unwrap();
    let direct = vrjp_jump_chain_law(&g, g.root(), 2, 100_000, 8).unwrap();
    assert!((mixture.total_mass() - 1.0).abs() < 1e-12);
    let (tv, err) = vrjp::total_variation(&mixture, &direct);
    assert!(tv < 3.0 * err, "{tv} vs {err}");
}

#[test]
fn density_is_finite_on_samples() {
    let g = weighted_triangle();
    let cfg = SamplerConfig { samples: 2_000, chains: 2, burn_in: 200, ..Default::default() };
    let (set, _) = sample(&g, &cfg).unwrap();
    assert!(set.iter().all(|u| log_density(&g, u).unwrap().is_finite()));
}
