use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vrjp_core::deformation::{
    self, build_plan, convexity_check, current_flow_bound_check, effective_resistance, nash_williams_sum,
    solve_harmonic_with, taylor_remainder_check, Solver,
};
use vrjp_core::graph::build_z2_box;
use vrjp_core::{arborescence, Graph, GraphBuilder, Vertex};

/// `R = (e_a − e_y)ᵀ L⁺ (e_a − e_y)` from the Laplacian with one unit of
/// conductance per parallel edge.
fn resistance_oracle(g: &Graph, a: Vertex, y: Vertex) -> f64 {
    let n = g.n_vertices();
    let mut l = DMatrix::<f64>::zeros(n, n);
    for e in g.edges() {
        let (i, j, m) = (e.a.0, e.b.0, e.multiplicity as f64);
        l[(i, i)] += m;
        l[(j, j)] += m;
        l[(i, j)] -= m;
        l[(j, i)] -= m;
    }
    let pinv = l.pseudo_inverse(1e-10).unwrap();
    pinv[(a.0, a.0)] + pinv[(y.0, y.0)] - 2.0 * pinv[(a.0, y.0)]
}

fn random_site(rng: &mut ChaCha8Rng, g: &Graph, n: i32) -> Vertex {
    loop {
        let (x, y) = (rng.random_range(-n..=n), rng.random_range(-n..=n));
        if (x, y) != (0, 0) {
            return g.site(x, y).unwrap();
        }
    }
}

#[test]
fn closed_forms() {
    let p = Graph::path(3, 1.0).unwrap();
    let r = effective_resistance(&p, Vertex(0), Vertex(2)).unwrap();
    assert!((r.resistance - 2.0).abs() < 1e-10);
    let c = Graph::cycle(4, 1.0).unwrap();
    let r = effective_resistance(&c, Vertex(0), Vertex(2)).unwrap();
    assert!((r.resistance - 1.0).abs() < 1e-10);
    for n in 3..9 {
        let c = Graph::cycle(n, 1.0).unwrap();
        for k in 1..n {
            let r = effective_resistance(&c, Vertex(0), Vertex(k)).unwrap();
            let expect = (k * (n - k)) as f64 / n as f64;
            assert!((r.resistance - expect).abs() < 1e-10);
        }
    }
}

#[test]
fn boxes_against_pseudo_inverse() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 1..=6 {
        let g = build_z2_box(n, 1.0, 1.0).unwrap();
        for _ in 0..4 {
            let y = random_site(&mut rng, &g, n as i32);
            let r = effective_resistance(&g, g.root(), y).unwrap();
            let oracle = resistance_oracle(&g, g.root(), y);
            assert!((r.resistance - oracle).abs() < 1e-9 * oracle, "N={n}: {} vs {oracle}", r.resistance);
            assert!(r.interior_residual < 1e-10);
            assert!(r.endpoint_residual < 1e-8);
            assert!(current_flow_bound_check(&g, &r) <= 1.0 + 1e-8);
            let cg = solve_harmonic_with(&g, g.root(), y, Solver::ConjugateGradient).unwrap();
            for (a, b) in r.potential.iter().zip(&cg) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn reciprocity() {
    let g = build_z2_box(4, 1.0, 1.0).unwrap();
    for (x, y) in [(1, 0), (3, -2), (4, 4)] {
        let v = g.site(x, y).unwrap();
        let forward = effective_resistance(&g, g.root(), v).unwrap().resistance;
        let backward = effective_resistance(&g, v, g.root()).unwrap().resistance;
        assert!((forward - backward).abs() < 1e-10);
    }
}

#[test]
fn monotone_in_box_size() {
    for (x, y) in [(1, 0), (2, 0), (2, 2), (3, 1)] {
        let mut prev = 0.0;
        for n in 3..=8 {
            let g = build_z2_box(n, 1.0, 1.0).unwrap();
            let r = effective_resistance(&g, g.root(), g.site(x, y).unwrap()).unwrap().resistance;
            assert!(r >= prev - 1e-12, "y=({x},{y}) N={n}: {r} < {prev}");
            prev = r;
        }
    }
}

#[test]
fn nash_williams_lower_bound() {
    for n in 2..=8 {
        let g = build_z2_box(n, 1.0, 1.0).unwrap();
        for v in g.vertices() {
            let Some(m) = g.sup_norm(v) else { continue };
            if m < 2 {
                continue;
            }
            let r = effective_resistance(&g, g.root(), v).unwrap().resistance;
            assert!(r >= nash_williams_sum(m).unwrap(), "N={n} {v:?}");
        }
    }
    let ratio = nash_williams_sum(1000).unwrap() / 1000f64.ln();
    assert!((ratio - 0.125).abs() < 0.1 * 0.125, "{ratio}");
}

#[test]
fn plan_on_boxes() {
    for n in 3..=5 {
        let g = build_z2_box(n, 1.0, 1.0).unwrap();
        for (x, y) in [(2, 0), (3, 0), (2, 2)] {
            let Some(v) = g.site(x, y) else { continue };
            let plan = build_plan(&g, v, 0.5, 1.0).unwrap();
            assert!((plan.s + 1.0 / plan.q - 1.0).abs() < 1e-15);
            assert!(plan.gamma_tilde <= 1.0 / (2.0 * plan.q * plan.q));
            assert!(plan.hypothesis <= 0.5);
            // the per-edge bound sits below the W̄ form
            let lemma = plan.lemma_exponent(&g).exp();
            assert!(lemma <= plan.bound() * (1.0 + 1e-12));
            let expect = (-plan.resistance * 0.25 / 64.0).exp();
            assert!((plan.bound() - expect).abs() < 1e-15);
        }
    }
    // the W̄ check uses the lattice conductances, not the merged boundary ones
    let g = build_z2_box(3, 2.0, 0.5).unwrap();
    assert!(build_plan(&g, g.site(1, 0).unwrap(), 0.5, 2.0).is_ok());
    assert!(build_plan(&g, g.site(1, 0).unwrap(), 0.5, 1.9).is_err());
}

#[test]
fn taylor_grid_scan() {
    let mut checked = 0;
    for i in 1..=400 {
        let q = 1.0 + 9.0 * i as f64 / 400.0;
        for j in 0..=200 {
            // x = γt ranges over the admissible interval, boundary included
            let x = (2.0 * j as f64 / 200.0 - 1.0) * 0.5 / (q * q);
            let c = taylor_remainder_check(q, 1.0, x).unwrap();
            assert!(c.holds, "q={q} x={x}: {:?}", c);
            assert!(c.first_order.abs() < 1e-12);
            checked += 1;
        }
    }
    assert_eq!(checked, 400 * 201);
    let c = taylor_remainder_check(2.0, 1.0, 0.125).unwrap();
    assert!(c.remainder.abs() <= 0.125 && c.quadratic == 0.125);
}

fn random_connected(rng: &mut ChaCha8Rng, n: usize) -> Graph {
    let mut b = GraphBuilder::new(n);
    for i in 1..n {
        b.add_edge(i, rng.random_range(0..i), rng.random_range(0.1..5.0)).unwrap();
    }
    for _ in 0..rng.random_range(0..5) {
        let (a, c) = (rng.random_range(0..n), rng.random_range(0..n));
        if a != c {
            b.add_edge(a, c, rng.random_range(0.1..5.0)).unwrap();
        }
    }
    b.build().unwrap()
}

#[test]
fn convexity_on_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let grid: Vec<f64> = (-20..=20).map(|k| k as f64 * 0.1).collect();
    let mut worst = f64::INFINITY;
    for _ in 0..100 {
        let n = rng.random_range(2..=5);
        let g = random_connected(&mut rng, n);
        let mut u: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        u[0] = 0.0;
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let r = convexity_check(&g, &u, &v, &grid).unwrap();
        worst = worst.min(r.min_second_difference);
        assert!(r.variance_mismatch.unwrap() < 1e-6);
    }
    assert!(worst >= -1e-8, "{worst}");
}

#[test]
fn triangle_variance_identity() {
    let g = Graph::complete(3, 1.0).unwrap();
    let u = [0.0, 0.4, -0.7];
    let v = [0.0, 1.0, 0.0];
    // the three arborescences towards 0: {1→0, 2→0}, {1→0, 2→1}, {2→0, 1→2}
    let weights = [(-u[1] - u[2]), (-u[2]), (-u[1])].map(f64::exp);
    let z: f64 = weights.iter().sum();
    // Σ_T ∇v: tree 1 has 1→0 (−1), 2→0 (0); tree 2 has 1→0 (−1), 2→1 (+1); tree 3 has 2→0 (0), 1→2 (−1)
    let x = [-1.0, 0.0, -1.0];
    let mean: f64 = weights.iter().zip(&x).map(|(w, x)| w * x).sum::<f64>() / z;
    let var: f64 = weights.iter().zip(&x).map(|(w, x)| w * (x - mean).powi(2)).sum::<f64>() / z;
    let trees = arborescence::enumerate(&g).unwrap();
    let (_, enumerated) = arborescence::gradient_sum_moments(&g, &trees, &u, &v);
    assert!((enumerated - var).abs() < 1e-14);
    let fd = deformation::second_derivative(&g, &u, &v, 0.0).unwrap();
    assert!((fd - var).abs() < 1e-6, "{fd} vs {var}");
    let r = convexity_check(&g, &u, &v, &[-0.5, 0.0, 0.5]).unwrap();
    assert!(r.variance_mismatch.unwrap() < 1e-6);
}
