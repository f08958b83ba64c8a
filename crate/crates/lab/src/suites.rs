//! Verification suites run by `verify`. Each returns one [`Check`] per
//! invariant and instance.

use rand_like::Uniform;
use vrjp_core::deformation::{self, build_plan, effective_resistance, nash_williams_sum};
use vrjp_core::field::{self, TiltedWeights};
use vrjp_core::graph::build_z2_box;
use vrjp_core::quadrature::{self, QuadratureOptions, TabulatedCdf};
use vrjp_core::sampler::{estimate_exp_moment, Chain, SamplerConfig};
use vrjp_core::stats;
use vrjp_core::vrjp::{self, JumpChainLaw};
use vrjp_core::{arborescence, Graph, GraphBuilder, Vertex};

use crate::config::{Suite, VerifySection};
use crate::parallel;
use crate::report::{Check, Status};

/// Smallest effective sample size for a Monte Carlo verdict.
pub const ESS_MIN: f64 = 400.0;

/// Inputs shared by all suites.
#[derive(Clone, Debug)]
pub struct SuiteContext {
    pub seed: u64,
    pub opts: VerifySection,
}

impl SuiteContext {
    fn sampler(&self, stream: u64) -> SamplerConfig {
        SamplerConfig {
            samples: self.opts.samples,
            chains: self.opts.chains,
            burn_in: self.opts.burn_in,
            seed: self.seed.wrapping_add(stream.wrapping_mul(0x9e37_79b9_7f4a_7c15)),
            ..SamplerConfig::default()
        }
    }
}

pub fn run(suite: Suite, ctx: &SuiteContext) -> anyhow::Result<Vec<Check>> {
    let suites: &[Suite] = match suite {
        Suite::All => &[
            Suite::Density,
            Suite::Moments,
            Suite::Tilt,
            Suite::Convexity,
            Suite::Taylor,
            Suite::Mixture,
            Suite::Deformation,
        ],
        ref one => core::slice::from_ref(one),
    };
    let mut out = Vec::new();
    for s in suites {
        out.extend(match s {
            Suite::Density => density(ctx)?,
            Suite::Moments => moments(ctx)?,
            Suite::Tilt => tilt(ctx)?,
            Suite::Convexity => convexity(ctx)?,
            Suite::Taylor => taylor(),
            Suite::Mixture => mixture(ctx)?,
            Suite::Deformation => deformation(ctx)?,
            Suite::All => unreachable!(),
        });
    }
    Ok(out)
}

mod rand_like {
    use rand_chacha::ChaCha8Rng;
    use vrjp_core::rng;

    /// Uniform draws from one random stream.
    pub struct Uniform(ChaCha8Rng);

    impl Uniform {
        pub fn new(seed: u64, stream: u64) -> Self {
            Self(rng::stream_rng(seed, stream))
        }

        pub fn real(&mut self, lo: f64, hi: f64) -> f64 {
            lo + (hi - lo) * rng::unit_open(&mut self.0)
        }

        pub fn index(&mut self, n: usize) -> usize {
            ((rng::unit_open(&mut self.0) * n as f64) as usize).min(n - 1)
        }
    }
}

/// A connected graph on 2..=5 vertices (random tree plus extra edges), a
/// pinned field and a test direction vanishing at the root.
pub struct RandomInstance {
    pub graph: Graph,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

fn random_instance(rng: &mut Uniform) -> RandomInstance {
    let n = 2 + rng.index(4);
    let mut b = GraphBuilder::new(n);
    for i in 1..n {
        b.add_edge(i, rng.index(i), rng.real(0.1, 5.0)).unwrap();
    }
    for _ in 0..rng.index(5) {
        let (a, c) = (rng.index(n), rng.index(n));
        if a != c {
            b.add_edge(a, c, rng.real(0.1, 5.0)).unwrap();
        }
    }
    let graph = b.build().expect("spanning tree keeps the graph connected");
    let mut u: Vec<f64> = (0..n).map(|_| rng.real(-3.0, 3.0)).collect();
    let mut v: Vec<f64> = (0..n).map(|_| rng.real(-1.5, 1.5)).collect();
    u[0] = 0.0;
    v[0] = 0.0;
    RandomInstance { graph, u, v }
}

fn weighted_triangle() -> Graph {
    let mut b = GraphBuilder::new(3);
    b.add_edge(0, 1, 0.7).unwrap();
    b.add_edge(1, 2, 1.6).unwrap();
    b.add_edge(0, 2, 1.1).unwrap();
    b.build().unwrap()
}

fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

pub fn density(ctx: &SuiteContext) -> anyhow::Result<Vec<Check>> {
    let mut out = Vec::new();
    let opts = QuadratureOptions::default();
    for w in [0.2, 1.0, 5.0] {
        let cases = [
            ("two_vertex", Graph::two_vertex(w)?, 1e-6),
            ("path3", Graph::path(3, w)?, 1e-4),
            ("triangle", Graph::complete(3, w)?, 1e-4),
        ];
        for (name, g, tol) in cases {
            let total = quadrature::normalization(&g, &opts)?.value;
            let gap = (total - 1.0).abs();
            out.push(Check::new("density", "total mass is one", format!("{name} W={w}"), total, 1.0, tol, gap <= tol));
        }
    }
    let mut rng = Uniform::new(ctx.seed, 1);
    let mut worst: f64 = 0.0;
    for _ in 0..ctx.opts.instances.max(200) {
        let inst = random_instance(&mut rng);
        let trees = arborescence::enumerate(&inst.graph)?;
        let enumerated = arborescence::log_tree_polynomial(&inst.graph, &trees, &inst.u).exp();
        let det = field::tree_polynomial(&inst.graph, &inst.u)?.exp();
        worst = worst.max(relative_gap(det, enumerated));
    }
    out.push(Check::new(
        "density",
        "determinant equals arborescence sum",
        format!("{} random graphs, <= 5 vertices", ctx.opts.instances.max(200)),
        worst,
        0.0,
        1e-10,
        worst <= 1e-10,
    ));
    Ok(out)
}

fn moment_check(suite: &str, name: &str, instance: String, est: &vrjp_core::sampler::MomentEstimate, target: f64) -> Check {
    let se = est.stderr.unwrap_or(f64::NAN);
    let mut c = Check::new(suite, name, instance, est.estimate, target, 3.0 * se, (est.estimate - target).abs() <= 3.0 * se);
    if est.ess.is_none_or(|e| e < ESS_MIN) {
        c.status = Status::Inconclusive;
    }
    c
}

pub fn moments(ctx: &SuiteContext) -> anyhow::Result<Vec<Check>> {
    let mut out = Vec::new();
    let opts = QuadratureOptions::default();
    for w in [0.2, 1.0, 5.0] {
        let g = Graph::two_vertex(w)?;
        let m = quadrature::exp_moment_identity_oracle(&g, Vertex(1), &opts)?;
        out.push(Check::new("moments", "E[e^u_y] = 1 by quadrature", format!("two_vertex W={w}"), m, 1.0, 1e-6, (m - 1.0).abs() <= 1e-6));
    }

    let tri = Graph::complete(3, 1.0)?;
    let (set, _) = parallel::sample(&tri, &ctx.sampler(10))?;
    let est = estimate_exp_moment(&set, &tri, Vertex(1), 1.0)?;
    out.push(moment_check("moments", "E[e^u_y] = 1 by Monte Carlo", "triangle W=1 y=1".into(), &est, 1.0));

    let b = build_z2_box(3, 1.0, 1.0)?;
    let (set, _) = parallel::sample(&b, &ctx.sampler(11))?;
    for (x, y) in [(1, 0), (2, 2)] {
        let v = b.site(x, y).unwrap();
        let est = estimate_exp_moment(&set, &b, v, 1.0)?;
        out.push(moment_check("moments", "E[e^u_y] = 1 by Monte Carlo", format!("box N=3 y=({x},{y})"), &est, 1.0));
        let half = estimate_exp_moment(&set, &b, v, 0.5)?;
        let se = half.stderr.unwrap_or(f64::NAN);
        let mut c = Check::new(
            "moments",
            "E[e^{s u_y}] <= 1 (Jensen)",
            format!("box N=3 y=({x},{y}) s=0.5"),
            half.estimate,
            1.0,
            3.0 * se,
            half.estimate <= 1.0 + 3.0 * se,
        );
        c.status = Status::upper_bound(half.estimate, half.stderr, half.ess, 1.0, ESS_MIN);
        out.push(c);
    }

    // marginal law of the sampler on two vertices against the tabulated CDF
    let g = Graph::two_vertex(1.0)?;
    let (set, _) = parallel::sample(&g, &ctx.sampler(12))?;
    let mut xs: Vec<f64> = set.iter().map(|u| u[1]).collect();
    xs.sort_by(f64::total_cmp);
    let cdf = TabulatedCdf::two_vertex(&g, 40.0, 1e-3)?;
    let ks = stats::ks_distance(&xs, |x| cdf.eval(x));
    out.push(Check::new("moments", "sampler marginal matches quadrature (KS)", "two_vertex W=1", ks, 0.02, 0.0, ks < 0.02));

    // incremental ln D against a fresh factorization after every sweep
    let b2 = build_z2_box(2, 1.0, 1.0)?;
    let cfg = SamplerConfig { refresh: 1, burn_in: 0, seed: ctx.seed, ..SamplerConfig::default() };
    let mut chain = Chain::new(&b2, &cfg, 0)?;
    let mut drift: f64 = 0.0;
    for _ in 0..300 {
        chain.sweep()?;
        drift = drift.max(chain.refresh()?);
    }
    out.push(Check::new("moments", "incremental ln D drift per sweep", "box N=2, 300 sweeps", drift, 1e-8, 0.0, drift < 1e-8));

    let small = SamplerConfig { samples: 2_000, chains: 2, burn_in: 100, seed: ctx.seed, ..SamplerConfig::default() };
    let (a, _) = parallel::sample(&b2, &small)?;
    let (c, _) = parallel::sample(&b2, &small)?;
    let same = a.chains.iter().flatten().zip(c.chains.iter().flatten()).all(|(x, y)| x.to_bits() == y.to_bits());
    out.push(Check::new("moments", "bit-identical rerun", "box N=2", f64::from(u8::from(same)), 1.0, 0.0, same));
    Ok(out)
}

pub fn tilt(ctx: &SuiteContext) -> anyhow::Result<Vec<Check>> {
    let mut out = Vec::new();
    let mut rng = Uniform::new(ctx.seed, 2);
    let mut worst: f64 = 0.0;
    let mut min_ratio = f64::INFINITY;
    for _ in 0..ctx.opts.instances {
        let inst = random_instance(&mut rng);
        let gamma = rng.real(-1.5, 1.5);
        let shifted: Vec<f64> = inst.u.iter().zip(&inst.v).map(|(a, b)| a + gamma * b).collect();
        let expect = field::log_density(&inst.graph, &inst.u)? - field::log_density(&inst.graph, &shifted)?;
        let got = field::rn_ratio(&inst.graph, &inst.u, &inst.v, gamma)?;
        worst = worst.max((got - expect).abs() / (1.0 + expect.abs()));

        let q = rng.real(1.0001, 5.0);
        let max_grad = inst.graph.edges().iter().map(|e| (inst.v[e.b.0] - inst.v[e.a.0]).abs()).fold(0.0, f64::max);
        if max_grad > 0.0 {
            let g = rng.real(0.0, 1.0) * 0.5 / (q * q * max_grad);
            min_ratio = min_ratio.min(TiltedWeights::new(&inst.graph, &inst.v, q, g)?.min_ratio(&inst.graph));
        }
    }
    out.push(Check::new(
        "tilt",
        "ln dQ/dQ^gamma equals density difference",
        format!("{} random instances", ctx.opts.instances),
        worst,
        0.0,
        1e-10,
        worst <= 1e-10,
    ));
    out.push(Check::new("tilt", "tilted conductances >= W/2", "random instances under q^2 gamma |grad v| <= 1/2", min_ratio, 0.5, 0.0, min_ratio >= 0.5));

    let w = 1.3;
    let g = Graph::two_vertex(w)?;
    let v = [0.0, 1.0];
    let mut worst: f64 = 0.0;
    for (u, gamma) in [(0.2f64, 0.5f64), (-1.0, -0.25), (2.0, 1.5), (-3.0, 0.75)] {
        let closed = 0.5 * w * (u.exp() * gamma.exp_m1() + (-u).exp() * (-gamma).exp_m1()) + 0.5 * gamma;
        worst = worst.max((field::rn_ratio(&g, &[0.0, u], &v, gamma)? - closed).abs());
    }
    out.push(Check::new("tilt", "two-vertex closed form", "W=1.3", worst, 0.0, 1e-10, worst <= 1e-10));

    let opts = QuadratureOptions::default();
    for gamma in [-0.8, 0.25, 1.0] {
        let m = quadrature::integrate(&g, |u| u[1] - field::rn_ratio(&g, u, &v, gamma).unwrap_or(f64::INFINITY), &opts)?.value;
        let expect = (-gamma as f64).exp();
        out.push(Check::new(
            "tilt",
            "E^{Q^gamma}[e^u_y] = e^-gamma",
            format!("two_vertex W=1.3 gamma={gamma}"),
            m,
            expect,
            1e-6,
            (m - expect).abs() <= 1e-6,
        ));
    }
    Ok(out)
}

pub fn convexity(ctx: &SuiteContext) -> anyhow::Result<Vec<Check>> {
    let mut out = Vec::new();
    let mut rng = Uniform::new(ctx.seed, 3);
    let grid: Vec<f64> = (-20..=20).map(|k| k as f64 * 0.1).collect();
    let mut min_diff = f64::INFINITY;
    for _ in 0..ctx.opts.instances {
        let inst = random_instance(&mut rng);
        let r = deformation::convexity_check(&inst.graph, &inst.u, &inst.v, &grid)?;
        min_diff = min_diff.min(r.min_second_difference);
    }
    out.push(Check::new(
        "convexity",
        "gamma -> ln D(u + gamma v) is convex",
        format!("{} random instances", ctx.opts.instances),
        min_diff,
        -1e-8,
        0.0,
        min_diff >= -1e-8,
    ));
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let mut b = GraphBuilder::new(3);
        for (a, c) in [(0, 1), (1, 2), (0, 2)] {
            b.add_edge(a, c, rng.real(0.1, 5.0))?;
        }
        let g = b.build()?;
        let u = [0.0, rng.real(-2.0, 2.0), rng.real(-2.0, 2.0)];
        let v = [0.0, rng.real(-1.0, 1.0), rng.real(-1.0, 1.0)];
        let r = deformation::convexity_check(&g, &u, &v, &[-0.5, 0.0, 0.5])?;
        worst = worst.max(r.variance_mismatch.expect("triangles are enumerated"));
    }
    out.push(Check::new("convexity", "second derivative equals tree variance", "20 random triangles", worst, 0.0, 1e-6, worst <= 1e-6));
    Ok(out)
}

/// Scan of `q ∈ (1, 10]` and `x = γt` over `q²|x| ≤ ½`, boundary included.
pub fn taylor_scan(q_points: usize, x_points: usize) -> (usize, usize, f64) {
    let mut violations = 0;
    let mut points = 0;
    let mut worst_ratio: f64 = 0.0;
    for i in 1..=q_points {
        let q = 1.0 + 9.0 * i as f64 / q_points as f64;
        for j in 0..=x_points {
            let x = (2.0 * j as f64 / x_points as f64 - 1.0) * 0.5 / (q * q);
            let c = deformation::taylor_remainder_check(q, 1.0, x).expect("grid stays admissible");
            points += 1;
            if !c.holds || c.first_order.abs() > 1e-12 {
                violations += 1;
            }
            if c.quadratic > 0.0 {
                worst_ratio = worst_ratio.max(c.remainder.abs() / c.quadratic);
            }
        }
    }
    (violations, points, worst_ratio)
}

pub fn taylor() -> Vec<Check> {
    let (violations, points, ratio) = taylor_scan(400, 400);
    vec![
        Check::new("taylor", "|remainder| <= 2 q^2 x^2 <= 1/2", format!("{points} grid points"), violations as f64, 0.0, 0.0, violations == 0),
        Check::new("taylor", "largest |remainder| / (2 q^2 x^2)", "same grid", ratio, 1.0, 0.0, ratio <= 1.0),
    ]
}

fn law_check(name: &str, instance: String, a: &JumpChainLaw, b: &JumpChainLaw) -> Check {
    let (tv, err) = vrjp::total_variation(a, b);
    Check::new("mixture", name, instance, tv, 3.0 * err, 0.0, tv < 3.0 * err)
}

fn exact_first_jump(g: &Graph, start: Vertex) -> JumpChainLaw {
    let total: f64 = g.neighbors(start).iter().map(|n| n.conductance).sum();
    let entries = g.neighbors(start).iter().map(|n| (vec![n.vertex.0], (n.conductance / total, 0.0))).collect();
    JumpChainLaw { start, horizon: 1, entries, samples: None }
}

pub fn mixture(ctx: &SuiteContext) -> anyhow::Result<Vec<Check>> {
    let mut out = Vec::new();
    let g = weighted_triangle();
    let first = parallel::vrjp_law(&g, Vertex(0), 1, ctx.opts.vrjp_runs.min(200_000), ctx.seed)?;
    out.push(law_check("first jump law proportional to W", "weighted triangle".into(), &first, &exact_first_jump(&g, Vertex(0))));

    let tri = Graph::complete(3, 1.0)?;
    let direct = parallel::vrjp_law(&tri, tri.root(), 3, ctx.opts.vrjp_runs, ctx.seed.wrapping_add(1))?;
    let (fields, _) = parallel::sample(&tri, &ctx.sampler(20))?;
    let mixed = vrjp::quenched_mixture_law(&tri, tri.root(), 3, &fields)?;
    out.push(law_check(
        "VRJP jump chain equals quenched mixture (TV < 3 sigma)",
        format!("triangle W=1 k=3, {} runs, {} fields", ctx.opts.vrjp_runs, fields.len()),
        &direct,
        &mixed,
    ));
    Ok(out)
}

pub fn deformation(ctx: &SuiteContext) -> anyhow::Result<Vec<Check>> {
    let mut out = Vec::new();
    let p = effective_resistance(&Graph::path(3, 1.0)?, Vertex(0), Vertex(2))?;
    out.push(Check::new("deformation", "path resistance", "0-1-2", p.resistance, 2.0, 1e-10, (p.resistance - 2.0).abs() <= 1e-10));
    let c = effective_resistance(&Graph::cycle(4, 1.0)?, Vertex(0), Vertex(2))?;
    out.push(Check::new("deformation", "4-cycle resistance", "opposite corners", c.resistance, 1.0, 1e-10, (c.resistance - 1.0).abs() <= 1e-10));

    let mut nw_margin = f64::INFINITY;
    let mut max_current: f64 = 0.0;
    let mut max_residual: f64 = 0.0;
    let mut boxes = 0;
    for n in 2..=6 {
        let g = build_z2_box(n, 1.0, 1.0)?;
        for v in g.vertices() {
            let Some(m) = g.sup_norm(v) else { continue };
            if m == 0 {
                continue;
            }
            let r = effective_resistance(&g, g.root(), v)?;
            max_current = max_current.max(deformation::current_flow_bound_check(&g, &r));
            max_residual = max_residual.max(r.interior_residual);
            if m >= 2 {
                nw_margin = nw_margin.min(r.resistance - nash_williams_sum(m)?);
            }
            boxes += 1;
        }
    }
    let inst = format!("boxes N=2..6, {boxes} targets");
    out.push(Check::new("deformation", "R(0,y) >= Nash-Williams sum", inst.clone(), nw_margin, 0.0, 0.0, nw_margin >= 0.0));
    out.push(Check::new("deformation", "current flow R|grad v| <= 1", inst.clone(), max_current, 1.0, 1e-8, max_current <= 1.0 + 1e-8));
    out.push(Check::new("deformation", "harmonic residual", inst, max_residual, 0.0, 1e-10, max_residual < 1e-10));

    // the per-edge bound on the triangle, target next to the root
    let tri = Graph::complete(3, 1.0)?;
    let plan = build_plan(&tri, Vertex(1), 0.5, 1.0)?;
    let (set, _) = parallel::sample(&tri, &ctx.sampler(30))?;
    let est = estimate_exp_moment(&set, &tri, Vertex(1), 0.5)?;
    out.push(bound_check("E[e^{s u_y}] <= exp(-gamma s + gamma^2 q^2 sum (W+1)|grad v|^2)", "triangle W=1 y=1 s=0.5".into(), &est, plan.lemma_exponent(&tri).exp()));

    for n in 3..=5 {
        let g = build_z2_box(n, 1.0, 1.0)?;
        let (set, _) = parallel::sample(&g, &ctx.sampler(30 + n as u64))?;
        for (x, y) in [(2, 0), (3, 0), (2, 2)] {
            let v = g.site(x, y).unwrap();
            let plan = build_plan(&g, v, 0.5, 1.0)?;
            let est = estimate_exp_moment(&set, &g, v, 0.5)?;
            let inst = format!("box N={n} y=({x},{y}) s=0.5 Wbar=1 R={:.6}", plan.resistance);
            out.push(bound_check("E[e^{s u_y}] <= exp(-R s^2/(8 q^2 (Wbar+1)))", inst.clone(), &est, plan.bound()));
            out.push(bound_check("E[e^{s u_y}] <= exp(-gamma s + gamma^2 q^2 sum (W+1)|grad v|^2)", inst, &est, plan.lemma_exponent(&g).exp()));
        }
    }
    Ok(out)
}

fn bound_check(name: &str, instance: String, est: &vrjp_core::sampler::MomentEstimate, bound: f64) -> Check {
    let se = est.stderr.unwrap_or(f64::NAN);
    let mut c = Check::new("deformation", name, instance, est.estimate, bound, 3.0 * se, est.estimate <= bound + 3.0 * se);
    c.status = Status::upper_bound(est.estimate, est.stderr, est.ess, bound, ESS_MIN);
    c
}
