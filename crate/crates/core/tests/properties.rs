use std::collections::BTreeMap;

use proptest::prelude::*;
use pwgraph::shannon::generic_line_constants;
use pwgraph::{
    band_map, chain_constants, dirichlet_eigenvalue, exact_frame_bounds, frame_bounds, frame_reconstruct, generators,
    integer_constants, partition_constants, poincare_forward_check, psi, reverse_check, sampling_frame_vectors,
    shannon_demo, spectral_geometry_report, two_set_constants, vanishing_signal, Exponent, Graph, GraphSignal, Partition, PwProjector,
    ReconstructOptions, Signal, SpectralDecomposition, SubsetChain, VertexSet, WeightedGraph,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_graph(rng: &mut ChaCha8Rng, n: usize) -> Graph {
    generators::random_connected(n, rng.gen_range(0.0..0.3), 0.05, 4.0, rng)
}

fn random_signal(rng: &mut ChaCha8Rng, n: usize) -> GraphSignal {
    Signal::new((0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect())
}

fn random_subset(rng: &mut ChaCha8Rng, n: usize, max: usize) -> VertexSet {
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(rng);
    let size = rng.gen_range(1..=max.clamp(1, n));
    VertexSet::new(ids.into_iter().take(size))
}

/// Random seed set, extended greedily until every outside vertex has a
/// neighbour inside, so that `K0 > 0`. Proper subset for connected `n >= 2`.
fn dominating_subset(rng: &mut ChaCha8Rng, g: &Graph) -> VertexSet {
    let n = g.len();
    let mut inside = vec![false; n];
    for v in random_subset(rng, n, (n / 4).max(1)).iter() {
        if !g.neighbors(v).iter().any(|&(u, _)| inside[u]) {
            inside[v] = true;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for v in order {
        if !inside[v] && !g.neighbors(v).iter().any(|&(u, _)| inside[u]) {
            inside[v] = true;
        }
    }
    VertexSet::new((0..n).filter(|&v| inside[v]))
}

/// Random graph with random vertex weights.
fn weighted_graph(rng: &mut ChaCha8Rng, n: usize) -> Graph {
    let g = random_graph(rng, n);
    let nu = (0..g.len()).map(|_| rng.gen_range(0.25..4.0)).collect();
    g.with_vertex_weights(nu).unwrap()
}

fn close(x: f64, y: f64, rel: f64) -> bool {
    (x - y).abs() <= rel * x.abs().max(y.abs()).max(1.0)
}

fn exponent(code: u8) -> f64 {
    [1.0, 1.5, 2.0, 3.0, 4.5][code as usize % 5]
}

/// The graph with vertex `v` moved to position `perm[v]`.
fn permuted(g: &Graph, perm: &[usize]) -> Graph {
    let mut names = vec![String::new(); g.len()];
    for v in 0..g.len() {
        names[perm[v]] = g.name(v).to_string();
    }
    let edges: Vec<(usize, usize, f64)> = g.edges().map(|(u, v, w)| (perm[u], perm[v], w)).collect();
    let base = WeightedGraph::from_index_edges(names, &edges).unwrap();
    let mut nu = vec![0.0; g.len()];
    for v in 0..g.len() {
        nu[perm[v]] = g.vertex_weight(v);
    }
    base.with_vertex_weights(nu).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn laplacian_symmetric_and_positive(seed in any::<u64>(), n in 2usize..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = weighted_graph(&mut rng, n);
        let (f, h) = (random_signal(&mut rng, n), random_signal(&mut rng, n));
        let lf = g.apply_laplacian(&f).unwrap();
        let lh = g.apply_laplacian(&h).unwrap();
        prop_assert!(close(f.dot(&lh), lf.dot(&h), 1e-12));
        prop_assert!(f.dot(&lf) >= -1e-12);
    }

    #[test]
    fn quadratic_form_is_half_gradient_square(seed in any::<u64>(), n in 2usize..50, scale in 0.01f64..100.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, n);
        let f = random_signal(&mut rng, n).scaled(scale);
        let q = g.laplacian_quadratic_form(&f).unwrap();
        let grad = g.weighted_gradient_norm(&f, Exponent::Finite(2.0)).unwrap();
        prop_assert!((2.0 * q - grad * grad).abs() <= 1e-10 * f.norm2().powi(2).max(1.0));
    }

    #[test]
    fn norms_are_positively_homogeneous(seed in any::<u64>(), n in 2usize..30, c in 0.0f64..50.0, code in 0u8..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = weighted_graph(&mut rng, n);
        let f = random_signal(&mut rng, n);
        let p = if code == 5 { Exponent::Infinity } else { Exponent::Finite(exponent(code)) };
        let cf = f.scaled(c);
        prop_assert!(close(g.lp_norm(&cf, p).unwrap(), c * g.lp_norm(&f, p).unwrap(), 1e-12));
        prop_assert!(close(g.weighted_gradient_norm(&cf, p).unwrap(), c * g.weighted_gradient_norm(&f, p).unwrap(), 1e-12));
    }

    #[test]
    fn subset_weight_is_additive(seed in any::<u64>(), n in 3usize..30) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, n);
        let mut ids: Vec<usize> = (0..n).collect();
        ids.shuffle(&mut rng);
        let cut = rng.gen_range(0..=n);
        let a = VertexSet::new(ids[..cut].iter().copied());
        let b = VertexSet::new(ids[cut..].iter().copied().filter(|_| rng.gen_bool(0.7)).collect::<Vec<_>>());
        for v in 0..n {
            let sum = g.subset_weight(&a, v).unwrap() + g.subset_weight(&b, v).unwrap();
            prop_assert!(close(g.subset_weight(&a.union(&b), v).unwrap(), sum, 1e-12));
        }
        prop_assert!(close(g.subset_weight(&g.all_vertices(), 0).unwrap(), g.degree(0), 1e-12));
    }

    #[test]
    fn forward_and_reverse_inequalities(seed in any::<u64>(), n in 3usize..40, code in 0u8..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = weighted_graph(&mut rng, n);
        let s0 = random_subset(&mut rng, n, n / 3);
        let part = Partition::closure(&g, &s0).unwrap();
        let chain = SubsetChain::closure_prefix(&g, &s0).unwrap();
        let p = exponent(code);
        let f = random_signal(&mut rng, n).scaled(rng.gen_range(0.01..100.0));
        let fwd = poincare_forward_check(&g, &part, &f, p).unwrap();
        prop_assert!(fwd.passed, "{:?}", fwd);
        let rev = reverse_check(&g, &chain, &f, p).unwrap();
        prop_assert!(rev.passed, "{:?}", rev);
    }

    #[test]
    fn closure_shells_are_attached(seed in any::<u64>(), n in 2usize..50) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, n);
        let s0 = random_subset(&mut rng, n, n / 2);
        let part = Partition::closure(&g, &s0).unwrap();
        let shells = part.shells();
        let total: usize = shells.iter().map(VertexSet::len).sum();
        prop_assert_eq!(total, n);
        for m in 1..shells.len() {
            for v in shells[m].iter() {
                prop_assert!(g.subset_weight(&shells[m - 1], v).unwrap() > 0.0);
            }
        }
    }

    #[test]
    fn constants_invariant_under_relabelling(seed in any::<u64>(), n in 3usize..30, code in 0u8..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = weighted_graph(&mut rng, n);
        let s0 = random_subset(&mut rng, n, n / 3);
        let part = Partition::closure(&g, &s0).unwrap();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let h = permuted(&g, &perm);
        let shells = part.shells().iter().map(|s| s.iter().map(|v| perm[v]).collect()).collect();
        let hpart = Partition::new(&h, shells).unwrap();
        let p = Exponent::Finite(exponent(code));
        let a = partition_constants(&g, &part, p).unwrap();
        let b = partition_constants(&h, &hpart, p).unwrap();
        prop_assert!(close(a.delta.unwrap(), b.delta.unwrap(), 1e-12));
        prop_assert!(close(a.a.unwrap(), b.a.unwrap(), 1e-12));
    }

    #[test]
    fn shell_constants_invariant_under_joint_scaling(seed in any::<u64>(), n in 3usize..30, c in 0.01f64..100.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = weighted_graph(&mut rng, n);
        let s0 = random_subset(&mut rng, n, n / 3);
        let part = Partition::closure(&g, &s0).unwrap();
        let chain = SubsetChain::from_partition(&part);
        let p = Exponent::Finite(2.0);
        let (a, b) = (partition_constants(&g, &part, p).unwrap(), partition_constants(&g.rescaled(c), &part, p).unwrap());
        for (x, y) in a.d.iter().zip(&b.d).chain(a.k.iter().zip(&b.k)) {
            prop_assert!(close(*x, *y, 1e-12));
        }
        let (a, b) = (chain_constants(&g, &chain, p).unwrap(), chain_constants(&g.rescaled(c), &chain, p).unwrap());
        for (x, y) in a.dhat.iter().zip(&b.dhat).chain(a.khat.iter().zip(&b.khat)) {
            prop_assert!(close(*x, *y, 1e-12));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn eigendecomposition_reproduces_laplacian(seed in any::<u64>(), n in 1usize..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, n);
        let dec = SpectralDecomposition::decompose(&g).unwrap();
        let f = random_signal(&mut rng, n);
        let c = dec.coefficients(&f).unwrap();
        let idx: Vec<usize> = (0..n).collect();
        let lc: Vec<f64> = c.iter().zip(dec.eigenvalues()).map(|(c, l)| c * l).collect();
        let spectral = dec.synthesize(&idx, &lc);
        let direct = g.apply_laplacian(&f).unwrap();
        prop_assert!(spectral.sub(&direct).norm2() <= 1e-8 * direct.norm2().max(1.0));
        prop_assert!(dec.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(dec.eigenvalue(0).abs() <= 1e-9);
    }

    #[test]
    fn projector_properties(seed in any::<u64>(), n in 2usize..35, t in 0.0f64..1.0, t2 in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, n);
        let dec = SpectralDecomposition::decompose(&g).unwrap();
        let (lo, hi) = if t <= t2 { (t, t2) } else { (t2, t) };
        let top = dec.largest();
        let (omega, omega2) = (lo * top, hi * top);
        let pw = PwProjector::new(&dec, omega).unwrap();
        let pw2 = PwProjector::new(&dec, omega2).unwrap();
        let (f, h) = (random_signal(&mut rng, n), random_signal(&mut rng, n));
        let pf = pw.project(&f).unwrap();
        let ph = pw.project(&h).unwrap();
        prop_assert!(pf.norm2() <= f.norm2() + 1e-12);
        prop_assert!(pw.project(&pf).unwrap().sub(&pf).norm2() <= 1e-10);
        prop_assert!((pf.dot(&h) - f.dot(&ph)).abs() <= 1e-10);
        prop_assert!(pw2.project(&pf).unwrap().sub(&pf).norm2() <= 1e-10);
        pw.check_membership(&pf).unwrap();
        let lf = dec.laplacian_power_norm(&pf, 1.0).unwrap();
        let half = dec.laplacian_power_norm(&pf, 0.5).unwrap();
        prop_assert!(lf <= omega * pf.norm2() + 1e-10);
        prop_assert!(half <= omega.sqrt() * pf.norm2() + 1e-10);
        let grad = g.weighted_gradient_norm(&pf, Exponent::Finite(2.0)).unwrap();
        prop_assert!(grad <= (2.0 * omega).sqrt() * pf.norm2() + 1e-9);
    }

    #[test]
    fn dirichlet_eigenvalue_below_rayleigh_quotients(seed in any::<u64>(), n in 2usize..35) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, n);
        let s0 = random_subset(&mut rng, n, n - 1);
        let m = s0.complement(n);
        let lambda = dirichlet_eigenvalue(&g, &m).unwrap();
        prop_assert!(lambda >= 0.0);
        for _ in 0..5 {
            let f = random_signal(&mut rng, n).restricted(&m);
            let rq = g.laplacian_quadratic_form(&f).unwrap() / f.norm2().powi(2);
            prop_assert!(lambda <= rq + 1e-10);
        }
    }

    #[test]
    fn lambda_k_and_count_bounds(seed in any::<u64>(), n in 3usize..35) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, n);
        let dec = SpectralDecomposition::decompose(&g).unwrap();
        let s0 = random_subset(&mut rng, n, n - 1);
        let part = Partition::closure(&g, &s0).unwrap();
        let r = spectral_geometry_report(&g, &dec, &part, None).unwrap();
        prop_assert!(r.passed, "{:?}", r);
        let delta = r.delta;
        for k in s0.len()..n {
            prop_assert!(dec.eigenvalue(k) >= 1.0 / (2.0 * delta * delta) - 1e-9);
        }
    }

    #[test]
    fn frame_sandwich_and_uniqueness(seed in any::<u64>(), n in 3usize..30, t in 0.0f64..0.999) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, n);
        let dec = SpectralDecomposition::decompose(&g).unwrap();
        let s0 = dominating_subset(&mut rng, &g);
        let omega = t * two_set_constants(&g, &s0).unwrap().k0 / 2.0;
        let bounds = frame_bounds(&g, &s0, omega).unwrap();
        let pw = PwProjector::new(&dec, omega).unwrap();
        let f = pw.random_signal(&mut rng);
        let nf2 = f.norm2().powi(2);
        let theta = sampling_frame_vectors(&dec, omega, &s0).unwrap();
        let frame_sum: f64 = theta.values().map(|th| f.dot(th).powi(2)).sum();
        prop_assert!(bounds.a * nf2 <= frame_sum + 1e-9 * nf2.max(1.0));
        prop_assert!(frame_sum <= bounds.b * nf2 + 1e-9 * nf2.max(1.0));
        let exact = exact_frame_bounds(&dec, omega, &s0).unwrap();
        prop_assert!(bounds.a <= exact.lambda_min + 1e-9 && exact.lambda_max <= bounds.b + 1e-9);
        prop_assert!(exact.lambda_min > 0.0);
        prop_assert!(vanishing_signal(&dec, omega, &s0).unwrap().is_none());
    }

    #[test]
    fn frame_operator_self_adjoint_psd(seed in any::<u64>(), n in 3usize..30, t in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, n);
        let dec = SpectralDecomposition::decompose(&g).unwrap();
        let s0 = random_subset(&mut rng, n, n - 1);
        let omega = t * dec.largest();
        let pw = PwProjector::new(&dec, omega).unwrap();
        let theta = sampling_frame_vectors(&dec, omega, &s0).unwrap();
        let apply = |f: &GraphSignal| {
            let mut out = Signal::zeros(n);
            for th in theta.values() {
                out.axpy(f.dot(th), th);
            }
            out
        };
        let (f, h) = (pw.random_signal(&mut rng), pw.random_signal(&mut rng));
        prop_assert!((apply(&f).dot(&h) - f.dot(&apply(&h))).abs() <= 1e-10);
        prop_assert!(apply(&f).dot(&f) >= -1e-12);
    }

    #[test]
    fn reconstruction_error_bounds(seed in any::<u64>(), n in 3usize..30, t in 0.0f64..0.95, r in 0.05f64..0.999) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, n);
        let dec = SpectralDecomposition::decompose(&g).unwrap();
        let s0 = dominating_subset(&mut rng, &g);
        let omega = t * two_set_constants(&g, &s0).unwrap().k0 / 2.0;
        let bounds = frame_bounds(&g, &s0, omega).unwrap();
        let f = PwProjector::new(&dec, omega).unwrap().random_signal(&mut rng);
        let samples: BTreeMap<usize, f64> = s0.iter().map(|v| (v, f.get(v))).collect();
        let nf = f.norm2();

        let opts = ReconstructOptions { max_iter: 60, tol: 0.0, ..Default::default() };
        let trace = frame_reconstruct(&dec, &bounds, &samples, &opts, Some(&f)).unwrap();
        for (i, e) in trace.errors.as_ref().unwrap().iter().enumerate() {
            prop_assert!(*e <= bounds.eta.powi(i as i32) * nf * (1.0 + 1e-9) + 1e-12);
        }

        let exact = exact_frame_bounds(&dec, omega, &s0).unwrap();
        let best = 2.0 / (exact.lambda_min + exact.lambda_max);
        if best < bounds.relaxation_max {
            let opts = ReconstructOptions { relaxation: Some(best), max_iter: 60, tol: 0.0 };
            let trace = frame_reconstruct(&dec, &bounds, &samples, &opts, Some(&f)).unwrap();
            for (i, e) in trace.errors.as_ref().unwrap().iter().enumerate() {
                prop_assert!(*e <= exact.eta().powi(i as i32) * nf * (1.0 + 1e-9) + 1e-12);
            }
        }

        let opts = ReconstructOptions { relaxation: Some(r * bounds.relaxation_max), max_iter: 60, tol: 0.0 };
        let trace = frame_reconstruct(&dec, &bounds, &samples, &opts, Some(&f)).unwrap();
        let errors = trace.errors.unwrap();
        prop_assert!(errors.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9) + 1e-13), "{:?}", errors);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn band_map_and_psi_are_inverse(xi in 0.0f64..=std::f64::consts::PI, omega in 0.0f64..=2.0) {
        prop_assert!((psi(band_map(xi).unwrap().sqrt()).unwrap() - xi).abs() <= 1e-7);
        prop_assert!((band_map(psi(omega).unwrap()).unwrap().sqrt() - omega).abs() <= 1e-12);
    }

    #[test]
    fn shannon_identity_and_graph_sandwich(half_k in 1usize..6, periods in 2usize..12, t in 0.0f64..=1.0, seed in any::<u64>()) {
        let k = 2 * half_k + 1;
        let omega = t * std::f64::consts::PI / k as f64;
        let r = shannon_demo::<f64>(k, omega, periods, seed).unwrap();
        if r.shannon_identity.alias_free {
            prop_assert!(r.shannon_identity.error <= 1e-8, "{:?}", r.shannon_identity);
        }
        prop_assert!(r.graph_bounds.passed != Some(false), "{:?}", r.graph_bounds);
        prop_assert!(r.passed);
    }

    #[test]
    fn graph_lower_bound_decreasing(half_k in 1usize..6, a in 0.0f64..0.05, b in 0.0f64..0.05) {
        let k = 2 * half_k + 1;
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let lower = |k: usize, omega: f64| shannon_demo::<f64>(k, omega, 3, 0).unwrap().graph_bounds.lower;
        prop_assert!(lower(k, hi) <= lower(k, lo) + 1e-15);
        prop_assert!(lower(k + 2, lo) <= lower(k, lo) + 1e-15);
    }
}

#[test]
fn closed_form_line_constants_match_generic() {
    for k in [3, 5, 7, 9] {
        let closed = integer_constants::<f64>(k).unwrap();
        for m in 3..=8 {
            let generic = generic_line_constants::<f64>(k, m).unwrap();
            assert_eq!(closed.n, generic.n, "k = {k}, m = {m}");
            for (x, y) in [
                (closed.delta, generic.delta),
                (closed.a, generic.a),
                (closed.delta_hat, generic.delta_hat),
                (closed.a_hat, generic.a_hat),
            ] {
                assert!(close(x, y, 1e-12), "k = {k}, m = {m}: {closed:?} vs {generic:?}");
            }
        }
    }
}
