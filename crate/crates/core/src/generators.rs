//! Standard graph families with unit vertex weights.

use rand::Rng;

use crate::graph::{GraphBuilder, WeightedGraph};
use crate::scalar::Real;

fn name(i: usize) -> String {
    format!("v{i}")
}

/// Star with centre `v0` and leaves `v1..=vN`, unit edge weights.
pub fn star<T: Real>(leaves: usize) -> WeightedGraph<T> {
    let mut b = GraphBuilder::new();
    b.add_vertex(&name(0));
    for i in 1..=leaves {
        b.add_edge(&name(0), &name(i), T::one()).expect("valid star edge");
    }
    b.build()
}

/// Path `v0 - v1 - ... - v{n-1}`.
pub fn path<T: Real>(n: usize) -> WeightedGraph<T> {
    let mut b = GraphBuilder::new();
    for i in 0..n {
        b.add_vertex(&name(i));
    }
    for i in 1..n {
        b.add_edge(&name(i - 1), &name(i), T::one()).expect("valid path edge");
    }
    b.build()
}

/// Cycle `v0 - v1 - ... - v{n-1} - v0`. Requires `n >= 3`.
pub fn cycle<T: Real>(n: usize) -> WeightedGraph<T> {
    assert!(n >= 3, "cycle needs at least 3 vertices");
    let mut b = GraphBuilder::new();
    for i in 0..n {
        b.add_vertex(&name(i));
    }
    for i in 0..n {
        b.add_edge(&name(i), &name((i + 1) % n), T::one()).expect("valid cycle edge");
    }
    b.build()
}

/// Wheel: hub `v0` joined to every vertex of the rim cycle `v1..=vN`.
pub fn wheel<T: Real>(rim: usize) -> WeightedGraph<T> {
    assert!(rim >= 3, "wheel rim needs at least 3 vertices");
    let mut b = GraphBuilder::new();
    b.add_vertex(&name(0));
    for i in 1..=rim {
        b.add_vertex(&name(i));
    }
    for i in 1..=rim {
        let next = if i == rim { 1 } else { i + 1 };
        b.add_edge(&name(i), &name(next), T::one()).expect("valid rim edge");
    }
    for i in 1..=rim {
        b.add_edge(&name(0), &name(i), T::one()).expect("valid spoke edge");
    }
    b.build()
}

/// Connected random graph: a random spanning tree plus independent extra edges
/// with probability `edge_prob`; weights uniform in `[w_min, w_max]`.
pub fn random_connected<T: Real, R: Rng + ?Sized>(
    n: usize,
    edge_prob: f64,
    w_min: f64,
    w_max: f64,
    rng: &mut R,
) -> WeightedGraph<T> {
    let mut b = GraphBuilder::new();
    for i in 0..n {
        b.add_vertex(&name(i));
    }
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        order.swap(i, j);
    }
    let mut present = std::collections::HashSet::new();
    let weight = |rng: &mut R| T::lit(rng.gen_range(w_min..=w_max));
    for i in 1..n {
        let u = order[i];
        let v = order[rng.gen_range(0..i)];
        present.insert((u.min(v), u.max(v)));
        b.add_edge(&name(u), &name(v), weight(rng)).expect("fresh tree edge");
    }
    for u in 0..n {
        for v in u + 1..n {
            if !present.contains(&(u, v)) && rng.gen_bool(edge_prob) {
                b.add_edge(&name(u), &name(v), weight(rng)).expect("fresh random edge");
            }
        }
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn shapes() {
        let s = star::<f64>(10);
        assert_eq!((s.len(), s.edge_count()), (11, 10));
        let w = wheel::<f64>(10);
        assert_eq!((w.len(), w.edge_count()), (11, 20));
        assert_eq!(w.degree(0), 10.0);
        assert_eq!(w.degree(1), 3.0);
        let c = cycle::<f64>(5);
        assert!((0..5).all(|v| c.degree(v) == 2.0));
        assert_eq!(path::<f64>(4).edge_count(), 3);
    }

    #[test]
    fn random_graph_is_connected() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let g = random_connected::<f64, _>(15, 0.2, 0.1, 2.0, &mut rng);
            assert!(g.is_connected());
            assert!(g.edges().all(|(_, _, w)| (0.1..=2.0).contains(&w)));
        }
    }
}
